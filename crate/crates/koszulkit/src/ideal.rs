//! Closed ideals in truncated noncommutative power series, the filtration
//! `N` by degree, associated graded algebras and dual coalgebra slices.
//!
//! Everything lives in the coordinate space of words of degree `<= D` in
//! degree-first order. An echelon basis of `J mod N^{D+1}` then has its
//! pivots at the lowest-degree word of each row, so the rows with pivot in
//! degree `>= n` span `J` intersected with `N^n`.

use std::collections::HashMap;

use thiserror::Error;

use crate::dg::{cobar_map, cohomology, Cobar, DgAlgebra};
use crate::exactlin::{kernel_basis, sparse, Echelon, Field, Matrix, QuotientBasis, Scalar, Solver, SparseVec, Subspace};
use crate::ncalg::{words_below, words_of_degree, Alphabet, NCPoly, NcError, Word};
use crate::present::Presentation;
use crate::quad::{graded_quotient, homogeneous_ideal, FinGradedAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error("slice level {0} exceeds the truncation {1}")]
    LevelTooLarge(usize, usize),
    #[error("relation does not have the shape [x,y] + (terms of degree >= 3): {0}")]
    WrongShape(String),
    #[error("not a subcoalgebra: {0}")]
    NotSubcoalgebra(String),
    #[error("{0}")]
    Invariant(String),
}

/// `J mod N^{D+1}` for the ideal generated by a presentation's relations.
#[derive(Clone, Debug)]
pub struct IdealSlices {
    field: Field,
    ngens: usize,
    trunc: usize,
    ech: Echelon,
    /// pivots per degree
    pivot_count: Vec<usize>,
}

impl IdealSlices {
    pub fn new(p: &Presentation) -> Self {
        let g = p.ngens();
        let d = p.trunc;
        let field = p.field;
        let mut ech = Echelon::new(field, words_below(d + 1, g));
        for r in &p.relations {
            let low = r.lowest_degree().unwrap_or(d + 1);
            let terms: Vec<(Word, Scalar)> = r.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
            for total in 0..=d.saturating_sub(low) {
                for a in 0..=total {
                    let b = total - a;
                    for wl in 0..words_of_degree(a, g) {
                        let left = Word::from_index(wl, a, g);
                        for wr in 0..words_of_degree(b, g) {
                            let right = Word::from_index(wr, b, g);
                            let v: SparseVec = sparse::collect(
                                terms
                                    .iter()
                                    .filter(|(w, _)| w.degree() + total <= d)
                                    .map(|(w, c)| (left.concat(w).concat(&right).global_index(g), c.clone()))
                                    .collect(),
                            );
                            ech.insert(&v);
                        }
                    }
                }
            }
        }
        ech.finish();
        let mut pivot_count = vec![0; d + 1];
        for &pv in ech.pivots() {
            pivot_count[Word::from_global_index(pv, g).degree()] += 1;
        }
        IdealSlices { field, ngens: g, trunc: d, ech, pivot_count }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    /// `(J cap N^n) mod N^{D+1}` inside the space of all words of degree `<= D`.
    pub fn cumulative(&self, n: usize) -> Subspace {
        let start = words_below(n, self.ngens);
        Subspace::span(
            self.field,
            self.ech.ncols(),
            self.ech.rows().iter().filter(|r| r[0].0 >= start),
        )
    }

    /// `gr^m J` in degree-`m` word coordinates.
    pub fn gr_component(&self, m: usize) -> Echelon {
        let g = self.ngens;
        let lo = words_below(m, g);
        let hi = words_below(m + 1, g);
        let mut e = Echelon::new(self.field, words_of_degree(m, g));
        for r in self.ech.rows() {
            if r[0].0 >= lo && r[0].0 < hi {
                let v: SparseVec = r.iter().filter(|(c, _)| *c < hi).map(|(c, x)| (c - lo, x.clone())).collect();
                e.insert(&v);
            }
        }
        e.finish();
        e
    }

    pub fn gr_dims(&self) -> Vec<usize> {
        (0..=self.trunc)
            .map(|m| words_of_degree(m, self.ngens) - self.pivot_count[m])
            .collect()
    }

    /// Global indices of normal words (non-pivots) of degree `<= m`.
    pub fn normal_words(&self, m: usize) -> Vec<usize> {
        (0..words_below(m + 1, self.ngens)).filter(|&c| !self.ech.is_pivot(c)).collect()
    }

    /// Normal form of `f` modulo `J`, supported on normal words.
    pub fn reduce(&self, f: &NCPoly) -> Result<NCPoly, IdealError> {
        self.check(f)?;
        let r = self.ech.reduce(&f.to_global());
        Ok(NCPoly::from_global(self.field, self.ngens, self.trunc, &r))
    }

    pub fn reduce_vec(&self, v: &[(usize, Scalar)]) -> SparseVec {
        self.ech.reduce(v)
    }

    pub fn contains(&self, f: &NCPoly) -> Result<bool, IdealError> {
        Ok(self.reduce(f)?.is_zero())
    }

    fn check(&self, f: &NCPoly) -> Result<(), IdealError> {
        if f.truncation() != self.trunc {
            return Err(NcError::TruncationMismatch(f.truncation(), self.trunc).into());
        }
        if f.ngens() != self.ngens {
            return Err(NcError::AlphabetMismatch(f.ngens(), self.ngens).into());
        }
        Ok(())
    }

    /// `gr_N A` up to degree `D`.
    pub fn gr_algebra(&self) -> FinGradedAlgebra {
        let comps: Vec<Echelon> = (0..=self.trunc).map(|m| self.gr_component(m)).collect();
        graded_quotient(self.field, self.ngens, &comps)
    }
}

pub fn ideal_slices(p: &Presentation) -> IdealSlices {
    IdealSlices::new(p)
}

pub fn gr_algebra(p: &Presentation) -> FinGradedAlgebra {
    IdealSlices::new(p).gr_algebra()
}

/// Degree components of the ideal generated by the lowest-degree forms.
fn leading_ideal(p: &Presentation) -> Vec<Echelon> {
    let forms: Vec<(usize, SparseVec)> = p
        .relations
        .iter()
        .map(|r| {
            let n = r.lowest_degree().unwrap_or(0);
            (n, r.degree_component(n).unwrap())
        })
        .collect();
    homogeneous_ideal(p.field, p.ngens(), &forms, p.trunc)
}

/// `A-bar`: the algebra on the lowest-degree forms of the relations.
pub fn leading_algebra(p: &Presentation) -> FinGradedAlgebra {
    graded_quotient(p.field, p.ngens(), &leading_ideal(p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelfConsistency {
    Consistent { up_to: usize },
    Inconsistent { degree: usize, witness: NCPoly },
}

#[derive(Clone, Debug)]
pub struct SelfConsistencyReport {
    pub verdict: SelfConsistency,
    /// `dim A-bar^m` for `m <= D`
    pub leading_dims: Vec<usize>,
    /// `dim gr^m A` for `m <= D`
    pub gr_dims: Vec<usize>,
}

/// Compares the algebra of leading forms with `gr_N A` degree by degree.
/// The witness is the first row of `gr^m J` left nonzero after reduction
/// modulo the leading ideal.
pub fn self_consistency(p: &Presentation) -> Result<SelfConsistencyReport, IdealError> {
    let slices = IdealSlices::new(p);
    self_consistency_with(p, &slices)
}

pub fn self_consistency_with(p: &Presentation, slices: &IdealSlices) -> Result<SelfConsistencyReport, IdealError> {
    let lead = leading_ideal(p);
    let g = p.ngens();
    let leading_dims: Vec<usize> = lead.iter().enumerate().map(|(n, e)| words_of_degree(n, g) - e.rank()).collect();
    let gr_dims = slices.gr_dims();
    for m in 0..=p.trunc {
        if gr_dims[m] > leading_dims[m] {
            return Err(IdealError::Invariant(format!("gr^{m} larger than the leading-form algebra")));
        }
        if m <= 3 && gr_dims[m] != leading_dims[m] && p.relations.iter().all(|r| r.lowest_degree() == Some(2)) {
            return Err(IdealError::Invariant(format!("comparison map not bijective in degree {m}")));
        }
        if gr_dims[m] < leading_dims[m] {
            let comp = slices.gr_component(m);
            for row in comp.rows() {
                let r = lead[m].reduce(row);
                if !r.is_empty() {
                    let witness = NCPoly::from_component(p.field, g, p.trunc, m, &r);
                    return Ok(SelfConsistencyReport {
                        verdict: SelfConsistency::Inconsistent { degree: m, witness },
                        leading_dims,
                        gr_dims,
                    });
                }
            }
            return Err(IdealError::Invariant(format!("no witness found in degree {m}")));
        }
    }
    Ok(SelfConsistencyReport { verdict: SelfConsistency::Consistent { up_to: p.trunc }, leading_dims, gr_dims })
}

pub fn ideal_membership(p: &Presentation, f: &NCPoly) -> Result<bool, IdealError> {
    IdealSlices::new(p).contains(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Commutativity {
    Commutative,
    Noncommutative { pair: (usize, usize), residue: NCPoly },
}

pub fn commutativity_check(p: &Presentation) -> Result<Commutativity, IdealError> {
    commutativity_with(p, &IdealSlices::new(p))
}

pub fn commutativity_with(p: &Presentation, slices: &IdealSlices) -> Result<Commutativity, IdealError> {
    for i in 0..p.ngens() {
        for j in i + 1..p.ngens() {
            let c = p.generator(i).commutator(&p.generator(j))?;
            let residue = slices.reduce(&c)?;
            if !residue.is_zero() {
                return Ok(Commutativity::Noncommutative { pair: (i, j), residue });
            }
        }
    }
    Ok(Commutativity::Commutative)
}

/// A finite coaugmented coalgebra with a basis adapted to its coaugmentation
/// filtration. Basis element 0 is the coaugmentation `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraSlice {
    pub field: Field,
    /// weight of each basis element; `N_j` is spanned by elements of weight `<= j`
    pub weights: Vec<usize>,
    /// `Delta(c_w)` as `(u, v, coefficient)` triples, including `1 (x) c` and `c (x) 1`
    pub delta: Vec<Vec<(usize, usize, Scalar)>>,
    /// display names of basis elements
    pub labels: Vec<String>,
    /// true when `Delta` preserves weight exactly
    pub graded: bool,
}

impl CoalgebraSlice {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn max_weight(&self) -> usize {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    /// Reduced comultiplication of `c_w` with both factors in `C_+`.
    pub fn reduced_delta(&self, w: usize) -> impl Iterator<Item = &(usize, usize, Scalar)> {
        self.delta[w].iter().filter(|(u, v, _)| *u != 0 && *v != 0)
    }

    /// `N_j` as a subspace.
    pub fn filtration(&self, j: usize) -> Subspace {
        let f = self.field;
        Subspace::span(
            f,
            self.dim(),
            (0..self.dim()).filter(|&i| self.weights[i] <= j).map(|i| vec![(i, f.one())]),
        )
    }

    /// Apply `Delta` to a vector; result indexed `u * dim + v`.
    pub fn delta_vec(&self, x: &[(usize, Scalar)]) -> SparseVec {
        let n = self.dim();
        let mut entries = Vec::new();
        for (w, a) in x {
            for (u, v, c) in &self.delta[*w] {
                entries.push((u * n + v, a * c));
            }
        }
        sparse::collect(entries)
    }

    /// Coassociativity, counit and filtration compatibility on the basis.
    pub fn check(&self) -> Result<(), String> {
        let n = self.dim();
        let f = self.field;
        for w in 0..n {
            // counit: (eps (x) 1) Delta = id = (1 (x) eps) Delta
            let left: SparseVec =
                sparse::collect(self.delta[w].iter().filter(|t| t.0 == 0).map(|t| (t.1, t.2.clone())).collect());
            let right: SparseVec =
                sparse::collect(self.delta[w].iter().filter(|t| t.1 == 0).map(|t| (t.0, t.2.clone())).collect());
            let id = vec![(w, f.one())];
            if left != id || right != id {
                return Err(format!("counit fails on basis element {w}"));
            }
            // (Delta (x) 1) Delta = (1 (x) Delta) Delta, indexed (a*n + b)*n + c
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for (u, v, c) in &self.delta[w] {
                for (a, b, e) in &self.delta[*u] {
                    lhs.push(((a * n + b) * n + v, c * e));
                }
                for (a, b, e) in &self.delta[*v] {
                    rhs.push(((u * n + a) * n + b, c * e));
                }
            }
            if sparse::collect(lhs) != sparse::collect(rhs) {
                return Err(format!("coassociativity fails on basis element {w}"));
            }
            for (u, v, _) in &self.delta[w] {
                if self.weights[*u] + self.weights[*v] > self.weights[w] {
                    return Err(format!("Delta raises the filtration on basis element {w}"));
                }
            }
        }
        if self.weights.first() != Some(&0) || self.weights.iter().skip(1).any(|&x| x == 0) {
            return Err("coaugmentation is not the only weight-0 element".into());
        }
        Ok(())
    }

    /// The trivial coalgebra `k`.
    pub fn ground(field: Field) -> Self {
        CoalgebraSlice {
            field,
            weights: vec![0],
            delta: vec![vec![(0, 0, field.one())]],
            labels: vec!["1".into()],
            graded: true,
        }
    }

    /// Graded dual of a connected graded algebra, weights = degrees.
    pub fn dual_of_graded(h: &FinGradedAlgebra, labels: Option<Vec<String>>) -> Self {
        let top = h.top();
        let mut offset = vec![0; top + 2];
        for n in 0..=top {
            offset[n + 1] = offset[n] + h.dim(n);
        }
        let total = offset[top + 1];
        let mut weights = Vec::with_capacity(total);
        for n in 0..=top {
            weights.extend(std::iter::repeat_n(n, h.dim(n)));
        }
        let mut delta: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); total];
        for i in 0..=top {
            for j in 0..=top - i {
                for a in 0..h.dim(i) {
                    for b in 0..h.dim(j) {
                        for (c, x) in h.basis_product(i, a, j, b) {
                            delta[offset[i + j] + c].push((offset[i] + a, offset[j] + b, x));
                        }
                    }
                }
            }
        }
        for d in &mut delta {
            d.sort_by_key(|t| (t.0, t.1));
        }
        let labels = labels.unwrap_or_else(|| {
            (0..=top)
                .flat_map(|n| (0..h.dim(n)).map(move |a| if n == 0 { "1".to_string() } else { format!("c{n}_{a}") }))
                .collect()
        });
        CoalgebraSlice { field: h.field(), weights, delta, labels, graded: true }
    }

    /// Truncated tensor coalgebra on `g` letters with deconcatenation, weights `<= m`.
    pub fn tensor(field: Field, g: usize, m: usize, alphabet: Option<&Alphabet>) -> Self {
        let total = words_below(m + 1, g);
        let mut delta = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut labels = Vec::with_capacity(total);
        for idx in 0..total {
            let w = Word::from_global_index(idx, g);
            weights.push(w.degree());
            labels.push(label(&w, alphabet));
            let mut d = Vec::new();
            for k in 0..=w.degree() {
                let u = Word(w.0[..k].to_vec());
                let v = Word(w.0[k..].to_vec());
                d.push((u.global_index(g), v.global_index(g), field.one()));
            }
            delta.push(d);
        }
        CoalgebraSlice { field, weights, delta, labels, graded: true }
    }
}

fn label(w: &Word, alphabet: Option<&Alphabet>) -> String {
    match alphabet {
        Some(a) => w.render(a),
        None => format!("{:?}", w.0),
    }
}

/// The coalgebra `N_m C = (A / N^{m+1} A)^*` together with its embedding
/// into the truncated tensor coalgebra `N_m F`.
#[derive(Clone, Debug)]
pub struct DualSlice {
    pub coalgebra: CoalgebraSlice,
    /// global word index of each basis element
    pub words: Vec<usize>,
    /// images of basis elements in `N_m F` (global word coordinates)
    pub embedding: Vec<SparseVec>,
}

pub fn dual_coalgebra_slice(p: &Presentation, m: usize) -> Result<DualSlice, IdealError> {
    dual_slice_with(p, &IdealSlices::new(p), m)
}

pub fn dual_slice_with(p: &Presentation, slices: &IdealSlices, m: usize) -> Result<DualSlice, IdealError> {
    if m > p.trunc {
        return Err(IdealError::LevelTooLarge(m, p.trunc));
    }
    let g = p.ngens();
    let field = p.field;
    let normal = slices.normal_words(m);
    let pos: HashMap<usize, usize> = normal.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let limit = words_below(m + 1, g);
    let words_of: Vec<Word> = normal.iter().map(|&w| Word::from_global_index(w, g)).collect();
    let mut delta: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); normal.len()];
    for (iu, u) in words_of.iter().enumerate() {
        for (iv, v) in words_of.iter().enumerate() {
            if u.degree() + v.degree() > m {
                continue;
            }
            let uv = u.concat(v).global_index(g);
            for (c, x) in slices.reduce_vec(&[(uv, field.one())]) {
                if c < limit {
                    delta[pos[&c]].push((iu, iv, x));
                }
            }
        }
    }
    for d in &mut delta {
        d.sort_by_key(|t| (t.0, t.1));
    }
    // c_u -> sum over words w of reduce(w)[u] f_w
    let mut embedding: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); normal.len()];
    for w in 0..limit {
        for (c, x) in slices.reduce_vec(&[(w, field.one())]) {
            if c < limit {
                embedding[pos[&c]].push((w, x));
            }
        }
    }
    let graded = p.is_homogeneous();
    let coalgebra = CoalgebraSlice {
        field,
        weights: words_of.iter().map(Word::degree).collect(),
        delta,
        labels: words_of.iter().map(|w| label(w, Some(&p.alphabet))).collect(),
        graded,
    };
    Ok(DualSlice { coalgebra, words: normal, embedding })
}

/// `gr^N C` up to weight `m`: the graded dual of `gr_N A`.
pub fn gr_coalgebra_slice(p: &Presentation, slices: &IdealSlices, m: usize) -> CoalgebraSlice {
    let gr = slices.gr_algebra().truncate(m);
    let g = p.ngens();
    let labels: Vec<String> = (0..=gr.top())
        .flat_map(|n| {
            let comp = slices.gr_component(n);
            (0..words_of_degree(n, g))
                .filter(move |&c| !comp.is_pivot(c))
                .map(move |c| Word::from_index(c, n, g))
                .collect::<Vec<_>>()
        })
        .map(|w| w.render(&p.alphabet))
        .collect();
    CoalgebraSlice::dual_of_graded(&gr, Some(labels))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homogenization {
    NotHomogenizable { residue: NCPoly },
    Inconclusive,
}

/// Reduces a single `[x,y] + ...` relation modulo degree `>= 4` and every
/// word containing one of the first two generators.
pub fn homogenization_obstruction(p: &Presentation) -> Result<Homogenization, IdealError> {
    if p.relations.len() != 1 || p.ngens() < 2 {
        return Err(IdealError::WrongShape("expected one relation in at least two generators".into()));
    }
    let r = &p.relations[0];
    let br = p.generator(0).commutator(&p.generator(1))?;
    let q2 = r.homogeneous_part(2);
    let c = q2.coefficient(&Word(vec![0, 1]));
    if c.is_zero() || q2 != br.scale(&c) {
        return Err(IdealError::WrongShape(r.render(&p.alphabet)));
    }
    let residue = NCPoly::from_terms(
        p.field,
        p.ngens(),
        p.trunc,
        r.terms()
            .filter(|(w, _)| w.degree() == 3 && w.0.iter().all(|&l| l >= 2))
            .map(|(w, c)| (w.clone(), c.clone())),
    );
    Ok(if residue.is_zero() { Homogenization::Inconclusive } else { Homogenization::NotHomogenizable { residue } })
}

/// Checks that `embedding` is an injective coaugmented coalgebra map `C -> Dc`.
pub fn check_subcoalgebra(c: &CoalgebraSlice, dc: &CoalgebraSlice, embedding: &[SparseVec]) -> Result<(), IdealError> {
    let n = dc.dim();
    let f = c.field;
    if embedding.len() != c.dim() || embedding.first() != Some(&vec![(0, f.one())]) {
        return Err(IdealError::NotSubcoalgebra("coaugmentation is not preserved".into()));
    }
    for x in 0..c.dim() {
        let mut image = Vec::new();
        for (u, v, k) in &c.delta[x] {
            for (a, s) in &embedding[*u] {
                for (b, r) in &embedding[*v] {
                    image.push((a * n + b, &(k * s) * r));
                }
            }
        }
        if sparse::collect(image) != dc.delta_vec(&embedding[x]) {
            return Err(IdealError::NotSubcoalgebra(format!("Delta is not preserved on {}", c.labels[x])));
        }
    }
    if Subspace::span(f, n, embedding.iter().cloned()).dim() != c.dim() {
        return Err(IdealError::NotSubcoalgebra("embedding is not injective".into()));
    }
    Ok(())
}

/// `R(C, Dc)`: classes of `Dc / C` on which both reduced coactions vanish.
#[derive(Clone, Debug)]
pub struct CorelationSpace {
    /// preimage of `R` in `Dc`; contains the image of `C`
    pub kernel: Subspace,
    pub classes: QuotientBasis,
    /// weight of each class, from minimal-weight representatives
    pub weights: Vec<usize>,
}

impl CorelationSpace {
    pub fn dim(&self) -> usize {
        self.classes.dim()
    }

    pub fn filtration_dim(&self, w: usize) -> usize {
        self.weights.iter().filter(|&&x| x <= w).count()
    }
}

pub fn corelation_space(
    c: &CoalgebraSlice,
    dc: &CoalgebraSlice,
    embedding: &[SparseVec],
) -> Result<CorelationSpace, IdealError> {
    check_subcoalgebra(c, dc, embedding)?;
    let f = dc.field;
    let n = dc.dim();
    let mut sub = Echelon::new(f, n);
    for v in embedding {
        sub.insert(v);
    }
    let q = |i: usize| sub.reduce(&[(i, f.one())]);
    let mut cols = Vec::with_capacity(n);
    for x in 0..n {
        let mut entries = Vec::new();
        for (u, v, k) in &dc.delta[x] {
            if *u != 0 {
                for (r, s) in q(*v) {
                    entries.push((u * n + r, k * &s));
                }
            }
            if *v != 0 {
                for (r, s) in q(*u) {
                    entries.push((n * n + r * n + v, k * &s));
                }
            }
        }
        cols.push(sparse::collect(entries));
    }
    // basis of Dc is sorted by weight, so kernel vectors have minimal weight
    let kernel_vecs = kernel_basis(&Matrix::from_columns(f, 2 * n * n, &cols));
    let mut classes = QuotientBasis::new(f, n, embedding, std::iter::empty::<SparseVec>());
    let mut weights = Vec::new();
    for v in &kernel_vecs {
        if classes.push(v) {
            weights.push(v.iter().map(|(i, _)| dc.weights[*i]).max().unwrap_or(0));
        }
    }
    Ok(CorelationSpace { kernel: Subspace::span(f, n, kernel_vecs), classes, weights })
}

/// Exactness of `0 -> H^1(C) -> H^1(Dc) -> R(C,Dc) -> H^2(C) -> H^2(Dc)`,
/// computed in cobar weight `<= w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiveTermReport {
    pub window: usize,
    /// `H^1(C), H^1(Dc), R, H^2(C), H^2(Dc)`
    pub dims: [usize; 5],
    /// ranks of the four maps
    pub ranks: [usize; 4],
    /// the three consecutive composites vanish
    pub composites_zero: [bool; 3],
    pub exact: bool,
}

pub fn five_term_check(
    c: &CoalgebraSlice,
    dc: &CoalgebraSlice,
    embedding: &[SparseVec],
    w: usize,
) -> Result<FiveTermReport, IdealError> {
    let f = c.field;
    if w < dc.max_weight() {
        return Err(IdealError::Invariant(format!("window {w} below the slice weight {}", dc.max_weight())));
    }
    let r = corelation_space(c, dc, embedding)?;
    let ca = Cobar::new(c, w, 3);
    let cb = Cobar::new(dc, w, 3);
    let dg = |e: crate::dg::DgError| IdealError::Invariant(e.to_string());
    let h1c = cohomology(&ca, 1).map_err(dg)?;
    let h1d = cohomology(&cb, 1).map_err(dg)?;
    let h2c = cohomology(&ca, 2).map_err(dg)?;
    let h2d = cohomology(&cb, 2).map_err(dg)?;
    let missing = || IdealError::Invariant("map leaves its target".into());

    let a1: Vec<SparseVec> = h1c
        .reps
        .iter()
        .map(|v| h1d.coords(&cobar_map(&ca, &cb, embedding, 1, v)).ok_or_else(missing))
        .collect::<Result<_, _>>()?;
    let to_dc = |v: &[(usize, Scalar)]| -> SparseVec {
        sparse::collect(v.iter().map(|(i, x)| (cb.tuple(1, *i)[0] as usize, x.clone())).collect())
    };
    let a2: Vec<SparseVec> = h1d
        .reps
        .iter()
        .map(|v| r.classes.coords(&to_dc(v)).ok_or_else(missing))
        .collect::<Result<_, _>>()?;
    let images: Vec<SparseVec> = (0..ca.dim(2)).map(|i| cobar_map(&ca, &cb, embedding, 2, &[(i, f.one())])).collect();
    let solver = Solver::new(f, cb.dim(2), &images);
    let mut delta = Vec::new();
    for x in r.classes.reps() {
        let mut entries = Vec::new();
        for (i, s) in x {
            for (u, v, k) in dc.reduced_delta(*i) {
                let idx = cb.index_of(&[*u as u32, *v as u32]).ok_or_else(missing)?;
                entries.push((idx, s * k));
            }
        }
        let pre = solver.solve(&sparse::collect(entries)).ok_or_else(missing)?;
        delta.push(h2c.coords(&pre).ok_or_else(missing)?);
    }
    let a4: Vec<SparseVec> = h2c
        .reps
        .iter()
        .map(|v| h2d.coords(&cobar_map(&ca, &cb, embedding, 2, v)).ok_or_else(missing))
        .collect::<Result<_, _>>()?;

    let dims = [h1c.dim(), h1d.dim(), r.dim(), h2c.dim(), h2d.dim()];
    let m1 = Matrix::from_columns(f, dims[1], &a1);
    let m2 = Matrix::from_columns(f, dims[2], &a2);
    let m3 = Matrix::from_columns(f, dims[3], &delta);
    let m4 = Matrix::from_columns(f, dims[4], &a4);
    let ranks = [m1.rank(), m2.rank(), m3.rank(), m4.rank()];
    let composites_zero = [m2.mul(&m1).is_zero(), m3.mul(&m2).is_zero(), m4.mul(&m3).is_zero()];
    let exact = composites_zero.iter().all(|&b| b)
        && ranks[0] == dims[0]
        && dims[1] - ranks[1] == ranks[0]
        && dims[2] - ranks[2] == ranks[1]
        && dims[3] - ranks[3] == ranks[2];
    Ok(FiveTermReport { window: w, dims, ranks, composites_zero, exact })
}

/// The weight filtration on `H^2(C)` next to the one on `R(C, F)`, and the
/// comparison of `N_2 H^2` with the image of `H^1 (x) H^1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorelationReport {
    pub window: usize,
    /// `dim N_m H^2` for `m = 0..=window`
    pub h2_filtration: Vec<usize>,
    /// `dim N_m R(C, F)`
    pub r_filtration: Vec<usize>,
    pub image_m2: usize,
    /// `N_2 H^2` equals the image of the multiplication
    pub n2_is_image: bool,
    /// `N_2 H^2 = H^2`: defined by nonhomogeneous quadratic corelations
    pub quadratic: bool,
    /// filtration dims agree with a run one weight lower
    pub stable: bool,
}

fn h2_data(p: &Presentation, slices: &IdealSlices, w: usize) -> Result<(Vec<usize>, Vec<usize>, usize), IdealError> {
    let ds = dual_slice_with(p, slices, w)?;
    let tensor = CoalgebraSlice::tensor(p.field, p.ngens(), w, Some(&p.alphabet));
    let r = corelation_space(&ds.coalgebra, &tensor, &ds.embedding)?;
    let cob = Cobar::new(&ds.coalgebra, w, 3);
    let dg = |e: crate::dg::DgError| IdealError::Invariant(e.to_string());
    let h1 = cohomology(&cob, 1).map_err(dg)?;
    let h2 = cohomology(&cob, 2).map_err(dg)?;
    let mut cols = Vec::new();
    if w >= 2 {
        for x in &h1.reps {
            for y in &h1.reps {
                let prod = crate::dg::mul_checked(&cob, 1, x, 1, y).map_err(dg)?;
                cols.push(h2.coords(&prod).ok_or_else(|| IdealError::Invariant("product is not a cocycle".into()))?);
            }
        }
    }
    let image = Matrix::from_columns(p.field, h2.dim(), &cols).rank();
    let hf = (0..=w).map(|m| h2.filtration_dim(m)).collect();
    let rf = (0..=w).map(|m| r.filtration_dim(m)).collect();
    Ok((hf, rf, image))
}

pub fn corelation_filtration(p: &Presentation, window: usize) -> Result<CorelationReport, IdealError> {
    corelation_filtration_with(p, &IdealSlices::new(p), window)
}

pub fn corelation_filtration_with(
    p: &Presentation,
    slices: &IdealSlices,
    window: usize,
) -> Result<CorelationReport, IdealError> {
    let (h2_filtration, r_filtration, image_m2) = h2_data(p, slices, window)?;
    for m in 1..h2_filtration.len() {
        if h2_filtration[m] < h2_filtration[m - 1] {
            return Err(IdealError::Invariant("N_m H^2 is not monotone".into()));
        }
    }
    let n2 = h2_filtration.get(2).copied().unwrap_or(0);
    let stable = if window >= 3 {
        let (lower, _, _) = h2_data(p, slices, window - 1)?;
        lower[..] == h2_filtration[..window]
    } else {
        true
    };
    Ok(CorelationReport {
        window,
        n2_is_image: n2 == image_m2,
        quadratic: n2 == *h2_filtration.last().unwrap(),
        h2_filtration,
        r_filtration,
        image_m2,
        stable,
    })
}
