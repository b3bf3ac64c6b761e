//! Finite slices of DG-algebras: cobar constructions of coalgebra slices,
//! cohomology with its weight filtration, cohomology algebras and the bar
//! construction.
//!
//! Sign conventions. In `Cob(C)` a generator `c` has degree 1 and
//! `d c = Delta-bar(c)`; on products `d(c_1...c_n) = sum (-1)^{k-1} c_1..d(c_k)..c_n`.
//! In `Br(A)` a letter `a` has shifted degree `|a|-1`; with
//! `e_i = sum_{j<=i} (|a_j| - 1)`,
//! `d[a_1|...|a_n] = sum (-1)^{e_{i-1}} [..|d a_i|..] + sum (-1)^{e_i} [..|a_i a_{i+1}|..]`.

use std::collections::HashMap;

use thiserror::Error;

use crate::exactlin::{kernel_basis, sparse, Field, Matrix, QuotientBasis, Scalar, SparseVec};
use crate::ideal::CoalgebraSlice;
use crate::quad::FinGradedAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgError {
    #[error("degree {0} is at the edge of the computed window")]
    WindowEdge(usize),
    #[error("product of weights {0} + {1} exceeds the weight bound {2}")]
    WeightTooLarge(usize, usize, usize),
    #[error("{0}")]
    Structure(String),
}

/// A DG-algebra known in cohomological degrees `0..=top` and weights `<= max_weight`.
/// Products are only requested when the weights of the factors fit.
pub trait DgAlgebra {
    fn field(&self) -> Field;
    fn top(&self) -> usize;
    fn max_weight(&self) -> usize;
    fn dim(&self, n: usize) -> usize;
    fn weight(&self, n: usize, i: usize) -> usize;
    /// `d` of basis element `i` of degree `n < top`.
    fn d(&self, n: usize, i: usize) -> SparseVec;
    /// Product of basis elements, degrees `i + j <= top`, weights within bound.
    fn mul(&self, i: usize, a: usize, j: usize, b: usize) -> SparseVec;
    /// True when `d` preserves weight, so truncation by weight splits off.
    fn weight_graded(&self) -> bool;
    fn label(&self, n: usize, i: usize) -> String {
        format!("e{n}_{i}")
    }
}

pub fn apply_d<A: DgAlgebra + ?Sized>(a: &A, n: usize, v: &[(usize, Scalar)]) -> SparseVec {
    let mut acc = Vec::new();
    for (i, x) in v {
        acc = sparse::axpy(&acc, x, &a.d(n, *i));
    }
    acc
}

pub fn mul_vec<A: DgAlgebra + ?Sized>(
    a: &A,
    i: usize,
    x: &[(usize, Scalar)],
    j: usize,
    y: &[(usize, Scalar)],
) -> SparseVec {
    let mut entries = Vec::new();
    for (p, s) in x {
        for (q, t) in y {
            let st = s * t;
            for (c, z) in a.mul(i, *p, j, *q) {
                entries.push((c, &st * &z));
            }
        }
    }
    sparse::collect(entries)
}

/// Largest weight in the support of `v`.
pub fn vec_weight<A: DgAlgebra + ?Sized>(a: &A, n: usize, v: &[(usize, Scalar)]) -> usize {
    v.iter().map(|(i, _)| a.weight(n, *i)).max().unwrap_or(0)
}

/// Weight-checked product of two vectors.
pub fn mul_checked<A: DgAlgebra + ?Sized>(
    a: &A,
    i: usize,
    x: &[(usize, Scalar)],
    j: usize,
    y: &[(usize, Scalar)],
) -> Result<SparseVec, DgError> {
    let (wx, wy) = (vec_weight(a, i, x), vec_weight(a, j, y));
    if wx + wy > a.max_weight() {
        return Err(DgError::WeightTooLarge(wx, wy, a.max_weight()));
    }
    if i + j > a.top() {
        return Err(DgError::WindowEdge(i + j));
    }
    Ok(mul_vec(a, i, x, j, y))
}

/// Matrix of `d: A^n -> A^{n+1}`.
pub fn d_matrix<A: DgAlgebra + ?Sized>(a: &A, n: usize) -> Matrix {
    let cols: Vec<SparseVec> = (0..a.dim(n)).map(|i| a.d(n, i)).collect();
    Matrix::from_columns(a.field(), a.dim(n + 1), &cols)
}

/// The cobar construction of a coalgebra slice, cut to total weight `<= W`
/// and tensor length `<= top`. Basis elements of each degree are sorted by
/// weight, so weight filtration pieces are initial segments.
#[derive(Clone, Debug)]
pub struct Cobar {
    field: Field,
    coalg: CoalgebraSlice,
    wmax: usize,
    top: usize,
    basis: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
    weights: Vec<Vec<usize>>,
}

impl Cobar {
    pub fn new(coalg: &CoalgebraSlice, wmax: usize, top: usize) -> Self {
        let field = coalg.field;
        let plus: Vec<usize> = (1..coalg.dim()).collect();
        let mut basis: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new()]];
        for n in 1..=top {
            let mut next = Vec::new();
            for t in &basis[n - 1] {
                let w: usize = t.iter().map(|&c| coalg.weights[c as usize]).sum();
                for &c in &plus {
                    if w + coalg.weights[c] <= wmax {
                        let mut t2 = t.clone();
                        t2.push(c as u32);
                        next.push(t2);
                    }
                }
            }
            basis.push(next);
        }
        let weight_of = |t: &Vec<u32>| -> usize { t.iter().map(|&c| coalg.weights[c as usize]).sum() };
        for b in &mut basis {
            b.sort_by(|x, y| weight_of(x).cmp(&weight_of(y)).then_with(|| x.cmp(y)));
        }
        let weights: Vec<Vec<usize>> = basis.iter().map(|b| b.iter().map(weight_of).collect()).collect();
        let index = basis
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
            .collect();
        Cobar { field, coalg: coalg.clone(), wmax, top, basis, index, weights }
    }

    /// The complete cobar of a finite slice up to tensor length `top`.
    pub fn full(coalg: &CoalgebraSlice, top: usize) -> Self {
        Cobar::new(coalg, coalg.max_weight() * top.max(1), top)
    }

    pub fn coalgebra(&self) -> &CoalgebraSlice {
        &self.coalg
    }

    pub fn tuple(&self, n: usize, i: usize) -> &[u32] {
        &self.basis[n][i]
    }

    pub fn index_of(&self, t: &[u32]) -> Option<usize> {
        self.index.get(t.len()).and_then(|m| m.get(t).copied())
    }

    /// Image of a vector of `C` (coalgebra coordinates, no unit component) in `Cob^1`.
    pub fn from_coalgebra(&self, v: &[(usize, Scalar)]) -> SparseVec {
        sparse::collect(
            v.iter()
                .filter(|(c, _)| *c != 0)
                .filter_map(|(c, x)| self.index_of(&[*c as u32]).map(|i| (i, x.clone())))
                .collect(),
        )
    }

    /// Element of `Cob^2` from `C (x) C` coordinates `u * dim + v`; unit components dropped.
    pub fn from_tensor2(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let n = self.coalg.dim();
        sparse::collect(
            v.iter()
                .filter(|(k, _)| k / n != 0 && k % n != 0)
                .filter_map(|(k, x)| self.index_of(&[(k / n) as u32, (k % n) as u32]).map(|i| (i, x.clone())))
                .collect(),
        )
    }
}

impl DgAlgebra for Cobar {
    fn field(&self) -> Field {
        self.field
    }
    fn top(&self) -> usize {
        self.top
    }
    fn max_weight(&self) -> usize {
        self.wmax
    }
    fn dim(&self, n: usize) -> usize {
        self.basis.get(n).map_or(0, Vec::len)
    }
    fn weight(&self, n: usize, i: usize) -> usize {
        self.weights[n][i]
    }
    fn d(&self, n: usize, i: usize) -> SparseVec {
        assert!(n < self.top, "d out of the top degree");
        let t = &self.basis[n][i];
        let mut entries = Vec::new();
        for k in 0..t.len() {
            let sign = if k % 2 == 0 { self.field.one() } else { self.field.int(-1) };
            for (u, v, c) in self.coalg.reduced_delta(t[k] as usize) {
                let mut t2 = Vec::with_capacity(t.len() + 1);
                t2.extend_from_slice(&t[..k]);
                t2.push(*u as u32);
                t2.push(*v as u32);
                t2.extend_from_slice(&t[k + 1..]);
                let idx = self.index[n + 1][&t2];
                entries.push((idx, &sign * c));
            }
        }
        sparse::collect(entries)
    }
    fn mul(&self, i: usize, a: usize, j: usize, b: usize) -> SparseVec {
        let mut t = self.basis[i][a].clone();
        t.extend_from_slice(&self.basis[j][b]);
        match self.index[i + j].get(&t) {
            Some(&k) => vec![(k, self.field.one())],
            None => panic!("product outside the weight window"),
        }
    }
    fn weight_graded(&self) -> bool {
        self.coalg.graded
    }
    fn label(&self, n: usize, i: usize) -> String {
        if n == 0 {
            return "1".into();
        }
        self.basis[n][i]
            .iter()
            .map(|&c| format!("[{}]", self.coalg.labels[c as usize]))
            .collect::<Vec<_>>()
            .join("")
    }
}

/// A graded algebra with zero differential; weight equals degree.
impl DgAlgebra for FinGradedAlgebra {
    fn field(&self) -> Field {
        FinGradedAlgebra::field(self)
    }
    fn top(&self) -> usize {
        FinGradedAlgebra::top(self)
    }
    fn max_weight(&self) -> usize {
        FinGradedAlgebra::top(self)
    }
    fn dim(&self, n: usize) -> usize {
        FinGradedAlgebra::dim(self, n)
    }
    fn weight(&self, n: usize, _i: usize) -> usize {
        n
    }
    fn d(&self, _n: usize, _i: usize) -> SparseVec {
        Vec::new()
    }
    fn mul(&self, i: usize, a: usize, j: usize, b: usize) -> SparseVec {
        self.basis_product(i, a, j, b)
    }
    fn weight_graded(&self) -> bool {
        true
    }
}

/// `d^2 = 0` on every basis element below the top two degrees.
pub fn check_d_squared<A: DgAlgebra + ?Sized>(a: &A) -> Result<(), DgError> {
    for n in 0..a.top().saturating_sub(1) {
        for i in 0..a.dim(n) {
            if !apply_d(a, n + 1, &a.d(n, i)).is_empty() {
                return Err(DgError::Structure(format!("d^2 != 0 on {}", a.label(n, i))));
            }
        }
    }
    Ok(())
}

/// `d(xy) = d(x) y + (-1)^{|x|} x d(y)` on all basis pairs that fit the window.
pub fn check_leibniz<A: DgAlgebra + ?Sized>(a: &A) -> Result<(), DgError> {
    let f = a.field();
    for i in 0..a.top() {
        for j in 0..a.top() - i {
            for x in 0..a.dim(i) {
                for y in 0..a.dim(j) {
                    if a.weight(i, x) + a.weight(j, y) > a.max_weight() {
                        continue;
                    }
                    let lhs = apply_d(a, i + j, &a.mul(i, x, j, y));
                    let dx = a.d(i, x);
                    let dy = a.d(j, y);
                    let t1 = mul_vec(a, i + 1, &dx, j, &[(y, f.one())]);
                    let t2 = mul_vec(a, i, &[(x, f.one())], j + 1, &dy);
                    let sign = if i % 2 == 0 { f.one() } else { f.int(-1) };
                    let rhs = sparse::axpy(&t1, &sign, &t2);
                    if lhs != rhs {
                        return Err(DgError::Structure(format!(
                            "Leibniz fails on {} * {}",
                            a.label(i, x),
                            a.label(j, y)
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `H^n` with representatives of minimal weight and the induced weight filtration.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: usize,
    /// cocycle representatives, one per class, each of minimal weight
    pub reps: Vec<SparseVec>,
    /// weight of each class
    pub weights: Vec<usize>,
    qb: QuotientBasis,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Class coordinates of a cocycle; `None` if `v` is not a cocycle combination.
    pub fn coords(&self, v: &[(usize, Scalar)]) -> Option<SparseVec> {
        self.qb.coords(v)
    }

    pub fn is_coboundary(&self, v: &[(usize, Scalar)]) -> bool {
        self.qb.is_zero_class(v)
    }

    /// A cocycle representing the given class coordinates.
    pub fn lift(&self, c: &[(usize, Scalar)]) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in c {
            acc = sparse::axpy(&acc, x, &self.reps[*i]);
        }
        acc
    }

    /// `dim N_w H^n`: classes of weight `<= w`.
    pub fn filtration_dim(&self, w: usize) -> usize {
        self.weights.iter().filter(|&&x| x <= w).count()
    }

    pub fn boundaries(&self) -> &crate::exactlin::Echelon {
        self.qb.denominator()
    }
}

/// `H^n(A)` for `n < top`.
pub fn cohomology<A: DgAlgebra + ?Sized>(a: &A, n: usize) -> Result<Cohomology, DgError> {
    if n >= a.top() {
        return Err(DgError::WindowEdge(n));
    }
    let f = a.field();
    let boundaries: Vec<SparseVec> = if n == 0 { Vec::new() } else { (0..a.dim(n - 1)).map(|i| a.d(n - 1, i)).collect() };
    let z = kernel_basis(&d_matrix(a, n));
    let mut qb = QuotientBasis::new(f, a.dim(n), &boundaries, std::iter::empty::<SparseVec>());
    let mut reps = Vec::new();
    let mut weights = Vec::new();
    for v in z {
        if qb.push(&v) {
            let w = vec_weight(a, n, &v);
            reps.push(v);
            weights.push(w);
        }
    }
    Ok(Cohomology { degree: n, reps, weights, qb })
}

/// Cohomology in degrees `0..=t` together with the induced products.
#[derive(Clone, Debug)]
pub struct CohomologyAlgebra {
    pub groups: Vec<Cohomology>,
    pub algebra: FinGradedAlgebra,
}

pub fn cohomology_algebra<A: DgAlgebra + ?Sized>(a: &A, t: usize) -> Result<CohomologyAlgebra, DgError> {
    let groups: Vec<Cohomology> = (0..=t).map(|n| cohomology(a, n)).collect::<Result<_, _>>()?;
    let f = a.field();
    let dims: Vec<usize> = groups.iter().map(Cohomology::dim).collect();
    if dims[0] != 1 {
        return Err(DgError::Structure(format!("H^0 has dimension {}", dims[0])));
    }
    let mut prods = std::collections::BTreeMap::new();
    for i in 1..=t {
        for j in 1..=t - i {
            let mut cols = Vec::new();
            for x in &groups[i].reps {
                for y in &groups[j].reps {
                    let p = mul_checked(a, i, x, j, y)?;
                    let c = groups[i + j]
                        .coords(&p)
                        .ok_or_else(|| DgError::Structure("product of cocycles is not a cocycle".into()))?;
                    cols.push(c);
                }
            }
            prods.insert((i, j), cols);
        }
    }
    let algebra = FinGradedAlgebra::new(f, dims, prods).map_err(|e| DgError::Structure(e.to_string()))?;
    Ok(CohomologyAlgebra { groups, algebra })
}

/// The bar construction of an augmented DG-algebra, cut to total weight `<= W`.
/// Basis elements are sequences of `(degree, index)` of `A_+`; they are
/// grouped by total degree `q - p` and sorted by bar length `p`.
#[derive(Clone, Debug)]
pub struct BarComplex {
    pub field: Field,
    pub wmax: usize,
    /// `basis[t]` lists the elements of total degree `t`
    pub basis: Vec<Vec<Vec<(usize, usize)>>>,
    /// bar length of each element
    pub length: Vec<Vec<usize>>,
    /// internal degree `q` of each element
    pub internal: Vec<Vec<usize>>,
    pub weight: Vec<Vec<usize>>,
    /// `d[t]`: degree `t` to degree `t+1`
    pub d: Vec<Matrix>,
}

impl BarComplex {
    pub fn max_degree(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn dim(&self, t: usize) -> usize {
        self.basis.get(t).map_or(0, Vec::len)
    }

    pub fn index_of(&self, t: usize, e: &[(usize, usize)]) -> Option<usize> {
        self.basis[t].iter().position(|x| x == e)
    }
}

pub fn bar<A: DgAlgebra + ?Sized>(a: &A) -> Result<BarComplex, DgError> {
    let wmax = a.max_weight();
    if a.top() < wmax {
        return Err(DgError::Structure(format!(
            "bar needs the algebra through degree {wmax}, have {}",
            a.top()
        )));
    }
    let f = a.field();
    // letters of A_+ grouped by weight
    let mut letters: Vec<(usize, usize, usize)> = Vec::new();
    for n in 1..=a.top() {
        for i in 0..a.dim(n) {
            let w = a.weight(n, i);
            if w == 0 {
                return Err(DgError::Structure("A_+ has an element of weight 0".into()));
            }
            if w <= wmax {
                letters.push((n, i, w));
            }
        }
    }
    let mut all: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut frontier: Vec<(Vec<(usize, usize)>, usize)> = vec![(Vec::new(), 0)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (seq, w) in &frontier {
            for &(n, i, lw) in &letters {
                if w + lw <= wmax {
                    let mut s = seq.clone();
                    s.push((n, i));
                    all.push(s.clone());
                    next.push((s, w + lw));
                }
            }
        }
        frontier = next;
    }
    let tdeg = |s: &Vec<(usize, usize)>| s.iter().map(|x| x.0).sum::<usize>() - s.len();
    let maxt = all.iter().map(tdeg).max().unwrap_or(0);
    let mut basis: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new(); maxt + 2];
    for s in all {
        basis[tdeg(&s)].push(s);
    }
    for b in &mut basis {
        b.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    }
    let index: Vec<HashMap<Vec<(usize, usize)>, usize>> = basis
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();
    let length: Vec<Vec<usize>> = basis.iter().map(|b| b.iter().map(Vec::len).collect()).collect();
    let internal: Vec<Vec<usize>> =
        basis.iter().map(|b| b.iter().map(|s| s.iter().map(|x| x.0).sum()).collect()).collect();
    let weight: Vec<Vec<usize>> = basis
        .iter()
        .map(|b| b.iter().map(|s| s.iter().map(|&(n, i)| a.weight(n, i)).sum()).collect())
        .collect();
    let mut d = Vec::new();
    for t in 0..=maxt {
        let mut cols = Vec::with_capacity(basis[t].len());
        for s in &basis[t] {
            let mut entries = Vec::new();
            let mut e = 0i64;
            for k in 0..s.len() {
                let (n, i) = s[k];
                // internal differential, sign (-1)^{e_{k-1}}
                let sign = if e.rem_euclid(2) == 0 { f.one() } else { f.int(-1) };
                if n < a.top() {
                    for (c, x) in a.d(n, i) {
                        let mut s2 = s.clone();
                        s2[k] = (n + 1, c);
                        if let Some(&idx) = index[t + 1].get(&s2) {
                            entries.push((idx, &sign * &x));
                        } else if a.weight(n + 1, c) <= wmax {
                            return Err(DgError::Structure("bar differential leaves the basis".into()));
                        }
                    }
                }
                e += n as i64 - 1;
                // merge with the next letter, sign (-1)^{e_k}
                if k + 1 < s.len() {
                    let (m, j) = s[k + 1];
                    let sign = if e.rem_euclid(2) == 0 { f.one() } else { f.int(-1) };
                    for (c, x) in a.mul(n, i, m, j) {
                        let mut s2 = s.clone();
                        s2[k] = (n + m, c);
                        s2.remove(k + 1);
                        let idx = index[t + 1][&s2];
                        entries.push((idx, &sign * &x));
                    }
                }
            }
            cols.push(sparse::collect(entries));
        }
        d.push(Matrix::from_columns(f, basis[t + 1].len(), &cols));
    }
    basis.truncate(maxt + 1);
    let mut length = length;
    let mut internal = internal;
    let mut weight = weight;
    length.truncate(maxt + 1);
    internal.truncate(maxt + 1);
    weight.truncate(maxt + 1);
    Ok(BarComplex { field: f, wmax, basis, length, internal, weight, d })
}

impl BarComplex {
    pub fn check_d_squared(&self) -> Result<(), DgError> {
        for t in 0..self.d.len().saturating_sub(1) {
            if !self.d[t + 1].mul(&self.d[t]).is_zero() {
                return Err(DgError::Structure(format!("bar d^2 != 0 in degree {t}")));
            }
        }
        Ok(())
    }

    /// `d` never raises bar length, and its length-preserving part only
    /// changes one letter by the internal differential.
    pub fn check_filtration(&self) -> Result<(), DgError> {
        for t in 0..self.d.len() {
            for (r, row) in self.d[t].data.iter().enumerate() {
                for (c, _) in row {
                    let (ps, pt) = (self.length[t][*c], self.length[t + 1][r]);
                    if pt > ps {
                        return Err(DgError::Structure("bar d raises the filtration".into()));
                    }
                    if pt == ps {
                        let diff = self.basis[t][*c]
                            .iter()
                            .zip(&self.basis[t + 1][r])
                            .filter(|(x, y)| x != y)
                            .count();
                        if diff != 1 {
                            return Err(DgError::Structure("gr of bar d is not the internal differential".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `Delta d = (d (x) 1 + 1 (x) d) Delta` for deconcatenation, with the
    /// Koszul sign of the left factor's total degree.
    pub fn check_co_leibniz(&self) -> Result<(), DgError> {
        let f = self.field;
        let index: Vec<HashMap<&Vec<(usize, usize)>, usize>> =
            self.basis.iter().map(|b| b.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        let tdeg = |s: &[(usize, usize)]| s.iter().map(|x| x.0).sum::<usize>() - s.len();
        let cols: Vec<Vec<SparseVec>> = self.d.iter().map(|m| m.columns()).collect();
        let image = |s: &[(usize, usize)]| -> Vec<(Vec<(usize, usize)>, Scalar)> {
            let t = tdeg(s);
            if t >= cols.len() {
                return Vec::new();
            }
            let i = index[t][&s.to_vec()];
            cols[t][i].iter().map(|(r, x)| (self.basis[t + 1][*r].clone(), x.clone())).collect()
        };
        for t in 0..self.d.len() {
            for s in &self.basis[t] {
                let mut lhs: HashMap<(Vec<(usize, usize)>, Vec<(usize, usize)>), Scalar> = HashMap::new();
                let add = |m: &mut HashMap<_, Scalar>, k, x: Scalar| {
                    let e = m.entry(k).or_insert_with(|| f.zero());
                    *e = &*e + &x;
                };
                for (s2, x) in image(s) {
                    for k in 0..=s2.len() {
                        add(&mut lhs, (s2[..k].to_vec(), s2[k..].to_vec()), x.clone());
                    }
                }
                let mut rhs: HashMap<(Vec<(usize, usize)>, Vec<(usize, usize)>), Scalar> = HashMap::new();
                for k in 0..=s.len() {
                    let (l, r) = (&s[..k], &s[k..]);
                    if tdeg(l) + 1 + tdeg(r) > self.max_degree() {
                        continue;
                    }
                    for (l2, x) in image(l) {
                        add(&mut rhs, (l2, r.to_vec()), x);
                    }
                    let sign = if tdeg(l) % 2 == 0 { f.one() } else { f.int(-1) };
                    for (r2, x) in image(r) {
                        add(&mut rhs, (l.to_vec(), r2), &sign * &x);
                    }
                }
                lhs.retain(|_, v| !v.is_zero());
                rhs.retain(|_, v| !v.is_zero());
                if lhs != rhs {
                    return Err(DgError::Structure(format!("co-Leibniz fails on {s:?}")));
                }
            }
        }
        Ok(())
    }

    /// Cohomology dimensions of the total complex per degree and weight:
    /// `result[t][w]`. Needs the weight grading to be preserved by `d`.
    pub fn cohomology_by_weight(&self) -> Vec<Vec<usize>> {
        let maxt = self.max_degree();
        let mut out = vec![vec![0; self.wmax + 1]; maxt + 1];
        for w in 0..=self.wmax {
            let sel: Vec<Vec<usize>> =
                (0..=maxt).map(|t| (0..self.dim(t)).filter(|&i| self.weight[t][i] == w).collect()).collect();
            let rank = |t: usize| -> usize {
                if t >= self.d.len() {
                    return 0;
                }
                let rows: HashMap<usize, usize> = if t < maxt {
                    sel[t + 1].iter().enumerate().map(|(k, &i)| (i, k)).collect()
                } else {
                    HashMap::new()
                };
                let cols: Vec<SparseVec> = self.d[t]
                    .columns()
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| self.weight[t][*i] == w)
                    .map(|(_, c)| c.into_iter().filter_map(|(r, x)| rows.get(&r).map(|&k| (k, x))).collect())
                    .collect();
                Matrix::from_columns(self.field, rows.len(), &cols).rank()
            };
            let ranks: Vec<usize> = (0..=maxt).map(rank).collect();
            for t in 0..=maxt {
                let before = if t == 0 { 0 } else { ranks[t - 1] };
                out[t][w] = sel[t].len() - ranks[t] - before;
            }
        }
        out
    }
}

/// `C -> Br(Cob(C))` in the weight-graded setting: `H^0` in weight `w`
/// has the dimension of `C_w` and positive degrees vanish.
#[derive(Clone, Debug)]
pub struct AdjunctionReport {
    pub window: usize,
    /// `h0[w]` versus `dim C_w`
    pub h0: Vec<(usize, usize)>,
    pub higher_vanish: bool,
    pub passes: bool,
}

pub fn adjunction_unit_check(c: &CoalgebraSlice, window: usize) -> Result<AdjunctionReport, DgError> {
    if !c.graded {
        return Err(DgError::Structure("adjunction check needs a weight-graded coalgebra".into()));
    }
    if window > c.max_weight() && c.max_weight() > 0 {
        return Err(DgError::WindowEdge(window));
    }
    let cob = Cobar::new(c, window, window);
    let br = bar(&cob)?;
    let h = br.cohomology_by_weight();
    let mut h0 = Vec::new();
    for w in 0..=window {
        let cw = c.weights.iter().filter(|&&x| x == w).count();
        h0.push((h[0][w], cw));
    }
    let higher_vanish = h.iter().skip(1).all(|row| row.iter().all(|&x| x == 0));
    let passes = higher_vanish && h0.iter().all(|(a, b)| a == b);
    Ok(AdjunctionReport { window, h0, higher_vanish, passes })
}

/// A coalgebra map `f: C -> C'` given on basis elements, checked to be a
/// coalgebra morphism; reports whether `Cob(f)` is an isomorphism on `H^n`
/// for `n <= t` within weight `<= w`.
#[derive(Clone, Debug)]
pub struct FunctorialityReport {
    pub degrees: Vec<(usize, usize, usize)>,
    pub passes: bool,
}

/// `Cob(f)` on a degree-`n` vector, for a coaugmented coalgebra map `f`
/// given on basis elements. Weight must not increase.
pub fn cobar_map(a: &Cobar, b: &Cobar, f: &[SparseVec], n: usize, v: &[(usize, Scalar)]) -> SparseVec {
    let mut entries = Vec::new();
    for (i, x) in v {
        let mut acc: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), x.clone())];
        for &l in a.tuple(n, *i) {
            let mut next = Vec::new();
            for (pre, s) in &acc {
                for (y, r) in &f[l as usize] {
                    if *y == 0 {
                        continue;
                    }
                    let mut p2 = pre.clone();
                    p2.push(*y as u32);
                    next.push((p2, s * r));
                }
            }
            acc = next;
        }
        for (tup, s) in acc {
            let k = b.index_of(&tup).expect("coalgebra map raises weight");
            entries.push((k, s));
        }
    }
    sparse::collect(entries)
}

pub fn cobar_functoriality_check(
    c: &CoalgebraSlice,
    c2: &CoalgebraSlice,
    f: &[SparseVec],
    w: usize,
    t: usize,
) -> Result<FunctorialityReport, DgError> {
    let field = c.field;
    let n = c.dim();
    let n2 = c2.dim();
    // (f (x) f) Delta = Delta f
    for x in 0..n {
        let lhs = {
            let mut entries = Vec::new();
            for (u, v, k) in &c.delta[x] {
                for (a, s) in &f[*u] {
                    for (b, r) in &f[*v] {
                        entries.push((a * n2 + b, &(k * s) * r));
                    }
                }
            }
            sparse::collect(entries)
        };
        let rhs = c2.delta_vec(&f[x]);
        if lhs != rhs {
            return Err(DgError::Structure(format!("not a coalgebra map on basis element {x}")));
        }
        if f[x].iter().any(|(y, _)| c2.weights[*y] > c.weights[x]) {
            return Err(DgError::Structure("map raises weight".into()));
        }
    }
    if f[0] != vec![(0, field.one())] {
        return Err(DgError::Structure("map does not preserve the coaugmentation".into()));
    }
    let a = Cobar::new(c, w, t + 1);
    let b = Cobar::new(c2, w, t + 1);
    let mut degrees = Vec::new();
    let mut passes = true;
    for deg in 0..=t {
        let ha = cohomology(&a, deg)?;
        let hb = cohomology(&b, deg)?;
        let mut cols = Vec::new();
        for rep in &ha.reps {
            let img = cobar_map(&a, &b, f, deg, rep);
            cols.push(hb.coords(&img).ok_or_else(|| DgError::Structure("image is not a cocycle".into()))?);
        }
        let rank = Matrix::from_columns(field, hb.dim(), &cols).rank();
        if rank != ha.dim() || rank != hb.dim() {
            passes = false;
        }
        degrees.push((ha.dim(), hb.dim(), rank));
    }
    Ok(FunctorialityReport { degrees, passes })
}
