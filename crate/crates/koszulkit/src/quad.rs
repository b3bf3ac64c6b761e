//! Graded algebras given by structure constants, quadratic algebras and
//! coalgebras, quadratic duality, and bigraded Tor from the bar complex.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::exactlin::{kernel, sparse, Echelon, Field, Matrix, Scalar, SparseVec, Subspace};
use crate::ncalg::{words_of_degree, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("degree-0 component has dimension {0}, expected 1")]
    NotConnected(usize),
    #[error("window {window} exceeds the known degrees 0..={top}")]
    WindowTooLarge { window: usize, top: usize },
    #[error("structure constants: {0}")]
    BadStructure(String),
}

/// A connected graded algebra known in degrees `0..=top`, basis element 0
/// of degree 0 being the unit. Products landing above `top` are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGradedAlgebra {
    field: Field,
    dims: Vec<usize>,
    /// `(i, j) -> products of basis pairs`, indexed `a * dims[j] + b`.
    prods: BTreeMap<(usize, usize), Vec<SparseVec>>,
}

impl FinGradedAlgebra {
    /// Validates shapes and associativity on all basis triples.
    pub fn new(
        field: Field,
        dims: Vec<usize>,
        prods: BTreeMap<(usize, usize), Vec<SparseVec>>,
    ) -> Result<Self, QuadError> {
        let h = FinGradedAlgebra::new_unchecked(field, dims, prods)?;
        h.check_associative()?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(
        field: Field,
        dims: Vec<usize>,
        prods: BTreeMap<(usize, usize), Vec<SparseVec>>,
    ) -> Result<Self, QuadError> {
        if dims.first() != Some(&1) {
            return Err(QuadError::NotConnected(dims.first().copied().unwrap_or(0)));
        }
        let top = dims.len() - 1;
        for i in 1..=top {
            for j in 1..=top - i {
                let cols = prods
                    .get(&(i, j))
                    .ok_or_else(|| QuadError::BadStructure(format!("missing products {i}x{j}")))?;
                if cols.len() != dims[i] * dims[j] {
                    return Err(QuadError::BadStructure(format!("wrong count for {i}x{j}")));
                }
                if cols.iter().any(|c| c.last().is_some_and(|e| e.0 >= dims[i + j])) {
                    return Err(QuadError::BadStructure(format!("product {i}x{j} out of range")));
                }
            }
        }
        Ok(FinGradedAlgebra { field, dims, prods })
    }

    /// The ground field itself, known up to degree `top`.
    pub fn trivial(field: Field, top: usize) -> Self {
        let mut dims = vec![0; top + 1];
        dims[0] = 1;
        let mut prods = BTreeMap::new();
        for i in 1..=top {
            for j in 1..=top - i {
                prods.insert((i, j), Vec::new());
            }
        }
        FinGradedAlgebra { field, dims, prods }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    /// Product of basis elements `a` in degree `i` and `b` in degree `j`.
    pub fn basis_product(&self, i: usize, a: usize, j: usize, b: usize) -> SparseVec {
        if i == 0 {
            return vec![(b, self.field.one())];
        }
        if j == 0 {
            return vec![(a, self.field.one())];
        }
        self.prods[&(i, j)][a * self.dims[j] + b].clone()
    }

    pub fn mul(&self, i: usize, a: &[(usize, Scalar)], j: usize, b: &[(usize, Scalar)]) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for (ai, x) in a {
            for (bj, y) in b {
                acc = sparse::axpy(&acc, &(x * y), &self.basis_product(i, *ai, j, *bj));
            }
        }
        acc
    }

    /// Matrix of `A^i (x) A^j -> A^{i+j}`.
    pub fn mult_matrix(&self, i: usize, j: usize) -> Matrix {
        let cols: Vec<SparseVec> = (0..self.dim(i) * self.dim(j))
            .map(|k| self.basis_product(i, k / self.dim(j).max(1), j, k % self.dim(j).max(1)))
            .collect();
        Matrix::from_columns(self.field, self.dim(i + j), &cols)
    }

    /// Same algebra forgotten above degree `top`.
    pub fn truncate(&self, top: usize) -> FinGradedAlgebra {
        let top = top.min(self.top());
        let dims = self.dims[..=top].to_vec();
        let prods = self
            .prods
            .iter()
            .filter(|((i, j), _)| i + j <= top)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        FinGradedAlgebra { field: self.field, dims, prods }
    }

    pub fn check_associative(&self) -> Result<(), QuadError> {
        let top = self.top();
        for i in 1..=top {
            for j in 1..=top.saturating_sub(i) {
                for k in 1..=top.saturating_sub(i + j) {
                    for a in 0..self.dims[i] {
                        for b in 0..self.dims[j] {
                            let ab = self.basis_product(i, a, j, b);
                            for c in 0..self.dims[k] {
                                let left = self.mul(i + j, &ab, k, &[(c, self.field.one())]);
                                let bc = self.basis_product(j, b, k, c);
                                let right = self.mul(i, &[(a, self.field.one())], j + k, &bc);
                                if left != right {
                                    return Err(QuadError::BadStructure(format!(
                                        "not associative on degrees ({i},{j},{k})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Hilbert series coefficients `1, dim A^1, ...`.
    pub fn hilbert(&self) -> Vec<i64> {
        self.dims.iter().map(|&d| d as i64).collect()
    }
}

/// Quadratic data: relation space `R` inside `V (x) V`, coordinates the
/// degree-2 words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticData {
    pub ngens: usize,
    pub r: Subspace,
}

impl QuadraticData {
    pub fn new(ngens: usize, r: Subspace) -> Self {
        assert_eq!(r.ambient(), ngens * ngens);
        QuadraticData { ngens, r }
    }

    pub fn field(&self) -> Field {
        self.r.field()
    }
}

/// Degree components `I_n` of the two-sided ideal generated by homogeneous
/// relations, given as `(degree, coordinates)`, in degrees `0..=top`.
pub fn homogeneous_ideal(field: Field, g: usize, rels: &[(usize, SparseVec)], top: usize) -> Vec<Echelon> {
    let mut out: Vec<Echelon> = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let wn = words_of_degree(n, g);
        let mut e = Echelon::new(field, wn);
        for (d, v) in rels {
            if *d == n {
                e.insert(v);
            }
        }
        if n >= 1 {
            let prev = out[n - 1].rows().to_vec();
            let wp = words_of_degree(n - 1, g);
            for row in &prev {
                for l in 0..g {
                    // l (x) row and row (x) l
                    let left: SparseVec = row.iter().map(|(c, x)| (l * wp + c, x.clone())).collect();
                    e.insert(&left);
                    let right: SparseVec = row.iter().map(|(c, x)| (c * g + l, x.clone())).collect();
                    e.insert(&right);
                }
            }
        }
        e.finish();
        out.push(e);
    }
    out
}

/// Quotient of the free algebra by homogeneous ideal components, with the
/// non-pivot (normal) words as basis.
pub fn graded_quotient(field: Field, g: usize, ideals: &[Echelon]) -> FinGradedAlgebra {
    let top = ideals.len() - 1;
    let normal: Vec<Vec<usize>> = ideals
        .iter()
        .enumerate()
        .map(|(n, e)| (0..words_of_degree(n, g)).filter(|&c| !e.is_pivot(c)).collect())
        .collect();
    let pos: Vec<HashMap<usize, usize>> = normal
        .iter()
        .map(|ws| ws.iter().enumerate().map(|(i, &w)| (w, i)).collect())
        .collect();
    let dims: Vec<usize> = normal.iter().map(Vec::len).collect();
    let mut prods = BTreeMap::new();
    for i in 1..=top {
        for j in 1..=top - i {
            let wj = words_of_degree(j, g);
            let mut cols = Vec::with_capacity(dims[i] * dims[j]);
            for &u in &normal[i] {
                for &v in &normal[j] {
                    let r = ideals[i + j].reduce(&[(u * wj + v, field.one())]);
                    cols.push(r.into_iter().map(|(c, x)| (pos[i + j][&c], x)).collect());
                }
            }
            prods.insert((i, j), cols);
        }
    }
    FinGradedAlgebra { field, dims, prods }
}

pub fn quadratic_algebra_components(q: &QuadraticData, top: usize) -> FinGradedAlgebra {
    let rels: Vec<(usize, SparseVec)> = q.r.basis().iter().map(|v| (2, v.clone())).collect();
    let ideals = homogeneous_ideal(q.field(), q.ngens, &rels, top);
    graded_quotient(q.field(), q.ngens, &ideals)
}

/// `C_n` as annihilators of the ideal components of the dual relations.
pub fn quadratic_coalgebra_components(q: &QuadraticData, top: usize) -> Vec<Subspace> {
    let dual = quadratic_dual(q);
    let rels: Vec<(usize, SparseVec)> = dual.r.basis().iter().map(|v| (2, v.clone())).collect();
    homogeneous_ideal(q.field(), q.ngens, &rels, top)
        .into_iter()
        .enumerate()
        .map(|(n, e)| Subspace::span(q.field(), words_of_degree(n, q.ngens), e.rows()).annihilator())
        .collect()
}

/// `C_n = intersection of V^i (x) R (x) V^{n-2-i}` computed directly.
pub fn quadratic_coalgebra_by_intersection(q: &QuadraticData, n: usize) -> Subspace {
    let g = q.ngens;
    let f = q.field();
    let wn = words_of_degree(n, g);
    if n < 2 {
        return Subspace::full(f, wn);
    }
    let mut acc = Subspace::full(f, wn);
    for i in 0..=n - 2 {
        let right = n - 2 - i;
        let wr = words_of_degree(right, g);
        let mut vecs = Vec::new();
        for pre in 0..words_of_degree(i, g) {
            for r in q.r.basis() {
                for post in 0..wr {
                    vecs.push(
                        r.iter()
                            .map(|(c, x)| ((pre * g * g + c) * wr + post, x.clone()))
                            .collect::<SparseVec>(),
                    );
                }
            }
        }
        acc = acc.intersect(&Subspace::span(f, wn, vecs)).unwrap();
    }
    acc
}

pub fn quadratic_dual(q: &QuadraticData) -> QuadraticData {
    QuadraticData { ngens: q.ngens, r: q.r.annihilator() }
}

/// Dimensions `Tor_{p,q}(k,k)` for `p <= p_max`, `q <= q_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorTable {
    pub p_max: usize,
    pub q_max: usize,
    /// `dims[p][q]`
    pub dims: Vec<Vec<usize>>,
}

impl TorTable {
    pub fn get(&self, p: usize, q: usize) -> usize {
        self.dims.get(p).and_then(|r| r.get(q)).copied().unwrap_or(0)
    }

    /// First off-diagonal nonzero entry, scanning by `q` then `p`.
    pub fn first_off_diagonal(&self) -> Option<(usize, usize, usize)> {
        for q in 0..=self.q_max {
            for p in 0..=self.p_max.min(q) {
                if p != q && self.get(p, q) != 0 {
                    return Some((p, q, self.get(p, q)));
                }
            }
        }
        None
    }
}

/// Optional weights on the basis of `H`, with a bound on the total weight of a bar element.
type WeightCut<'a> = Option<(&'a [Vec<usize>], usize)>;

/// Basis of the normalized bar complex in internal weight `q` and length `p`:
/// sequences `(degree, basis index)` with positive degrees summing to `q`.
fn bar_basis(h: &FinGradedAlgebra, p: usize, q: usize, cut: WeightCut) -> Vec<Vec<(usize, usize)>> {
    struct Walk<'a> {
        h: &'a FinGradedAlgebra,
        cut: WeightCut<'a>,
        cur: Vec<(usize, usize)>,
        out: Vec<Vec<(usize, usize)>>,
    }
    fn rec(st: &mut Walk, left: usize, slots: usize, weight: usize) {
        if slots == 0 {
            if left == 0 {
                st.out.push(st.cur.clone());
            }
            return;
        }
        for d in 1..=left.saturating_sub(slots - 1) {
            for b in 0..st.h.dim(d) {
                let w = match st.cut {
                    Some((ws, wmax)) => {
                        let w = weight + ws[d][b];
                        if w > wmax {
                            continue;
                        }
                        w
                    }
                    None => 0,
                };
                st.cur.push((d, b));
                rec(st, left - d, slots - 1, w);
                st.cur.pop();
            }
        }
    }
    let mut st = Walk { h, cut, cur: Vec::new(), out: Vec::new() };
    rec(&mut st, q, p, 0);
    st.out
}

/// Bar differential `B_p -> B_{p-1}` in weight `q`, merging neighbours with sign `(-1)^i`.
fn bar_differential(h: &FinGradedAlgebra, p: usize, q: usize, cut: WeightCut) -> Matrix {
    let src = bar_basis(h, p, q, cut);
    let tgt = bar_basis(h, p - 1, q, cut);
    let index: HashMap<&Vec<(usize, usize)>, usize> = tgt.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let f = h.field();
    let mut cols = Vec::with_capacity(src.len());
    for s in &src {
        let mut entries = Vec::new();
        for i in 0..p.saturating_sub(1) {
            let (da, a) = s[i];
            let (db, b) = s[i + 1];
            let prod = h.basis_product(da, a, db, b);
            let sign = if i % 2 == 0 { f.int(-1) } else { f.one() };
            for (c, x) in prod {
                let mut t = s.clone();
                t[i] = (da + db, c);
                t.remove(i + 1);
                let k = *index.get(&t).expect("product raises the weight");
                entries.push((k, &sign * &x));
            }
        }
        cols.push(sparse::collect(entries));
    }
    Matrix::from_columns(f, tgt.len(), &cols)
}

fn tor_with(h: &FinGradedAlgebra, p_max: usize, q_max: usize, cut: WeightCut) -> Result<TorTable, QuadError> {
    if h.dim(0) != 1 {
        return Err(QuadError::NotConnected(h.dim(0)));
    }
    if q_max > h.top() {
        return Err(QuadError::WindowTooLarge { window: q_max, top: h.top() });
    }
    let mut dims = vec![vec![0; q_max + 1]; p_max + 1];
    for q in 0..=q_max {
        let top_p = q.min(p_max + 1);
        let sizes: Vec<usize> = (0..=top_p).map(|p| bar_basis(h, p, q, cut).len()).collect();
        let mut ranks = vec![0; top_p + 2];
        for p in 1..=top_p {
            ranks[p] = bar_differential(h, p, q, cut).rank();
        }
        for p in 0..=p_max.min(q) {
            dims[p][q] = sizes[p] - ranks[p] - ranks[p + 1];
        }
    }
    Ok(TorTable { p_max, q_max, dims })
}

/// `Tor` of `h` where basis elements carry weights: the bar complex keeps
/// only elements of total weight `<= wmax`. Products must not raise weight.
pub fn tor_weighted(
    h: &FinGradedAlgebra,
    weights: &[Vec<usize>],
    wmax: usize,
    p_max: usize,
    q_max: usize,
) -> Result<TorTable, QuadError> {
    if weights.len() <= h.top() || (0..=h.top()).any(|n| weights[n].len() != h.dim(n)) {
        return Err(QuadError::BadStructure("weights do not match the algebra".into()));
    }
    tor_with(h, p_max, q_max, Some((weights, wmax)))
}

pub fn tor_bigraded(h: &FinGradedAlgebra, p_max: usize, q_max: usize) -> Result<TorTable, QuadError> {
    tor_with(h, p_max, q_max, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Koszulity {
    KoszulUpTo(usize),
    NotKoszul { p: usize, q: usize, dim: usize },
}

impl Koszulity {
    pub fn is_koszul(&self) -> bool {
        matches!(self, Koszulity::KoszulUpTo(_))
    }
}

/// Windowed scan of off-diagonal Tor.
pub fn koszulity_check(h: &FinGradedAlgebra, window: usize) -> Result<Koszulity, QuadError> {
    let t = tor_bigraded(h, window, window)?;
    Ok(match t.first_off_diagonal() {
        None => Koszulity::KoszulUpTo(window),
        Some((p, q, dim)) => Koszulity::NotKoszul { p, q, dim },
    })
}

/// Relations of the quadratic part: the kernel of `H^1 (x) H^1 -> H^2`.
pub fn quadratic_part(h: &FinGradedAlgebra) -> Result<QuadraticData, QuadError> {
    if h.dim(0) != 1 {
        return Err(QuadError::NotConnected(h.dim(0)));
    }
    let g = h.dim(1);
    let r = if h.top() >= 2 {
        kernel(&h.mult_matrix(1, 1))
    } else {
        Subspace::full(h.field(), g * g)
    };
    Ok(QuadraticData::new(g, r))
}

/// Rank of the iterated product `(H^1)^{(x) n} -> H^n`.
pub fn generated_rank(h: &FinGradedAlgebra, n: usize) -> usize {
    let g = h.dim(1);
    let f = h.field();
    let mut cols = Vec::new();
    for w in 0..words_of_degree(n, g) {
        let word = Word::from_index(w, n, g);
        let mut acc: SparseVec = vec![(0, f.one())];
        for (k, &l) in word.0.iter().enumerate() {
            acc = h.mul(k, &acc, 1, &[(l as usize, f.one())]);
        }
        cols.push(acc);
    }
    Matrix::from_columns(f, h.dim(n), &cols).rank()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VishikReport {
    pub quadratic_part_koszul: Koszulity,
    /// `(rank of qH^2 -> H^2, dim qH^2, dim H^2)`
    pub degree2: (usize, usize, usize),
    /// `(rank of qH^3 -> H^3, dim qH^3)`
    pub degree3: (usize, usize),
    pub passes: bool,
    pub failures: Vec<String>,
}

pub fn vishik_criterion(h: &FinGradedAlgebra, window: usize) -> Result<VishikReport, QuadError> {
    if window > h.top() {
        return Err(QuadError::WindowTooLarge { window, top: h.top() });
    }
    let q = quadratic_part(h)?;
    let qh = quadratic_algebra_components(&q, window.max(3));
    let kz = koszulity_check(&qh, window)?;
    let mut failures = Vec::new();
    if let Koszulity::NotKoszul { p, q, dim } = &kz {
        failures.push(format!("quadratic part not Koszul: Tor_{{{p},{q}}} = {dim}"));
    }
    let r2 = if h.top() >= 2 { generated_rank(h, 2) } else { 0 };
    let degree2 = (r2, qh.dim(2), h.dim(2));
    if r2 != qh.dim(2) {
        failures.push("qH -> H not injective in degree 2".into());
    }
    if r2 != h.dim(2) {
        failures.push("qH -> H not surjective in degree 2".into());
    }
    let r3 = if h.top() >= 3 { generated_rank(h, 3) } else { qh.dim(3) };
    let degree3 = (r3, qh.dim(3));
    if r3 != qh.dim(3) {
        failures.push("qH -> H not injective in degree 3".into());
    }
    Ok(VishikReport { quadratic_part_koszul: kz, degree2, degree3, passes: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        sparse::collect(entries.iter().map(|&(c, x)| (c, Q.int(x))).collect())
    }

    fn commutator() -> QuadraticData {
        QuadraticData::new(2, Subspace::span(Q, 4, [v(&[(1, 1), (2, -1)])]))
    }

    pub(crate) fn exterior(top: usize) -> FinGradedAlgebra {
        quadratic_algebra_components(&quadratic_dual(&commutator()), top)
    }

    #[test]
    fn algebra_dims() {
        assert_eq!(quadratic_algebra_components(&commutator(), 5).dims(), &[1, 2, 3, 4, 5, 6]);
        let free = QuadraticData::new(3, Subspace::zero(Q, 9));
        assert_eq!(quadratic_algebra_components(&free, 3).dims(), &[1, 3, 9, 27]);
        let xx = QuadraticData::new(2, Subspace::span(Q, 4, [v(&[(0, 1)])]));
        assert_eq!(quadratic_algebra_components(&xx, 5).dims(), &[1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn coalgebra_dims() {
        let full = QuadraticData::new(2, Subspace::full(Q, 4));
        let dims: Vec<usize> = quadratic_coalgebra_components(&full, 4).iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![1, 2, 4, 8, 16]);
        let dims: Vec<usize> = quadratic_coalgebra_components(&commutator(), 4).iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![1, 2, 1, 0, 0]);
        let zero = QuadraticData::new(2, Subspace::zero(Q, 4));
        let dims: Vec<usize> = quadratic_coalgebra_components(&zero, 3).iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![1, 2, 0, 0]);
    }

    #[test]
    fn dual_of_commutator_is_exterior() {
        let d = quadratic_dual(&commutator());
        let expected = Subspace::span(Q, 4, [v(&[(0, 1)]), v(&[(3, 1)]), v(&[(1, 1), (2, 1)])]);
        assert_eq!(d.r, expected);
        assert_eq!(quadratic_dual(&d), commutator());
        assert_eq!(exterior(4).dims(), &[1, 2, 1, 0, 0]);
    }

    #[test]
    fn tor_of_exterior() {
        let t = tor_bigraded(&exterior(6), 6, 6).unwrap();
        for i in 0..=6 {
            assert_eq!(t.get(i, i), i + 1);
        }
        assert_eq!(t.first_off_diagonal(), None);
        assert_eq!(koszulity_check(&exterior(6), 6).unwrap(), Koszulity::KoszulUpTo(6));
    }

    #[test]
    fn tor_of_free_and_trivial() {
        let free = quadratic_algebra_components(&QuadraticData::new(3, Subspace::zero(Q, 9)), 4);
        let t = tor_bigraded(&free, 4, 4).unwrap();
        assert_eq!(t.get(1, 1), 3);
        for p in 2..=4 {
            for q in 0..=4 {
                assert_eq!(t.get(p, q), 0);
            }
        }
        let k = FinGradedAlgebra::trivial(Q, 5);
        let t = tor_bigraded(&k, 5, 5).unwrap();
        assert_eq!(t.get(0, 0), 1);
        assert!((1..=5).all(|p| (0..=5).all(|q| t.get(p, q) == 0)));
        assert_eq!(koszulity_check(&k, 5).unwrap(), Koszulity::KoszulUpTo(5));
    }

    /// `k[x, y] / (x^2)` with `|x| = 1`, `|y| = 2`, basis `x^e y^k`.
    pub(crate) fn x_y2(field: Field, top: usize) -> FinGradedAlgebra {
        let dims = vec![1; top + 1];
        let mut prods = BTreeMap::new();
        for i in 1..=top {
            for j in 1..=top - i {
                // the product is nonzero unless both factors carry x
                let val = if i % 2 == 1 && j % 2 == 1 { vec![] } else { vec![(0, field.one())] };
                prods.insert((i, j), vec![val]);
            }
        }
        FinGradedAlgebra::new(field, dims, prods).unwrap()
    }

    #[test]
    fn non_koszul_ext_algebra() {
        let h = x_y2(Field::Prime(2), 4);
        let k = koszulity_check(&h, 4).unwrap();
        assert_eq!(k, Koszulity::NotKoszul { p: 1, q: 2, dim: 1 });
        let vr = vishik_criterion(&h, 3).unwrap();
        assert!(!vr.passes);
        assert!(vr.failures.iter().any(|f| f.contains("not surjective in degree 2")));
    }

    #[test]
    fn quadratic_parts() {
        let qp = quadratic_part(&exterior(3)).unwrap();
        assert_eq!(qp.r, quadratic_dual(&commutator()).r);
        let free = quadratic_algebra_components(&QuadraticData::new(2, Subspace::zero(Q, 4)), 3);
        assert_eq!(quadratic_part(&free).unwrap().r.dim(), 0);
        let h = quadratic_algebra_components(&QuadraticData::new(2, Subspace::full(Q, 4)), 3);
        assert_eq!(quadratic_part(&h).unwrap().r.dim(), 4);
        assert!(vishik_criterion(&exterior(4), 4).unwrap().passes);
        assert!(vishik_criterion(&FinGradedAlgebra::trivial(Q, 4), 4).unwrap().passes);
    }

    #[test]
    fn coalgebra_intersection_agrees() {
        for q in [commutator(), QuadraticData::new(2, Subspace::span(Q, 4, [v(&[(0, 1)])]))] {
            let comps = quadratic_coalgebra_components(&q, 4);
            for n in 0..=4 {
                assert_eq!(comps[n], quadratic_coalgebra_by_intersection(&q, n));
            }
        }
    }

    #[test]
    fn associativity_is_checked() {
        let mut prods = BTreeMap::new();
        // x*x = y, x*y = 0, y*x = y*? : deg 3 basis z with x*y = z, y*x = 0
        prods.insert((1, 1), vec![vec![(0, Q.one())]]);
        prods.insert((1, 2), vec![vec![(0, Q.one())]]);
        prods.insert((2, 1), vec![vec![]]);
        let e = FinGradedAlgebra::new(Q, vec![1, 1, 1, 1], prods);
        assert!(matches!(e, Err(QuadError::BadStructure(_))));
    }
}
