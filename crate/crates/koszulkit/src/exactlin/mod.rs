//! Exact linear algebra over `Q` and `F_p`.
//!
//! Subspaces are stored as reduced row echelon bases, so two subspaces are
//! equal exactly when their stored rows are equal.

mod echelon;
mod scalar;
pub mod sparse;

pub use echelon::Echelon;
pub use scalar::{is_prime, Field, Scalar};
pub use sparse::SparseVec;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("modulus {0} is not a prime below 2^31")]
    BadModulus(u64),
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("subspace is not contained in the larger one")]
    NotContained,
    #[error("dimension mismatch: matrix has {rows} rows, vector has length {len}")]
    DimMismatch { rows: usize, len: usize },
}

/// Sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, field.one())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    pub fn from_ints(field: Field, entries: &[Vec<i64>]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let data = entries
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &x)| !field.int(x).is_zero())
                    .map(|(c, &x)| (c, field.int(x)))
                    .collect()
            })
            .collect();
        Matrix { field, rows, cols, data }
    }

    pub fn from_rows(field: Field, cols: usize, data: Vec<SparseVec>) -> Self {
        Matrix { field, rows: data.len(), cols, data }
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(field: Field, rows: usize, columns: &[SparseVec]) -> Self {
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col {
                data[*i].push((j, x.clone()));
            }
        }
        Matrix { field, rows, cols: columns.len(), data }
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        sparse::get(&self.data[r], c).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut data: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, x) in row {
                data[*j].push((i, x.clone()));
            }
        }
        Matrix { field: self.field, rows: self.cols, cols: self.rows, data }
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let mut out = Vec::new();
        for (i, row) in self.data.iter().enumerate() {
            let d = sparse::dot(row, v, self.field);
            if !d.is_zero() {
                out.push((i, d));
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: SparseVec = Vec::new();
                for (k, x) in row {
                    acc = sparse::axpy(&acc, x, &other.data[*k]);
                }
                acc
            })
            .collect();
        Matrix { field: self.field, rows: self.rows, cols: other.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.field, self.cols);
        for r in &self.data {
            e.insert(r);
        }
        e.rank()
    }
}

/// Reduced row echelon form: `(R, rank, pivot columns)`.
pub fn rref(m: &Matrix) -> (Matrix, usize, Vec<usize>) {
    let mut e = Echelon::new(m.field, m.cols);
    for r in &m.data {
        e.insert(r);
    }
    e.finish();
    let rank = e.rank();
    let (rows, pivots) = e.into_rows();
    let mut data = rows;
    data.resize(m.rows, Vec::new());
    (Matrix { field: m.field, rows: m.rows, cols: m.cols, data }, rank, pivots)
}

/// A subspace of `k^ambient` held as a reduced echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ech: Echelon,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient() == other.ambient() && self.basis() == other.basis()
    }
}
impl Eq for Subspace {}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { ech: Echelon::new(field, ambient) }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace::span(field, ambient, (0..ambient).map(|i| vec![(i, field.one())]))
    }

    pub fn span<I, V>(field: Field, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[(usize, Scalar)]>,
    {
        let mut ech = Echelon::new(field, ambient);
        for v in vectors {
            ech.insert(v.as_ref());
        }
        ech.finish();
        Subspace { ech }
    }

    pub fn field(&self) -> Field {
        self.ech.field()
    }

    pub fn ambient(&self) -> usize {
        self.ech.ncols()
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn basis(&self) -> &[SparseVec] {
        self.ech.rows()
    }

    pub fn pivots(&self) -> &[usize] {
        self.ech.pivots()
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.ech.contains(v)
    }

    /// Canonical coset representative of `v`: zero on every pivot column.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> SparseVec {
        self.ech.reduce(v)
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinError> {
        check_ambient(self, other)?;
        Ok(Subspace::span(
            self.field(),
            self.ambient(),
            self.basis().iter().chain(other.basis().iter()),
        ))
    }

    /// Zassenhaus: rows `(a|a)` and `(b|0)`; rows whose left half vanishes
    /// carry the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinError> {
        check_ambient(self, other)?;
        let n = self.ambient();
        let f = self.field();
        let mut e = Echelon::new(f, 2 * n);
        for a in self.basis() {
            let mut v = a.clone();
            v.extend(a.iter().map(|(c, x)| (c + n, x.clone())));
            e.insert(&v);
        }
        for b in other.basis() {
            e.insert(b);
        }
        let right = e
            .rows()
            .iter()
            .filter(|r| r[0].0 >= n)
            .map(|r| r.iter().map(|(c, x)| (c - n, x.clone())).collect::<SparseVec>())
            .collect::<Vec<_>>();
        Ok(Subspace::span(f, n, right))
    }

    /// `dim(self / sub)`; errors unless `sub` is contained in `self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize, LinError> {
        check_ambient(self, sub)?;
        if !sub.is_subspace_of(self) {
            return Err(LinError::NotContained);
        }
        Ok(self.dim() - sub.dim())
    }

    /// Annihilator in the dual space, coordinates dual to the standard basis.
    pub fn annihilator(&self) -> Subspace {
        kernel(&Matrix::from_rows(self.field(), self.ambient(), self.basis().to_vec()))
    }
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<(), LinError> {
    if a.ambient() != b.ambient() {
        return Err(LinError::AmbientMismatch(a.ambient(), b.ambient()));
    }
    Ok(())
}

/// `{ v : m v = 0 }` as a subspace of `k^cols`.
pub fn kernel(m: &Matrix) -> Subspace {
    Subspace::span(m.field, m.cols, kernel_basis(m))
}

/// Kernel basis read off the reduced echelon form, one vector per free
/// column. The vector for free column `f` is supported on columns `<= f`.
pub fn kernel_basis(m: &Matrix) -> Vec<SparseVec> {
    let mut e = Echelon::new(m.field, m.cols);
    for r in &m.data {
        e.insert(r);
    }
    e.finish();
    kernel_from_rref(&e)
}

pub fn kernel_from_rref(e: &Echelon) -> Vec<SparseVec> {
    let f = e.field();
    let n = e.ncols();
    // column f -> list of (pivot col, entry)
    let mut by_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n];
    for (row, &p) in e.rows().iter().zip(e.pivots()) {
        for (c, x) in row.iter().skip(1) {
            by_col[*c].push((p, x.neg()));
        }
    }
    let mut out = Vec::new();
    for col in 0..n {
        if e.is_pivot(col) {
            continue;
        }
        let mut v = std::mem::take(&mut by_col[col]);
        v.push((col, f.one()));
        out.push(sparse::collect(v));
    }
    out
}

/// Column space of `m`.
pub fn image(m: &Matrix) -> Subspace {
    Subspace::span(m.field, m.rows, m.columns())
}

/// Some `x` with `m x = b`, or `None` when `b` is not in the image.
pub fn solve(m: &Matrix, b: &[(usize, Scalar)]) -> Result<Option<SparseVec>, LinError> {
    if let Some(&(c, _)) = b.last() {
        if c >= m.rows {
            return Err(LinError::DimMismatch { rows: m.rows, len: c + 1 });
        }
    }
    Ok(Solver::new(m.field, m.rows, &m.columns()).solve(b))
}

/// Prepared solver for repeated right-hand sides against fixed columns.
#[derive(Clone, Debug)]
pub struct Solver {
    ech: Echelon,
}

impl Solver {
    pub fn new(field: Field, rows: usize, columns: &[SparseVec]) -> Self {
        let mut ech = Echelon::tracked(field, rows);
        for c in columns {
            ech.insert(c);
        }
        Solver { ech }
    }

    pub fn solve(&self, b: &[(usize, Scalar)]) -> Option<SparseVec> {
        let (r, comb) = self.ech.reduce_tracked(b);
        if r.is_empty() {
            Some(comb)
        } else {
            None
        }
    }

    pub fn in_image(&self, b: &[(usize, Scalar)]) -> bool {
        self.ech.contains(b)
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }
}

/// Basis of a quotient `span(numerators) / denominator` with coordinates.
/// Representatives are the residues of numerator vectors modulo the
/// denominator, taken in the order given.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    denom: Echelon,
    reps: Vec<SparseVec>,
    rep_ech: Echelon,
}

impl QuotientBasis {
    pub fn new<I, V>(field: Field, ambient: usize, denominator: &[SparseVec], numerators: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[(usize, Scalar)]>,
    {
        let mut denom = Echelon::new(field, ambient);
        for d in denominator {
            denom.insert(d);
        }
        denom.finish();
        let mut qb = QuotientBasis { denom, reps: Vec::new(), rep_ech: Echelon::tracked(field, ambient) };
        for v in numerators {
            qb.push(v.as_ref());
        }
        qb
    }

    /// Add `v` as a new representative if it is independent; returns whether it was.
    pub fn push(&mut self, v: &[(usize, Scalar)]) -> bool {
        let r = self.denom.reduce(v);
        if r.is_empty() || self.rep_ech.contains(&r) {
            return false;
        }
        self.rep_ech.insert(&r);
        self.reps.push(r);
        true
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }

    pub fn denominator(&self) -> &Echelon {
        &self.denom
    }

    pub fn field(&self) -> Field {
        self.denom.field()
    }

    /// Coordinates of `v` in the representative basis, `None` if `v` is
    /// outside `span(reps) + denominator`.
    pub fn coords(&self, v: &[(usize, Scalar)]) -> Option<SparseVec> {
        let r = self.denom.reduce(v);
        let (res, comb) = self.rep_ech.reduce_tracked(&r);
        if res.is_empty() {
            Some(comb)
        } else {
            None
        }
    }

    pub fn is_zero_class(&self, v: &[(usize, Scalar)]) -> bool {
        self.denom.contains(v)
    }
}
