use super::scalar::{Field, Scalar};
use super::sparse::{axpy, scale, SparseVec};

const NONE: u32 = u32::MAX;

/// Incremental row echelon basis. Rows are normalized (pivot entry 1) and
/// every row's entries sit at or after its pivot, so a single ascending scan
/// reduces any vector. `finish` brings the rows to reduced form.
///
/// With tracking enabled every row remembers which combination of inserted
/// vectors produced it.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    ncols: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_row: Vec<u32>,
    track: Option<Vec<SparseVec>>,
    inserted: usize,
}

impl Echelon {
    pub fn new(field: Field, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![NONE; ncols],
            track: None,
            inserted: 0,
        }
    }

    pub fn tracked(field: Field, ncols: usize) -> Self {
        let mut e = Echelon::new(field, ncols);
        e.track = Some(Vec::new());
        e
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col] != NONE
    }

    /// Residue of `v` modulo the row space; it vanishes on every pivot column.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> SparseVec {
        self.reduce_inner(v, None)
    }

    /// Residue plus the combination `c` (over inserted vectors) with
    /// `v = residue + sum c_j * inserted_j`. Requires tracking.
    pub fn reduce_tracked(&self, v: &[(usize, Scalar)]) -> (SparseVec, SparseVec) {
        let mut comb = Vec::new();
        let r = self.reduce_inner(v, Some(&mut comb));
        (r, comb)
    }

    fn reduce_inner(&self, v: &[(usize, Scalar)], mut comb: Option<&mut SparseVec>) -> SparseVec {
        let mut v: SparseVec = v.to_vec();
        let mut idx = 0;
        while idx < v.len() {
            let c = v[idx].0;
            let r = self.pivot_row[c];
            if r == NONE {
                idx += 1;
                continue;
            }
            let a = v[idx].1.clone();
            let row = &self.rows[r as usize];
            // entries before idx are untouched because row starts at c
            let tail = axpy(&v[idx..], &a.neg(), row);
            v.truncate(idx);
            v.extend(tail);
            if let Some(cb) = comb.as_deref_mut() {
                let t = &self.track.as_ref().expect("tracking disabled")[r as usize];
                *cb = axpy(cb, &a, t);
            }
        }
        v
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert a vector. Returns `true` if it enlarged the span. With tracking,
    /// each call consumes one insertion index whether or not it was independent.
    pub fn insert(&mut self, v: &[(usize, Scalar)]) -> bool {
        self.insert_with_dependency(v).is_none()
    }

    /// Like `insert`, but a dependent vector returns the relation it satisfies:
    /// a combination of inserted vectors (including itself) equal to zero.
    pub fn insert_with_dependency(&mut self, v: &[(usize, Scalar)]) -> Option<SparseVec> {
        let me = self.inserted;
        self.inserted += 1;
        let tracking = self.track.is_some();
        let (r, comb) = if tracking {
            self.reduce_tracked(v)
        } else {
            (self.reduce(v), Vec::new())
        };
        if r.is_empty() {
            if tracking {
                // v - sum comb = 0
                let mut rel = scale(&comb, &self.field.int(-1));
                rel = axpy(&rel, &self.field.one(), &[(me, self.field.one())]);
                return Some(rel);
            }
            return Some(Vec::new());
        }
        let inv = r[0].1.inv();
        let pivot = r[0].0;
        let row = scale(&r, &inv);
        if let Some(track) = self.track.as_mut() {
            // row = (v - comb) * inv
            let t = axpy(&[(me, self.field.one())], &self.field.int(-1), &comb);
            track.push(scale(&t, &inv));
        }
        self.pivot_row[pivot] = self.rows.len() as u32;
        self.rows.push(row);
        self.pivots.push(pivot);
        None
    }

    /// Bring rows to reduced row echelon form, sorted by pivot.
    pub fn finish(&mut self) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.pivots[i]));
        for &i in &order {
            let row = std::mem::take(&mut self.rows[i]);
            let head = row[0].clone();
            let mut comb = Vec::new();
            // rows with larger pivots are already reduced
            let tail = {
                let mut v: SparseVec = row[1..].to_vec();
                let mut idx = 0;
                while idx < v.len() {
                    let c = v[idx].0;
                    let r = self.pivot_row[c];
                    if r == NONE {
                        idx += 1;
                        continue;
                    }
                    let a = v[idx].1.clone();
                    let other = &self.rows[r as usize];
                    let t = axpy(&v[idx..], &a.neg(), other);
                    v.truncate(idx);
                    v.extend(t);
                    if let Some(track) = self.track.as_ref() {
                        comb = axpy(&comb, &a, &track[r as usize]);
                    }
                }
                v
            };
            let mut new_row = Vec::with_capacity(tail.len() + 1);
            new_row.push(head);
            new_row.extend(tail);
            self.rows[i] = new_row;
            if let Some(track) = self.track.as_mut() {
                track[i] = axpy(&track[i], &self.field.int(-1), &comb);
            }
        }
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        let rows: Vec<SparseVec> = idx.iter().map(|&i| std::mem::take(&mut self.rows[i])).collect();
        let pivots: Vec<usize> = idx.iter().map(|&i| self.pivots[i]).collect();
        let track = self
            .track
            .as_mut()
            .map(|t| idx.iter().map(|&i| std::mem::take(&mut t[i])).collect());
        self.rows = rows;
        self.pivots = pivots;
        self.track = track;
        for (k, &p) in self.pivots.iter().enumerate() {
            self.pivot_row[p] = k as u32;
        }
    }

    pub fn into_rows(self) -> (Vec<SparseVec>, Vec<usize>) {
        (self.rows, self.pivots)
    }
}
