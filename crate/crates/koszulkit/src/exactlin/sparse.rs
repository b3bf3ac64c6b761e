use super::scalar::{Field, Scalar};

/// Sparse vector: strictly increasing column indices, no stored zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

/// `y + a * x`.
pub fn axpy(y: &[(usize, Scalar)], a: &Scalar, x: &[(usize, Scalar)]) -> SparseVec {
    if a.is_zero() {
        return y.to_vec();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j == x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i].clone());
            i += 1;
        } else if i == y.len() || x[j].0 < y[i].0 {
            out.push((x[j].0, a * &x[j].1));
            j += 1;
        } else {
            let s = &y[i].1 + &(a * &x[j].1);
            if !s.is_zero() {
                out.push((y[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn add(y: &[(usize, Scalar)], x: &[(usize, Scalar)], field: Field) -> SparseVec {
    axpy(y, &field.one(), x)
}

pub fn sub(y: &[(usize, Scalar)], x: &[(usize, Scalar)], field: Field) -> SparseVec {
    axpy(y, &field.int(-1), x)
}

pub fn scale(v: &[(usize, Scalar)], a: &Scalar) -> SparseVec {
    if a.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(c, x)| (*c, a * x)).collect()
}

pub fn get(v: &[(usize, Scalar)], col: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&col, |e| e.0).ok().map(|i| &v[i].1)
}

pub fn dot(a: &[(usize, Scalar)], b: &[(usize, Scalar)], field: Field) -> Scalar {
    let mut acc = field.zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].0 < b[j].0 {
            i += 1;
        } else if b[j].0 < a[i].0 {
            j += 1;
        } else {
            acc = &acc + &(&a[i].1 * &b[j].1);
            i += 1;
            j += 1;
        }
    }
    acc
}

/// Build a sparse vector from unsorted `(col, value)` pairs, summing duplicates.
pub fn collect(mut entries: Vec<(usize, Scalar)>) -> SparseVec {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(entries.len());
    for (c, x) in entries {
        match out.last_mut() {
            Some(last) if last.0 == c => {
                last.1 = &last.1 + &x;
            }
            _ => out.push((c, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

pub fn from_dense(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(v: &[(usize, Scalar)], len: usize, field: Field) -> Vec<Scalar> {
    let mut out = vec![field.zero(); len];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

/// Reindex columns through `map`; entries mapped to `None` are dropped.
pub fn remap(v: &[(usize, Scalar)], map: impl Fn(usize) -> Option<usize>) -> SparseVec {
    collect(
        v.iter()
            .filter_map(|(c, x)| map(*c).map(|d| (d, x.clone())))
            .collect(),
    )
}
