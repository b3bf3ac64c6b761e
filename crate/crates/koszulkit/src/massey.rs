//! Tuple Massey products `<x,y,z>`, `<x1,x2,x3,x4>` of degree-one classes
//! and the tensor products `m3`, `m4`, with explicit indeterminacy.
//!
//! Classes are given by coordinates in the basis of `H^1` chosen by
//! [`cohomology`]; values are coordinates in the basis of `H^2`.
//! Tensors in `H^1^{(x)n}` use the index `((i1*h + i2)*h + ...)`.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dg::{cohomology, mul_checked, Cohomology, DgAlgebra, DgError};
use crate::em::{page_cell, EmRun};
use crate::exactlin::{kernel_basis, sparse, Field, Matrix, Scalar, Solver, SparseVec, Subspace};

pub const SEED_ENV: &str = "KOSZULKIT_SEED";
pub const DEFAULT_SEED: u64 = 0x6b6f737a;

/// Seed from `KOSZULKIT_SEED`, or the fixed default.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MasseyError {
    #[error("A^0 has dimension {0}, tuple products need A^0 = k")]
    NotConnected(usize),
    #[error("class coordinate {0} is outside H^1")]
    NotInH1(usize),
    #[error("tensor has length {0}, expected {1}")]
    BadTensor(usize, usize),
    #[error("tensor outside the domain: {0}")]
    OutsideDomain(String),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasseyValue {
    pub defined: bool,
    /// first vanishing condition that failed
    pub stage: Option<String>,
    pub value: SparseVec,
    pub cocycle: SparseVec,
    pub indeterminacy: Subspace,
}

impl MasseyValue {
    fn undefined(field: Field, h2: usize, stage: &str) -> Self {
        MasseyValue {
            defined: false,
            stage: Some(stage.to_string()),
            value: Vec::new(),
            cocycle: Vec::new(),
            indeterminacy: Subspace::zero(field, h2),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.indeterminacy.contains(&self.value)
    }

    pub fn is_nonzero(&self) -> bool {
        self.defined && !self.contains_zero()
    }

    /// `other` lies in the coset `value + indeterminacy`.
    pub fn same_coset(&self, other: &[(usize, Scalar)]) -> bool {
        let f = self.indeterminacy.field();
        self.indeterminacy.contains(&sparse::sub(&self.value, other, f))
    }
}

fn random_scalar(f: Field, rng: &mut dyn RngCore) -> Scalar {
    match f.characteristic() {
        0 => f.int(rng.gen_range(-4..=4)),
        p => f.int(rng.gen_range(0..p as i64)),
    }
}

fn tensor_index(h: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * h + i)
}

fn lin(f: Field, terms: impl IntoIterator<Item = (Scalar, SparseVec)>) -> SparseVec {
    let mut acc: SparseVec = Vec::new();
    for (c, v) in terms {
        if !c.is_zero() {
            acc = sparse::axpy(&acc, &c, &v);
        }
    }
    let _ = f;
    acc
}

/// Cochain data of `A` in degrees 1 and 2 shared by all the products.
pub struct MasseyContext<'a, A: DgAlgebra + ?Sized> {
    a: &'a A,
    pub h1: Cohomology,
    pub h2: Cohomology,
    lift: Solver,
    /// class of `x_i x_j` at `i*h + j`
    m2: Vec<SparseVec>,
    /// basis of `K^2 = ker(m2)` in `H^1 (x) H^1`
    pub k2: Vec<SparseVec>,
    /// `L(m(k~_s))` for each `K^2` basis vector
    ell: Vec<SparseVec>,
    pub im_m2: Subspace,
}

impl<'a, A: DgAlgebra + ?Sized> MasseyContext<'a, A> {
    pub fn new(a: &'a A) -> Result<Self, MasseyError> {
        if a.dim(0) != 1 {
            return Err(MasseyError::NotConnected(a.dim(0)));
        }
        let f = a.field();
        let h1 = cohomology(a, 1)?;
        let h2 = cohomology(a, 2)?;
        let cols: Vec<SparseVec> = (0..a.dim(1)).map(|c| a.d(1, c)).collect();
        let lift = Solver::new(f, a.dim(2), &cols);
        let h = h1.dim();
        let mut m2 = Vec::with_capacity(h * h);
        for i in 0..h {
            for j in 0..h {
                let p = mul_checked(a, 1, &h1.reps[i], 1, &h1.reps[j])?;
                m2.push(h2.coords(&p).ok_or_else(|| MasseyError::Invariant("x_i x_j is not a cocycle".into()))?);
            }
        }
        let k2 = kernel_basis(&Matrix::from_columns(f, h2.dim(), &m2));
        let im_m2 = Subspace::span(f, h2.dim(), m2.iter().cloned());
        let mut ctx = MasseyContext { a, h1, h2, lift, m2, k2, ell: Vec::new(), im_m2 };
        let mut ell = Vec::new();
        for s in 0..ctx.k2.len() {
            let b = ctx.pair_product(&ctx.k2[s])?;
            ell.push(ctx.solve_d(&b)?);
        }
        ctx.ell = ell;
        Ok(ctx)
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn h1_dim(&self) -> usize {
        self.h1.dim()
    }

    fn check_class(&self, x: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        if let Some(&(i, _)) = x.iter().find(|(i, _)| *i >= self.h1.dim()) {
            return Err(MasseyError::NotInH1(i));
        }
        Ok(self.h1.lift(x))
    }

    fn prod(&self, x: &[(usize, Scalar)], y: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        Ok(mul_checked(self.a, 1, x, 1, y)?)
    }

    fn solve_d(&self, b: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        self.lift.solve(b).ok_or_else(|| MasseyError::Invariant("coboundary without a primitive".into()))
    }

    fn class2(&self, v: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        self.h2.coords(v).ok_or_else(|| MasseyError::Invariant("value is not a cocycle".into()))
    }

    /// `sum k_ij x~_i x~_j` for a tensor `k` in `H^1 (x) H^1`.
    fn pair_product(&self, k: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        let h = self.h1.dim();
        let mut acc = Vec::new();
        for (ij, c) in k {
            let p = self.prod(&self.h1.reps[ij / h], &self.h1.reps[ij % h])?;
            acc = sparse::axpy(&acc, c, &p);
        }
        Ok(acc)
    }

    /// Class of `x * e_k` for each basis class `e_k`.
    fn left_mult(&self, x: &[(usize, Scalar)]) -> Vec<SparseVec> {
        let h = self.h1.dim();
        (0..h).map(|k| lin(self.field(), x.iter().map(|(i, c)| (c.clone(), self.m2[i * h + k].clone())))).collect()
    }

    fn right_mult(&self, z: &[(usize, Scalar)]) -> Vec<SparseVec> {
        let h = self.h1.dim();
        (0..h).map(|k| lin(self.field(), z.iter().map(|(j, c)| (c.clone(), self.m2[k * h + j].clone())))).collect()
    }

    fn random_cocycle(&self, rng: &mut dyn RngCore) -> SparseVec {
        let f = self.field();
        let c: SparseVec = sparse::collect((0..self.h1.dim()).map(|i| (i, random_scalar(f, rng))).collect());
        self.h1.lift(&c)
    }

    /// `<x,y,z>`; with `rng`, the primitives are shifted by random cocycles.
    pub fn triple_tuple(
        &self,
        x: &[(usize, Scalar)],
        y: &[(usize, Scalar)],
        z: &[(usize, Scalar)],
        rng: Option<&mut dyn RngCore>,
    ) -> Result<MasseyValue, MasseyError> {
        let f = self.field();
        let (xt, yt, zt) = (self.check_class(x)?, self.check_class(y)?, self.check_class(z)?);
        let xy = self.prod(&xt, &yt)?;
        if !self.h2.is_coboundary(&xy) {
            return Ok(MasseyValue::undefined(f, self.h2.dim(), "xy != 0"));
        }
        let yz = self.prod(&yt, &zt)?;
        if !self.h2.is_coboundary(&yz) {
            return Ok(MasseyValue::undefined(f, self.h2.dim(), "yz != 0"));
        }
        let mut zeta = self.solve_d(&xy)?;
        let mut xi = self.solve_d(&yz)?;
        if let Some(rng) = rng {
            zeta = sparse::add(&zeta, &self.random_cocycle(rng), f);
            xi = sparse::add(&xi, &self.random_cocycle(rng), f);
        }
        let c = sparse::add(&self.prod(&xt, &xi)?, &self.prod(&zeta, &zt)?, f);
        let value = self.class2(&c)?;
        let mut gens = self.left_mult(x);
        gens.extend(self.right_mult(z));
        Ok(MasseyValue {
            defined: true,
            stage: None,
            value,
            cocycle: c,
            indeterminacy: Subspace::span(f, self.h2.dim(), gens),
        })
    }

    /// Basis of `{y in H^1 : class(y x) = 0}` or `{y : class(x y) = 0}`.
    fn annihilator(&self, x: &[(usize, Scalar)], left_of_x: bool) -> Vec<SparseVec> {
        let cols = if left_of_x { self.right_mult(x) } else { self.left_mult(x) };
        kernel_basis(&Matrix::from_columns(self.field(), self.h2.dim(), &cols))
    }

    /// `<x1,x2,x3,x4>`; the indeterminacy is spanned by the one-step moves of
    /// the primitives `eta`, `zeta` by cocycles and the products of
    /// simultaneous `eta_12`, `eta_34` moves.
    pub fn quadruple_tuple(&self, xs: [&[(usize, Scalar)]; 4]) -> Result<MasseyValue, MasseyError> {
        let f = self.field();
        let n2 = self.h2.dim();
        let xt: Vec<SparseVec> = xs.iter().map(|x| self.check_class(x)).collect::<Result<_, _>>()?;
        let mut eta = Vec::new();
        for k in 0..3 {
            let p = self.prod(&xt[k], &xt[k + 1])?;
            if !self.h2.is_coboundary(&p) {
                return Ok(MasseyValue::undefined(f, n2, &format!("x{}x{} != 0", k + 1, k + 2)));
            }
            eta.push(self.solve_d(&p)?);
        }
        let c123 = sparse::add(&self.prod(&xt[0], &eta[1])?, &self.prod(&eta[0], &xt[2])?, f);
        if !self.h2.is_coboundary(&c123) {
            return Ok(MasseyValue::undefined(f, n2, "<x1,x2,x3> != 0"));
        }
        let c234 = sparse::add(&self.prod(&xt[1], &eta[2])?, &self.prod(&eta[1], &xt[3])?, f);
        if !self.h2.is_coboundary(&c234) {
            return Ok(MasseyValue::undefined(f, n2, "<x2,x3,x4> != 0"));
        }
        let z123 = self.solve_d(&c123)?;
        let z234 = self.solve_d(&c234)?;
        let mut c = self.prod(&xt[0], &z234)?;
        c = sparse::add(&c, &self.prod(&eta[0], &eta[2])?, f);
        c = sparse::add(&c, &self.prod(&z123, &xt[3])?, f);
        let value = self.class2(&c)?;

        let mut gens = self.left_mult(xs[0]);
        gens.extend(self.right_mult(xs[3]));
        let y12 = self.annihilator(xs[2], true);
        let y34 = self.annihilator(xs[1], false);
        for y in &y12 {
            let yt = self.h1.lift(y);
            let u = self.solve_d(&self.prod(&yt, &xt[2])?)?;
            let delta = sparse::add(&self.prod(&yt, &eta[2])?, &self.prod(&u, &xt[3])?, f);
            gens.push(self.class2(&delta)?);
        }
        for y in &y34 {
            let yt = self.h1.lift(y);
            let u = self.solve_d(&self.prod(&xt[1], &yt)?)?;
            let delta = sparse::add(&self.prod(&eta[0], &yt)?, &self.prod(&xt[0], &u)?, f);
            gens.push(self.class2(&delta)?);
        }
        let left = Subspace::span(f, self.h1.dim(), self.annihilator(xs[0], false));
        let right = Subspace::span(f, self.h1.dim(), self.annihilator(xs[3], true));
        let y23 = left.intersect(&right).map_err(|e| MasseyError::Invariant(e.to_string()))?;
        for y in y23.basis() {
            let yt = self.h1.lift(y);
            let u123 = self.solve_d(&self.prod(&xt[0], &yt)?)?;
            let u234 = self.solve_d(&self.prod(&yt, &xt[3])?)?;
            let delta = sparse::add(&self.prod(&xt[0], &u234)?, &self.prod(&u123, &xt[3])?, f);
            gens.push(self.class2(&delta)?);
        }
        for y in &y12 {
            for y2 in &y34 {
                let p = self.prod(&self.h1.lift(y), &self.h1.lift(y2))?;
                gens.push(self.class2(&p)?);
            }
        }
        Ok(MasseyValue { defined: true, stage: None, value, cocycle: c, indeterminacy: Subspace::span(f, n2, gens) })
    }

    /// Coordinates of `theta` in the basis `{a_s (x) b_t}` built from two
    /// families of tensors of lengths `la` and `lb`.
    fn decompose(
        &self,
        theta: &[(usize, Scalar)],
        fa: &[SparseVec],
        la: usize,
        fb: &[SparseVec],
        lb: usize,
    ) -> Option<SparseVec> {
        let h = self.h1.dim();
        let size_b = h.pow(lb as u32);
        let mut cols = Vec::with_capacity(fa.len() * fb.len());
        for a in fa {
            for b in fb {
                let mut e = Vec::new();
                for (i, x) in a {
                    for (j, y) in b {
                        e.push((i * size_b + j, x * y));
                    }
                }
                cols.push(sparse::collect(e));
            }
        }
        Solver::new(self.field(), h.pow((la + lb) as u32), &cols).solve(theta)
    }

    fn unit_tensors(&self) -> Vec<SparseVec> {
        let f = self.field();
        (0..self.h1.dim()).map(|i| vec![(i, f.one())]).collect()
    }

    /// `K^2 (x) H^1 cap H^1 (x) K^2`.
    pub fn m3_domain(&self) -> Subspace {
        let f = self.field();
        let h = self.h1.dim();
        let units = self.unit_tensors();
        let l = Subspace::span(f, h * h * h, tensor_products(&self.k2, &units, h));
        let r = Subspace::span(f, h * h * h, tensor_products(&units, &self.k2, h * h));
        l.intersect(&r).expect("same ambient")
    }

    /// Tensor triple product in `H^2` coordinates; its class modulo `im m2`
    /// is the well-defined output.
    pub fn tensor_m3(&self, theta: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        let h = self.h1.dim();
        let units = self.unit_tensors();
        let a = self
            .decompose(theta, &self.k2, 2, &units, 1)
            .ok_or_else(|| MasseyError::OutsideDomain("not in K2 (x) H1".into()))?;
        let b = self
            .decompose(theta, &units, 1, &self.k2, 2)
            .ok_or_else(|| MasseyError::OutsideDomain("not in H1 (x) K2".into()))?;
        let mut c = Vec::new();
        for (sk, x) in &a {
            let (s, k) = (sk / h, sk % h);
            c = sparse::axpy(&c, x, &self.prod(&self.ell[s], &self.h1.reps[k])?);
        }
        let nk = self.k2.len();
        for (is, x) in &b {
            let (i, s) = (is / nk, is % nk);
            c = sparse::axpy(&c, x, &self.prod(&self.h1.reps[i], &self.ell[s])?);
        }
        self.class2(&c)
    }

    /// Smallest `W_l`, `W_r` in `H^1` with `theta` in `W_l (x) H^1 (x) H^1`
    /// and in `H^1 (x) H^1 (x) W_r`.
    pub fn m3_supports(&self, theta: &[(usize, Scalar)]) -> (Subspace, Subspace) {
        let f = self.field();
        let h = self.h1.dim();
        let mut left: BTreeMap<usize, SparseVec> = BTreeMap::new();
        let mut right: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (i, x) in theta {
            left.entry(i % (h * h)).or_default().push((i / (h * h), x.clone()));
            right.entry(i / h).or_default().push((i % h, x.clone()));
        }
        (Subspace::span(f, h, left.into_values()), Subspace::span(f, h, right.into_values()))
    }

    /// `W_l H^1 + H^1 W_r` in `H^2`. Advisory: finer than `im m2`, which is
    /// what [`Self::tensor_m3`] is guaranteed modulo.
    pub fn m3_fine_indeterminacy(&self, theta: &[(usize, Scalar)]) -> Subspace {
        let f = self.field();
        let h = self.h1.dim();
        let (wl, wr) = self.m3_supports(theta);
        let mut gens = Vec::new();
        for w in wl.basis() {
            for j in 0..h {
                gens.push(lin(f, w.iter().map(|(i, x)| (x.clone(), self.m2[i * h + j].clone()))));
            }
        }
        for w in wr.basis() {
            for i in 0..h {
                gens.push(lin(f, w.iter().map(|(j, x)| (x.clone(), self.m2[i * h + j].clone()))));
            }
        }
        Subspace::span(f, self.h2.dim(), gens)
    }

    /// `im m3` in `H^2` coordinates (before reducing modulo `im m2`).
    pub fn m3_image(&self) -> Result<Subspace, MasseyError> {
        let dom = self.m3_domain();
        let vals: Vec<SparseVec> = dom.basis().iter().map(|t| self.tensor_m3(t)).collect::<Result<_, _>>()?;
        Ok(Subspace::span(self.field(), self.h2.dim(), vals))
    }

    /// `K^3 = ker(m3: domain -> H^2 / im m2)`.
    pub fn k3(&self) -> Result<Vec<SparseVec>, MasseyError> {
        let f = self.field();
        let dom = self.m3_domain();
        let cols: Vec<SparseVec> = dom
            .basis()
            .iter()
            .map(|t| self.tensor_m3(t).map(|v| self.im_m2.reduce(&v)))
            .collect::<Result<_, _>>()?;
        let ker = kernel_basis(&Matrix::from_columns(f, self.h2.dim(), &cols));
        let h3 = self.h1.dim().pow(3);
        Ok(ker.iter().map(|c| lin(f, c.iter().map(|(i, x)| (x.clone(), dom.basis()[*i].clone())))).inspect(|v| {
            debug_assert!(v.iter().all(|(i, _)| *i < h3));
        }).collect())
    }

    /// `K^3 (x) H^1 cap H^1 (x) K^3`.
    pub fn m4_domain(&self) -> Result<Subspace, MasseyError> {
        let f = self.field();
        let h = self.h1.dim();
        let k3 = self.k3()?;
        let units = self.unit_tensors();
        let n = h.pow(4);
        let l = Subspace::span(f, n, tensor_products(&k3, &units, h));
        let r = Subspace::span(f, n, tensor_products(&units, &k3, h * h * h));
        Ok(l.intersect(&r).expect("same ambient"))
    }

    /// `im m2 + im m3`, the subspace `m4` is taken modulo.
    pub fn m4_indeterminacy(&self) -> Result<Subspace, MasseyError> {
        self.im_m2.sum(&self.m3_image()?).map_err(|e| MasseyError::Invariant(e.to_string()))
    }

    /// Tensor quadruple product in `H^2` coordinates, well defined modulo
    /// [`Self::m4_indeterminacy`].
    pub fn tensor_m4(&self, theta: &[(usize, Scalar)]) -> Result<SparseVec, MasseyError> {
        let f = self.field();
        let h = self.h1.dim();
        let nk = self.k2.len();
        let n2 = self.h2.dim();
        if !self.m4_domain()?.contains(theta) {
            return Err(MasseyError::OutsideDomain("not in K3 (x) H1 cap H1 (x) K3".into()));
        }
        let units = self.unit_tensors();
        let c = self
            .decompose(theta, &self.k2, 2, &self.k2, 2)
            .ok_or_else(|| MasseyError::OutsideDomain("not in K2 (x) K2".into()))?;
        let mid: Vec<SparseVec> = tensor_products(&self.k2, &units, h);
        let dcoef = self
            .decompose(theta, &units, 1, &mid, 3)
            .ok_or_else(|| MasseyError::OutsideDomain("not in H1 (x) K2 (x) H1".into()))?;
        let kk = |s: usize, a: usize, b: usize| -> Scalar {
            sparse::get(&self.k2[s], a * h + b).cloned().unwrap_or_else(|| f.zero())
        };
        // primitives of the pairwise products, before corrections
        let zero_rows = || vec![vec![Vec::<(usize, Scalar)>::new(); h]; h];
        let mut eta12 = zero_rows();
        let mut eta34 = zero_rows();
        let mut eta23 = zero_rows();
        for (st, x) in &c {
            let (s, t) = (st / nk, st % nk);
            for a in 0..h {
                for b in 0..h {
                    let kt = kk(t, a, b);
                    if !kt.is_zero() {
                        eta12[a][b] = sparse::axpy(&eta12[a][b], &(x * &kt), &self.ell[s]);
                    }
                    let ks = kk(s, a, b);
                    if !ks.is_zero() {
                        eta34[a][b] = sparse::axpy(&eta34[a][b], &(x * &ks), &self.ell[t]);
                    }
                }
            }
        }
        for (isl, x) in &dcoef {
            let (i, sl) = (isl / (nk * h), isl % (nk * h));
            let (s, l) = (sl / h, sl % h);
            eta23[i][l] = sparse::axpy(&eta23[i][l], x, &self.ell[s]);
        }
        let xr = &self.h1.reps;
        let t123 = |e12: &Vec<Vec<SparseVec>>, e23: &Vec<Vec<SparseVec>>, l: usize| -> Result<SparseVec, MasseyError> {
            let mut v = Vec::new();
            for i in 0..h {
                v = sparse::add(&v, &self.prod(&xr[i], &e23[i][l])?, f);
                v = sparse::add(&v, &self.prod(&e12[i][l], &xr[i])?, f);
            }
            Ok(v)
        };
        let t234 = |e23: &Vec<Vec<SparseVec>>, e34: &Vec<Vec<SparseVec>>, i: usize| -> Result<SparseVec, MasseyError> {
            let mut v = Vec::new();
            for j in 0..h {
                v = sparse::add(&v, &self.prod(&xr[j], &e34[i][j])?, f);
                v = sparse::add(&v, &self.prod(&e23[i][j], &xr[j])?, f);
            }
            Ok(v)
        };
        // corrections by cocycles: y_{t,a} on eta12, y'_{s,a} on eta34, z_{i,l,a} on eta23
        let n_y = nk * h;
        let n_z = h * h * h;
        let eq_row = |block: usize, idx: usize, r: usize| block * h * n2 + idx * n2 + r;
        let mut cols: Vec<SparseVec> = Vec::new();
        for t in 0..nk {
            for a in 0..h {
                let mut e = Vec::new();
                for l in 0..h {
                    for k in 0..h {
                        let kt = kk(t, k, l);
                        for (r, v) in &self.m2[a * h + k] {
                            e.push((eq_row(0, l, *r), &kt * v));
                        }
                    }
                }
                cols.push(sparse::collect(e));
            }
        }
        for s in 0..nk {
            for a in 0..h {
                let mut e = Vec::new();
                for i in 0..h {
                    for j in 0..h {
                        let ks = kk(s, i, j);
                        for (r, v) in &self.m2[j * h + a] {
                            e.push((eq_row(1, i, *r), &ks * v));
                        }
                    }
                }
                cols.push(sparse::collect(e));
            }
        }
        for i in 0..h {
            for l in 0..h {
                for a in 0..h {
                    let mut e = Vec::new();
                    for (r, v) in &self.m2[i * h + a] {
                        e.push((eq_row(0, l, *r), v.clone()));
                    }
                    for (r, v) in &self.m2[a * h + l] {
                        e.push((eq_row(1, i, *r), v.clone()));
                    }
                    cols.push(sparse::collect(e));
                }
            }
        }
        let mut rhs = Vec::new();
        for l in 0..h {
            for (r, v) in self.class2(&t123(&eta12, &eta23, l)?)? {
                rhs.push((eq_row(0, l, r), v.neg()));
            }
        }
        for i in 0..h {
            for (r, v) in self.class2(&t234(&eta23, &eta34, i)?)? {
                rhs.push((eq_row(1, i, r), v.neg()));
            }
        }
        let rhs = sparse::collect(rhs);
        let sol = Solver::new(f, 2 * h * n2, &cols)
            .solve(&rhs)
            .ok_or_else(|| MasseyError::OutsideDomain("no defining system".into()))?;
        debug_assert_eq!(cols.len(), 2 * n_y + n_z);
        let mut y12 = vec![Vec::<(usize, Scalar)>::new(); nk];
        let mut y34 = vec![Vec::<(usize, Scalar)>::new(); nk];
        for (u, x) in &sol {
            let u = *u;
            if u < n_y {
                y12[u / h] = sparse::axpy(&y12[u / h], x, &xr[u % h]);
            } else if u < 2 * n_y {
                let u = u - n_y;
                y34[u / h] = sparse::axpy(&y34[u / h], x, &xr[u % h]);
            } else {
                let u = u - 2 * n_y;
                let (i, l, a) = (u / (h * h), (u / h) % h, u % h);
                eta23[i][l] = sparse::axpy(&eta23[i][l], x, &xr[a]);
            }
        }
        for t in 0..nk {
            for a in 0..h {
                for b in 0..h {
                    let kt = kk(t, a, b);
                    if !kt.is_zero() {
                        eta12[a][b] = sparse::axpy(&eta12[a][b], &kt, &y12[t]);
                    }
                    let ks = kk(t, a, b);
                    if !ks.is_zero() {
                        eta34[a][b] = sparse::axpy(&eta34[a][b], &ks, &y34[t]);
                    }
                }
            }
        }
        let mut value = Vec::new();
        for l in 0..h {
            let t = t123(&eta12, &eta23, l)?;
            let z = self.solve_d(&t)?;
            value = sparse::add(&value, &self.prod(&z, &xr[l])?, f);
        }
        for i in 0..h {
            let t = t234(&eta23, &eta34, i)?;
            let z = self.solve_d(&t)?;
            value = sparse::add(&value, &self.prod(&xr[i], &z)?, f);
        }
        for (st, x) in &c {
            let (s, t) = (st / nk, st % nk);
            value = sparse::axpy(&value, x, &self.prod(&self.ell[s], &self.ell[t])?);
        }
        for t in 0..nk {
            value = sparse::add(&value, &self.prod(&y12[t], &self.ell[t])?, f);
            value = sparse::add(&value, &self.prod(&self.ell[t], &y34[t])?, f);
        }
        self.class2(&value)
    }

    /// Images of `<x,y,z>` and `m3(x (x) y (x) z)` agree in
    /// `H^2 / (im m2 + x H^1 + H^1 z)`.
    pub fn agreement_check(
        &self,
        x: &[(usize, Scalar)],
        y: &[(usize, Scalar)],
        z: &[(usize, Scalar)],
    ) -> Result<bool, MasseyError> {
        let t = self.triple_tuple(x, y, z, None)?;
        if !t.defined {
            return Err(MasseyError::OutsideDomain(t.stage.unwrap_or_default()));
        }
        let h = self.h1.dim();
        let theta = decomposable(self.field(), h, &[x, y, z]);
        let m = self.tensor_m3(&theta)?;
        let q = t.indeterminacy.sum(&self.im_m2).map_err(|e| MasseyError::Invariant(e.to_string()))?;
        Ok(q.contains(&sparse::sub(&t.value, &m, self.field())))
    }

    /// Compares `m_n` with the page differential `d_{n-1}^{n,n}` of an EM
    /// run of the same algebra, over a basis of the source cell.
    pub fn compare_with_page(&self, run: &EmRun, n: usize) -> Result<PageComparison, MasseyError> {
        let f = self.field();
        let h = self.h1.dim();
        let r = n - 1;
        let src = page_cell(&run.complex, n, n, r);
        let modulo = match n {
            3 => self.im_m2.clone(),
            4 => self.m4_indeterminacy()?,
            _ => return Err(MasseyError::Invariant(format!("no tensor product of arity {n}"))),
        };
        let bar = &run.bar;
        let n1 = self.a.dim(1);
        let cols: Vec<SparseVec> = (0..h.pow(n as u32))
            .map(|idx| {
                let mut digits = vec![0; n];
                let mut rest = idx;
                for d in digits.iter_mut().rev() {
                    *d = rest % h;
                    rest /= h;
                }
                let mut acc: SparseVec = vec![(0, f.one())];
                for d in digits {
                    let mut next = Vec::new();
                    for (i, x) in &acc {
                        for (j, y) in &self.h1.reps[d] {
                            next.push((i * n1 + j, x * y));
                        }
                    }
                    acc = sparse::collect(next);
                }
                acc
            })
            .collect();
        // the ambient n1^n is large; index only the coordinates that occur
        let support: std::collections::BTreeMap<usize, usize> = cols
            .iter()
            .flat_map(|c| c.iter().map(|(i, _)| *i))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(k, i)| (i, k))
            .collect();
        let cols: Vec<SparseVec> = cols.iter().map(|c| sparse::remap(c, |i| support.get(&i).copied())).collect();
        let leading = Solver::new(f, support.len(), &cols);
        let mut plus = true;
        let mut minus = true;
        let mut m_vals = Vec::new();
        let mut d_vals = Vec::new();
        for rep in src.reps() {
            let mut lead = Vec::new();
            for (i, x) in rep {
                if bar.length[0][*i] == n {
                    let idx = bar.basis[0][*i].iter().fold(0, |acc, &(deg, c)| {
                        debug_assert_eq!(deg, 1);
                        acc * n1 + c
                    });
                    lead.push((idx, x.clone()));
                }
            }
            let lead = sparse::collect(lead);
            if lead.iter().any(|(i, _)| !support.contains_key(i)) {
                return Err(MasseyError::Invariant("leading part outside H^1 tensors".into()));
            }
            let theta = leading
                .solve(&sparse::remap(&lead, |i| support.get(&i).copied()))
                .ok_or_else(|| MasseyError::Invariant("leading part outside H^1 tensors".into()))?;
            let m = match n {
                3 => self.tensor_m3(&theta)?,
                _ => self.tensor_m4(&theta)?,
            };
            let dx = run.complex.d[0].apply(rep);
            let mut a2 = Vec::new();
            for (i, x) in &dx {
                let s = &bar.basis[1][*i];
                if s.len() != 1 {
                    return Err(MasseyError::Invariant("page differential leaves the first column".into()));
                }
                a2.push((s[0].1, x.clone()));
            }
            let d = self.class2(&sparse::collect(a2))?;
            plus &= modulo.contains(&sparse::sub(&m, &d, f));
            minus &= modulo.contains(&sparse::add(&m, &d, f));
            m_vals.push(modulo.reduce(&m));
            d_vals.push(modulo.reduce(&d));
        }
        let rank = |v: &[SparseVec]| Subspace::span(f, self.h2.dim(), v.iter().cloned()).dim();
        let sign = match (plus, minus) {
            (true, false) => Some(1),
            (false, true) => Some(-1),
            _ => None,
        };
        Ok(PageComparison {
            arity: n,
            source_dim: src.dim(),
            m_rank: rank(&m_vals),
            d_rank: rank(&d_vals),
            sign,
            agree: plus || minus,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageComparison {
    pub arity: usize,
    pub source_dim: usize,
    pub m_rank: usize,
    pub d_rank: usize,
    /// `m_n = sign * d_{n-1}`, when the two are nonzero
    pub sign: Option<i64>,
    pub agree: bool,
}

/// `sum a_s (x) b_t` index layout for tensors whose right factors have `size_b` entries.
fn tensor_products(fa: &[SparseVec], fb: &[SparseVec], size_b: usize) -> Vec<SparseVec> {
    let mut out = Vec::new();
    for a in fa {
        for b in fb {
            let mut e = Vec::new();
            for (i, x) in a {
                for (j, y) in b {
                    e.push((i * size_b + j, x * y));
                }
            }
            out.push(sparse::collect(e));
        }
    }
    out
}

/// `x1 (x) ... (x) xn` for class coordinate vectors.
pub fn decomposable(f: Field, h: usize, xs: &[&[(usize, Scalar)]]) -> SparseVec {
    let mut acc: SparseVec = vec![(0, f.one())];
    for x in xs {
        let mut next = Vec::new();
        for (i, a) in &acc {
            for (j, b) in x.iter() {
                next.push((i * h + j, a * b));
            }
        }
        acc = sparse::collect(next);
    }
    let _ = tensor_index;
    acc
}
