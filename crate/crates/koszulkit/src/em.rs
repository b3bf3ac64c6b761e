//! Spectral sequences of finite filtered complexes, the algebraic
//! Eilenberg-Moore spectral sequence of a DG-algebra slice, and the
//! quasi-formality, Priddy and main-theorem checks built on it.
//!
//! Cells are indexed by `(p, q)` with total degree `t = q - p`; the page
//! differential goes `d_r: E_r^{p,q} -> E_r^{p-r, q-r+1}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::dg::{bar, cohomology, cohomology_algebra, BarComplex, Cobar, Cohomology, DgAlgebra, DgError};
use crate::exactlin::{kernel_basis, Field, Matrix, QuotientBasis, SparseVec};
use crate::ideal::{
    dual_slice_with, gr_coalgebra_slice, self_consistency_with, CoalgebraSlice, IdealError, IdealSlices,
    SelfConsistency,
};
use crate::present::Presentation;
use crate::quad::{koszulity_check, tor_weighted, FinGradedAlgebra, Koszulity, QuadError, TorTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmError {
    #[error("filtered complex: {0}")]
    BadComplex(String),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("A^0 has dimension {0}, expected 1")]
    NotConnected(usize),
    #[error("window {window} exceeds the truncation {trunc}")]
    WindowTooLarge { window: usize, trunc: usize },
    #[error("input is not weight-graded")]
    NotGraded,
}

/// A finite cochain complex in degrees `0..=t_max` with an increasing
/// filtration given by a filtration index on each basis element.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub field: Field,
    /// `filt[t][i]`, nondecreasing in `i`
    pub filt: Vec<Vec<usize>>,
    /// `d[t]: C^t -> C^{t+1}`
    pub d: Vec<Matrix>,
    /// cells whose `E_1` content is trusted; `None` trusts every cell
    pub trusted: Option<BTreeSet<(usize, usize)>>,
}

impl FilteredComplex {
    pub fn new(field: Field, filt: Vec<Vec<usize>>, d: Vec<Matrix>) -> Result<Self, EmError> {
        if d.len() != filt.len() {
            return Err(EmError::BadComplex("one differential per degree expected".into()));
        }
        for t in 0..filt.len() {
            if filt[t].windows(2).any(|w| w[0] > w[1]) {
                return Err(EmError::BadComplex(format!("basis of degree {t} is not sorted by filtration")));
            }
            let next = filt.get(t + 1).map_or(0, Vec::len);
            if d[t].cols != filt[t].len() || d[t].rows != next {
                return Err(EmError::BadComplex(format!("differential of degree {t} has the wrong shape")));
            }
            if t + 1 < d.len() && !d[t + 1].mul(&d[t]).is_zero() {
                return Err(EmError::BadComplex(format!("d^2 != 0 in degree {t}")));
            }
            for (r, row) in d[t].data.iter().enumerate() {
                if row.iter().any(|(c, _)| filt[t + 1][r] > filt[t][*c]) {
                    return Err(EmError::BadComplex("d does not preserve the filtration".into()));
                }
            }
        }
        Ok(FilteredComplex { field, filt, d, trusted: None })
    }

    pub fn max_degree(&self) -> usize {
        self.filt.len().saturating_sub(1)
    }

    pub fn p_max(&self) -> usize {
        self.filt.iter().flat_map(|f| f.last()).copied().max().unwrap_or(0)
    }

    fn trusts(&self, p: usize, q: usize) -> bool {
        self.trusted.as_ref().is_none_or(|s| s.contains(&(p, q)))
    }

    /// Cells `(p, q)` where `gr_p C^{q-p}` is nonzero.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (t, f) in self.filt.iter().enumerate() {
            for &p in f {
                out.insert((p, t + p));
            }
        }
        out.into_iter().collect()
    }

    /// Validity of a cell on page `r`: its own content and that of every
    /// cell exchanging a differential with it on earlier pages is trusted.
    pub fn valid_on_page(&self, p: usize, q: usize, r: usize) -> bool {
        if !self.trusts(p, q) {
            return false;
        }
        let cells: BTreeSet<(usize, usize)> = self.cells().into_iter().collect();
        for s in 1..r {
            let src = (p + s, q + s - 1);
            if cells.contains(&src) && !self.trusts(src.0, src.1) {
                return false;
            }
            if p >= s && q + 1 >= s {
                let tgt = (p - s, q + 1 - s);
                if cells.contains(&tgt) && !self.trusts(tgt.0, tgt.1) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: usize,
    pub dims: BTreeMap<(usize, usize), usize>,
    pub valid: BTreeMap<(usize, usize), bool>,
    /// `d_r` out of each cell, as a matrix into the cell `(p - r, q - r + 1)`
    pub diffs: BTreeMap<(usize, usize), Matrix>,
}

impl SpectralPage {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn is_valid(&self, p: usize, q: usize) -> bool {
        self.valid.get(&(p, q)).copied().unwrap_or(true)
    }

    /// Nonzero differentials between valid cells, in cell order.
    pub fn nonzero_differentials(&self) -> Vec<((usize, usize), &Matrix)> {
        self.diffs
            .iter()
            .filter(|(&(p, q), m)| {
                !m.is_zero() && self.is_valid(p, q) && self.is_valid(p - self.r, q + 1 - self.r)
            })
            .map(|(&c, m)| (c, m))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SsAudit {
    /// `E_{r+1} = H(E_r, d_r)` in every cell
    pub homology: bool,
    pub d_squared: bool,
    /// stabilized `E_infinity = gr H`
    pub infinity: bool,
    /// `sum_p E_infinity^{p, t+p} = dim H^t`
    pub convergence: bool,
    pub failures: Vec<String>,
}

impl SsAudit {
    pub fn passes(&self) -> bool {
        self.homology && self.d_squared && self.infinity && self.convergence
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequence {
    /// pages `E_1, ..., E_{r_max + 1}`
    pub pages: Vec<SpectralPage>,
    pub infinity: BTreeMap<(usize, usize), usize>,
    pub gr_h: BTreeMap<(usize, usize), usize>,
    pub h_dims: Vec<usize>,
    pub audit: SsAudit,
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> &SpectralPage {
        &self.pages[r - 1]
    }
}

struct Engine<'a> {
    fc: &'a FilteredComplex,
    zmemo: HashMap<(usize, usize, usize), Vec<SparseVec>>,
    emem: HashMap<(usize, usize, usize), QuotientBasis>,
}

impl<'a> Engine<'a> {
    fn count(&self, t: usize, p: i64) -> usize {
        if p < 0 {
            return 0;
        }
        self.fc.filt.get(t).map_or(0, |f| f.partition_point(|&x| x as i64 <= p))
    }

    /// `Z_r^p` in degree `t`.
    fn z(&mut self, t: usize, p: i64, r: usize) -> Vec<SparseVec> {
        if p < 0 {
            return Vec::new();
        }
        let key = (t, p as usize, r);
        if let Some(v) = self.zmemo.get(&key) {
            return v.clone();
        }
        let ncols = self.count(t, p);
        let start = self.count(t + 1, p - r as i64);
        let rows: Vec<SparseVec> = self.fc.d[t]
            .data
            .iter()
            .skip(start)
            .map(|row| row.iter().filter(|(c, _)| *c < ncols).cloned().collect())
            .collect();
        let k = kernel_basis(&Matrix::from_rows(self.fc.field, ncols, rows));
        self.zmemo.insert(key, k.clone());
        k
    }

    /// `E_r^p` in degree `t` as a subquotient of `C^t`.
    fn e(&mut self, t: usize, p: usize, r: usize) -> QuotientBasis {
        let key = (t, p, r);
        if let Some(e) = self.emem.get(&key) {
            return e.clone();
        }
        let mut den = self.z(t, p as i64 - 1, r - 1);
        if t > 0 {
            for v in self.z(t - 1, (p + r - 1) as i64, r - 1) {
                den.push(self.fc.d[t - 1].apply(&v));
            }
        }
        let num = self.z(t, p as i64, r);
        let e = QuotientBasis::new(self.fc.field, self.fc.filt[t].len(), &den, num);
        self.emem.insert(key, e.clone());
        e
    }

    fn differential(&mut self, t: usize, p: usize, r: usize) -> Matrix {
        let src = self.e(t, p, r);
        let f = self.fc.field;
        if p < r || t + 1 > self.fc.max_degree() {
            return Matrix::zero(f, 0, src.dim());
        }
        let tgt = self.e(t + 1, p - r, r);
        let cols: Vec<SparseVec> = src
            .reps()
            .iter()
            .map(|x| {
                let dx = self.fc.d[t].apply(x);
                tgt.coords(&dx).expect("d_r lands in Z_r")
            })
            .collect();
        Matrix::from_columns(f, tgt.dim(), &cols)
    }
}

/// `E_r^{p,q}` as a subquotient of the total complex in degree `q - p`.
pub fn page_cell(fc: &FilteredComplex, p: usize, q: usize, r: usize) -> QuotientBasis {
    let mut eng = Engine { fc, zmemo: HashMap::new(), emem: HashMap::new() };
    eng.e(q - p, p, r.max(1))
}

/// Filtration-adapted cohomology of the total complex: `(dim H^t, gr_p H^t)`.
fn graded_cohomology(fc: &FilteredComplex) -> (Vec<usize>, BTreeMap<(usize, usize), usize>) {
    let mut dims = Vec::new();
    let mut gr = BTreeMap::new();
    for t in 0..=fc.max_degree() {
        let den: Vec<SparseVec> = if t == 0 { Vec::new() } else { fc.d[t - 1].columns() };
        let mut qb = QuotientBasis::new(fc.field, fc.filt[t].len(), &den, std::iter::empty::<SparseVec>());
        let mut n = 0;
        for v in kernel_basis(&fc.d[t]) {
            if qb.push(&v) {
                let p = fc.filt[t][v.last().expect("nonzero kernel vector").0];
                *gr.entry((p, t + p)).or_insert(0) += 1;
                n += 1;
            }
        }
        dims.push(n);
    }
    (dims, gr)
}

/// All pages `E_1 .. E_{r_max+1}` with their differentials, `E_infinity`,
/// and the self-audit.
pub fn ss_pages(fc: &FilteredComplex, r_max: usize) -> SpectralSequence {
    let mut eng = Engine { fc, zmemo: HashMap::new(), emem: HashMap::new() };
    let cells = fc.cells();
    let mut pages = Vec::new();
    let mut audit = SsAudit { homology: true, d_squared: true, infinity: true, convergence: true, failures: Vec::new() };
    for r in 1..=r_max + 1 {
        let mut page = SpectralPage { r, dims: BTreeMap::new(), valid: BTreeMap::new(), diffs: BTreeMap::new() };
        for &(p, q) in &cells {
            let t = q - p;
            page.dims.insert((p, q), eng.e(t, p, r).dim());
            page.valid.insert((p, q), fc.valid_on_page(p, q, r));
            if r <= r_max {
                page.diffs.insert((p, q), eng.differential(t, p, r));
            }
        }
        pages.push(page);
    }
    for r in 1..=r_max {
        let (cur, next) = (&pages[r - 1], &pages[r]);
        for (&(p, q), m) in &cur.diffs {
            if p >= r && q + 1 >= r {
                if let Some(m2) = cur.diffs.get(&(p - r, q + 1 - r)) {
                    if m2.rows > 0 && m.rows > 0 && !m2.mul(m).is_zero() {
                        audit.d_squared = false;
                        audit.failures.push(format!("d_{r} o d_{r} != 0 at ({p},{q})"));
                    }
                }
            }
            let out_rank = m.rank();
            let in_rank = cur.diffs.get(&(p + r, q + r - 1)).map_or(0, Matrix::rank);
            let expect = cur.dim(p, q) - out_rank - in_rank;
            if expect != next.dim(p, q) {
                audit.homology = false;
                audit.failures.push(format!("E_{} != H(E_{r}) at ({p},{q})", r + 1));
            }
        }
    }
    let r_inf = fc.p_max() + 2;
    let mut infinity = BTreeMap::new();
    for &(p, q) in &cells {
        let d = eng.e(q - p, p, r_inf).dim();
        if d > 0 {
            infinity.insert((p, q), d);
        }
    }
    let (h_dims, gr_h) = graded_cohomology(fc);
    if infinity != gr_h {
        audit.infinity = false;
        audit.failures.push("E_infinity differs from gr H".into());
    }
    for (t, &h) in h_dims.iter().enumerate() {
        let s: usize = infinity.iter().filter(|(&(p, q), _)| q - p == t).map(|(_, d)| *d).sum();
        if s != h {
            audit.convergence = false;
            audit.failures.push(format!("E_infinity in total degree {t} has dimension {s}, H has {h}"));
        }
    }
    SpectralSequence { pages, infinity, gr_h, h_dims, audit }
}

/// The Eilenberg-Moore spectral sequence of `A`, with cross-checks of
/// `E_1` against tensor powers of `H(A_+)` and of `E_2` against `Tor`.
#[derive(Clone, Debug)]
pub struct EmRun {
    pub bar: BarComplex,
    pub complex: FilteredComplex,
    pub ss: SpectralSequence,
    /// `H^n(A)` for `n <= degree`
    pub cohomology: Vec<Cohomology>,
    pub algebra: FinGradedAlgebra,
    /// weight of each basis class of `algebra`
    pub class_weights: Vec<Vec<usize>>,
    pub tor: TorTable,
    /// cells where `E_1` differs from the tensor count
    pub e1_mismatch: Vec<(usize, usize, usize, usize)>,
    /// cells where `E_2` differs from `Tor`
    pub e2_mismatch: Vec<(usize, usize, usize, usize)>,
    pub r_max: usize,
}

impl EmRun {
    pub fn audit_passes(&self) -> bool {
        self.ss.audit.passes() && self.e1_mismatch.is_empty() && self.e2_mismatch.is_empty()
    }

    /// Every valid off-diagonal `E_2` cell vanishes.
    pub fn e2_diagonal(&self) -> bool {
        let e2 = self.ss.page(2);
        e2.dims.iter().all(|(&(p, q), &d)| p == q || d == 0 || !e2.is_valid(p, q))
    }
}

/// Number of `p`-tuples of classes of positive degree with degrees summing
/// to `q` and weights summing to at most `wmax`.
fn tensor_count(classes: &[Vec<usize>], p: usize, q: usize, wmax: usize) -> usize {
    // table[(degree, weight)] for tuples of the current length
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    table.insert((0, 0), 1);
    for _ in 0..p {
        let mut next = BTreeMap::new();
        for (&(d, w), &c) in &table {
            for (n, ws) in classes.iter().enumerate().skip(1) {
                for &x in ws {
                    if d + n <= q && w + x <= wmax {
                        *next.entry((d + n, w + x)).or_insert(0) += c;
                    }
                }
            }
        }
        table = next;
    }
    table.iter().filter(|(&(d, _), _)| d == q).map(|(_, c)| c).sum()
}

/// `H^{<=s}(A)` as an algebra, for the largest `s <= degree` whose products
/// all stay inside the weight window. Returns the groups through `degree`.
pub fn windowed_cohomology_algebra<A: DgAlgebra + ?Sized>(
    a: &A,
    degree: usize,
) -> Result<(Vec<Cohomology>, FinGradedAlgebra, usize), EmError> {
    let wmax = a.max_weight();
    let top = degree.min(a.top().saturating_sub(1));
    let cohom: Vec<Cohomology> = (0..=top).map(|n| cohomology(a, n)).collect::<Result<_, _>>()?;
    let maxw: Vec<usize> = cohom.iter().map(|h| h.weights.iter().copied().max().unwrap_or(0)).collect();
    let mut s_eff = top;
    'outer: for s in 2..=top {
        for i in 1..s {
            for j in 1..=s - i {
                if cohom[i].dim() > 0 && cohom[j].dim() > 0 && maxw[i] + maxw[j] > wmax {
                    s_eff = s - 1;
                    break 'outer;
                }
            }
        }
    }
    let ha = cohomology_algebra(a, s_eff)?;
    Ok((cohom, ha.algebra, s_eff))
}

/// Koszulity of `H(A)` read off the weight-truncated `Tor`; exact for
/// every bidegree it reports.
pub fn windowed_koszulity<A: DgAlgebra + ?Sized>(a: &A, degree: usize) -> Result<Koszulity, EmError> {
    let (cohom, h, s) = windowed_cohomology_algebra(a, degree)?;
    let weights: Vec<Vec<usize>> = cohom[..=s].iter().map(|g| g.weights.clone()).collect();
    let tor = tor_weighted(&h, &weights, a.max_weight(), s, s)?;
    Ok(match tor.first_off_diagonal() {
        None => Koszulity::KoszulUpTo(a.max_weight()),
        Some((p, q, dim)) => Koszulity::NotKoszul { p, q, dim },
    })
}

/// The EM spectral sequence of a DG-algebra whose cohomology is trusted
/// through degree `degree`; cells needing higher classes are flagged invalid.
pub fn em_from_algebra<A: DgAlgebra + ?Sized>(a: &A, degree: usize, r_max: usize) -> Result<EmRun, EmError> {
    if a.dim(0) != 1 {
        return Err(EmError::NotConnected(a.dim(0)));
    }
    let wmax = a.max_weight();
    let br = bar(a)?;
    let mut filt = br.length.clone();
    filt.push(Vec::new());
    let mut d = br.d.clone();
    d.truncate(br.max_degree() + 1);
    d.push(Matrix::zero(a.field(), 0, 0));
    if d.len() > filt.len() {
        d.truncate(filt.len());
    }
    let mut complex = FilteredComplex::new(a.field(), filt, d)?;

    let (cohom, algebra, s_eff) = windowed_cohomology_algebra(a, degree)?;
    let class_weights: Vec<Vec<usize>> = cohom[..=s_eff].iter().map(|g| g.weights.clone()).collect();

    let cells = complex.cells();
    let trusted: BTreeSet<(usize, usize)> =
        cells.iter().copied().filter(|&(p, q)| if p == 0 { q == 0 } else { q + 1 - p <= s_eff }).collect();
    complex.trusted = Some(trusted);
    let ss = ss_pages(&complex, r_max.max(1));

    let tor = tor_weighted(&algebra, &class_weights, wmax, s_eff, s_eff)?;
    let mut e1_mismatch = Vec::new();
    let mut e2_mismatch = Vec::new();
    let e1 = ss.page(1);
    let e2 = ss.page(2);
    for &(p, q) in &cells {
        if e1.is_valid(p, q) {
            let expect = tensor_count(&class_weights, p, q, wmax);
            if expect != e1.dim(p, q) {
                e1_mismatch.push((p, q, expect, e1.dim(p, q)));
            }
        }
        if e2.is_valid(p, q) && q <= s_eff {
            let expect = tor.get(p, q);
            if expect != e2.dim(p, q) {
                e2_mismatch.push((p, q, expect, e2.dim(p, q)));
            }
        }
    }
    Ok(EmRun {
        bar: br,
        complex,
        ss,
        cohomology: cohom,
        algebra,
        class_weights,
        tor,
        e1_mismatch,
        e2_mismatch,
        r_max: r_max.max(1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuasiFormality {
    QuasiFormalUpTo(usize),
    NotQuasiFormal { r: usize, p: usize, q: usize, matrix: Matrix },
}

impl QuasiFormality {
    pub fn is_quasi_formal(&self) -> bool {
        matches!(self, QuasiFormality::QuasiFormalUpTo(_))
    }
}

/// First nonzero `d_r`, `r >= 2`, between valid cells.
pub fn quasi_formality_check(run: &EmRun) -> QuasiFormality {
    for r in 2..=run.r_max {
        if let Some(((p, q), m)) = run.ss.page(r).nonzero_differentials().into_iter().next() {
            return QuasiFormality::NotQuasiFormal { r, p, q, matrix: m.clone() };
        }
    }
    QuasiFormality::QuasiFormalUpTo(run.bar.wmax)
}

/// Trusted cohomology of the cobar construction of a coalgebra slice.
#[derive(Clone, Debug)]
pub struct CobarWindow {
    pub cobar: Cobar,
    pub weight: usize,
    /// `dim H^n` at weight `<= W`
    pub dims: Vec<usize>,
    /// `dim H^n` at weight `<= W - 1`, for a filtered `C`
    pub dims_below: Option<Vec<usize>>,
    /// highest degree through which `H` is exact: every degree for a
    /// weight-graded `C`, else the agreement of the two runs
    pub stable_degree: usize,
}

pub fn cobar_window(c: &CoalgebraSlice, w: usize) -> Result<CobarWindow, EmError> {
    let cobar = Cobar::new(c, w, w + 1);
    let dims: Vec<usize> = (0..=w).map(|n| cohomology(&cobar, n).map(|h| h.dim())).collect::<Result<_, _>>()?;
    if c.graded {
        return Ok(CobarWindow { cobar, weight: w, dims, dims_below: None, stable_degree: w });
    }
    let below = Cobar::new(c, w.saturating_sub(1), w);
    let dims_below: Vec<usize> =
        (0..w).map(|n| cohomology(&below, n).map(|h| h.dim())).collect::<Result<_, _>>()?;
    let stable_degree = (0..w).take_while(|&n| dims[n] == dims_below[n]).last().unwrap_or(0);
    let dims_below = Some(dims_below);
    Ok(CobarWindow { cobar, weight: w, dims, dims_below, stable_degree })
}

/// EM run for `Cob(C)`; for a filtered `C` the trusted degree is also cut at
/// the first disagreement of `H(C)` with `H(gr C)`.
pub fn em_for_coalgebra(
    c: &CoalgebraSlice,
    gr: Option<&CoalgebraSlice>,
    w: usize,
    r_max: usize,
) -> Result<(CobarWindow, EmRun), EmError> {
    let win = cobar_window(c, w)?;
    let mut degree = win.stable_degree;
    if !c.graded {
        if let Some(g) = gr {
            let gw = cobar_window(g, w)?;
            let agree = (0..=degree).take_while(|&n| gw.dims[n] == win.dims[n]).last().unwrap_or(0);
            degree = degree.min(agree);
        }
    }
    let run = em_from_algebra(&win.cobar, degree, r_max)?;
    Ok((win, run))
}

/// Koszulity of a weight-graded coalgebra through its dual algebra, beside
/// the vanishing of `d_{p-1}^{p,q}` into the first column for `p >= 3`.
#[derive(Clone, Debug)]
pub struct PriddyReport {
    pub window: usize,
    pub koszul: Koszulity,
    pub first_column_zero: bool,
    /// `(p, q)` of the first nonzero differential into the first column
    pub witness: Option<(usize, usize)>,
    pub agree: bool,
    pub audit_passes: bool,
}

pub fn priddy_check(p: &Presentation, window: usize) -> Result<PriddyReport, EmError> {
    if !p.is_homogeneous() || p.relations.iter().any(|r| r.lowest_degree() != Some(2)) {
        return Err(EmError::NotGraded);
    }
    if window > p.trunc {
        return Err(EmError::WindowTooLarge { window, trunc: p.trunc });
    }
    let slices = IdealSlices::new(p);
    let ds = dual_slice_with(p, &slices, window)?;
    let a = slices.gr_algebra().truncate(window);
    let koszul = koszulity_check(&a, window)?;
    let (_, run) = em_for_coalgebra(&ds.coalgebra, None, window, window)?;
    let mut witness = None;
    'scan: for pp in 3..=window {
        let r = pp - 1;
        if r > run.r_max {
            break;
        }
        for ((sp, sq), _) in run.ss.page(r).nonzero_differentials() {
            if sp == pp {
                witness = Some((sp, sq));
                break 'scan;
            }
        }
    }
    let first_column_zero = witness.is_none();
    Ok(PriddyReport {
        window,
        agree: first_column_zero == koszul.is_koszul(),
        koszul,
        first_column_zero,
        witness,
        audit_passes: run.audit_passes(),
    })
}

/// Slice level for a cobar window: `min(window, D)`, and windows past `D`
/// only when `A` is finite.
pub fn slice_level(p: &Presentation, slices: &IdealSlices, window: usize) -> Result<usize, EmError> {
    if window > p.trunc && !is_finite(slices) {
        return Err(EmError::WindowTooLarge { window, trunc: p.trunc });
    }
    Ok(window.min(p.trunc))
}

/// `Cob` of the dual coalgebra slice of a presentation and of its
/// associated graded, with the EM run of the former.
#[derive(Clone, Debug)]
pub struct DualRun {
    pub coalgebra: CoalgebraSlice,
    pub gr: CoalgebraSlice,
    pub window: CobarWindow,
    pub gr_window: CobarWindow,
    pub run: EmRun,
}

pub fn dual_run(p: &Presentation, slices: &IdealSlices, window: usize, r_max: usize) -> Result<DualRun, EmError> {
    let m = slice_level(p, slices, window)?;
    let ds = dual_slice_with(p, slices, m)?;
    let gr = gr_coalgebra_slice(p, slices, m);
    let (win, run) = em_for_coalgebra(&ds.coalgebra, Some(&gr), window, r_max)?;
    let grw = cobar_window(&gr, window)?;
    Ok(DualRun { coalgebra: ds.coalgebra, gr, window: win, gr_window: grw, run })
}

/// The three booleans of the main theorem for `Cob` of a presentation's dual coalgebra.
#[derive(Clone, Debug)]
pub struct MainTheoremReport {
    pub window: usize,
    pub self_consistent: bool,
    pub h_dims: Vec<usize>,
    pub gr_h_dims: Vec<usize>,
    /// degree through which `H(C)` is trusted
    pub degree: usize,
    pub koszul: Koszulity,
    pub quasi_formal: QuasiFormality,
    pub k: bool,
    pub qf: bool,
    pub kpi1: bool,
    pub holds: bool,
    pub audit_passes: bool,
    pub e2_diagonal: bool,
}

/// True when `J` contains every word of degree `D`, so `A` is finite and
/// its dual coalgebra is complete.
pub fn is_finite(slices: &IdealSlices) -> bool {
    slices.gr_dims().last() == Some(&0)
}

pub fn main_theorem_check(p: &Presentation, window: usize, r_max: usize) -> Result<MainTheoremReport, EmError> {
    let slices = IdealSlices::new(p);
    main_theorem_with(p, &slices, window, r_max)
}

pub fn main_theorem_with(
    p: &Presentation,
    slices: &IdealSlices,
    window: usize,
    r_max: usize,
) -> Result<MainTheoremReport, EmError> {
    let dr = dual_run(p, slices, window, r_max)?;
    main_theorem_report(p, slices, &dr)
}

pub fn main_theorem_report(p: &Presentation, slices: &IdealSlices, dr: &DualRun) -> Result<MainTheoremReport, EmError> {
    let sc = self_consistency_with(p, slices)?;
    let self_consistent = matches!(sc.verdict, SelfConsistency::Consistent { .. });
    let (win, run, grw) = (&dr.window, &dr.run, &dr.gr_window);
    let window = win.weight;
    let degree = win.stable_degree;
    let koszul = windowed_koszulity(&win.cobar, degree)?;
    let quasi_formal = quasi_formality_check(run);
    let kpi1 = self_consistent && (0..=degree).all(|n| win.dims[n] == grw.dims[n]);
    let k = koszul.is_koszul();
    let qf = quasi_formal.is_quasi_formal();
    Ok(MainTheoremReport {
        window,
        self_consistent,
        h_dims: win.dims[..=degree].to_vec(),
        gr_h_dims: grw.dims[..=degree].to_vec(),
        degree,
        koszul,
        quasi_formal,
        k,
        qf,
        kpi1,
        holds: k == (qf && kpi1),
        audit_passes: run.audit_passes(),
        e2_diagonal: run.e2_diagonal(),
    })
}
