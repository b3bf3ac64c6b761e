//! The named checks behind the subcommands.

use std::collections::BTreeMap;

use koszulkit::dg::{cohomology, DgAlgebra};
use koszulkit::em::{
    cobar_window, dual_run, main_theorem_report, quasi_formality_check, slice_level, windowed_cohomology_algebra,
    windowed_koszulity, CobarWindow, DualRun, QuasiFormality,
};
use koszulkit::exactlin::{sparse, Field, Subspace, SparseVec};
use koszulkit::ideal::{
    commutativity_with, dual_slice_with, gr_coalgebra_slice, homogenization_obstruction, self_consistency_with,
    Commutativity, Homogenization, IdealSlices, SelfConsistency,
};
use koszulkit::massey::{decomposable, seeded_rng, MasseyContext, MasseyValue};
use koszulkit::ncalg::{Alphabet, NCPoly};
use koszulkit::present::{to_nonhom_quadratic, Presentation};
use koszulkit::quad::{
    quadratic_algebra_components, quadratic_dual, quadratic_part, tor_bigraded, tor_weighted, Koszulity,
    QuadraticData, TorTable,
};

use crate::report::{render_dims, render_matrix, Report};
use crate::{CliError, Input, Options};

/// Reruns of `triple_tuple` with shifted primitives per triple.
pub const RERUNS: usize = 20;

pub trait Check: Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError>;
}

pub struct Registry {
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl Registry {
    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.get(name).map(|c| c.as_ref())
    }

    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.insert(check.name(), check);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    /// Runs a check and refuses to emit a report with an unwitnessed negative verdict.
    pub fn run(&self, name: &str, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let check = self.get(name).ok_or_else(|| CliError::Input(format!("unknown check '{name}'")))?;
        let report = check.run(input, opts)?;
        let missing = report.missing_witnesses();
        if !missing.is_empty() {
            return Err(CliError::Invariant(format!("negative verdicts without witness: {}", missing.join(", "))));
        }
        Ok(report)
    }
}

pub fn registry() -> Registry {
    let list: Vec<Box<dyn Check>> = vec![
        Box::new(SelfConsistencyCheck),
        Box::new(KoszulCheck),
        Box::new(DualCheck),
        Box::new(CohomologyCheck),
        Box::new(EmPagesCheck),
        Box::new(MasseyCheck),
        Box::new(MainTheoremCheck),
        Box::new(CertifyNonformal),
    ];
    Registry { checks: list.into_iter().map(|c| (c.name(), c)).collect() }
}

/// Default weight window for cobar computations when `--window` is absent.
pub const DEFAULT_WINDOW: usize = 5;

fn window(p: &Presentation, opts: &Options) -> usize {
    opts.window.unwrap_or(p.trunc.min(DEFAULT_WINDOW))
}

pub fn koszul_verdict(r: &mut Report, name: &str, k: &Koszulity, window: usize) {
    match k {
        Koszulity::KoszulUpTo(w) => {
            r.verdict(name, format!("KoszulUpTo({w})"), Some(window));
        }
        Koszulity::NotKoszul { p, q, dim } => {
            r.negative(name, format!("NotKoszul(Tor_{{{p},{q}}})"), Some(window));
            r.witness(name, format!("dim Tor_{{{p},{q}}} = {dim}, off the diagonal"));
        }
    }
}

pub fn render_vec(v: &[(usize, koszulkit::exactlin::Scalar)], len: usize, f: Field) -> String {
    let d = sparse::to_dense(v, len, f);
    format!("[{}]", d.iter().map(|x| x.render()).collect::<Vec<_>>().join(","))
}

/// A cochain as a combination of basis labels.
pub fn render_cochain<A: DgAlgebra + ?Sized>(a: &A, n: usize, v: &[(usize, koszulkit::exactlin::Scalar)]) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|(i, c)| if c.is_one() { a.label(n, *i) } else { format!("{}*{}", c.render(), a.label(n, *i)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn tor_table(r: &mut Report, name: &str, t: &TorTable) {
    let cols: Vec<String> = std::iter::once("p\\q".to_string()).chain((0..=t.q_max).map(|q| q.to_string())).collect();
    let rows = (0..=t.p_max)
        .map(|p| std::iter::once(p.to_string()).chain((0..=t.q_max).map(|q| t.get(p, q).to_string())).collect())
        .collect();
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    r.table(name, &cols, rows);
}

fn class_alphabet(n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| format!("e{i}"))).expect("distinct names")
}

fn render_subspace(s: &Subspace, g: usize, alphabet: &Alphabet) -> String {
    let f = s.field();
    let polys: Vec<String> =
        s.basis().iter().map(|v| NCPoly::from_component(f, g, 3, 2, v).render(alphabet)).collect();
    format!("span{{{}}}", polys.join(", "))
}

/// `H(Cob C)` windows for the dual slice and its associated graded.
fn cobar_windows(p: &Presentation, slices: &IdealSlices, w: usize) -> Result<(CobarWindow, CobarWindow), CliError> {
    let m = slice_level(p, slices, w)?;
    let ds = dual_slice_with(p, slices, m)?;
    let gr = gr_coalgebra_slice(p, slices, m);
    Ok((cobar_window(&ds.coalgebra, w)?, cobar_window(&gr, w)?))
}

pub struct SelfConsistencyCheck;

impl Check for SelfConsistencyCheck {
    fn name(&self) -> &'static str {
        "self-consistency"
    }
    fn about(&self) -> &'static str {
        "compare the leading-form algebra with gr_N A degree by degree"
    }
    fn run(&self, input: &Input, _opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let slices = IdealSlices::new(p);
        let sc = self_consistency_with(p, &slices)?;
        let mut r = input.report(self.name());
        r.window("degree", p.trunc);
        let rows = (0..=p.trunc)
            .map(|m| vec![m.to_string(), sc.leading_dims[m].to_string(), sc.gr_dims[m].to_string()])
            .collect();
        r.table("dimensions", &["degree", "leading", "gr"], rows);
        match &sc.verdict {
            SelfConsistency::Consistent { up_to } => {
                r.verdict(self.name(), format!("Consistent(up to degree {up_to})"), Some(*up_to));
            }
            SelfConsistency::Inconsistent { degree, witness } => {
                r.negative(self.name(), format!("Inconsistent(degree {degree})"), Some(*degree));
                r.witness(self.name(), witness.render(&p.alphabet));
            }
        }
        r.verdict("gr-dims", render_dims(&sc.gr_dims), Some(p.trunc));
        r.check("gr dims bounded by leading dims");
        Ok(r)
    }
}

pub struct KoszulCheck;

impl Check for KoszulCheck {
    fn name(&self) -> &'static str {
        "koszul"
    }
    fn about(&self) -> &'static str {
        "Koszulity of the cohomology algebra of the dual coalgebra in a weight window"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = window(p, opts);
        let slices = IdealSlices::new(p);
        let (win, _) = cobar_windows(p, &slices, w)?;
        let degree = win.stable_degree;
        let (cohom, h, s) = windowed_cohomology_algebra(&win.cobar, degree)?;
        let weights: Vec<Vec<usize>> = cohom[..=s].iter().map(|g| g.weights.clone()).collect();
        let tor = tor_weighted(&h, &weights, w, s, s)?;
        let k = windowed_koszulity(&win.cobar, degree)?;
        let from_table = match tor.first_off_diagonal() {
            None => Koszulity::KoszulUpTo(w),
            Some((p, q, dim)) => Koszulity::NotKoszul { p, q, dim },
        };
        if from_table != k {
            return Err(CliError::Invariant("Tor table disagrees with the Koszulity verdict".into()));
        }
        let mut r = input.report(self.name());
        r.window("weight", w).window("trusted-degree", degree).window("product-degree", s);
        r.verdict("H-dims", render_dims(&win.dims[..=degree]), Some(w));
        if h.top() >= 2 {
            let q = quadratic_part(&h)?;
            r.verdict("H-quadratic-relations", render_subspace(&q.r, h.dim(1), &class_alphabet(h.dim(1))), Some(w));
        }
        koszul_verdict(&mut r, self.name(), &k, w);
        tor_table(&mut r, "Tor_{p,q}(k,k) over H", &tor);
        r.check("weighted Tor agrees with the verdict");
        Ok(r)
    }
}

pub struct DualCheck;

/// Relation space of the degree-two leading parts.
pub fn leading_quadratic(p: &Presentation) -> Result<QuadraticData, CliError> {
    let nq = to_nonhom_quadratic(p).map_err(|e| CliError::Input(format!("not quadratic: {e}")))?;
    Ok(QuadraticData::new(p.ngens(), nq.leading_parts))
}

impl Check for DualCheck {
    fn name(&self) -> &'static str {
        "dual"
    }
    fn about(&self) -> &'static str {
        "quadratic dual of the leading quadratic parts and its Koszulity"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = opts.window.unwrap_or(p.trunc);
        let q = leading_quadratic(p)?;
        let dual = quadratic_dual(&q);
        let g = p.ngens();
        let starred = Alphabet::new(p.alphabet.names().iter().map(|n| format!("{n}*"))).expect("distinct names");
        let a = quadratic_algebra_components(&q, w);
        let b = quadratic_algebra_components(&dual, w);
        let tor = tor_bigraded(&b, w, w)?;
        if quadratic_dual(&dual).r != q.r {
            return Err(CliError::Invariant("dual of the dual differs from R".into()));
        }
        let mut r = input.report(self.name());
        r.window("degree", w);
        r.verdict("relations", render_subspace(&q.r, g, &p.alphabet), None);
        r.verdict("dual-relations", render_subspace(&dual.r, g, &starred), None);
        let rows = (0..=w).map(|n| vec![n.to_string(), a.dim(n).to_string(), b.dim(n).to_string()]).collect();
        r.table("dimensions", &["degree", "A", "A^!"], rows);
        let k = match tor.first_off_diagonal() {
            None => Koszulity::KoszulUpTo(w),
            Some((p, q, dim)) => Koszulity::NotKoszul { p, q, dim },
        };
        koszul_verdict(&mut r, "dual-koszul", &k, w);
        tor_table(&mut r, "Tor_{p,q}(k,k) over A^!", &tor);
        r.check("dual is an involution");
        Ok(r)
    }
}

pub struct CohomologyCheck;

impl Check for CohomologyCheck {
    fn name(&self) -> &'static str {
        "cohomology"
    }
    fn about(&self) -> &'static str {
        "cohomology of the cobar construction of the dual coalgebra and of its associated graded"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = window(p, opts);
        let slices = IdealSlices::new(p);
        let (win, grw) = cobar_windows(p, &slices, w)?;
        let degree = win.stable_degree;
        let mut r = input.report(self.name());
        r.window("weight", w).window("trusted-degree", degree);
        let mut rows = Vec::new();
        for n in 0..=degree {
            let h = cohomology(&win.cobar, n)?;
            let filt: Vec<usize> = (0..=w).map(|m| h.filtration_dim(m)).collect();
            rows.push(vec![n.to_string(), h.dim().to_string(), grw.dims[n].to_string(), render_dims(&filt)]);
        }
        r.table("H^n(Cob C)", &["n", "dim", "gr", "N_m filtration"], rows);
        r.verdict("H-dims", render_dims(&win.dims[..=degree]), Some(w));
        r.verdict("gr-H-dims", render_dims(&grw.dims[..=degree]), Some(w));
        if let Some(below) = &win.dims_below {
            r.verdict("H-dims-below", render_dims(below), Some(w.saturating_sub(1)));
        }
        let (_, h, s) = windowed_cohomology_algebra(&win.cobar, degree)?;
        h.check_associative()?;
        r.window("product-degree", s);
        r.check("cohomology algebra is associative");
        Ok(r)
    }
}

pub struct EmPagesCheck;

pub fn quasi_formal_verdict(r: &mut Report, q: &QuasiFormality, w: usize) {
    match q {
        QuasiFormality::QuasiFormalUpTo(n) => {
            r.verdict("quasi-formality", format!("QuasiFormalUpTo({n})"), Some(w));
        }
        QuasiFormality::NotQuasiFormal { r: page, p, q, matrix } => {
            let name = "quasi-formality";
            r.negative(name, format!("NotQuasiFormal(d_{page}^{{{p},{q}}})"), Some(w));
            r.witness(name, format!("d_{page}^{{{p},{q}}} = {} of rank {}", render_matrix(matrix), matrix.rank()));
        }
    }
}

fn audit(dr: &DualRun) -> Result<(), CliError> {
    let run = &dr.run;
    if !run.audit_passes() {
        let mut msg = run.ss.audit.failures.join("; ");
        for (p, q, a, b) in run.e1_mismatch.iter().chain(&run.e2_mismatch) {
            msg.push_str(&format!("; cell ({p},{q}): {a} vs {b}"));
        }
        return Err(CliError::Invariant(format!("spectral sequence audit failed: {msg}")));
    }
    Ok(())
}

impl Check for EmPagesCheck {
    fn name(&self) -> &'static str {
        "em-pages"
    }
    fn about(&self) -> &'static str {
        "Eilenberg-Moore pages of Cob of the dual coalgebra, audited"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = window(p, opts);
        let rmax = opts.rmax.unwrap_or(w).max(1);
        let slices = IdealSlices::new(p);
        let dr = dual_run(p, &slices, w, rmax)?;
        audit(&dr)?;
        let run = &dr.run;
        let mut r = input.report(self.name());
        r.window("weight", w).window("rmax", rmax);
        let mut rows = Vec::new();
        for page in &run.ss.pages {
            for (&(pp, q), &d) in &page.dims {
                if d > 0 {
                    let valid = if page.is_valid(pp, q) { "yes" } else { "no" };
                    rows.push(vec![page.r.to_string(), pp.to_string(), q.to_string(), d.to_string(), valid.into()]);
                }
            }
        }
        for (&(pp, q), &d) in &run.ss.infinity {
            if d > 0 {
                rows.push(vec!["inf".into(), pp.to_string(), q.to_string(), d.to_string(), "yes".into()]);
            }
        }
        r.table("E_r^{p,q} (nonzero cells)", &["r", "p", "q", "dim", "valid"], rows);
        let mut diffs = Vec::new();
        for page in run.ss.pages.iter().skip(1) {
            for ((pp, q), m) in page.nonzero_differentials() {
                diffs.push(vec![page.r.to_string(), pp.to_string(), q.to_string(), m.rank().to_string()]);
            }
        }
        r.table("nonzero d_r, r >= 2", &["r", "p", "q", "rank"], diffs);
        quasi_formal_verdict(&mut r, &quasi_formality_check(run), w);
        r.verdict("E2-diagonal", run.e2_diagonal().to_string(), Some(w));
        r.verdict("bar-homology-dims", render_dims(&run.ss.h_dims), Some(w));
        for c in ["E1 = tensor powers of H", "E2 = Tor", "d_r^2 = 0", "E_{r+1} = H(E_r)", "E_inf = gr H", "convergence"] {
            r.check(c);
        }
        Ok(r)
    }
}

pub struct MasseyCheck;

fn unit(f: Field, i: usize) -> SparseVec {
    vec![(i, f.one())]
}

fn massey_value_text(v: &MasseyValue, n2: usize, f: Field) -> String {
    if !v.defined {
        return format!("undefined ({})", v.stage.clone().unwrap_or_default());
    }
    let kind = if v.contains_zero() { "contains 0" } else { "nonzero" };
    format!("{kind}: {} mod {}-dim indeterminacy", render_vec(&v.value, n2, f), v.indeterminacy.dim())
}

/// Seeded reruns of `<x,y,z>` that must stay in the reported coset.
pub fn choice_invariance<A: DgAlgebra + ?Sized>(
    ctx: &MasseyContext<'_, A>,
    xs: [&SparseVec; 3],
    seed: u64,
    reruns: usize,
) -> Result<bool, CliError> {
    let base = ctx.triple_tuple(xs[0], xs[1], xs[2], None)?;
    if !base.defined {
        return Ok(true);
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..reruns {
        let v = ctx.triple_tuple(xs[0], xs[1], xs[2], Some(&mut rng))?;
        if !v.defined || !base.same_coset(&v.value) {
            return Ok(false);
        }
    }
    Ok(true)
}

impl Check for MasseyCheck {
    fn name(&self) -> &'static str {
        "massey"
    }
    fn about(&self) -> &'static str {
        "tuple and tensor Massey products of degree-one classes"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = window(p, opts);
        let slices = IdealSlices::new(p);
        let dr = dual_run(p, &slices, w, 3)?;
        audit(&dr)?;
        let a = &dr.window.cobar;
        let ctx = MasseyContext::new(a)?;
        let f = ctx.field();
        let (h1, n2) = (ctx.h1.dim(), ctx.h2.dim());
        let mut r = input.report(self.name());
        r.window("weight", w).window("trusted-degree", dr.window.stable_degree);
        r.verdict("H1-dim", h1.to_string(), Some(w)).verdict("H2-dim", n2.to_string(), Some(w));

        let tuples: Vec<Vec<usize>> = match &opts.classes {
            Some(c) => {
                if c.len() != 3 && c.len() != 4 {
                    return Err(CliError::Input(format!("--classes takes 3 or 4 indices, got {}", c.len())));
                }
                if let Some(&bad) = c.iter().find(|&&i| i >= h1) {
                    return Err(CliError::Input(format!("class index {bad} outside H^1 of dimension {h1}")));
                }
                vec![c.clone()]
            }
            None => (0..h1.pow(3)).map(|t| vec![t / (h1 * h1), (t / h1) % h1, t % h1]).collect(),
        };
        let mut rows = Vec::new();
        let mut invariant = true;
        for t in &tuples {
            let xs: Vec<SparseVec> = t.iter().map(|&i| unit(f, i)).collect();
            let label = format!("<{}>", t.iter().map(|i| format!("e{i}")).collect::<Vec<_>>().join(","));
            if t.len() == 4 {
                let v = ctx.quadruple_tuple([&xs[0], &xs[1], &xs[2], &xs[3]])?;
                rows.push(vec![label.clone(), massey_value_text(&v, n2, f), "-".into(), "-".into()]);
                if v.is_nonzero() {
                    r.witness(&label, render_cochain(a, 2, &v.cocycle));
                }
                continue;
            }
            let v = ctx.triple_tuple(&xs[0], &xs[1], &xs[2], None)?;
            let agree = if v.defined { ctx.agreement_check(&xs[0], &xs[1], &xs[2])?.to_string() } else { "-".into() };
            if v.defined && agree != "true" {
                return Err(CliError::Invariant(format!("{label}: tuple and tensor products disagree")));
            }
            invariant &= choice_invariance(&ctx, [&xs[0], &xs[1], &xs[2]], opts.seed, RERUNS)?;
            if opts.classes.is_some() && v.is_nonzero() {
                r.witness(&label, render_cochain(a, 2, &v.cocycle));
            }
            let theta = decomposable(f, h1, &[&xs[0], &xs[1], &xs[2]]);
            let fine = if v.defined {
                format!("{} of {}", ctx.m3_fine_indeterminacy(&theta).dim(), ctx.im_m2.dim())
            } else {
                "-".into()
            };
            rows.push(vec![label, massey_value_text(&v, n2, f), agree, fine]);
        }
        if !invariant {
            return Err(CliError::Invariant("a seeded rerun left the indeterminacy coset".into()));
        }
        r.table(
            "tuple products (basis of H^1); advisory column: dim W_l H^1 + H^1 W_r inside im m2",
            &["tuple", "value", "agrees with m3", "advisory indeterminacy"],
            rows,
        );
        if opts.classes.is_some() {
            if let [row] = &r.tables[0].rows[..] {
                let (name, value) = (row[0].clone(), row[1].clone());
                r.verdict(&name, value, Some(w));
            }
        }
        let mut cmp_rows = Vec::new();
        for n in [3, 4] {
            if n - 1 > dr.run.r_max {
                continue;
            }
            let c = ctx.compare_with_page(&dr.run, n)?;
            if !c.agree {
                return Err(CliError::Invariant(format!("m{n} disagrees with d_{}^{{{n},{n}}}", n - 1)));
            }
            let sign = c.sign.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
            cmp_rows.push(vec![
                format!("m{n} vs d_{}^{{{n},{n}}}", n - 1),
                c.source_dim.to_string(),
                c.m_rank.to_string(),
                c.d_rank.to_string(),
                sign,
            ]);
            r.verdict(&format!("m{n}-rank"), c.m_rank.to_string(), Some(w));
        }
        r.table("tensor products against page differentials", &["map", "source", "rank m", "rank d", "sign"], cmp_rows);
        r.check(&format!("choice invariance, {RERUNS} seeded reruns per triple, seed {}", opts.seed));
        r.check("tuple and tensor triple products agree");
        r.check("m3, m4 match page differentials");
        Ok(r)
    }
}

pub struct MainTheoremCheck;

impl Check for MainTheoremCheck {
    fn name(&self) -> &'static str {
        "main-theorem"
    }
    fn about(&self) -> &'static str {
        "Koszul iff quasi-formal and of K(pi,1) type, for Cob of the dual coalgebra"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = window(p, opts);
        let rmax = opts.rmax.unwrap_or(w).max(1);
        let slices = IdealSlices::new(p);
        let dr = dual_run(p, &slices, w, rmax)?;
        audit(&dr)?;
        let m = main_theorem_report(p, &slices, &dr)?;
        if !m.holds {
            return Err(CliError::Invariant(format!(
                "K = {} but QF = {}, K(pi,1) = {}",
                m.k, m.qf, m.kpi1
            )));
        }
        let mut r = input.report(self.name());
        r.window("weight", w).window("rmax", rmax).window("trusted-degree", m.degree);
        koszul_verdict(&mut r, "koszul", &m.koszul, w);
        quasi_formal_verdict(&mut r, &m.quasi_formal, w);
        if m.kpi1 {
            r.verdict("k-pi-1", "true", Some(m.degree));
        } else {
            r.negative("k-pi-1", "false", Some(m.degree));
            let why = if m.self_consistent {
                format!("H(C) {} vs H(gr C) {}", render_dims(&m.h_dims), render_dims(&m.gr_h_dims))
            } else {
                "relations are not self-consistent".to_string()
            };
            r.witness("k-pi-1", why);
        }
        r.verdict("self-consistent", m.self_consistent.to_string(), Some(p.trunc));
        r.verdict("equivalence", "holds", Some(w));
        r.verdict("E2-diagonal", m.e2_diagonal.to_string(), Some(w));
        let rows = (0..=m.degree)
            .map(|n| vec![n.to_string(), m.h_dims[n].to_string(), m.gr_h_dims[n].to_string()])
            .collect();
        r.table("H^n", &["n", "C", "gr C"], rows);
        r.check("spectral sequence audit");
        r.check("K iff (QF and K(pi,1))");
        Ok(r)
    }
}

pub struct CertifyNonformal;

/// The facts behind a non-formality certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `H*` Koszul, `gr_N A` commutative, `A` noncommutative.
    Commutativity { koszul: Koszulity, pair: (usize, usize), residue: NCPoly },
    /// `H*` Koszul and the cubic part of the relation cannot be removed.
    Homogenization { koszul: Koszulity, residue: NCPoly },
}

/// Generators commute in `gr_N A`, so `gr_N A` is commutative.
pub fn gr_commutative(slices: &IdealSlices) -> bool {
    let gr = slices.gr_algebra();
    if gr.top() < 2 {
        return true;
    }
    let g = gr.dim(1);
    (0..g).all(|a| (0..g).all(|b| gr.basis_product(1, a, 1, b) == gr.basis_product(1, b, 1, a)))
}

fn find_certificate(p: &Presentation, w: usize, facts: &mut Vec<(String, String)>) -> Result<Option<Certificate>, CliError> {
    let slices = IdealSlices::new(p);
    let (win, _) = cobar_windows(p, &slices, w)?;
    let koszul = windowed_koszulity(&win.cobar, win.stable_degree)?;
    facts.push(("H-koszul".into(), format!("{koszul:?}")));
    if !koszul.is_koszul() {
        return Ok(None);
    }
    let grc = gr_commutative(&slices);
    facts.push(("gr-commutative".into(), grc.to_string()));
    let comm = commutativity_with(p, &slices)?;
    match &comm {
        Commutativity::Commutative => facts.push(("A-commutative".into(), "true".into())),
        Commutativity::Noncommutative { pair, residue } => facts.push((
            "A-commutative".into(),
            format!(
                "false: {}{} - {}{} reduces to {}",
                p.alphabet.name(pair.0),
                p.alphabet.name(pair.1),
                p.alphabet.name(pair.1),
                p.alphabet.name(pair.0),
                residue.render(&p.alphabet)
            ),
        )),
    }
    for i in 0..p.ngens() {
        for j in i + 1..p.ngens() {
            let c = p.generator(i).commutator(&p.generator(j)).map_err(|e| CliError::Invariant(e.to_string()))?;
            let member = slices.contains(&c)?;
            let (a, b) = (p.alphabet.name(i), p.alphabet.name(j));
            facts.push((format!("member({a}{b}-{b}{a})"), member.to_string()));
        }
    }
    if let (true, Commutativity::Noncommutative { pair, residue }) = (grc, comm) {
        return Ok(Some(Certificate::Commutativity { koszul, pair, residue }));
    }
    match homogenization_obstruction(p) {
        Ok(Homogenization::NotHomogenizable { residue }) => {
            facts.push(("homogenization-residue".into(), residue.render(&p.alphabet)));
            Ok(Some(Certificate::Homogenization { koszul, residue }))
        }
        Ok(Homogenization::Inconclusive) => {
            facts.push(("homogenization-residue".into(), "0".into()));
            Ok(None)
        }
        Err(_) => Ok(None),
    }
}

/// Recomputes the facts of a certificate through independent routes.
fn reverify(p: &Presentation, w: usize, cert: &Certificate) -> Result<(), CliError> {
    let slices = IdealSlices::new(p);
    let fail = |m: &str| Err(CliError::Invariant(format!("certificate re-verification failed: {m}")));
    let (win, _) = cobar_windows(p, &slices, w)?;
    let (cohom, h, s) = windowed_cohomology_algebra(&win.cobar, win.stable_degree)?;
    let weights: Vec<Vec<usize>> = cohom[..=s].iter().map(|g| g.weights.clone()).collect();
    if tor_weighted(&h, &weights, w, s, s)?.first_off_diagonal().is_some() {
        return fail("H* is not Koszul in the window");
    }
    match cert {
        Certificate::Commutativity { pair, residue, .. } => {
            let (i, j) = *pair;
            let c = p.generator(i).commutator(&p.generator(j)).map_err(|e| CliError::Invariant(e.to_string()))?;
            if slices.contains(&c)? {
                return fail("commutator lies in the ideal");
            }
            let diff = c.sub(residue).map_err(|e| CliError::Invariant(e.to_string()))?;
            if !slices.contains(&diff)? {
                return fail("residue is not congruent to the commutator");
            }
            // the commutator's principal part must lie in gr J for every pair
            for a in 0..p.ngens() {
                for b in a + 1..p.ngens() {
                    let cab = p.generator(a).commutator(&p.generator(b)).map_err(|e| CliError::Invariant(e.to_string()))?;
                    let v = cab.degree_component(2).map_err(|e| CliError::Invariant(e.to_string()))?;
                    if !slices.gr_component(2).contains(&v) {
                        return fail("gr_N A is not commutative");
                    }
                }
            }
        }
        Certificate::Homogenization { residue, .. } => match homogenization_obstruction(p)? {
            Homogenization::NotHomogenizable { residue: r } if &r == residue => {}
            _ => return fail("homogenization residue changed"),
        },
    }
    Ok(())
}

impl Check for CertifyNonformal {
    fn name(&self) -> &'static str {
        "certify-nonformal"
    }
    fn about(&self) -> &'static str {
        "certificate that Cob of the dual coalgebra is not formal"
    }
    fn run(&self, input: &Input, opts: &Options) -> Result<Report, CliError> {
        let p = &input.presentation;
        let w = window(p, opts);
        let mut facts = Vec::new();
        let cert = find_certificate(p, w, &mut facts)?;
        let mut r = input.report(self.name());
        r.window("weight", w);
        let name = "formality";
        match &cert {
            Some(c) => {
                reverify(p, w, c)?;
                let route = match c {
                    Certificate::Commutativity { .. } => "commutativity",
                    Certificate::Homogenization { .. } => "homogenization",
                };
                r.negative(name, format!("NotFormal(route: {route})"), Some(w));
                let summary: Vec<String> = facts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                r.witness(name, summary.join("; "));
                r.check("certificate re-verified from scratch");
            }
            None => {
                r.verdict(name, "Inconclusive", Some(w));
                r.check(&format!("no substitution search for Formal; depth bound D-1 = {}", p.trunc.saturating_sub(1)));
            }
        }
        for (k, v) in &facts {
            r.verdict(k, v.clone(), Some(w));
        }
        Ok(r)
    }
}
