//! Acceptance criteria over the bundled corpus.

use std::collections::BTreeSet;

use koszulkit::dg::{check_d_squared, check_leibniz, adjunction_unit_check};
use koszulkit::em::{dual_run, main_theorem_report, quasi_formality_check, slice_level, DualRun, QuasiFormality};
use koszulkit::exactlin::{sparse, Field, Subspace, SparseVec};
use koszulkit::ideal::{
    commutativity_with, corelation_filtration_with, dual_slice_with, five_term_check, self_consistency_with,
    CoalgebraSlice, Commutativity, IdealSlices, SelfConsistency,
};
use koszulkit::em::{cobar_window, windowed_cohomology_algebra, windowed_koszulity};
use koszulkit::massey::MasseyContext;
use koszulkit::ncalg::Word;
use koszulkit::present::Presentation;
use koszulkit::quad::{quadratic_algebra_components, quadratic_dual, quadratic_part, tor_bigraded, Koszulity};

use crate::checks::{choice_invariance, leading_quadratic, registry, RERUNS};
use crate::corpus::{entry, CORPUS};
use crate::{CliError, Input, Options};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} criterion {:>2}: {} ({})", self.id, self.title, self.detail)
    }
}

type Res = Result<(bool, String), CliError>;

fn outcome(id: usize, title: &'static str, r: Res) -> Outcome {
    match r {
        Ok((pass, detail)) => Outcome { id, title, pass, detail },
        Err(e) => Outcome { id, title, pass: false, detail: e.to_string() },
    }
}

fn corpus_input(name: &str) -> Result<Input, CliError> {
    let e = entry(name).ok_or_else(|| CliError::Input(format!("no corpus entry {name}")))?;
    Input::parse(&format!("{name}.kpres"), e.text)
}

/// Everything the per-entry criteria share.
pub struct Bundle {
    pub input: Input,
    pub window: usize,
    pub slices: IdealSlices,
    pub run: Result<DualRun, CliError>,
}

impl Bundle {
    pub fn new(input: Input, window: usize) -> Bundle {
        let p = &input.presentation;
        let slices = IdealSlices::new(p);
        let run = dual_run(p, &slices, window, window).map_err(CliError::from);
        Bundle { input, window, slices, run }
    }

    fn run(&self) -> Result<&DualRun, CliError> {
        self.run.as_ref().map_err(|e| e.clone())
    }
}

/// Builds bundles concurrently; the result keeps input order.
pub fn bundles(inputs: Vec<(Input, usize)>) -> Vec<Bundle> {
    std::thread::scope(|s| {
        let handles: Vec<_> =
            inputs.into_iter().map(|(i, w)| s.spawn(move || Bundle::new(i, w))).collect();
        handles.into_iter().map(|h| h.join().expect("bundle thread")).collect()
    })
}

pub fn corpus_bundles() -> Result<Vec<Bundle>, CliError> {
    let inputs = CORPUS
        .iter()
        .map(|e| Ok((corpus_input(e.name)?, e.window)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(bundles(inputs))
}

pub fn main_theorem(b: &Bundle) -> Res {
    let p = &b.input.presentation;
    let m = main_theorem_report(p, &b.slices, b.run()?)?;
    Ok((m.holds, format!("K={} QF={} Kpi1={}", m.k, m.qf, m.kpi1)))
}

pub fn ss_audit(b: &Bundle) -> Res {
    let run = &b.run()?.run;
    let mut issues = run.ss.audit.failures.clone();
    issues.extend(run.e1_mismatch.iter().map(|c| format!("E1 {c:?}")));
    issues.extend(run.e2_mismatch.iter().map(|c| format!("E2 {c:?}")));
    let pages = run.ss.pages.len();
    Ok((run.audit_passes(), if issues.is_empty() { format!("{pages} pages") } else { issues.join("; ") }))
}

/// `d^2 = 0`, Leibniz and co-Leibniz on the constructed slices, the
/// adjunction unit for graded members, the five-term sequence and
/// `N_2 H^2 = im m_2`.
pub fn structural(b: &Bundle) -> Res {
    let p = &b.input.presentation;
    let dr = b.run()?;
    let mut failed = Vec::new();
    let mut note = |name: &str, ok: Result<(), String>| {
        if let Err(e) = ok {
            failed.push(format!("{name}: {e}"));
        }
    };
    let s = |r: Result<(), koszulkit::dg::DgError>| r.map_err(|e| e.to_string());
    note("cobar d^2", s(check_d_squared(&dr.window.cobar)));
    note("cobar Leibniz", s(check_leibniz(&dr.window.cobar)));
    note("gr cobar d^2", s(check_d_squared(&dr.gr_window.cobar)));
    note("gr cobar Leibniz", s(check_leibniz(&dr.gr_window.cobar)));
    note("bar d^2", s(dr.run.bar.check_d_squared()));
    note("bar filtration", s(dr.run.bar.check_filtration()));
    note("bar co-Leibniz", s(dr.run.bar.check_co_leibniz()));
    let m = slice_level(p, &b.slices, b.window)?;
    let mut ran = vec!["d^2", "Leibniz", "co-Leibniz"];
    if dr.coalgebra.graded {
        let w = m.min(dr.coalgebra.max_weight()).min(4);
        let a = adjunction_unit_check(&dr.coalgebra, w)?;
        note("adjunction", if a.passes { Ok(()) } else { Err(format!("{:?}", a.h0)) });
        ran.push("adjunction");
    }
    let ds = dual_slice_with(p, &b.slices, m)?;
    let tensor = CoalgebraSlice::tensor(p.field, p.ngens(), m, Some(&p.alphabet));
    let ft = five_term_check(&ds.coalgebra, &tensor, &ds.embedding, m)?;
    note("five-term", if ft.exact { Ok(()) } else { Err(format!("{:?}", ft)) });
    let cr = corelation_filtration_with(p, &b.slices, m.min(4))?;
    note("N2 H2 = im m2", if cr.n2_is_image { Ok(()) } else { Err(format!("{:?}", cr)) });
    ran.extend(["five-term", "N2 H2 = im m2"]);
    let pass = failed.is_empty();
    Ok((pass, if pass { ran.join(", ") } else { failed.join("; ") }))
}

pub fn choice(b: &Bundle, seed: u64) -> Res {
    let dr = b.run()?;
    let ctx = MasseyContext::new(&dr.window.cobar)?;
    let f = ctx.field();
    let h = ctx.h1.dim();
    let mut defined = 0;
    for t in 0..h.pow(3) {
        let idx = [t / (h * h), (t / h) % h, t % h];
        let xs: Vec<SparseVec> = idx.iter().map(|&i| vec![(i, f.one())]).collect();
        if ctx.triple_tuple(&xs[0], &xs[1], &xs[2], None)?.defined {
            defined += 1;
        }
        if !choice_invariance(&ctx, [&xs[0], &xs[1], &xs[2]], seed ^ t as u64, RERUNS)? {
            return Ok((false, format!("triple {idx:?} left its coset")));
        }
    }
    Ok((true, format!("{defined} defined triples x {RERUNS} reruns")))
}

fn per_entry(bundles: &[Bundle], f: impl Fn(&Bundle) -> Res) -> Res {
    let mut bad = Vec::new();
    let mut good = Vec::new();
    for b in bundles {
        match f(b) {
            Ok((true, d)) => good.push(format!("{}: {d}", b.input.stem())),
            Ok((false, d)) => bad.push(format!("{}: {d}", b.input.stem())),
            Err(e) => bad.push(format!("{}: {e}", b.input.stem())),
        }
    }
    if bad.is_empty() {
        Ok((true, format!("{} presentations", good.len())))
    } else {
        Ok((false, bad.join("; ")))
    }
}

fn word_support(f: &koszulkit::ncalg::NCPoly) -> BTreeSet<Vec<u8>> {
    f.terms().map(|(w, _)| w.0.clone()).collect()
}

fn c1() -> Res {
    let i = corpus_input("x2_y3")?;
    let p = &i.presentation;
    let sc = self_consistency_with(p, &IdealSlices::new(p))?;
    match sc.verdict {
        SelfConsistency::Inconsistent { degree, witness } => {
            let top = witness.homogeneous_part(witness.max_degree().unwrap_or(0));
            let expected: BTreeSet<Vec<u8>> = [vec![0, 1, 1, 1], vec![1, 1, 1, 0]].into_iter().collect();
            let pass = degree == 4 && word_support(&top) == expected;
            Ok((pass, format!("degree {degree}, witness {}", witness.render(&p.alphabet))))
        }
        v => Ok((false, format!("{v:?}"))),
    }
}

fn c2() -> Res {
    let i = corpus_input("x2_y3_commutator")?;
    let p = &i.presentation;
    let sc = self_consistency_with(p, &IdealSlices::new(p))?;
    let mut expected = vec![2; p.trunc + 1];
    expected[0] = 1;
    let ok = matches!(sc.verdict, SelfConsistency::Consistent { up_to: 8 }) && sc.gr_dims == expected;
    Ok((ok, format!("D={}, gr dims {:?}", p.trunc, sc.gr_dims)))
}

fn exterior_relations(f: Field) -> Subspace {
    // xx, yy, xy + yx in the basis xx, xy, yx, yy
    Subspace::span(f, 4, vec![vec![(0, f.one())], vec![(3, f.one())], vec![(1, f.one()), (2, f.one())]])
}

fn same(a: &Subspace, b: &Subspace) -> bool {
    a.is_subspace_of(b) && b.is_subspace_of(a)
}

fn c3() -> Res {
    let i = corpus_input("commutator")?;
    let p = &i.presentation;
    let q = leading_quadratic(p)?;
    let dual = quadratic_dual(&q);
    let ext = same(&dual.r, &exterior_relations(p.field));
    let h = quadratic_algebra_components(&dual, 6);
    let tor = tor_bigraded(&h, 6, 6)?;
    let diag: Vec<usize> = (0..=6).map(|i| tor.get(i, i)).collect();
    let pass = ext && diag == vec![1, 2, 3, 4, 5, 6, 7] && tor.first_off_diagonal().is_none();
    Ok((pass, format!("exterior={ext}, Tor_ii {diag:?}, off-diagonal {:?}", tor.first_off_diagonal())))
}

fn c4() -> Res {
    let i = corpus_input("galois_l3_q7")?;
    let p = &i.presentation;
    let f = p.field;
    let slices = IdealSlices::new(p);
    let mut notes = Vec::new();
    let sc = self_consistency_with(p, &slices)?;
    let consistent = matches!(sc.verdict, SelfConsistency::Consistent { .. });
    notes.push(format!("consistent={consistent}"));

    let comm = Subspace::span(f, 4, vec![vec![(1, f.one()), (2, f.one().neg())]]);
    let gr2 = slices.gr_component(2);
    let gr_rel = gr2.rank() == 1 && gr2.contains(&comm.basis()[0]);
    let only = corpus_input("commutator")?.presentation.truncated(p.trunc);
    let dims_match = IdealSlices::new(&only).gr_dims() == slices.gr_dims();
    notes.push(format!("gr relations {gr_rel}, dims match {dims_match}"));

    let w = p.trunc;
    let m = slice_level(p, &slices, w)?;
    let ds = dual_slice_with(p, &slices, m)?;
    let win = cobar_window(&ds.coalgebra, w)?;
    let (_, h, s) = windowed_cohomology_algebra(&win.cobar, win.stable_degree)?;
    let ext = h.dim(1) == 2 && s >= 2 && h.dim(2) == 1 && {
        // kernel of the product on H^1 (x) H^1 is the symmetric tensors
        let sym = Subspace::span(f, 4, vec![vec![(0, f.one())], vec![(3, f.one())], vec![(1, f.one()), (2, f.one())]]);
        same(&quadratic_part(&h)?.r, &sym)
    };
    let vanish = (3..=win.stable_degree).all(|n| win.dims[n] == 0);
    let koszul = windowed_koszulity(&win.cobar, win.stable_degree)?;
    notes.push(format!("H exterior {ext}, H^n=0 for n>=3 {vanish}, {koszul:?}"));

    let residue_ok = match commutativity_with(p, &slices)? {
        Commutativity::Noncommutative { residue, .. } => {
            let low = residue.lowest_degree().unwrap_or(0);
            let part = residue.homogeneous_part(low);
            let expected = koszulkit::ncalg::NCPoly::monomial(f, 2, p.trunc, Word(vec![1, 1, 1]), f.int(2));
            notes.push(format!("residue {}", residue.render(&p.alphabet)));
            low == 3 && part == expected
        }
        Commutativity::Commutative => false,
    };
    let report = registry().run("certify-nonformal", &i, &Options::default())?;
    let cert = report.verdict_value("formality").unwrap_or("").to_string();
    notes.push(cert.clone());
    let pass = consistent
        && gr_rel
        && dims_match
        && ext
        && vanish
        && koszul == Koszulity::KoszulUpTo(5)
        && residue_ok
        && cert.starts_with("NotFormal");
    Ok((pass, notes.join(", ")))
}

fn c5() -> Res {
    let e = entry("t3_dual").expect("corpus entry");
    let i = corpus_input("t3_dual")?;
    let p = &i.presentation;
    if p.field != Field::Prime(2) {
        return Ok((false, "t3_dual is not over GF(2)".into()));
    }
    let slices = IdealSlices::new(p);
    let dr = dual_run(p, &slices, e.window, e.window)?;
    let a = &dr.window.cobar;
    let ctx = MasseyContext::new(a)?;
    let f = ctx.field();
    let x: SparseVec = vec![(0, f.one())];
    let v = ctx.triple_tuple(&x, &x, &x, None)?;
    // brute force: the class of [t][t^2] + [t^2][t] in the one-dimensional H^2
    let labels = &a.coalgebra().labels;
    let find = |l: &str| labels.iter().position(|s| s == l).map(|i| i as u32);
    let (c1, c2) = (find("t"), find("t^2"));
    let brute = match (c1, c2) {
        (Some(c1), Some(c2)) => {
            let u = a.index_of(&[c1, c2]);
            let w = a.index_of(&[c2, c1]);
            match (u, w) {
                (Some(u), Some(w)) => ctx.h2.coords(&sparse::collect(vec![(u, f.one()), (w, f.one())])),
                _ => None,
            }
        }
        _ => None,
    };
    let brute_ok = ctx.h2.dim() == 1 && brute.as_ref().is_some_and(|b| !b.is_empty() && v.same_coset(b));
    let qf = quasi_formality_check(&dr.run);
    let qf_ok = matches!(&qf, QuasiFormality::NotQuasiFormal { r: 2, p: 3, q: 3, matrix } if matrix.rank() == 1);
    let agree = ctx.agreement_check(&x, &x, &x)?;
    let pass = v.is_nonzero() && v.indeterminacy.dim() == 0 && brute_ok && qf_ok && agree;
    Ok((
        pass,
        format!(
            "nonzero={}, indeterminacy {}, brute force {brute_ok}, d_2^{{3,3}} {qf_ok}, agreement {agree}",
            v.is_nonzero(),
            v.indeterminacy.dim()
        ),
    ))
}

fn c8(bundles: &[Bundle]) -> Res {
    let mut r = per_entry(bundles, structural)?;
    let graded = bundles.iter().filter(|b| b.run.as_ref().is_ok_and(|d| d.coalgebra.graded)).count();
    r.1.push_str(&format!(", {graded} weight-graded"));
    Ok(r)
}

fn c10() -> Res {
    let i = corpus_input("two_var_lie")?;
    let p: &Presentation = &i.presentation;
    let slices = IdealSlices::new(p);
    let c = p.generator(0).commutator(&p.generator(1)).map_err(|e| CliError::Invariant(e.to_string()))?;
    let member = slices.contains(&c)?;
    let only = corpus_input("commutator")?.presentation.truncated(p.trunc);
    let (a, b) = (slices.gr_dims(), IdealSlices::new(&only).gr_dims());
    Ok((p.trunc == 6 && member && a == b, format!("D={}, member={member}, gr dims {a:?} vs {b:?}", p.trunc)))
}

pub const TITLES: [&str; 10] = [
    "non-self-consistent x^2 = y^3",
    "self-consistent x^2 = y^3, xy = yx",
    "quadratic duality of the commutator relation",
    "Galois example l=3, q=7",
    "Massey calibration on the t^3 dual",
    "main-theorem equivalence on the corpus",
    "spectral-sequence self-audit on the corpus",
    "structural identities on the corpus",
    "choice invariance of triple products",
    "[x,y] - [x,[x,y]] is equivalent to [x,y]",
];

/// Runs the ten criteria; `seed` drives the randomized reruns.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    let bundles = corpus_bundles();
    let with = |f: &dyn Fn(&[Bundle]) -> Res| match &bundles {
        Ok(b) => f(b),
        Err(e) => Err(e.clone()),
    };
    let results: Vec<Res> = vec![
        c1(),
        c2(),
        c3(),
        c4(),
        c5(),
        with(&|b| per_entry(b, main_theorem)),
        with(&|b| per_entry(b, ss_audit)),
        with(&c8),
        with(&|b| per_entry(b, |x| choice(x, seed))),
        c10(),
    ];
    results.into_iter().enumerate().map(|(i, r)| outcome(i + 1, TITLES[i], r)).collect()
}

/// Checks for a user-supplied file: main theorem, audits, structure, choice invariance.
pub fn file_checks(b: &Bundle, seed: u64) -> Vec<(&'static str, Result<(bool, String), CliError>)> {
    vec![
        ("main-theorem", main_theorem(b)),
        ("ss-audit", ss_audit(b)),
        ("structural", structural(b)),
        ("choice-invariance", choice(b, seed)),
    ]
}
