//! One test per acceptance criterion. Each prints a `criterion N: PASS|FAIL`
//! line with the worst error seen, then asserts.

use std::sync::OnceLock;

use ehv::run::Outcome;
use ehv::{find, verify, Ctx};
use ehv_core::cx::{self, cx, rel_err, C64};
use ehv_core::gamma::{double_sine, elliptic_gamma, elliptic_gamma_multi, modified_gamma_g, QuasiPeriods};
use ehv_core::integrands::{delta, Family, IntegrandSpec, ParamSet};
use ehv_core::special::{qpochhammer, theta, theta_factorial, Moduli, TruncationPolicy};
use ehv_core::VerificationReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run_check(name: &str, seed: u64, n: Option<usize>) -> Outcome {
    let check = find(name).expect("registered");
    let ctx = Ctx { seed, n, exec: ehv::exec::Threads::from_env(), ..Ctx::default() };
    verify(check, None, &ctx, check.precision)
}

struct Tally {
    ok: bool,
    count: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { ok: true, count: 0, worst: 0.0, notes: Vec::new() }
    }

    fn require(&mut self, cond: bool, note: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            if self.notes.len() < 8 {
                self.notes.push(note());
            }
        }
    }

    /// Every report passes at a tolerance no looser than `tol`.
    fn reports(&mut self, o: &Outcome, tol: f64, filter: impl Fn(&VerificationReport) -> bool) {
        if let Some(e) = &o.error {
            self.require(false, || format!("error: {e}"));
        }
        for r in o.reports.iter().filter(|r| filter(r)) {
            self.count += 1;
            self.worst = self.worst.max(r.rel_err);
            self.require(r.pass && r.tol <= tol * (1.0 + 1e-12), || format!("{} rel_err {:e} tol {:e}", r.name, r.rel_err, r.tol));
        }
    }

    fn residual(&mut self, label: &str, err: f64, tol: f64) {
        self.count += 1;
        self.worst = self.worst.max(err);
        self.require(err <= tol, || format!("{label}: {err:e} > {tol:e}"));
    }

    fn finish(self, n: u32, what: &str) {
        let verdict = if self.ok && self.count > 0 { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} {what} ({} checks, worst {:.3e}) {}", self.count, self.worst, self.notes.join("; "));
        assert!(self.ok && self.count > 0, "criterion {n} failed: {}", self.notes.join("; "));
    }
}

fn all(_: &VerificationReport) -> bool {
    true
}

/// Nodes evaluated by a doubling ladder from `start` up to a final rule of
/// `cap` points per dimension; reports count every level.
fn ladder(start: u64, cap: u64, dim: u32) -> u64 {
    let mut k = start;
    let mut total = 0;
    while k <= cap {
        total += k.pow(dim);
        k *= 2;
    }
    total
}

/// Each rank-`n` integral within its tolerance, time and node budgets.
fn integral(t: &mut Tally, name: &str, n: usize, tol: f64, max_ms: f64, cap: u64) {
    let o = run_check(name, 3, Some(n));
    t.reports(&o, tol, all);
    let start = if n == 1 { 128 } else { 96 };
    let budget = ladder(start, cap, n as u32);
    for r in &o.reports {
        t.require(r.runtime_ms < max_ms, || format!("{} took {:.0} ms", r.name, r.runtime_ms));
        t.require(r.nodes <= budget, || format!("{} used {} nodes", r.name, r.nodes));
    }
}

#[test]
fn criterion_01_elliptic_beta_integral() {
    let mut t = Tally::new();
    let o = run_check("theorem1", 1, None);
    t.reports(&o, 1e-9, all);
    t.require(o.reports.len() == 20, || format!("{} draws", o.reports.len()));
    for r in &o.reports {
        t.require(r.runtime_ms < 1000.0, || format!("{} took {:.0} ms", r.name, r.runtime_ms));
        t.require(r.nodes <= ladder(128, 512, 1), || format!("{} used {} nodes", r.name, r.nodes));
    }
    t.finish(1, "elliptic beta integral, 20 draws");
}

#[test]
fn criterion_02_cn_type_one_and_two() {
    let mut t = Tally::new();
    for name in ["cn1", "cn2"] {
        integral(&mut t, name, 1, 1e-9, 1000.0, 512);
        integral(&mut t, name, 2, 1e-6, 120_000.0, 384);
    }
    t.finish(2, "C_n Type I and II at n = 1, 2");
}

#[test]
fn criterion_03_cn_type_three() {
    let mut t = Tally::new();
    integral(&mut t, "cn3", 1, 1e-9, 1000.0, 512);
    integral(&mut t, "cn3", 2, 1e-6, 120_000.0, 384);
    let c = |re, im| cx::<f64>(re, im);
    let params = ParamSet { t: vec![c(0.5, 0.3), c(-0.4, 0.6), c(0.7, -0.2)], x: vec![c(0.3, 0.75), c(-0.6, 0.2)], tt: Some(c(0.2, 0.35)), ..Default::default() };
    let m = Moduli::new(c(0.31, 0.05), c(0.23, -0.1)).unwrap();
    let spec = IntegrandSpec { family: Family::CnIII, n: 2, params: params.clone(), moduli: m };
    let swapped = IntegrandSpec { moduli: m.swapped(), ..spec.clone() };
    // at n = 1 the weight is symmetric in q and p; the pair factors break it
    let z = [c(0.6, 0.8), c(-0.28, 0.96)];
    let (a, b) = (delta(&spec, &z).unwrap(), delta(&swapped, &z).unwrap());
    let asym = rel_err(a, b);
    t.require(asym > 1e-3, || format!("q <-> p asymmetry only {asym:e}"));
    t.count += 1;
    t.finish(3, &format!("C_n Type III at n = 1, 2; q <-> p asymmetry {asym:.3e}"));
}

#[test]
fn criterion_04_an_type_one() {
    let mut t = Tally::new();
    let o = run_check("an1", 3, Some(1));
    t.reports(&o, 1e-9, all);
    t.require(o.reports.iter().any(|r| r.name.contains(":theorem1")), || "no comparison with the n = 1 evaluation".into());
    integral(&mut t, "an1", 2, 1e-6, 120_000.0, 384);
    t.require(o.reports.iter().all(|r| r.name.contains("conjecture")), || "reports not labelled as conjecture".into());
    t.finish(4, "A_n Type I (conjecture) at n = 1, 2");
}

#[test]
fn criterion_05_an_type_two_and_three() {
    let mut t = Tally::new();
    for (name, n) in [("an2_odd", 1), ("an2_even", 2), ("an3_odd", 1), ("an3_even", 2)] {
        integral(&mut t, name, n, 1e-6, 120_000.0, if n == 1 { 512 } else { 384 });
    }
    t.finish(5, "A_n Type II and III at n = 1, 2");
}

#[test]
fn criterion_06_terminating_summation() {
    let mut t = Tally::new();
    let o = run_check("ft_sum", 6, None);
    t.reports(&o, 1e-12, all);
    t.require(o.reports.len() == 50 * 9, || format!("{} reports", o.reports.len()));
    t.finish(6, "terminating very-well-poised sum, N <= 8, 50 draws");
}

#[test]
fn criterion_07_bailey_transformation() {
    let mut t = Tally::new();
    let o = run_check("bailey", 7, None);
    t.reports(&o, 1e-11, all);
    t.require(o.reports.len() == 24 * 6, || format!("{} reports", o.reports.len()));
    t.finish(7, "Bailey transformation, N <= 5, 24 orders");
}

#[test]
fn criterion_08_contiguous_relations() {
    let mut t = Tally::new();
    let o = run_check("contiguous", 8, None);
    t.reports(&o, 1e-11, all);
    t.finish(8, "contiguous relations, n <= 4");
}

#[test]
fn criterion_09_multiple_summation() {
    let mut t = Tally::new();
    let o = run_check("milne", 9, None);
    t.reports(&o, 1e-10, all);
    t.finish(9, "A_n multiple summation, n <= 3, N_j <= 3");
}

#[test]
fn criterion_10_conjectured_sum() {
    let mut t = Tally::new();
    let o = run_check("gustafson_rakha", 10, None);
    t.reports(&o, 1e-9, all);
    for n in [2, 3] {
        t.require(o.reports.iter().any(|r| r.name.contains(&format!("n={n},"))), || format!("no case with n = {n}"));
    }
    t.finish(10, "Gustafson-Rakha-type sum (conjecture), n = 2, 3");
}

#[test]
fn criterion_11_determinant() {
    let mut t = Tally::new();
    let o = run_check("kratt", 11, None);
    t.reports(&o, 1e-10, all);
    t.finish(11, "elliptic determinant, n <= 5");
}

#[test]
fn criterion_12_theta_identities() {
    let mut t = Tally::new();
    for name in ["ident", "id1", "id2", "id3"] {
        let o = run_check(name, 12, None);
        t.require(o.reports.len() == 1000, || format!("{name}: {} draws", o.reports.len()));
        t.reports(&o, 1e-12, all);
    }
    t.finish(12, "theta identities, 1000 draws each");
}

#[test]
fn criterion_13_difference_equation_and_transformation() {
    let mut t = Tally::new();
    let o = run_check("an_diffeq", 13, None);
    t.reports(&o, 1e-12, |r| !r.name.contains("integral"));
    t.reports(&o, 1e-8, |r| r.name.contains("integral"));
    t.require(o.reports.iter().any(|r| r.name.contains("integral")), || "no integral side".into());
    let o = run_check("an_transform", 13, None);
    t.reports(&o, 1e-8, all);
    t.finish(13, "difference equation and transformation of the A_n integral");
}

fn biorth_run() -> &'static Outcome {
    static RUN: OnceLock<Outcome> = OnceLock::new();
    RUN.get_or_init(|| run_check("biorth", 14, None))
}

#[test]
fn criterion_14_biorthogonality() {
    let mut t = Tally::new();
    let o = biorth_run();
    let matrix = |r: &VerificationReport| !r.name.contains(':');
    t.reports(o, 1e-8, matrix);
    t.require(o.reports.iter().filter(|r| matrix(r)).count() == 16, || "matrix is not 4x4".into());
    let o2 = run_check("biorth2", 14, None);
    t.reports(&o2, 1e-8, all);
    t.require(o2.reports.len() == 16, || format!("two-index matrix has {} entries", o2.reports.len()));
    t.finish(14, "biorthogonality, 4x4 and two-index {0,1}^2 x {0,1}^2");
}

#[test]
fn criterion_15_operators() {
    let mut t = Tally::new();
    let o = biorth_run();
    for (part, tol) in [("eigen[", 1e-10), ("eigen2", 1e-10), ("recurrence", 1e-10), ("gauge", 1e-12)] {
        let before = t.count;
        t.reports(o, tol, |r| r.name.contains(part));
        t.require(t.count > before, || format!("no {part} reports"));
    }
    t.finish(15, "difference operators, recurrence and gauge independence");
}

#[test]
fn criterion_16_shifted_beta_and_integral_representation() {
    let mut t = Tally::new();
    let o = run_check("shifted_beta", 16, None);
    t.reports(&o, 1e-8, all);
    t.require(o.reports.len() == 9, || format!("{} shifted-beta cases", o.reports.len()));
    let o = run_check("intrep", 16, None);
    t.reports(&o, 1e-8, all);
    t.require(o.reports.len() == 9, || format!("{} representation cases", o.reports.len()));
    t.finish(16, "shifted beta integrals i, j <= 2 and integral representation m, n <= 2");
}

#[test]
fn criterion_17_degeneration() {
    let mut t = Tally::new();
    let o = run_check("degeneration_p0", 17, None);
    t.reports(&o, 1e-6, |r| r.name.contains("integral"));
    t.reports(&o, 1e-13, |r| r.name.contains("gamma"));
    t.require(o.reports.iter().any(|r| r.name.contains("gamma")), || "no Gamma*poch check".into());
    t.finish(17, "p -> 0 degeneration");
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..=hi), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

fn one() -> C64 {
    cx(1.0, 0.0)
}

#[test]
fn criterion_18_function_invariants() {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let pol = TruncationPolicy::default();
    let (mut quasi, mut inv, mut split, mut trunc) = (0f64, 0f64, 0f64, 0f64);
    let (mut diff, mut sym, mut refl, mut gdiff) = (0f64, 0f64, 0f64, 0f64);
    let w = QuasiPeriods::<f64>::new(cx(1.0, 0.0), cx(1.3, -0.25), cx(0.2, 0.9));
    let b = w.bases();
    let tpi: C64 = cx(0.0, 2.0 * std::f64::consts::PI);
    for _ in 0..1000 {
        // theta
        let p = polar(&mut rng, 0.0, 0.6);
        let z = C64::from_polar(10f64.powf(rng.gen_range(-1.0..=1.0)), rng.gen_range(-3.0..3.0));
        let th = theta(z, p).unwrap();
        quasi = quasi.max(cx::mag(theta(p * z, p).unwrap() + th / z) / cx::mag(th));
        inv = inv.max(cx::mag(theta(z.inv(), p).unwrap() + th / z) / cx::mag(th));
        for k in -3..=3 {
            t.require(theta(cx::powi(p, k), p).unwrap() == cx(0.0, 0.0), || format!("theta(p^{k}) != 0 at p = {p}"));
        }
        // shifted factorial splitting
        let q = polar(&mut rng, 0.1, 0.6);
        let y = polar(&mut rng, 0.2, 1.5);
        let (m, n) = (rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4));
        let whole = theta_factorial(y, p, q, m + n).unwrap();
        let parts = theta_factorial(y, p, q, m).unwrap() * theta_factorial(y * cx::powi(q, m), p, q, n).unwrap();
        split = split.max(rel_err(parts, whole));
        // truncation
        let base = polar(&mut rng, 0.05, 0.95);
        let x = polar(&mut rng, 0.0, 2.0);
        let a = qpochhammer(x, base, pol).unwrap();
        let wide = TruncationPolicy { max_terms: pol.max_terms * 3 / 2, ..pol };
        trunc = trunc.max(cx::mag(qpochhammer(x, base, wide).unwrap() - a) / cx::mag(a).max(f64::MIN_POSITIVE));
        // elliptic gamma
        let mo = Moduli::new(polar(&mut rng, 0.1, 0.6), polar(&mut rng, 0.1, 0.6)).unwrap();
        let (gq, gp) = (mo.q, mo.p);
        let u = polar(&mut rng, 0.2, 2.0);
        let g = elliptic_gamma(u, &mo, pol).unwrap();
        diff = diff.max(rel_err(elliptic_gamma(gq * u, &mo, pol).unwrap(), theta(u, gp).unwrap() * g));
        diff = diff.max(rel_err(elliptic_gamma(gp * u, &mo, pol).unwrap(), theta(u, gq).unwrap() * g));
        sym = sym.max(rel_err(elliptic_gamma(u, &mo.swapped(), pol).unwrap(), g));
        for pair in [[gp * u, gq / u], [gq * u, gp / u], [gp * gq * u, u.inv()], [u, gp * gq / u]] {
            refl = refl.max(rel_err(elliptic_gamma_multi(&pair, &mo).unwrap(), one()));
        }
        // G difference equations
        let s = polar(&mut rng, 0.0, 0.5);
        let gv = modified_gamma_g(s, &w).unwrap();
        let e1 = theta(cx::exp(tpi * s / w.omega2), b.p).unwrap();
        let e2 = theta(cx::exp(tpi * s / w.omega1), b.p_tilde).unwrap();
        let e3 = double_sine(s, w.omega1, w.omega2).unwrap() * double_sine(w.omega1 + w.omega2 - s, w.omega1, w.omega2).unwrap();
        gdiff = gdiff.max(rel_err(modified_gamma_g(s + w.omega1, &w).unwrap(), e1 * gv));
        gdiff = gdiff.max(rel_err(modified_gamma_g(s + w.omega2, &w).unwrap(), e2 * gv));
        gdiff = gdiff.max(rel_err(modified_gamma_g(s + w.omega3, &w).unwrap(), e3 * gv));
    }
    t.residual("theta quasi-periodicity", quasi, 1e-12);
    t.residual("theta inversion", inv, 1e-12);
    t.residual("factorial splitting", split, 1e-12);
    t.residual("qpochhammer truncation", trunc, f64::EPSILON);
    t.residual("gamma difference laws", diff, 1e-12);
    t.residual("gamma base symmetry", sym, 1e-13);
    t.residual("gamma reflection", refl, 1e-12);
    t.residual("G difference equations", gdiff, 1e-10);
    t.finish(18, "special function and elliptic gamma invariants, 1000 draws");
}
