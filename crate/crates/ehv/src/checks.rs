//! The verification registry. Each check has a seeded sampler producing a
//! parameter file and a runner turning a parameter file into reports.

use ehv_core::biorthogonal::{self as bo, OperatorGauge, RahmanParams};
use ehv_core::cx::{self, lower, Cx};
use ehv_core::gamma::elliptic_gamma;
use ehv_core::identities::{self as id, Side};
use ehv_core::integrands::{n_e, n_e_p0, validate_domain, Family, Integrand, IntegrandSpec, ParamSet};
use ehv_core::quadrature::{integrate, QuadratureConfig, DEFAULT_MAX_NODES};
use ehv_core::series::{self as se, Residual};
use ehv_core::special::qpochhammer;
use ehv_core::{Dd, Error, Moduli, Real, TruncationPolicy, VerificationReport, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Threads;
use crate::params::{nums, ParamFile};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Std,
    Extended,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Std => "std",
            Precision::Extended => "extended",
        }
    }
}

/// Run settings shared by every check.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub tol: Option<f64>,
    /// Fixed nodes per dimension, which disables doubling.
    pub nodes: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub draws: Option<usize>,
    /// Total quadrature nodes over the whole run.
    pub max_nodes: u64,
    pub exec: Threads,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx { seed: 0, tol: None, nodes: None, n: None, m: None, draws: None, max_nodes: DEFAULT_MAX_NODES, exec: Threads::new(1) }
    }
}

impl Ctx {
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// Starts at `start` nodes per dimension and doubles up to `cap`.
    pub fn cfg(&self, start: usize, cap: usize, tol: f64) -> QuadratureConfig {
        let mut c = QuadratureConfig::for_dim(1).with_nodes(start).with_tol(tol * 0.1);
        c.max_doublings = 0;
        while start << (c.max_doublings + 1) <= cap {
            c.max_doublings += 1;
        }
        if let Some(n) = self.nodes {
            c.nodes_per_dim = n;
            c.max_doublings = 0;
        }
        c.max_nodes = self.max_nodes;
        c
    }

    fn rank_cfg(&self, n: usize, tol: f64) -> QuadratureConfig {
        match n {
            1 => self.cfg(128, 512, tol),
            2 => self.cfg(96, 384, tol),
            _ => self.cfg(64, 256, tol),
        }
    }
}

/// Seeded parameter source; `rejected` counts draws that failed admissibility.
pub struct Sampler {
    rng: ChaCha8Rng,
    pub rejected: u64,
    /// Index of the current draw.
    pub index: usize,
}

const MAX_TRIES: u64 = 100_000;

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), rejected: 0, index: 0 }
    }

    pub fn polar(&mut self, lo: f64, hi: f64) -> C64 {
        let r = if hi > lo { self.rng.gen_range(lo..hi) } else { lo };
        C64::from_polar(r, self.rng.gen_range(0.0..std::f64::consts::TAU))
    }

    pub fn polars(&mut self, n: usize, lo: f64, hi: f64) -> Vec<C64> {
        (0..n).map(|_| self.polar(lo, hi)).collect()
    }

    /// Redraws until `f` accepts.
    pub fn until<X>(&mut self, mut f: impl FnMut(&mut Self) -> Option<X>) -> Result<X> {
        for _ in 0..MAX_TRIES {
            if let Some(x) = f(self) {
                return Ok(x);
            }
            self.rejected += 1;
        }
        Err(Error::DomainViolation(format!("no admissible draw in {MAX_TRIES} tries")))
    }
}

type Runner = fn(&ParamFile, &Ctx) -> Result<Vec<VerificationReport>>;
type Drawer = fn(&mut Sampler, &Ctx) -> Result<ParamFile>;

pub struct Check {
    pub name: &'static str,
    pub about: &'static str,
    pub precision: Precision,
    pub draws: usize,
    sample: Drawer,
    run_std: Runner,
    run_ext: Runner,
}

impl Check {
    pub fn sample(&self, s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
        (self.sample)(s, ctx)
    }

    pub fn run(&self, pf: &ParamFile, ctx: &Ctx, prec: Precision) -> Result<Vec<VerificationReport>> {
        match prec {
            Precision::Std => (self.run_std)(pf, ctx),
            Precision::Extended => (self.run_ext)(pf, ctx),
        }
    }
}

macro_rules! check {
    ($name:literal, $about:literal, $prec:ident, $draws:expr, $sample:ident, $run:ident) => {
        Check {
            name: $name,
            about: $about,
            precision: Precision::$prec,
            draws: $draws,
            sample: $sample,
            run_std: $run::<f64>,
            run_ext: $run::<Dd>,
        }
    };
}

pub static REGISTRY: [Check; 26] = [
    check!("theorem1", "elliptic beta integral", Std, 20, draw_e, run_theorem1),
    check!("cn1", "C_n Type I integral", Std, 1, draw_cn1, run_cn1),
    check!("cn2", "C_n Type II integral", Std, 1, draw_cn2, run_cn2),
    check!("cn3", "C_n Type III integral", Std, 1, draw_cn3, run_cn3),
    check!("an1", "A_n Type I integral (conjecture)", Std, 1, draw_an1, run_an1),
    check!("an2_odd", "A_n Type II integral, odd n", Std, 1, draw_an2_odd, run_an2_odd),
    check!("an2_even", "A_n Type II integral, even n", Std, 1, draw_an2_even, run_an2_even),
    check!("an3_odd", "A_n Type III integral, odd n", Std, 1, draw_an3_odd, run_an3_odd),
    check!("an3_even", "A_n Type III integral, even n", Std, 1, draw_an3_even, run_an3_even),
    check!("ft_sum", "terminating very-well-poised summation", Extended, 50, draw_ft, run_ft),
    check!("bailey", "Bailey transformation, all parameter orders", Extended, 1, draw_bailey, run_bailey),
    check!("contiguous", "contiguous relations of terminating sums", Extended, 1, draw_contiguous, run_contiguous),
    check!("milne", "A_n multiple summation", Extended, 5, draw_milne, run_milne),
    check!("gustafson_rakha", "Gustafson-Rakha-type sum (conjecture)", Extended, 6, draw_gr, run_gr),
    check!("kratt", "elliptic determinant evaluation", Extended, 1, draw_kratt, run_kratt),
    check!("ident", "addition formula for theta", Std, 1000, draw_ident, run_ident),
    check!("id1", "A_n kernel partial fractions", Std, 1000, draw_id1, run_id1),
    check!("id2", "theta partial fractions", Std, 1000, draw_id2, run_id2),
    check!("id3", "theta partial fractions, A_n form", Std, 1000, draw_id3, run_id3),
    check!("an_diffeq", "difference equation of the A_n integral", Std, 3, draw_an_diffeq, run_an_diffeq),
    check!("an_transform", "symmetry transformation of the A_n integral", Std, 1, draw_an_transform, run_an_transform),
    check!("biorth", "biorthogonality and difference operators", Extended, 1, draw_strict, run_biorth),
    check!("biorth2", "two-index biorthogonality", Extended, 1, draw_corrected, run_biorth2),
    check!("intrep", "integral representation of two terminating sums", Std, 1, draw_corrected, run_intrep),
    check!("shifted_beta", "shifted elliptic beta integrals", Extended, 1, draw_corrected, run_shifted_beta),
    check!("degeneration_p0", "p -> 0 limit", Std, 1, draw_p0, run_p0),
];

pub fn find(name: &str) -> Option<&'static Check> {
    REGISTRY.iter().find(|c| c.name == name)
}

// Moduli used when a parameter file leaves them out.
const Q_INT: C64 = C64::new(0.31, 0.0);
const P_INT: C64 = C64::new(0.23, 0.0);
const Q_SER: C64 = C64::new(0.31, 0.05);
const P_SER: C64 = C64::new(0.23, -0.1);

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn prod<T: Real>(z: &[Cx<T>]) -> Cx<T> {
    z.iter().fold(Cx::new(T::one(), T::zero()), |a, &b| a * b)
}

fn residual_report<T: Real>(name: &str, r: &Residual<T>, tol: f64) -> VerificationReport {
    VerificationReport::with_scale(name, lower(r.value), C64::new(0.0, 0.0), r.scale, tol, 0)
}

fn sides<T: Real>(name: &str, l: Cx<T>, r: Cx<T>, tol: f64, nodes: u64) -> VerificationReport {
    VerificationReport::compare(name, lower(l), lower(r), tol, nodes)
}

fn rank(pf: &ParamFile, ctx: &Ctx, default: usize) -> Result<usize> {
    Ok(ctx.n.or(pf.extra_usize("n")?).unwrap_or(default))
}

// ---- integrals ----

fn to_file(set: &ParamSet<f64>, n: usize, q: C64, p: C64) -> ParamFile {
    let mut pf = ParamFile { t: nums(&set.t), f: nums(&set.f), s: nums(&set.s), ..Default::default() };
    pf.set_moduli(q, p);
    if !set.x.is_empty() {
        pf.put_list("x", &set.x);
    }
    if let Some(t) = set.tt {
        pf.put_c("t", t);
    }
    if let Some(s) = set.ss {
        pf.put_c("s", s);
    }
    pf.put_usize("n", n);
    pf
}

fn from_file<T: Real>(pf: &ParamFile) -> Result<ParamSet<T>> {
    Ok(ParamSet {
        t: pf.list("t")?,
        f: pf.list("f")?,
        s: pf.list("s")?,
        x: pf.list("x")?,
        tt: pf.extra_c("t")?,
        ss: pf.extra_c("s")?,
        ..Default::default()
    })
}

/// Draws from `draw` until the domain checklist holds with margin 0.01.
fn admissible(
    s: &mut Sampler,
    family: Family,
    n: usize,
    draw: impl Fn(&mut Sampler) -> ParamSet<f64>,
) -> Result<ParamFile> {
    let m = Moduli::new(Q_INT, P_INT)?;
    let set = s.until(|s| {
        let params = draw(s);
        let spec = IntegrandSpec { family, n, params: params.clone(), moduli: m };
        validate_domain(&spec).worst().is_none_or(|c| c.margin > 0.01).then_some(params)
    })?;
    Ok(to_file(&set, n, Q_INT, P_INT))
}

fn require_domain<T: Real>(spec: &IntegrandSpec<T>) -> Result<()> {
    let v = validate_domain(spec);
    match v.worst() {
        Some(w) if w.margin <= 0.0 => Err(Error::DomainViolation(format!("{} fails (margin {:.3e})", w.label, w.margin))),
        _ => Ok(()),
    }
}

/// Quadrature against the closed form, plus the quadrature value itself.
fn quad<T: Real>(name: &str, spec: IntegrandSpec<T>, tol: f64, ctx: &Ctx) -> Result<(VerificationReport, Cx<T>)> {
    require_domain(&spec)?;
    let n = spec.n;
    let it = Integrand::new(spec)?;
    let r = integrate(&it, &ctx.rank_cfg(n, tol), &ctx.exec)?;
    Ok((sides(name, r.value, it.rhs()?, tol, r.nodes_used), r.value))
}

fn family_tol(n: usize) -> f64 {
    if n == 1 {
        1e-9
    } else {
        1e-6
    }
}

fn run_family<T: Real>(pf: &ParamFile, ctx: &Ctx, family: Family, label: &str, n: usize) -> Result<Vec<VerificationReport>> {
    let spec = IntegrandSpec::<T> { family, n, params: from_file(pf)?, moduli: pf.moduli(Q_INT, P_INT)? };
    let (r, _) = quad(&format!("{label}[n={n}]"), spec, ctx.tol(family_tol(n)), ctx)?;
    Ok(vec![r])
}

fn draw_e(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    admissible(s, Family::E, 1, |s| ParamSet::with_t(s.polars(5, 0.3, 0.85)))
}

fn run_theorem1<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let spec = IntegrandSpec::<T> { family: Family::E, n: 1, params: ParamSet::with_t(pf.exact("t", 5)?), moduli: pf.moduli(Q_INT, P_INT)? };
    Ok(vec![quad("theorem1", spec, ctx.tol(1e-9), ctx)?.0])
}

fn draw_cn1(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(1);
    admissible(s, Family::CnI, n, |s| ParamSet::with_t(s.polars(2 * n + 3, 0.6, 0.85)))
}

fn run_cn1<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::CnI, "cn1", rank(pf, ctx, 1)?)
}

fn draw_cn2(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(1);
    admissible(s, Family::CnII, n, |s| ParamSet { t: s.polars(5, 0.6, 0.85), tt: Some(s.polar(0.6, 0.85)), ..Default::default() })
}

fn run_cn2<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::CnII, "cn2", rank(pf, ctx, 1)?)
}

fn draw_cn3(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(1);
    admissible(s, Family::CnIII, n, |s| ParamSet {
        t: s.polars(3, 0.6, 0.9),
        x: s.polars(n, 0.7, 0.9),
        tt: Some(s.polar(0.3, 0.6)),
        ..Default::default()
    })
}

fn run_cn3<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::CnIII, "cn3", rank(pf, ctx, 1)?)
}

fn draw_an1(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(1);
    admissible(s, Family::AnI, n, |s| ParamSet { t: s.polars(n + 1, 0.7, 0.9), f: s.polars(n + 2, 0.7, 0.9), ..Default::default() })
}

/// At `n = 1` the integral is also compared with the elliptic beta evaluation.
fn run_an1<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let n = rank(pf, ctx, 1)?;
    let params: ParamSet<T> = from_file(pf)?;
    let moduli = pf.moduli(Q_INT, P_INT)?;
    let tol = ctx.tol(family_tol(n));
    let spec = IntegrandSpec { family: Family::AnI, n, params: params.clone(), moduli };
    let (r, value) = quad(&format!("an1[conjecture][n={n}]"), spec, tol, ctx)?;
    let mut out = vec![r];
    if n == 1 {
        let mut t = params.t.clone();
        t.extend_from_slice(&params.f);
        let g = ehv_core::gamma::GammaEval::new(&moduli);
        out.push(sides("an1[conjecture][n=1]:theorem1", value, n_e(&t, &g)?, tol, 0));
    }
    Ok(out)
}

fn an2_draw(s: &mut Sampler, n: usize) -> Result<ParamFile> {
    admissible(s, Family::AnII, n, |s| ParamSet {
        t: s.polars(5, 0.6, 0.85),
        tt: Some(s.polar(0.6, 0.85)),
        ss: Some(s.polar(0.6, 0.85)),
        ..Default::default()
    })
}

fn an3_draw(s: &mut Sampler, n: usize) -> Result<ParamFile> {
    admissible(s, Family::AnIII, n, |s| ParamSet { t: s.polars(n + 4, 0.7, 0.9), tt: Some(s.polar(0.7, 0.9)), ..Default::default() })
}

fn parity(n: usize, odd: bool) -> Result<usize> {
    if n == 0 || (n % 2 == 1) != odd {
        return Err(bad(format!("n = {n} has the wrong parity for this check")));
    }
    Ok(n)
}

fn draw_an2_odd(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    an2_draw(s, parity(ctx.n.unwrap_or(1), true)?)
}

fn draw_an2_even(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    an2_draw(s, parity(ctx.n.unwrap_or(2), false)?)
}

fn draw_an3_odd(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    an3_draw(s, parity(ctx.n.unwrap_or(1), true)?)
}

fn draw_an3_even(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    an3_draw(s, parity(ctx.n.unwrap_or(2), false)?)
}

fn run_an2_odd<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::AnII, "an2_odd", parity(rank(pf, ctx, 1)?, true)?)
}

fn run_an2_even<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::AnII, "an2_even", parity(rank(pf, ctx, 2)?, false)?)
}

fn run_an3_odd<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::AnIII, "an3_odd", parity(rank(pf, ctx, 1)?, true)?)
}

fn run_an3_even<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    run_family::<T>(pf, ctx, Family::AnIII, "an3_even", parity(rank(pf, ctx, 2)?, false)?)
}

// ---- terminating series ----

fn series_file(t: &[C64]) -> ParamFile {
    let mut pf = ParamFile { t: nums(t), ..Default::default() };
    pf.set_moduli(Q_SER, P_SER);
    pf
}

/// `--n`, else `extras.N`, else the full range.
fn orders(pf: &ParamFile, ctx: &Ctx, max: usize) -> Result<Vec<usize>> {
    Ok(match ctx.n.or(pf.extra_usize("N")?) {
        Some(n) => vec![n],
        None => (0..=max).collect(),
    })
}

fn draw_ft(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    let m: Moduli<Dd> = Moduli::from_c64(Q_SER, P_SER)?;
    // cancellation beyond what double-double resolves at 1e-12 is redrawn
    let t = s.until(|s| {
        let t = s.polars(4, 0.5, 1.5);
        let l: Vec<Cx<Dd>> = t.iter().map(|&z| cx::lift(z)).collect();
        (0..=8)
            .all(|n| match se::frenkel_turaev_lhs(l[0], l[1], l[2], l[3], n, &m) {
                Ok(v) => v.max_term <= 1e16 * cx::mag(v.value),
                Err(_) => false,
            })
            .then_some(t)
    })?;
    Ok(series_file(&t))
}

fn run_ft<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_SER, P_SER)?;
    let t = pf.exact::<T>("t", 4)?;
    let tol = ctx.tol(1e-12);
    let mut out = Vec::new();
    for n in orders(pf, ctx, 8)? {
        let l = se::frenkel_turaev_lhs(t[0], t[1], t[2], t[3], n, &m)?.value;
        let r = se::frenkel_turaev_rhs(t[0], t[1], t[2], t[3], n, &m)?;
        out.push(sides(&format!("ft_sum[N={n}]"), l, r, tol, 0));
    }
    Ok(out)
}

fn draw_bailey(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    Ok(series_file(&s.polars(6, 0.5, 1.5)))
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut s = [a, b, c, d];
                    s.sort_unstable();
                    if s == [0, 1, 2, 3] {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn run_bailey<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_SER, P_SER)?;
    let t6 = pf.exact::<T>("t", 6)?;
    let tol = ctx.tol(1e-11);
    let mut out = Vec::new();
    for n in orders(pf, ctx, 5)? {
        let mut t = [t6[0]; 8];
        t[..6].copy_from_slice(&t6);
        t[6] = cx::powi(m.q, -(n as i64));
        t[7] = t[0] * t[0] * t[0] * m.q * m.q / prod(&t[1..7]);
        for p in permutations() {
            let (l, r) = se::bailey_sides(&t, n, &m, p)?;
            let name = format!("bailey[N={n},perm={}{}{}{}]", p[0], p[1], p[2], p[3]);
            out.push(sides(&name, l.value, r, tol, 0));
        }
    }
    Ok(out)
}

fn draw_contiguous(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    Ok(series_file(&s.polars(6, 0.5, 1.5)))
}

/// `t` holds `t0, t2..t6`; `t1 = q^{-n}` and `t7` follow from balancing.
fn run_contiguous<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_SER, P_SER)?;
    let v = pf.exact::<T>("t", 6)?;
    let tol = ctx.tol(1e-11);
    let mut out = Vec::new();
    for n in orders(pf, ctx, 4)? {
        let mut t = [v[0]; 8];
        t[1] = cx::powi(m.q, -(n as i64));
        t[2..7].copy_from_slice(&v[1..]);
        t[7] = t[0] * t[0] * t[0] * m.q * m.q / prod(&t[1..7]);
        for (k, r) in se::contiguous_residuals(&t, &m).into_iter().enumerate() {
            match r {
                Ok(r) => out.push(residual_report(&format!("contiguous[n={n},rel={}]", k + 1), &r, tol)),
                // the shifted series stops terminating at n = 0
                Err(Error::NonTerminating) if n == 0 => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

const MILNE_BOXES: [&[usize]; 5] = [&[3], &[1, 2], &[2, 1, 3], &[3, 3, 3], &[0, 2]];

fn draw_milne(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    let ns = MILNE_BOXES[s.index % MILNE_BOXES.len()];
    let mut pf = series_file(&s.polars(ns.len(), 0.5, 1.5));
    pf.put_c("b", s.polar(0.5, 1.5));
    pf.put_c("c", s.polar(0.5, 1.5));
    pf.put_c("d", s.polar(0.5, 1.5));
    pf.extras.insert("N".into(), serde_json::json!(ns));
    Ok(pf)
}

fn run_milne<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_SER, P_SER)?;
    let ns = pf.extra_usizes("N")?.ok_or_else(|| bad("milne needs extras.N, one entry per t"))?;
    let (l, r) = se::milne_sum_sides(&pf.list::<T>("t")?, pf.need_c("b")?, pf.need_c("c")?, pf.need_c("d")?, &ns, &m)?;
    let label: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
    Ok(vec![sides(&format!("milne[N={}]", label.join(",")), l, r, ctx.tol(1e-10), 0)])
}

fn draw_gr(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(2 + s.index % 2);
    let big_n = 1 + (s.index / 2) % 3;
    let m: Moduli<f64> = Moduli::new(Q_SER, P_SER)?;
    let mut t = s.polars(n - 1, 0.5, 1.5);
    let last = cx::powi(m.q, -(big_n as i64)) / prod(&t);
    t.push(last);
    let mut pf = series_file(&t);
    pf.put_c("t", s.polar(0.5, 1.5));
    let e = s.polars(3, 0.5, 1.5);
    pf.put_list("e", &e);
    pf.put_usize("N", big_n);
    Ok(pf)
}

fn run_gr<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_SER, P_SER)?;
    let mut t = pf.list::<T>("t")?;
    let e = pf.list::<T>("e")?;
    let e: [Cx<T>; 3] = e.try_into().map_err(|_| bad("extras.e needs 3 entries"))?;
    let big_n = pf.extra_usize("N")?.ok_or_else(|| bad("missing extras.N"))?;
    // the last t is fixed by the balancing condition; redo it in working precision
    let k = t.len().checked_sub(1).ok_or_else(|| bad("t is empty"))?;
    let last = cx::div(cx::powi(m.q, -(big_n as i64)), prod(&t[..k]));
    if cx::rel_err(t[k], last) > 1e-12 {
        return Err(bad(format!("t{k} must equal q^-N divided by the product of the other t")));
    }
    t[k] = last;
    let (l, r) = se::gustafson_rakha_sum_sides(&t, &e, pf.need_c("t")?, big_n, &m)?;
    let name = format!("gustafson_rakha[conjecture][n={},N={big_n}]", t.len());
    Ok(vec![sides(&name, l, r, ctx.tol(1e-9), 0)])
}

fn draw_kratt(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    let mut pf = series_file(&[]);
    for k in ["a", "b", "c"] {
        pf.put_c(k, s.polar(0.5, 1.5));
    }
    pf.put_list("x", &s.polars(5, 0.5, 1.5));
    Ok(pf)
}

/// Sizes `1..=len(x)`, or only `--n`.
fn run_kratt<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_SER, P_SER)?;
    let x = pf.list::<T>("x")?;
    let sizes: Vec<usize> = match ctx.n {
        Some(n) if n >= 1 && n <= x.len() => vec![n],
        Some(n) => return Err(bad(format!("n = {n} needs at least n entries in extras.x"))),
        None => (1..=x.len()).collect(),
    };
    let (a, b, c) = (pf.need_c("a")?, pf.need_c("b")?, pf.need_c("c")?);
    let mut out = Vec::new();
    for n in sizes {
        let (l, r) = id::krattenthaler_det_sides(a, b, c, &x[..n], &m)?;
        out.push(sides(&format!("kratt[n={n}]"), l, r, ctx.tol(1e-10), 0));
    }
    Ok(out)
}

// ---- theta identities ----

fn theta_file(s: &mut Sampler) -> ParamFile {
    let mut pf = ParamFile::default();
    let p = s.polar(0.0, 0.5);
    pf.set_moduli(Q_INT, p);
    pf
}

fn identity_rank(s: &Sampler, ctx: &Ctx) -> usize {
    ctx.n.unwrap_or(1 + s.index % 3)
}

fn draw_ident(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    let mut pf = theta_file(s);
    pf.t = nums(&s.polars(4, 0.2, 2.0));
    Ok(pf)
}

fn run_ident<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_INT)?;
    let v = pf.exact::<T>("t", 4)?;
    let r = id::riemann_identity_residual(v[0], v[1], v[2], v[3], m.p)?;
    Ok(vec![residual_report("ident", &r, ctx.tol(1e-12))])
}

fn draw_id1(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = identity_rank(s, ctx);
    let mut pf = theta_file(s);
    pf.t = nums(&s.polars(n + 1, 0.2, 2.0));
    let mut z = s.polars(n, 0.2, 2.0);
    z.push(prod(&z).inv());
    pf.put_list("z", &z);
    pf.put_c("b", s.polar(0.2, 2.0));
    Ok(pf)
}

fn run_id1<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_INT)?;
    let r = id::id1_residual(&pf.list::<T>("t")?, &pf.list::<T>("z")?, pf.need_c("b")?, m.p)?;
    Ok(vec![residual_report("id1", &r, ctx.tol(1e-12))])
}

fn draw_id2(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = identity_rank(s, ctx);
    let mut pf = theta_file(s);
    pf.t = nums(&s.polars(n, 0.2, 2.0));
    pf.f = nums(&s.polars(n, 0.2, 2.0));
    pf.put_c("t", s.polar(0.2, 2.0));
    Ok(pf)
}

/// `t` holds the `a_k`, `f` the `b_k`.
fn run_id2<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_INT)?;
    let r = id::partial_fraction_residual(&pf.list::<T>("t")?, &pf.list::<T>("f")?, pf.need_c("t")?, m.p)?;
    Ok(vec![residual_report("id2", &r, ctx.tol(1e-12))])
}

fn draw_id3(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = identity_rank(s, ctx);
    let mut pf = theta_file(s);
    pf.t = nums(&s.polars(n + 1, 0.2, 2.0));
    pf.f = nums(&s.polars(n + 2, 0.2, 2.0));
    Ok(pf)
}

fn run_id3<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_INT)?;
    let r = id::id3_residual(&pf.list::<T>("t")?, &pf.list::<T>("f")?, m.p)?;
    Ok(vec![residual_report("id3", &r, ctx.tol(1e-12))])
}

// ---- A_n difference equation and transformation ----

fn draw_an_diffeq(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(1 + s.index % 3);
    let m: Moduli<f64> = Moduli::new(Q_INT, P_INT)?;
    // the integral side shifts A B by q, hence the stronger bound at n = 1
    let bound = if n == 1 { cx::mag(m.p) } else { cx::mag(m.pq()) } * 1.3;
    let (t, f) = s.until(|s| {
        let t = s.polars(n + 1, 0.6, 0.85);
        let f = s.polars(n + 2, 0.6, 0.85);
        (cx::mag(prod(&t) * prod(&f)) > bound).then_some((t, f))
    })?;
    let mut pf = ParamFile { t: nums(&t), f: nums(&f), ..Default::default() };
    pf.set_moduli(Q_INT, P_INT);
    Ok(pf)
}

/// Closed-form side for every `n`; the integral side at `n = 1`.
fn run_an_diffeq<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_INT)?;
    let (t, f) = (pf.list::<T>("t")?, pf.list::<T>("f")?);
    let n = t.len().saturating_sub(1);
    let cfg = ctx.rank_cfg(n, 1e-10);
    let (r, _) = id::an_difference_residual(&t, &f, &m, Side::ClosedForm, &cfg, &ctx.exec)?;
    let mut out = vec![residual_report(&format!("an_diffeq[closed,n={n}]"), &r, ctx.tol(1e-12))];
    if n == 1 {
        let tol = ctx.tol(1e-8);
        let (r, nodes) = id::an_difference_residual(&t, &f, &m, Side::Integral, &ctx.cfg(128, 512, tol), &ctx.exec)?;
        let mut rep = residual_report("an_diffeq[integral,n=1]", &r, tol);
        rep.nodes = nodes;
        out.push(rep);
    }
    Ok(out)
}

fn draw_an_transform(s: &mut Sampler, ctx: &Ctx) -> Result<ParamFile> {
    let n = ctx.n.unwrap_or(1);
    let pq = cx::mag(Q_INT * P_INT);
    let (t, f, sv) = s.until(|s| {
        let t = s.polar(0.7, 0.9);
        let f = s.polars(n + 2, 0.5, 0.85);
        let sv = s.polars(n + 2, 0.5, 0.85);
        let tn = cx::mag(cx::powi(t, n as i64 + 1));
        let ok = tn * cx::mag(prod(&f)) > pq + 0.01 && tn * cx::mag(prod(&sv)) > pq + 0.01;
        ok.then_some((t, f, sv))
    })?;
    let mut pf = ParamFile { f: nums(&f), s: nums(&sv), ..Default::default() };
    pf.set_moduli(Q_INT, P_INT);
    pf.put_c("t", t);
    Ok(pf)
}

fn run_an_transform<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_INT)?;
    let f = pf.list::<T>("f")?;
    let n = f.len().saturating_sub(2);
    let tol = ctx.tol(1e-8);
    let r = id::an_transformation_sides(pf.need_c("t")?, &f, &pf.list::<T>("s")?, &m, &ctx.rank_cfg(n, tol), &ctx.exec)?;
    Ok(vec![sides(&format!("an_transform[n={n}]"), r.lhs, r.rhs, tol, r.nodes)])
}

// ---- biorthogonal functions ----

fn strict_moduli() -> (C64, C64) {
    (C64::from_polar(0.85, 0.3), C64::from_polar(0.1, -0.5))
}

fn corrected_moduli() -> (C64, C64) {
    (C64::from_polar(0.35, 0.3), C64::from_polar(0.25, -0.5))
}

fn rahman<T: Real>(pf: &ParamFile, (q, p): (C64, C64)) -> Result<RahmanParams<T>> {
    let t = pf.exact::<T>("t", 5)?;
    RahmanParams::new([t[0], t[1], t[2], t[3], t[4]], pf.moduli(q, p)?)
}

/// Random phases at fixed moduli; `ok` decides admissibility.
fn rahman_draw(
    s: &mut Sampler,
    (q, p): (C64, C64),
    r: f64,
    r4: f64,
    ok: impl Fn(&RahmanParams<f64>) -> bool,
) -> Result<ParamFile> {
    let m = Moduli::new(q, p)?;
    let t = s.until(|s| {
        let mut t = s.polars(4, r, r);
        t.push(s.polar(r4, r4));
        let rp = RahmanParams::new([t[0], t[1], t[2], t[3], t[4]], m).ok()?;
        ok(&rp).then_some(t)
    })?;
    let mut pf = ParamFile { t: nums(&t), ..Default::default() };
    pf.set_moduli(q, p);
    Ok(pf)
}

/// Parameters where the unit circle separates the poles for all indices up to 3.
fn draw_strict(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    rahman_draw(s, strict_moduli(), 0.8, 0.5, |rp| {
        (0..=3).all(|n| (0..=3).all(|m| bo::contour_check(m, n, 0, 0, rp).admissible))
    })
}

fn draw_corrected(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    let mut pf = rahman_draw(s, corrected_moduli(), 0.85, 0.3, |_| true)?;
    pf.put_c("alpha", C64::from_polar(0.6, 1.1));
    pf.put_c("beta", C64::from_polar(1.3, -0.4));
    Ok(pf)
}

fn unit_points<T: Real>(k: usize) -> Vec<Cx<T>> {
    (0..k).map(|j| cx::lift(C64::from_polar(1.0, 0.3 + 0.31 * j as f64))).collect()
}

fn worst(rs: Vec<Residual<f64>>) -> Residual<f64> {
    rs.into_iter().max_by(|a, b| a.relative().total_cmp(&b.relative())).unwrap()
}

fn lowered<T: Real>(r: Residual<T>) -> Residual<f64> {
    Residual { value: lower(r.value), scale: r.scale }
}

/// Eigenvalue equations, the three-term recurrence and gauge independence.
fn operator_reports<T: Real>(rp: &RahmanParams<T>, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let (q, p) = (rp.moduli.q, rp.moduli.p);
    let tol = ctx.tol(1e-10);
    for n in 0..=4 {
        let mu = cx::powi(q, n as i64);
        let rs = unit_points::<T>(20)
            .into_iter()
            .map(|z| Ok(lowered(bo::apply_d(|w| bo::r_n(w, n, rp), z, mu, rp)?)))
            .collect::<Result<Vec<_>>>()?;
        out.push(residual_report(&format!("biorth:eigen[n={n}]"), &worst(rs), tol));
    }
    let z = cx::lift(C64::from_polar(1.0, 0.9));
    for n in 0..=2 {
        for m in 0..=2 {
            let mu = cx::powi(q, n as i64) * cx::powi(p, m as i64);
            let f = |w| bo::r_nm(w, n, m, rp);
            out.push(residual_report(&format!("biorth:eigen2[n={n},m={m}]"), &bo::apply_d(f, z, mu, rp)?, tol));
            out.push(residual_report(&format!("biorth:eigen2_swapped[n={n},m={m}]"), &bo::apply_d(f, z, mu, &rp.swapped())?, tol));
        }
    }
    let g = OperatorGauge::default();
    g.validate(rp)?;
    let zs = [cx::lift(C64::from_polar(1.0, 0.7)), cx::lift(C64::new(0.9, 0.4))];
    for n in 0..5 {
        let mut worst = (f64::NEG_INFINITY, None);
        for &z in &zs {
            let prev = if n == 0 { Cx::new(T::zero(), T::zero()) } else { bo::r_n(z, n - 1, rp)? };
            let next = bo::recurrence_next(prev, bo::r_n(z, n, rp)?, n, z, rp, &g)?;
            let want = bo::r_n(z, n + 1, rp)?;
            let e = cx::rel_err(next, want);
            if e > worst.0 {
                worst = (e, Some((next, want)));
            }
        }
        let (l, r) = worst.1.unwrap();
        out.push(sides(&format!("biorth:recurrence[n={}]", n + 1), l, r, tol, 0));
    }
    let gauges = [(1.3, 0.0, 0.7, 0.1), (0.4, 0.9, 1.7, -0.3), (2.2, 0.5, 0.6, 0.6), (0.9, -0.8, 1.1, 0.2), (1.5, 1.5, 0.3, -0.7)];
    let z = cx::lift(C64::from_polar(1.0, 1.3));
    for n in 0..4 {
        let prev = if n == 0 { Cx::new(T::zero(), T::zero()) } else { bo::r_n(z, n - 1, rp)? };
        let cur = bo::r_n(z, n, rp)?;
        let vals = gauges
            .iter()
            .map(|&(a, b, c, d)| {
                let g = OperatorGauge { xi: cx::cx(a, b), eta: cx::cx(c, d) };
                bo::recurrence_next(prev, cur, n, z, rp, &g)
            })
            .collect::<Result<Vec<_>>>()?;
        let far = vals[1..].iter().copied().max_by(|a, b| cx::rel_err(*a, vals[0]).total_cmp(&cx::rel_err(*b, vals[0]))).unwrap();
        out.push(sides(&format!("biorth:gauge[n={}]", n + 1), far, vals[0], ctx.tol(1e-12), 0));
    }
    Ok(out)
}

/// `--n` and `--m` select one entry, which needs an admissible unit circle;
/// otherwise the full matrix up to `extras.max` (3) and the operator checks.
fn run_biorth<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let rp = rahman::<T>(pf, strict_moduli())?;
    let tol = ctx.tol(1e-8);
    let cfg = ctx.cfg(256, 1024, 1e-12);
    if let (Some(n), Some(m)) = (ctx.n.or(pf.extra_usize("n")?), ctx.m.or(pf.extra_usize("m")?)) {
        let (v, e, nodes) = bo::biorth_integral(n, m, &rp, &cfg, &ctx.exec)?;
        let ne = cx::mag(n_e(&rp.t, &ehv_core::gamma::GammaEval::new(&rp.moduli))?);
        let mut h_min = f64::INFINITY;
        for k in 0..=n.max(m) {
            h_min = h_min.min(cx::mag(bo::h_n(k, &rp)?) * ne);
        }
        let scale = if n == m { cx::mag(e) } else { h_min };
        return Ok(vec![VerificationReport::with_scale(&format!("biorth[{n},{m}]"), lower(v), lower(e), scale, tol, nodes)]);
    }
    let max = pf.extra_usize("max")?.unwrap_or(3);
    let mut out = bo::biorth_matrix(max, &rp, tol, &cfg, &ctx.exec)?;
    out.extend(operator_reports(&rp, ctx)?);
    Ok(out)
}

fn run_biorth2<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let rp = rahman::<T>(pf, corrected_moduli())?;
    let max = pf.extra_usize("max")?.unwrap_or(1);
    bo::biorth2_matrix(max, &rp, ctx.tol(1e-8), &ctx.cfg(256, 1024, 1e-12), &ctx.exec)
}

fn index_range(given: Option<usize>, max: usize) -> Vec<usize> {
    match given {
        Some(k) => vec![k],
        None => (0..=max).collect(),
    }
}

fn run_intrep<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let rp = rahman::<T>(pf, corrected_moduli())?;
    let (alpha, beta) = (pf.need_c("alpha")?, pf.need_c("beta")?);
    let cfg = ctx.cfg(256, 1024, 1e-12);
    let tol = ctx.tol(1e-8);
    let mut out = Vec::new();
    for m in index_range(ctx.m, 2) {
        for n in index_range(ctx.n, 2) {
            let (l, r, nodes) = bo::twelve_v_integral_rep_sides(alpha, beta, m, n, &rp, &cfg, &ctx.exec)?;
            out.push(sides(&format!("intrep[m={m},n={n}]"), r, l, tol, nodes));
        }
    }
    Ok(out)
}

fn run_shifted_beta<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let rp = rahman::<T>(pf, corrected_moduli())?;
    let cfg = ctx.cfg(256, 1024, 1e-12);
    let mut out = Vec::new();
    for i in index_range(ctx.n, 2) {
        for j in index_range(ctx.m, 2) {
            out.push(bo::shifted_beta_identity(i, j, &rp, ctx.tol(1e-8), &cfg, &ctx.exec)?);
        }
    }
    Ok(out)
}

// ---- degenerations ----

const P_SMALL: C64 = C64::new(1e-10, 0.0);

fn draw_p0(s: &mut Sampler, _: &Ctx) -> Result<ParamFile> {
    let mut pf = admissible(s, Family::E, 1, |s| ParamSet::with_t(s.polars(5, 0.3, 0.85)))?;
    pf.set_moduli(Q_INT, P_SMALL);
    pf.put_list("z", &[C64::new(0.3, 0.2), C64::new(-0.7, 0.1), C64::new(1.4, -0.6)]);
    Ok(pf)
}

/// Quadrature at small `p` against the `p = 0` evaluation, and
/// `Γ(z; q, 0) (z; q)_∞ = 1` at the points `extras.z`.
fn run_p0<T: Real>(pf: &ParamFile, ctx: &Ctx) -> Result<Vec<VerificationReport>> {
    let m: Moduli<T> = pf.moduli(Q_INT, P_SMALL)?;
    let t = pf.exact::<T>("t", 5)?;
    let tol = ctx.tol(1e-6);
    let spec = IntegrandSpec { family: Family::E, n: 1, params: ParamSet::with_t(t.clone()), moduli: m };
    require_domain(&spec)?;
    let it = Integrand::new(spec)?;
    let r = integrate(&it, &ctx.cfg(128, 512, tol), &ctx.exec)?;
    let mut out = vec![sides("degeneration_p0[integral]", r.value, n_e_p0(&t, m.q)?, tol, r.nodes_used)];
    let m0 = Moduli { q: m.q, p: Cx::new(T::zero(), T::zero()) };
    let pol = TruncationPolicy::for_real::<T>();
    for (k, z) in pf.list::<T>("z")?.into_iter().enumerate() {
        let v = elliptic_gamma(z, &m0, pol)? * qpochhammer(z, m.q, pol)?;
        out.push(sides(&format!("degeneration_p0[gamma,{k}]"), v, Cx::new(T::one(), T::zero()), ctx.tol(1e-13), 0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<_> = REGISTRY.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 26);
    }

    #[test]
    fn doubling_cap() {
        let ctx = Ctx::default();
        let c = ctx.cfg(128, 512, 1e-9);
        assert_eq!((c.nodes_per_dim, c.max_doublings), (128, 2));
        let c = Ctx { nodes: Some(64), ..Ctx::default() }.cfg(128, 512, 1e-9);
        assert_eq!((c.nodes_per_dim, c.max_doublings), (64, 0));
    }

    #[test]
    fn sampling_is_seeded() {
        let c = find("theorem1").unwrap();
        let ctx = Ctx::default();
        let a = c.sample(&mut Sampler::new(3), &ctx).unwrap();
        let b = c.sample(&mut Sampler::new(3), &ctx).unwrap();
        assert_eq!(a, b);
    }
}
