//! Biorthogonal rational functions `R_n`, `T_n` built from terminating
//! `_{12}V_{11}` series, their difference operator and recurrence, and the
//! integrals against the elliptic beta weight.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx, C64};
use crate::error::{Error, Result};
use crate::integrands::{n_e, Family, Integrand, IntegrandSpec, ParamSet};
use crate::quadrature::{circle_integral, circle_integral_at, residue_correction, Executor, QuadratureConfig};
use crate::real::Real;
use crate::report::VerificationReport;
use crate::series::{v_series, Residual};
use crate::special::{theta, theta_factorial, theta_factorial_ratio, theta_multi, Moduli};

/// Five parameters `t₀..t₄` with `A = Π t_r`.
#[derive(Clone, Copy, Debug)]
pub struct RahmanParams<T: Real> {
    pub t: [Cx<T>; 5],
    pub moduli: Moduli<T>,
}

impl<T: Real> RahmanParams<T> {
    /// Checks `|t_r| < 1` and `|pq| < |A|`.
    pub fn new(t: [Cx<T>; 5], moduli: Moduli<T>) -> Result<Self> {
        let rp = RahmanParams { t, moduli };
        for (r, &x) in t.iter().enumerate() {
            if cx::mag(x) >= 1.0 {
                return Err(Error::DomainViolation(format!("|t{r}| >= 1")));
            }
        }
        if cx::mag(rp.a()) <= cx::mag(moduli.pq()) {
            return Err(Error::DomainViolation("|A| <= |pq|".into()));
        }
        Ok(rp)
    }

    pub fn a(&self) -> Cx<T> {
        self.t.iter().fold(Cx::one(), |a, &b| a * b)
    }

    /// Same parameters with the roles of `q` and `p` exchanged.
    pub fn swapped(&self) -> Self {
        RahmanParams { t: self.t, moduli: self.moduli.swapped() }
    }

    /// `t₄ → pq/A`, which maps `R_n` to `T_n`.
    pub fn involution(&self) -> Self {
        let mut t = self.t;
        t[4] = self.moduli.pq() / self.a();
        RahmanParams { t, moduli: self.moduli }
    }

    fn q(&self) -> Cx<T> {
        self.moduli.q
    }

    fn p(&self) -> Cx<T> {
        self.moduli.p
    }

    fn weight(&self) -> Result<Integrand<T>> {
        Integrand::new(IntegrandSpec { family: Family::E, n: 1, params: ParamSet::with_t(self.t.to_vec()), moduli: self.moduli })
    }
}

pub fn r_n<T: Real>(z: Cx<T>, n: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let [t0, t1, t2, t3, t4] = rp.t;
    let (q, a) = (rp.q(), rp.a());
    let qn = cx::powi(q, n as i64);
    let params = [q / (t0 * t4), q / (t1 * t4), q / (t2 * t4), t3 * z, t3 / z, cx::inv(qn), a * qn / (q * t4)];
    Ok(v_series(t3 / t4, &params, &rp.moduli)?.value)
}

pub fn t_n<T: Real>(z: Cx<T>, n: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let [t0, t1, t2, t3, t4] = rp.t;
    let (q, a) = (rp.q(), rp.a());
    let qn = cx::powi(q, n as i64);
    let params = [a / t0, a / t1, a / t2, t3 * z, t3 / z, cx::inv(qn), a * qn / (q * t4)];
    Ok(v_series(a * t3 / q, &params, &rp.moduli)?.value)
}

/// `R_n(z; q, p) R_m(z; p, q)`.
pub fn r_nm<T: Real>(z: Cx<T>, n: usize, m: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    Ok(r_n(z, n, rp)? * r_n(z, m, &rp.swapped())?)
}

pub fn t_nm<T: Real>(z: Cx<T>, n: usize, m: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    Ok(t_n(z, n, rp)? * t_n(z, m, &rp.swapped())?)
}

/// Gauge pair of the generalized eigenvalue problem.
#[derive(Clone, Copy, Debug)]
pub struct OperatorGauge<T: Real> {
    pub xi: Cx<T>,
    pub eta: Cx<T>,
}

impl<T: Real> Default for OperatorGauge<T> {
    fn default() -> Self {
        OperatorGauge { xi: cx::cx(1.3, 0.0), eta: cx::cx(0.7, 0.1) }
    }
}

impl<T: Real> OperatorGauge<T> {
    /// Rejects `ξ = η p^k` and `ξ = q t₄ p^k / (Aη)` for `|k| ≤ 3`.
    pub fn validate(&self, rp: &RahmanParams<T>) -> Result<()> {
        let (p, q, t4, a) = (rp.p(), rp.q(), rp.t[4], rp.a());
        for k in -3..=3 {
            let pk = cx::powi(p, k);
            for bad in [self.eta * pk, q * t4 * pk / (a * self.eta)] {
                if cx::rel_err(self.xi, bad) <= 1e-10 {
                    return Err(Error::DegenerateConfiguration("gauge on an excluded lattice"));
                }
            }
        }
        Ok(())
    }

    /// `γ(z) = θ(zξ, z/ξ; p) / θ(zη, z/η; p)`.
    pub fn gamma(&self, z: Cx<T>, p: Cx<T>) -> Result<Cx<T>> {
        let den = theta_multi(&[z * self.eta, z / self.eta], p)?;
        if den.is_zero() {
            return Err(Error::PoleHit { at: cx::lower(z) });
        }
        Ok(cx::div(theta_multi(&[z * self.xi, z / self.xi], p)?, den))
    }

    /// Spectral parameter `λ(μ)`.
    pub fn lambda(&self, mu: Cx<T>, rp: &RahmanParams<T>) -> Result<Cx<T>> {
        let (p, q, t4, a) = (rp.p(), rp.q(), rp.t[4], rp.a());
        let num = theta_multi(&[mu * a * self.eta / (q * t4), mu / self.eta], p)?;
        let den = theta_multi(&[mu * a * self.xi / (q * t4), mu / self.xi], p)?;
        Ok(cx::div(num, den))
    }
}

fn b_coef<T: Real>(x: Cx<T>, rp: &RahmanParams<T>, gauge: &OperatorGauge<T>) -> Result<Cx<T>> {
    let [t0, t1, t2, t3, t4] = rp.t;
    let (p, q, a, eta) = (rp.p(), rp.q(), rp.a(), gauge.eta);
    let num = theta_multi(
        &[x, t3 / (t4 * x), q * t3 / (t4 * x), q * x / (t0 * t1), q * x / (t0 * t2), q * x / (t1 * t2), q * q * eta * x / a, q * q * x / (a * eta)],
        p,
    )?;
    let den = theta_multi(&[q * t4 * x * x / a, q * q * t4 * x * x / a], p)?;
    if den.is_zero() {
        return Err(Error::PoleHit { at: cx::lower(x) });
    }
    Ok(cx::div(num, den))
}

/// `R_{n+1}(z)` from `R_{n−1}(z)`, `R_n(z)` by the three-term recurrence.
pub fn recurrence_next<T: Real>(
    r_prev: Cx<T>,
    r_curr: Cx<T>,
    n: usize,
    z: Cx<T>,
    rp: &RahmanParams<T>,
    gauge: &OperatorGauge<T>,
) -> Result<Cx<T>> {
    let [t0, t1, t2, t3, t4] = rp.t;
    let (p, q, a) = (rp.p(), rp.q(), rp.a());
    let n = n as i64;
    let gam = |x: Cx<T>| gauge.gamma(x, p);
    let g = gam(z)?;
    let alpha = gam(cx::powi(q, n + 1) / t4)?;
    let beta = gam(cx::powi(q, n - 2) * a)?;
    let delta = theta_multi(&[q * q * t3 / a, q / (t0 * t4), q / (t1 * t4), q / (t2 * t4), t3 * gauge.eta, t3 / gauge.eta], p)?;
    let c1 = (g - alpha) * b_coef(a * cx::powi(q, n - 1) / t4, rp, gauge)?;
    if cx::mag(c1) == 0.0 {
        return Err(Error::SingularStep { n: n as usize });
    }
    // B(q^{-n}) vanishes at n = 0, so R_{-1} never enters
    let c2 = (g - beta) * b_coef(cx::powi(q, -n), rp, gauge)?;
    let lower = if c2.is_zero() { Cx::zero() } else { c2 * (r_prev - r_curr) };
    Ok(r_curr - cx::div(lower + delta * (g - gam(t3)?) * r_curr, c1))
}

fn v_mu<T: Real>(z: Cx<T>, mu: Cx<T>, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let (p, q, t4, a) = (rp.p(), rp.q(), rp.t[4], rp.a());
    let mut num = Vec::with_capacity(8);
    num.extend_from_slice(&[t4 / (q * mu * z), a * mu / (q * q * z), t4 * z / q]);
    num.extend(rp.t.iter().map(|&t| t * z));
    let den = theta_multi(&[z * z, q * z * z], p)?;
    if den.is_zero() {
        return Err(Error::PoleHit { at: cx::lower(z) });
    }
    Ok(cx::div(theta_multi(&num, p)?, den))
}

fn kappa<T: Real>(mu: Cx<T>, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let (p, q, t4, a) = (rp.p(), rp.q(), rp.t[4], rp.a());
    let mut args = alloc::vec![a * mu / (q * t4), cx::inv(mu)];
    args.extend(rp.t[..4].iter().map(|&t| t * t4 / q));
    theta_multi(&args, p)
}

/// `D_μ f(z) = V_μ(z)(f(qz) − f(z)) + V_μ(1/z)(f(z/q) − f(z)) + κ_μ f(z)`,
/// scaled by the largest single product `V·f` or `κ f`.
pub fn apply_d<T: Real, F>(f: F, z: Cx<T>, mu: Cx<T>, rp: &RahmanParams<T>) -> Result<Residual<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let q = rp.q();
    let fz = f(z)?;
    let (vu, vd) = (v_mu(z, mu, rp)?, v_mu(cx::inv(z), mu, rp)?);
    let (fu, fd) = (f(q * z)?, f(z / q)?);
    let k = kappa(mu, rp)? * fz;
    let parts = [vu * fu, vu * fz, vd * fd, vd * fz, k];
    Ok(Residual::new(vu * (fu - fz) + vd * (fd - fz) + k, &parts))
}

/// Transposed operator with respect to the weight `Δ_E`.
pub fn apply_d_adjoint<T: Real, F>(f: F, z: Cx<T>, mu: Cx<T>, rp: &RahmanParams<T>) -> Result<Residual<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let q = rp.q();
    let w = rp.weight()?;
    let wz = w.eval(&[z])?;
    if wz.is_zero() {
        return Err(Error::PoleHit { at: cx::lower(z) });
    }
    let fz = f(z)?;
    let up = cx::div(w.eval(&[q * z])?, wz) * v_mu(cx::inv(q * z), mu, rp)? * f(q * z)?;
    let down = cx::div(w.eval(&[z / q])?, wz) * v_mu(z / q, mu, rp)? * f(z / q)?;
    let mid = -(v_mu(z, mu, rp)? + v_mu(cx::inv(z), mu, rp)?) * fz;
    let k = kappa(mu, rp)? * fz;
    Ok(Residual::new(up + down + mid + k, &[up, down, mid, k]))
}

/// Gauge function conjugating the transposed operator pair into the direct one.
pub fn g_function<T: Real>(z: Cx<T>, mu: Cx<T>, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let (q, t4, a) = (rp.q(), rp.t[4], rp.a());
    let g = crate::gamma::GammaEval::new(&rp.moduli);
    g.ratio(
        &[q * mu * z / t4, mu * q / (t4 * z), a * z, a / z],
        &[q * q * z / t4, q * q / (t4 * z), a * mu * z / q, a * mu / (q * z)],
    )
}

/// Whether the unit circle separates the pole sequences for `C_{mn,kl}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourCheck {
    pub admissible: bool,
    pub worst_pole: C64,
    /// `1 − |worst_pole|`.
    pub worst_margin: f64,
}

impl ContourCheck {
    pub fn require(&self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::InadmissibleContour { worst_pole: self.worst_pole, margin: self.worst_margin })
        }
    }
}

pub const CONTOUR_MARGIN: f64 = 1e-6;

/// Checks the extremal members `t_{0..3}`, `t₄ q^{−m} p^{−k}` and
/// `A^{−1} q^{1−n} p^{1−l}` of the inner pole sequences.
pub fn contour_check<T: Real>(m: usize, n: usize, k: usize, l: usize, rp: &RahmanParams<T>) -> ContourCheck {
    let (q, p) = (cx::lower(rp.q()), cx::lower(rp.p()));
    let a = cx::lower(rp.a());
    let pw = |z: C64, e: i64| z.powi(e as i32);
    let mut cands: Vec<C64> = rp.t[..4].iter().map(|&t| cx::lower(t)).collect();
    cands.push(cx::lower(rp.t[4]) * pw(q, -(m as i64)) * pw(p, -(k as i64)));
    cands.push(pw(q, 1 - n as i64) * pw(p, 1 - l as i64) / a);
    let worst = cands.into_iter().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
    let margin = 1.0 - worst.norm();
    ContourCheck { admissible: margin >= CONTOUR_MARGIN, worst_pole: worst, worst_margin: margin }
}

/// Inner pole sequences `t_{0..3} q^b p^a`, `t₄ q^{b−s₄} p^{a−r₄}` and
/// `A^{−1} q^{b+1−s_A} p^{a+1−r_A}`, for `a, b < depth`.
pub fn inner_poles<T: Real>(rp: &RahmanParams<T>, shift4: (i64, i64), shift_a: (i64, i64), depth: i64) -> Vec<C64> {
    let (q, p) = (cx::lower(rp.q()), cx::lower(rp.p()));
    let a = cx::lower(rp.a());
    let pw = |z: C64, e: i64| z.powi(e as i32);
    let mut out = Vec::new();
    for i in 0..depth {
        for j in 0..depth {
            let s = pw(q, j) * pw(p, i);
            for &t in &rp.t[..4] {
                out.push(cx::lower(t) * s);
            }
            out.push(cx::lower(rp.t[4]) * pw(q, j - shift4.0) * pw(p, i - shift4.1));
            out.push(pw(q, j + 1 - shift_a.0) * pw(p, i + 1 - shift_a.1) / a);
        }
    }
    out
}

/// Lattice depth of the pole lists; shallower lists miss neighbours of the
/// far poles and oversize their small circles.
const POLE_DEPTH: i64 = 16;

/// Radius in `[0.75, 4/3]` farthest, in log-modulus, from every pole.
/// The unit circle is kept unless another radius is markedly better.
fn main_radius(poles: &[C64]) -> f64 {
    let margin = |r: f64| poles.iter().map(|z| (z.norm().ln() - r.ln()).abs()).fold(f64::INFINITY, f64::min);
    let unit = margin(1.0);
    let (mut best, mut best_m) = (1.0, unit);
    for k in -40..=40 {
        let r = (k as f64 * (4.0f64 / 3.0).ln() / 40.0).exp();
        let m = margin(r);
        if m > best_m {
            (best, best_m) = (r, m);
        }
    }
    if best_m > 2.0 * unit && unit < 0.05 {
        best
    } else {
        1.0
    }
}

/// Integral over a contour separating `inner` from its reciprocals: a
/// circle rule plus small circles around every misplaced pole.
pub fn separated_integral<T: Real, F>(
    f: F,
    inner: &[C64],
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<(Cx<T>, u64)>
where
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    const SMALL: usize = 64;
    let mut nb: Vec<C64> = inner.to_vec();
    nb.extend(inner.iter().map(|z| z.inv()));
    let r = main_radius(&nb);
    let base = circle_integral_at(&f, r, cfg, exec)?;
    let dup = |v: &[C64], z: C64| v.iter().any(|&w| (w - z).norm() <= 1e-12 * z.norm());
    let (mut include, mut exclude) = (Vec::new(), Vec::new());
    for &z in inner {
        if z.norm() >= r && !dup(&include, z) {
            include.push(z);
        }
        let w = z.inv();
        if w.norm() < r && !dup(&exclude, w) {
            exclude.push(w);
        }
    }
    let corr = residue_correction(&f, &include, &exclude, &nb, r, SMALL)?;
    let nodes = base.nodes_used + ((include.len() + exclude.len()) * SMALL) as u64;
    Ok((base.value + corr, nodes))
}

/// Norm `h_n` of the single-index family.
pub fn h_n<T: Real>(n: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let [t0, t1, t2, t3, t4] = rp.t;
    let (p, q, a) = (rp.p(), rp.q(), rp.a());
    let ni = n as i64;
    let pre = cx::div(theta(a / (q * t4), p)?, theta(a * cx::powi(q, 2 * ni - 1) / t4, p)?);
    let num = [q, q * t3 / t4, t0 * t1, t0 * t2, t1 * t2, a * t3];
    let den = [cx::inv(t3 * t4), t0 * t3, t1 * t3, t2 * t3, a / (q * t3), a / (q * t4)];
    Ok(pre * theta_factorial_ratio(&num, &den, p, q, ni)? * cx::powi(q, -ni))
}

/// Norm `h_{nl} = h_n(q, p) h_l(p, q)`.
pub fn h_nl<T: Real>(n: usize, l: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    Ok(h_n(n, rp)? * h_n(l, &rp.swapped())?)
}

/// `∮ T_n R_m Δ_E dz/z` on the unit circle and its expected value
/// `h_n N_E δ_{nm}`; the unit circle must be admissible.
pub fn biorth_integral<T: Real>(
    n: usize,
    m: usize,
    rp: &RahmanParams<T>,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<(Cx<T>, Cx<T>, u64)> {
    contour_check(m, n, 0, 0, rp).require()?;
    let w = rp.weight()?;
    let f = |z: Cx<T>| Ok(t_n(z, n, rp)? * r_n(z, m, rp)? * w.eval(&[z])?);
    let r = circle_integral(f, cfg, exec)?;
    let expected = if n == m { h_n(n, rp)? * n_e(&rp.t, w.gamma())? } else { Cx::zero() };
    Ok((r.value, expected, r.nodes_used))
}

/// `∮ T_{nl} R_{mk} Δ_E dz/z` over `C_{mn,kl}` and `h_{nl} N_E δ_{mn} δ_{kl}`.
pub fn biorth2_integral<T: Real>(
    (n, l): (usize, usize),
    (m, k): (usize, usize),
    rp: &RahmanParams<T>,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<(Cx<T>, Cx<T>, u64)> {
    let w = rp.weight()?;
    let f = |z: Cx<T>| Ok(t_nm(z, n, l, rp)? * r_nm(z, m, k, rp)? * w.eval(&[z])?);
    let inner = inner_poles(rp, (m as i64, k as i64), (n as i64, l as i64), POLE_DEPTH);
    let (v, nodes) = separated_integral(f, &inner, cfg, exec)?;
    let expected = if (n, l) == (m, k) { h_nl(n, l, rp)? * n_e(&rp.t, w.gamma())? } else { Cx::zero() };
    Ok((v, expected, nodes))
}

/// Full matrix of [`biorth_integral`] for indices up to `max`, as reports.
/// Off-diagonal entries are measured against `min_n |h_n N_E|`.
pub fn biorth_matrix<T: Real>(
    max: usize,
    rp: &RahmanParams<T>,
    tol: f64,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<Vec<VerificationReport>> {
    let ne = cx::mag(n_e(&rp.t, rp.weight()?.gamma())?);
    let mut h_min = f64::INFINITY;
    for n in 0..=max {
        h_min = h_min.min(cx::mag(h_n(n, rp)?) * ne);
    }
    let mut out = Vec::new();
    for n in 0..=max {
        for m in 0..=max {
            let (v, e, nodes) = biorth_integral(n, m, rp, cfg, exec)?;
            let scale = if n == m { cx::mag(e) } else { h_min };
            let name = format!("biorth[{n},{m}]");
            out.push(VerificationReport::with_scale(&name, cx::lower(v), cx::lower(e), scale, tol, nodes));
        }
    }
    Ok(out)
}

/// Two-index matrix over `(n, l), (m, k) ∈ {0..max}²`.
pub fn biorth2_matrix<T: Real>(
    max: usize,
    rp: &RahmanParams<T>,
    tol: f64,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<Vec<VerificationReport>> {
    let ne = cx::mag(n_e(&rp.t, rp.weight()?.gamma())?);
    let idx: Vec<(usize, usize)> = (0..=max).flat_map(|a| (0..=max).map(move |b| (a, b))).collect();
    let mut h_min = f64::INFINITY;
    for &(n, l) in &idx {
        h_min = h_min.min(cx::mag(h_nl(n, l, rp)?) * ne);
    }
    let mut out = Vec::new();
    for &nl in &idx {
        for &mk in &idx {
            let (v, e, nodes) = biorth2_integral(nl, mk, rp, cfg, exec)?;
            let scale = if nl == mk { cx::mag(e) } else { h_min };
            let name = format!("biorth2[({},{}),({},{})]", nl.0, nl.1, mk.0, mk.1);
            out.push(VerificationReport::with_scale(&name, cx::lower(v), cx::lower(e), scale, tol, nodes));
        }
    }
    Ok(out)
}

fn fac2<T: Real>(z: &[Cx<T>], m: &Moduli<T>, n: usize) -> Result<Cx<T>> {
    let mut v = Cx::one();
    for &x in z {
        v *= theta_factorial(x, m.p, m.q, n as i64)?;
    }
    Ok(v)
}

/// Both sides of the integral representation of a product of two terminating
/// `_{12}V_{11}` series, with the quadrature node count.
pub fn twelve_v_integral_rep_sides<T: Real>(
    alpha: Cx<T>,
    beta: Cx<T>,
    m: usize,
    n: usize,
    rp: &RahmanParams<T>,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<(Cx<T>, Cx<T>, u64)> {
    let mq = rp.moduli;
    let mp = mq.swapped();
    let t = rp.t;
    let t0 = t[0];
    let a = rp.a();
    let series = |base: &Moduli<T>, par: Cx<T>, k: usize| -> Result<Cx<T>> {
        let b = base.q;
        let bk = cx::powi(b, k as i64);
        let params = [par, t0 * t[1], t0 * t[2], t0 * t[3], t0 * t[4], cx::inv(bk), a * a * bk / (b * par)];
        Ok(v_series(a * t0 / b, &params, base)?.value)
    };
    let lhs = series(&mq, alpha, m)? * series(&mp, beta, n)?;
    let w = rp.weight()?;
    let ne = n_e(&t, w.gamma())?;
    let pre = cx::div(fac2(&[a * t0, a / t0], &mq, m)?, fac2(&[a / (alpha * t0), a * t0 / alpha], &mq, m)?)
        * cx::div(fac2(&[a * t0, a / t0], &mp, n)?, fac2(&[a / (beta * t0), a * t0 / beta], &mp, n)?);
    let f = |z: Cx<T>| -> Result<Cx<T>> {
        let num = fac2(&[a * z / alpha, a / (alpha * z)], &mq, m)? * fac2(&[a * z / beta, a / (beta * z)], &mp, n)?;
        let den = fac2(&[a * z, a / z], &mq, m)? * fac2(&[a * z, a / z], &mp, n)?;
        Ok(w.eval(&[z])? * cx::div(num, den))
    };
    let inner = inner_poles(rp, (0, 0), (m as i64, n as i64), POLE_DEPTH);
    let (v, nodes) = separated_integral(f, &inner, cfg, exec)?;
    Ok((lhs, cx::div(pre * v, ne), nodes))
}

/// `∮ Δ_E θ(zt₀, t₀/z)_i θ(zt₀, t₀/z)_j / (θ(zA, A/z)_i θ(zA, A/z)_j) dz/z`
/// against its product evaluation.
pub fn shifted_beta_identity<T: Real>(
    i: usize,
    j: usize,
    rp: &RahmanParams<T>,
    tol: f64,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<VerificationReport> {
    let mq = rp.moduli;
    let mp = mq.swapped();
    let t = rp.t;
    let (t0, a) = (t[0], rp.a());
    let w = rp.weight()?;
    let f = |z: Cx<T>| -> Result<Cx<T>> {
        let num = fac2(&[z * t0, t0 / z], &mq, i)? * fac2(&[z * t0, t0 / z], &mp, j)?;
        let den = fac2(&[z * a, a / z], &mq, i)? * fac2(&[z * a, a / z], &mp, j)?;
        Ok(w.eval(&[z])? * cx::div(num, den))
    };
    let inner = inner_poles(rp, (0, 0), (i as i64, j as i64), POLE_DEPTH);
    let (v, nodes) = separated_integral(f, &inner, cfg, exec)?;
    let tt: Vec<_> = t[1..].iter().map(|&x| t0 * x).collect();
    let at: Vec<_> = t[1..].iter().map(|&x| a / x).collect();
    let rhs = cx::div(fac2(&tt, &mq, i)? * fac2(&tt, &mp, j)?, fac2(&at, &mq, i)? * fac2(&at, &mp, j)?) * n_e(&t, w.gamma())?;
    Ok(VerificationReport::compare(&format!("shifted_beta[{i},{j}]"), cx::lower(v), cx::lower(rhs), tol, nodes))
}

/// `(t₀/A)^{2ij} N_E(t₀ q^i p^j, t₁, …, t₄)`, the middle form of the shifted
/// beta evaluation.
pub fn shifted_beta_norm<T: Real>(i: usize, j: usize, rp: &RahmanParams<T>) -> Result<Cx<T>> {
    let mut t = rp.t;
    let (t0, a) = (t[0], rp.a());
    t[0] = t0 * cx::powi(rp.q(), i as i64) * cx::powi(rp.p(), j as i64);
    let g = crate::gamma::GammaEval::new(&rp.moduli);
    Ok(cx::powi(t0 / a, 2 * (i * j) as i64) * n_e(&t, &g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::{cx, rel_err};

    fn rp() -> RahmanParams<f64> {
        let m = Moduli::new(cx(0.31, 0.05), cx(0.23, -0.1)).unwrap();
        let t = [cx(0.6, 0.2), cx(-0.5, 0.4), cx(0.7, -0.1), cx(0.1, 0.75), cx(-0.4, -0.2)];
        RahmanParams::new(t, m).unwrap()
    }

    #[test]
    fn index_zero_is_one() {
        let z = cx::expi(0.4);
        assert!(rel_err(r_n(z, 0, &rp()).unwrap(), cx(1.0, 0.0)) < 1e-15);
        assert!(rel_err(t_n(z, 0, &rp()).unwrap(), cx(1.0, 0.0)) < 1e-15);
        assert!(rel_err(r_nm(z, 0, 0, &rp()).unwrap(), cx(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn inversion_symmetry() {
        let z = cx(0.9, 0.3);
        for n in 1..4 {
            assert!(rel_err(r_n(z, n, &rp()).unwrap(), r_n(cx::inv(z), n, &rp()).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn involution_gives_t() {
        let z = cx(0.9, 0.3);
        for n in 0..4 {
            let a = t_n(z, n, &rp()).unwrap();
            let b = r_n(z, n, &rp().involution()).unwrap();
            assert!(rel_err(a, b) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn kappa_vanishes_at_one() {
        let one = cx(1.0, 0.0);
        assert_eq!(kappa(one, &rp()).unwrap(), cx(0.0, 0.0));
        let r = apply_d(|_| Ok(cx(2.5, 0.3)), cx(0.8, 0.6), one, &rp()).unwrap();
        assert!(cx::mag(r.value) < 1e-15);
    }

    #[test]
    fn contour_arithmetic() {
        let m: Moduli<f64> = Moduli::new(cx(0.3, 0.0), cx(0.2, 0.0)).unwrap();
        let t = [cx(0.6, 0.0), cx(0.7, 0.0), cx(0.8, 0.0), cx(0.75, 0.0), cx(0.5, 0.0)];
        let rp = RahmanParams::new(t, m).unwrap();
        assert!(contour_check(0, 0, 0, 0, &rp).admissible);
        let c = contour_check(2, 0, 0, 0, &rp);
        assert!(!c.admissible);
        assert!((c.worst_pole.norm() - 0.5 / 0.09).abs() < 1e-12);
        assert!(matches!(c.require(), Err(Error::InadmissibleContour { .. })));
    }

    #[test]
    fn norm_forms_agree() {
        let r = rp();
        let (p, q, t4, a) = (r.p(), r.q(), r.t[4], r.a());
        for n in 0..4 {
            let q2n = cx::powi(q, 2 * n);
            let x = theta(a * q2n / (q * t4), p).unwrap();
            let y = theta(a * cx::powi(q, 2 * n - 1) / t4, p).unwrap();
            assert!(rel_err(x, y) < 1e-14);
        }
        assert!(rel_err(h_n(0, &r).unwrap(), cx(1.0, 0.0)) < 1e-15);
        assert!(rel_err(h_nl(0, 0, &r).unwrap(), cx(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn shifted_norm_forms_agree() {
        let r = rp();
        let mq = r.moduli;
        let mp = mq.swapped();
        let g = crate::gamma::GammaEval::new(&mq);
        let (t0, a) = (r.t[0], r.a());
        for (i, j) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            let tt: Vec<_> = r.t[1..].iter().map(|&x| t0 * x).collect();
            let at: Vec<_> = r.t[1..].iter().map(|&x| a / x).collect();
            let prod = cx::div(fac2(&tt, &mq, i).unwrap() * fac2(&tt, &mp, j).unwrap(), fac2(&at, &mq, i).unwrap() * fac2(&at, &mp, j).unwrap())
                * n_e(&r.t, &g).unwrap();
            assert!(rel_err(shifted_beta_norm(i, j, &r).unwrap(), prod) < 1e-12, "({i},{j})");
        }
    }
}
