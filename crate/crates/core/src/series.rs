//! Theta hypergeometric series: the general `rE_s` sum, the very-well-poised
//! `V` series and the summation and transformation formulas built on them.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::report::VerificationReport;
use crate::special::{theta, theta_factorial, theta_factorial_ratio, Moduli};

/// Sum of a slice in a fixed binary tree, independent of how it was produced.
pub fn pairwise_sum<T: Real>(xs: &[Cx<T>]) -> Cx<T> {
    match xs.len() {
        0 => Cx::zero(),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn prod<T: Real>(xs: impl IntoIterator<Item = Result<Cx<T>>>) -> Result<Cx<T>> {
    let mut acc = Cx::one();
    for x in xs {
        acc *= x?;
    }
    Ok(acc)
}

fn thetas<T: Real>(p: Cx<T>, zs: &[Cx<T>]) -> Result<Cx<T>> {
    prod(zs.iter().map(|&z| theta(z, p)))
}

fn fac_ratio<T: Real>(m: &Moduli<T>, a: &[Cx<T>], b: &[Cx<T>], n: i64) -> Result<Cx<T>> {
    theta_factorial_ratio(a, b, m.p, m.q, n)
}

/// Smallest `N >= 0` with `t = q^{-N} p^{-M}` for some integer `M`, if any.
pub fn termination_index<T: Real>(t: Cx<T>, m: &Moduli<T>) -> Option<usize> {
    let (qm, pm) = (cx::mag(m.q), cx::mag(m.p));
    if qm == 0.0 || t.is_zero() {
        return None;
    }
    let lt = libm::log(cx::mag(t));
    let lq = libm::log(qm);
    let ms: &[i64] = if pm == 0.0 { &[0] } else { &[0, 1, -1, 2, -2, 3, -3] };
    let mut best: Option<usize> = None;
    for &mm in ms {
        let lp = if pm == 0.0 { 0.0 } else { libm::log(pm) };
        let n = libm::round(-(lt + mm as f64 * lp) / lq);
        if !(0.0..=100_000.0).contains(&n) {
            continue;
        }
        let target = cx::powi(m.q, -(n as i64)) * cx::powi(m.p, -mm);
        if cx::mag(t - target) <= 1e-12 * cx::mag(target) {
            let n = n as usize;
            best = Some(best.map_or(n, |b| b.min(n)));
        }
    }
    best
}

/// The series `Σ_n θ(t_0..t_s)_n / θ(q, w_1..w_r)_n e^{α₁n + α₂n² + α₃n³}`.
#[derive(Clone, Debug)]
pub struct SeriesSpec<T: Real> {
    pub t: Vec<Cx<T>>,
    pub w: Vec<Cx<T>>,
    pub alpha: [Cx<T>; 3],
    pub moduli: Moduli<T>,
    /// Explicit cut for non-terminating sums; `None` means the series must terminate.
    pub n_max: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct SeriesSum<T: Real> {
    pub value: Cx<T>,
    pub last_term: f64,
    pub terms: usize,
}

impl<T: Real> SeriesSpec<T> {
    /// Termination index from the numerator parameters.
    pub fn termination(&self) -> Option<usize> {
        self.t.iter().filter_map(|&t| termination_index(t, &self.moduli)).min()
    }

    /// `s = r`, `α₂ = α₃ = 0` and `Π t = q Π w`.
    pub fn is_balanced(&self) -> bool {
        if self.t.len() != self.w.len() + 1 {
            return false;
        }
        if !self.alpha[1].is_zero() || !self.alpha[2].is_zero() {
            return false;
        }
        let lhs = self.t.iter().fold(Cx::one(), |a, &b| a * b);
        let rhs = self.w.iter().fold(self.moduli.q, |a, &b| a * b);
        cx::rel_err(lhs, rhs) < 1e-10
    }
}

pub fn sum_e<T: Real>(spec: &SeriesSpec<T>) -> Result<SeriesSum<T>> {
    let m = &spec.moduli;
    let (n_last, certify) = match (spec.termination(), spec.n_max) {
        (Some(n), Some(cap)) => (n.min(cap), false),
        (Some(n), None) => (n, false),
        (None, Some(cap)) => (cap, true),
        (None, None) => return Err(Error::NonTerminating),
    };
    let [a1, a2, a3] = spec.alpha;
    let mut terms = Vec::with_capacity(n_last + 1);
    let mut term = Cx::<T>::one();
    let mut ratios = Vec::new();
    terms.push(term);
    for n in 0..n_last {
        let q_n = cx::powi(m.q, n as i64);
        let mut num = Cx::<T>::one();
        for &t in &spec.t {
            num *= theta(t * q_n, m.p)?;
        }
        let mut den = theta(q_n * m.q, m.p)?;
        for &w in &spec.w {
            den *= theta(w * q_n, m.p)?;
        }
        if den.is_zero() {
            return Err(Error::PoleHit { at: cx::lower(q_n) });
        }
        let nf = T::from_i64(n as i64);
        let dp = a1 + a2 * (nf * T::from_f64(2.0) + T::one())
            + a3 * (nf * nf * T::from_f64(3.0) + nf * T::from_f64(3.0) + T::one());
        let r = num / den * cx::exp(dp);
        term *= r;
        ratios.push(cx::mag(r));
        terms.push(term);
        if term.is_zero() {
            break;
        }
    }
    if certify {
        let tail = &ratios[ratios.len().saturating_sub(10)..];
        if tail.len() < 10 || tail.iter().any(|&r| r >= 0.9) {
            return Err(Error::NonTerminating);
        }
    }
    Ok(SeriesSum {
        value: pairwise_sum(&terms),
        last_term: cx::mag(*terms.last().unwrap()),
        terms: terms.len(),
    })
}

/// Very-well-poised series `_{r+1}V_r(t₀; t₁, …, t_{r−4}; q, p; x)`.
#[derive(Clone, Debug)]
pub struct VSpec<T: Real> {
    pub t0: Cx<T>,
    pub t: Vec<Cx<T>>,
    pub x: Cx<T>,
    pub moduli: Moduli<T>,
    pub n: usize,
}

/// Which square-root branch satisfied the balancing condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug)]
pub struct VSum<T: Real> {
    pub value: Cx<T>,
    /// Largest term modulus, the natural scale for cancellation checks.
    pub max_term: f64,
    pub sign: BalanceSign,
}

impl<T: Real> VSpec<T> {
    /// Builds the spec and reads the termination index off the parameters.
    pub fn new(t0: Cx<T>, t: Vec<Cx<T>>, x: Cx<T>, moduli: Moduli<T>) -> Result<Self> {
        let n = t
            .iter()
            .filter_map(|&tm| {
                let n = termination_index(tm, &moduli)?;
                // only pure q-powers terminate the V series
                let target = cx::powi(moduli.q, -(n as i64));
                (cx::mag(tm - target) <= 1e-12 * cx::mag(target)).then_some(n)
            })
            .min()
            .ok_or(Error::NonTerminating)?;
        Ok(VSpec { t0, t, x, moduli, n })
    }

    /// Checks `Π t_m = ± t₀^{(r−5)/2} q^{(r−7)/2}` with principal roots.
    pub fn balancing(&self) -> Result<BalanceSign> {
        let r = self.t.len() as i64 + 4;
        let lhs = self.t.iter().fold(Cx::<T>::one(), |a, &b| a * b);
        let half = |z: Cx<T>, k: i64| -> Cx<T> {
            if k % 2 == 0 {
                cx::powi(z, k / 2)
            } else {
                cx::powi(cx::sqrt(z), k)
            }
        };
        let rhs = half(self.t0, r - 5) * half(self.moduli.q, r - 7);
        let dp = cx::rel_err(lhs, rhs);
        let dm = cx::rel_err(lhs, -rhs);
        if dp <= 1e-10 {
            Ok(BalanceSign::Plus)
        } else if dm <= 1e-10 {
            Ok(BalanceSign::Minus)
        } else {
            Err(Error::BalancingViolation { deviation: dp.min(dm) })
        }
    }
}

/// Terminating sum of `N + 1` terms, built from successive term ratios.
pub fn sum_v_detail<T: Real>(spec: &VSpec<T>) -> Result<VSum<T>> {
    let sign = spec.balancing()?;
    let m = &spec.moduli;
    let (q, p, t0) = (m.q, m.p, spec.t0);
    let th0 = theta(t0, p)?;
    if th0.is_zero() {
        return Err(Error::PoleHit { at: cx::lower(t0) });
    }
    let mut params = Vec::with_capacity(spec.t.len() + 1);
    params.push(t0);
    params.extend_from_slice(&spec.t);
    let mut terms = Vec::with_capacity(spec.n + 1);
    let mut coef = Cx::<T>::one();
    let qx = q * spec.x;
    let mut q_n = Cx::<T>::one();
    let mut qx_n = Cx::<T>::one();
    for n in 0..=spec.n {
        if n > 0 {
            for &tm in &params {
                let den = theta(q * t0 / tm * q_n, p)?;
                if den.is_zero() {
                    return Err(Error::PoleHit { at: cx::lower(q_n) });
                }
                coef = cx::div(coef * theta(tm * q_n, p)?, den);
            }
            q_n *= q;
            qx_n *= qx;
        }
        let wp = theta(t0 * q_n * q_n, p)? / th0;
        terms.push(coef * wp * qx_n);
    }
    Ok(VSum { value: pairwise_sum(&terms), max_term: cx::max_mag(&terms), sign })
}

pub fn sum_v<T: Real>(spec: &VSpec<T>) -> Result<Cx<T>> {
    Ok(sum_v_detail(spec)?.value)
}

/// Shorthand for a terminating `V` at `x = 1`.
pub fn v_series<T: Real>(t0: Cx<T>, t: &[Cx<T>], m: &Moduli<T>) -> Result<VSum<T>> {
    sum_v_detail(&VSpec::new(t0, t.to_vec(), Cx::one(), *m)?)
}

/// Closed form of the terminating `_{10}V_9` sum with `t₆ = q^{−N}`.
pub fn frenkel_turaev_rhs<T: Real>(
    t0: Cx<T>,
    t1: Cx<T>,
    t4: Cx<T>,
    t5: Cx<T>,
    n: usize,
    m: &Moduli<T>,
) -> Result<Cx<T>> {
    let q = m.q;
    let n = n as i64;
    fac_ratio(
        m,
        &[q * t0, q * t0 / (t1 * t4), q * t0 / (t1 * t5), q * t0 / (t4 * t5)],
        &[q * t0 / (t1 * t4 * t5), q * t0 / t1, q * t0 / t4, q * t0 / t5],
        n,
    )
}

/// The `_{10}V_9` side of the Frenkel–Turaev sum, with `t₇` fixed by balancing.
pub fn frenkel_turaev_lhs<T: Real>(
    t0: Cx<T>,
    t1: Cx<T>,
    t4: Cx<T>,
    t5: Cx<T>,
    n: usize,
    m: &Moduli<T>,
) -> Result<VSum<T>> {
    let q = m.q;
    let t6 = cx::powi(q, -(n as i64));
    let t7 = q * t0 * t0 / (t1 * t4 * t5 * t6);
    v_series(t0, &[t1, t4, t5, t6, t7], m)
}

/// Parameters `(s₀, s₁, …, s₇)` of the Bailey transform.
pub fn bailey_s_params<T: Real>(t: &[Cx<T>; 8], q: Cx<T>) -> [Cx<T>; 8] {
    let s0 = q * t[0] * t[0] / (t[1] * t[2] * t[3]);
    [s0, s0 * t[1] / t[0], s0 * t[2] / t[0], s0 * t[3] / t[0], t[4], t[5], t[6], t[7]]
}

/// Both sides of the `_{12}V_{11}` Bailey transform, with `t₆ = q^{−N}` and
/// `(s₄..s₇)` taken as the permutation `perm` of `(t₄..t₇)`.
pub fn bailey_sides<T: Real>(
    t: &[Cx<T>; 8],
    n: usize,
    m: &Moduli<T>,
    perm: [usize; 4],
) -> Result<(VSum<T>, Cx<T>)> {
    let mut sorted = perm;
    sorted.sort_unstable();
    if sorted != [0, 1, 2, 3] {
        return Err(Error::InvalidParams("perm must be a permutation of 0..4".into()));
    }
    let q = m.q;
    let nn = n as i64;
    if cx::rel_err(t[6], cx::powi(q, -nn)) > 1e-12 {
        return Err(Error::ConstraintViolation("t6 must equal q^-N".into()));
    }
    let lhs = v_series(t[0], &t[1..], m)?;
    let base = bailey_s_params(t, q);
    let mut s = base;
    for (slot, &src) in perm.iter().enumerate() {
        s[4 + slot] = base[4 + src];
    }
    let (t0, s0, t4, t5) = (t[0], s[0], t[4], t[5]);
    let pre = fac_ratio(
        m,
        &[q * t0, q * s0 / t4, q * s0 / t5, q * t0 / (t4 * t5)],
        &[q * s0, q * t0 / t4, q * t0 / t5, q * s0 / (t4 * t5)],
        nn,
    )?;
    let rhs = pre * v_series(s0, &s[1..], m)?.value;
    Ok((lhs, rhs))
}

pub fn bailey_transform_check<T: Real>(
    t: &[Cx<T>; 8],
    n: usize,
    m: &Moduli<T>,
    perm: [usize; 4],
    tol: f64,
) -> Result<VerificationReport> {
    let (lhs, rhs) = bailey_sides(t, n, m, perm)?;
    Ok(VerificationReport::compare("bailey", cx::lower(lhs.value), cx::lower(rhs), tol, 0))
}

/// A residual with the magnitude of the largest participating term.
#[derive(Clone, Copy, Debug)]
pub struct Residual<T: Real> {
    pub value: Cx<T>,
    pub scale: f64,
}

impl<T: Real> Residual<T> {
    pub fn new(value: Cx<T>, parts: &[Cx<T>]) -> Self {
        Residual { value, scale: cx::max_mag(parts) }
    }

    pub fn relative(&self) -> f64 {
        let r = cx::mag(self.value);
        if self.scale == 0.0 {
            r
        } else {
            r / self.scale
        }
    }
}

/// The three contiguous relations of the terminating `_{12}V_{11}` series
/// with parameters `t = (t₀, t₁, …, t₇)`, returned as residuals.
pub fn contiguous_residuals<T: Real>(t: &[Cx<T>; 8], m: &Moduli<T>) -> [Result<Residual<T>>; 3] {
    let q = m.q;
    let p = m.p;
    let [t0, t1, t2, t3, t4, t5, t6, t7] = *t;
    let r5 = [t1, t2, t3, t4, t5];
    let q2 = q * q;
    let e = |a: Cx<T>, b: [Cx<T>; 7]| -> Result<Cx<T>> { Ok(v_series(a, &b, m)?.value) };
    let pr = |f: &dyn Fn(Cx<T>) -> Cx<T>| -> Result<Cx<T>> { prod(r5.iter().map(|&r| theta(f(r), p))) };
    let base = || e(t0, [t1, t2, t3, t4, t5, t6, t7]);
    let e1 = || e(t0, [t1, t2, t3, t4, t5, t6 / q, q * t7]);
    let e2 = || e(q2 * t0, [q * t1, q * t2, q * t3, q * t4, q * t5, t6, q * t7]);
    let e3 = || e(q2 * t0, [q * t1, q * t2, q * t3, q * t4, q * t5, q * t6, t7]);
    let e4 = || e(t0, [t1, t2, t3, t4, t5, q * t6, t7 / q]);

    let first = || -> Result<Residual<T>> {
        let ev = base()?;
        let ev1 = e1()?;
        let c = thetas(p, &[q * t0, q2 * t0, q * t7 / t6, t6 * t7 / (q * t0)])?
            / thetas(p, &[q * t0 / t6, q2 * t0 / t6, t0 / t7, t7 / (q * t0)])?
            * pr(&|r| r)?
            / pr(&|r| q * t0 / r)?;
        let third = if c.is_zero() { Cx::zero() } else { c * e2()? };
        Ok(Residual::new(ev - ev1 - third, &[ev, ev1, third]))
    };
    let second = || -> Result<Residual<T>> {
        let ev = base()?;
        let a = theta(t7, p)? / thetas(p, &[t6 / (q * t0), t6 / (q2 * t0), t6 / t7])?
            * pr(&|r| r * t6 / (q * t0))?
            * e2()?;
        let b = theta(t6, p)? / thetas(p, &[t7 / (q * t0), t7 / (q2 * t0), t7 / t6])?
            * pr(&|r| r * t7 / (q * t0))?
            * e3()?;
        let c = pr(&|r| q * t0 / r)? / thetas(p, &[q * t0, q2 * t0])? * ev;
        Ok(Residual::new(a + b - c, &[a, b, c]))
    };
    let third = || -> Result<Residual<T>> {
        let ev = base()?;
        let x = thetas(p, &[t7, t0 / t7, q * t0 / t7])? / thetas(p, &[q * t7 / t6, t7 / t6])?
            * pr(&|r| q * t0 / (t6 * r))?
            * (e1()? - ev);
        let y = thetas(p, &[t6, t0 / t6, q * t0 / t6])? / thetas(p, &[q * t6 / t7, t6 / t7])?
            * pr(&|r| q * t0 / (t7 * r))?
            * (e4()? - ev);
        let z = theta(q * t0 / (t6 * t7), p)? * pr(&|r| r)? * ev;
        Ok(Residual::new(x + y + z, &[x, y, z]))
    };
    [first(), second(), third()]
}

fn box_points(ns: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0usize; ns.len()];
    loop {
        out.push(cur.clone());
        let mut k = ns.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < ns[k] {
                cur[k] += 1;
                for c in cur.iter_mut().skip(k + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Both sides of the `A_n` multiple sum with `bcde = q^{1+|N|}`.
pub fn milne_sum_sides<T: Real>(
    tpars: &[Cx<T>],
    b: Cx<T>,
    c: Cx<T>,
    d: Cx<T>,
    ns: &[usize],
    m: &Moduli<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    let n = tpars.len();
    if ns.len() != n || n == 0 {
        return Err(Error::InvalidParams("need one N_j per t_j".into()));
    }
    let (q, p) = (m.q, m.p);
    let big_n: usize = ns.iter().sum();
    let e = cx::powi(q, 1 + big_n as i64) / (b * c * d);
    let t = tpars;
    let f = |z: Cx<T>, k: i64| theta_factorial(z, p, q, k);
    let mut terms = Vec::new();
    for lam in box_points(ns) {
        let l: usize = lam.iter().sum();
        let li = l as i64;
        let mut term = cx::powi(q, lam.iter().enumerate().map(|(j, &x)| (j as i64 + 1) * x as i64).sum());
        for j in 0..n {
            term = term * theta(t[j] * cx::powi(q, (lam[j] + l) as i64), p)? / theta(t[j], p)?;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let r = t[i] / t[j];
                term = term * theta(r * cx::powi(q, lam[i] as i64 - lam[j] as i64), p)? / theta(r, p)?;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let r = t[i] / t[j];
                term = term * f(r * cx::powi(q, -(ns[j] as i64)), lam[i] as i64)?
                    / f(q * r, lam[i] as i64)?;
            }
        }
        for j in 0..n {
            term = term * f(t[j], li)? / f(t[j] * cx::powi(q, 1 + ns[j] as i64), li)?;
        }
        term = term * f(b, li)? * f(c, li)? / (f(q / d, li)? * f(q / e, li)?);
        for j in 0..n {
            let lj = lam[j] as i64;
            term = term * f(d * t[j], lj)? * f(e * t[j], lj)?
                / (f(t[j] * q / b, lj)? * f(t[j] * q / c, lj)?);
        }
        terms.push(term);
    }
    let lhs = pairwise_sum(&terms);
    let bn = big_n as i64;
    let mut rhs = f(q / (b * d), bn)? * f(q / (c * d), bn)? / (f(q / d, bn)? * f(q / (b * c * d), bn)?);
    for j in 0..n {
        let nj = ns[j] as i64;
        rhs = rhs * f(t[j] * q, nj)? * f(t[j] * q / (b * c), nj)?
            / (f(t[j] * q / b, nj)? * f(t[j] * q / c, nj)?);
    }
    Ok((lhs, rhs))
}

/// Both sides of the Gustafson–Rakha-type sum over compositions of `N`
/// into `n` parts, with `Π t_k = q^{−N}`.
pub fn gustafson_rakha_sum_sides<T: Real>(
    t: &[Cx<T>],
    t_extra: &[Cx<T>; 3],
    tglob: Cx<T>,
    big_n: usize,
    m: &Moduli<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    let n = t.len();
    if n < 2 {
        return Err(Error::InvalidParams("need n >= 2".into()));
    }
    let (q, p) = (m.q, m.p);
    let f = |z: Cx<T>, k: i64| theta_factorial(z, p, q, k);
    let nn = big_n as i64;
    let tprod = t.iter().fold(Cx::<T>::one(), |a, &b| a * b);
    if cx::rel_err(tprod, cx::powi(q, -nn)) > 1e-10 {
        return Err(Error::ConstraintViolation("product of t_k must equal q^-N".into()));
    }
    let mut all = t.to_vec();
    all.extend_from_slice(t_extra);
    let total = all.iter().fold(Cx::<T>::one(), |a, &b| a * b);
    let tt = tglob;
    let mut terms = Vec::new();
    for lam in box_points(&alloc::vec![big_n; n]) {
        if lam.iter().sum::<usize>() != big_n {
            continue;
        }
        let l: Vec<i64> = lam.iter().map(|&x| x as i64).collect();
        let mut num = Cx::<T>::one();
        let mut den = Cx::<T>::one();
        for i in 0..n {
            for j in (i + 1)..n {
                num *= f(tt * all[i] * all[j], l[i] + l[j])?;
            }
            for j in n..n + 3 {
                num *= f(tt * all[i] * all[j], l[i])?;
            }
            for j in 0..n {
                num *= f(all[i] / all[j], -l[j])?;
                if i != j {
                    den *= f(all[i] / all[j], l[i] - l[j])?;
                }
            }
        }
        for j in 0..n {
            den *= f(cx::powi(tt, n as i64 + 1) / all[j] * total, -l[j])?;
        }
        terms.push(num / den);
    }
    let lhs = pairwise_sum(&terms);
    let e = t_extra;
    let one = Cx::<T>::one();
    let rhs = if n.is_multiple_of(2) {
        let h = (n / 2) as i64;
        let big = cx::powi(tt, h + 1);
        f(one, -nn)?
            / (f(cx::powi(tt, h), -nn)?
                * f(big * e[0] * e[1], -nn)?
                * f(big * e[0] * e[2], -nn)?
                * f(big * e[1] * e[2], -nn)?)
    } else {
        let h = n.div_ceil(2) as i64;
        f(one, -nn)?
            / (f(cx::powi(tt, h) * e[0], -nn)?
                * f(cx::powi(tt, h) * e[1], -nn)?
                * f(cx::powi(tt, h) * e[2], -nn)?
                * f(cx::powi(tt, h + 1) * e[0] * e[1] * e[2], -nn)?)
    };
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::{cx, mag, rel_err};
    use crate::dd::Dd;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    fn mods() -> Moduli<f64> {
        Moduli::new(c(0.31, 0.05), c(0.23, -0.1)).unwrap()
    }

    #[test]
    fn termination_detection() {
        let m = mods();
        assert_eq!(termination_index(cx::powi(m.q, -3), &m), Some(3));
        assert_eq!(termination_index(c(1.0, 0.0), &m), Some(0));
        let t = cx::powi(m.q, -2) * cx::inv(m.p);
        assert_eq!(termination_index(t, &m), Some(2));
        assert_eq!(termination_index(c(0.77, 0.1), &m), None);
    }

    #[test]
    fn sum_e_examples() {
        let m = mods();
        let spec = SeriesSpec {
            t: alloc::vec![c(1.0, 0.0), c(0.4, 0.2)],
            w: alloc::vec![c(0.5, 0.1)],
            alpha: [c(0.0, 0.0); 3],
            moduli: m,
            n_max: None,
        };
        let s = sum_e(&spec).unwrap();
        assert_eq!(s.value, c(1.0, 0.0));
        assert!(sum_e(&SeriesSpec { t: alloc::vec![c(0.4, 0.2)], ..spec.clone() }).is_err());
    }

    #[test]
    fn sum_v_n0_is_one() {
        let m = mods();
        let t0 = c(0.6, 0.3);
        let t1 = c(0.7, -0.2);
        let t4 = c(1.1, 0.4);
        let t5 = c(-0.5, 0.9);
        let s = frenkel_turaev_lhs(t0, t1, t4, t5, 0, &m).unwrap();
        assert!(mag(s.value - c(1.0, 0.0)) < 1e-15);
        assert_eq!(frenkel_turaev_rhs(t0, t1, t4, t5, 0, &m).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn frenkel_turaev_dd() {
        let m: Moduli<Dd> = Moduli::new(cx(0.31, 0.05), cx(0.23, -0.1)).unwrap();
        let (t0, t1, t4, t5) = (cx(0.6, 0.3), cx(0.7, -0.2), cx(1.1, 0.4), cx(-0.5, 0.9));
        for n in 0..6 {
            let l = frenkel_turaev_lhs(t0, t1, t4, t5, n, &m).unwrap().value;
            let r = frenkel_turaev_rhs(t0, t1, t4, t5, n, &m).unwrap();
            assert!(rel_err(l, r) < 1e-25, "N = {n}");
        }
    }

    #[test]
    fn balancing_violation() {
        let m = mods();
        let spec = VSpec::new(c(0.5, 0.0), alloc::vec![cx::powi(m.q, -1), c(0.3, 0.0)], c(1.0, 0.0), m).unwrap();
        assert!(matches!(sum_v(&spec), Err(Error::BalancingViolation { .. })));
    }

    #[test]
    fn pairwise_is_fixed_shape() {
        let xs: Vec<Cx<f64>> = (0..7).map(|k| c(k as f64, 0.5)).collect();
        assert_eq!(pairwise_sum(&xs), c(21.0, 3.5));
        assert_eq!(pairwise_sum::<f64>(&[]), c(0.0, 0.0));
    }

    #[test]
    fn box_enumeration_is_lexicographic() {
        let b = box_points(&[1, 2]);
        assert_eq!(b.len(), 6);
        assert_eq!(b[0], alloc::vec![0, 0]);
        assert_eq!(b[1], alloc::vec![0, 1]);
        assert_eq!(b[5], alloc::vec![1, 2]);
    }
}
