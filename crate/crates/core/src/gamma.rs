//! Elliptic gamma function and its relatives.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::{qpochhammer, theta, theta_factorial, Moduli, ScaledProd, TruncationPolicy};

const POLE_GUARD: f64 = 1e-13;

/// `Γ(z; q, p) = Π_{j,k≥0} (1 − z^{-1} q^{j+1} p^{k+1}) / (1 − z q^j p^k)`,
/// summed as logarithms over the `(j, k)` rectangle cut by the geometric tail bound.
pub fn elliptic_gamma<T: Real>(z: Cx<T>, m: &Moduli<T>, policy: TruncationPolicy) -> Result<Cx<T>> {
    if z.is_zero() {
        return Err(Error::DomainError("elliptic gamma at z = 0"));
    }
    let (qm, pm) = (cx::mag(m.q), cx::mag(m.p));
    if qm >= 1.0 || pm >= 1.0 {
        return Err(Error::NonConvergent("elliptic gamma needs |q|, |p| < 1"));
    }
    let one = Cx::<T>::one();
    let zm = cx::mag(z);
    let w = m.q * m.p / z;
    let wm = cx::mag(w);
    let mut logsum = Cx::<T>::zero();
    let mut qj = one;
    let mut qjm = 1.0;
    let mut terms = 0usize;
    loop {
        if qjm * zm.max(wm) < policy.eps {
            break;
        }
        let mut x = qj;
        let mut xm = qjm;
        loop {
            if xm * zm.max(wm) < policy.eps {
                break;
            }
            let den = one - z * x;
            if cx::mag(den) < POLE_GUARD {
                return Err(Error::PoleHit { at: cx::lower(z) });
            }
            let num = one - w * x;
            if num.is_zero() {
                return Ok(Cx::zero());
            }
            logsum += cx::ln(num) - cx::ln(den);
            terms += 1;
            if terms > policy.max_terms * policy.max_terms {
                return Err(Error::TruncationFailure { terms });
            }
            if pm == 0.0 {
                break;
            }
            x *= m.p;
            xm *= pm;
        }
        if qm == 0.0 {
            break;
        }
        qj *= m.q;
        qjm *= qm;
    }
    Ok(cx::exp(logsum))
}

/// Fast evaluator for `Γ(z; q, p)` at fixed bases.
///
/// Arguments are moved by the larger base `b` into a band around `√|pq|`
/// with the difference law `Γ(bz) = θ(z; s) Γ(z)`, then
/// `log Γ(w) = Σ_{m≥1} (w^m − (pq/w)^m) / (m (1 − q^m)(1 − p^m))`.
#[derive(Clone, Debug)]
pub struct GammaEval<T: Real> {
    m: Moduli<T>,
    big: Cx<T>,
    small: Cx<T>,
    coef: Vec<Cx<T>>,
    lo: f64,
    hi: f64,
    degenerate: bool,
}

impl<T: Real> GammaEval<T> {
    pub fn new(m: &Moduli<T>) -> Self {
        let (qm, pm) = (cx::mag(m.q), cx::mag(m.p));
        let (big, small) = if qm >= pm { (m.q, m.p) } else { (m.p, m.q) };
        let (bm, sm) = (qm.max(pm), qm.min(pm));
        let degenerate = sm == 0.0;
        let mut coef = Vec::new();
        let (mut lo, mut hi) = (0.0, 1.0);
        if !degenerate {
            let eps = TruncationPolicy::for_real::<T>().eps * 1e-2;
            let rate = libm::sqrt(sm);
            let terms = libm::ceil(libm::log(eps) / libm::log(rate)) as usize + 2;
            let one = Cx::<T>::one();
            let (mut qk, mut pk) = (m.q, m.p);
            for k in 1..=terms {
                let d = (one - qk) * (one - pk) * T::from_i64(k as i64);
                coef.push(cx::inv(d));
                qk *= m.q;
                pk *= m.p;
            }
            let c = libm::sqrt(sm * bm);
            lo = c * libm::sqrt(bm);
            hi = c / libm::sqrt(bm);
        }
        GammaEval { m: *m, big, small, coef, lo, hi, degenerate }
    }

    pub fn moduli(&self) -> &Moduli<T> {
        &self.m
    }

    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>> {
        if z.is_zero() {
            return Err(Error::DomainError("elliptic gamma at z = 0"));
        }
        if self.degenerate {
            // Γ(z; b, 0) = 1 / (z; b)_∞ and Γ(z; 0, 0) = 1 / (1 − z)
            let d = qpochhammer(z, self.big, TruncationPolicy::for_real::<T>())?;
            if cx::mag(d) < POLE_GUARD * (1.0 + cx::mag(z)) {
                return Err(Error::PoleHit { at: cx::lower(z) });
            }
            return Ok(cx::inv(d));
        }
        let mut w = z;
        let mut fac = ScaledProd::new();
        let mut steps = 0;
        while cx::mag(w) > self.hi {
            let t = theta(w, self.small)?;
            if cx::mag(t) < POLE_GUARD * (1.0 + cx::mag(w)) {
                return Err(Error::PoleHit { at: cx::lower(z) });
            }
            fac.div(t);
            w *= self.big;
            steps += 1;
            if steps > 100_000 {
                return Err(Error::NonConvergent("gamma argument shift"));
            }
        }
        let bi = cx::inv(self.big);
        while cx::mag(w) <= self.lo {
            w *= bi;
            let t = theta(w, self.small)?;
            if t.is_zero() {
                return Ok(Cx::zero());
            }
            fac.mul(t);
            steps += 1;
            if steps > 100_000 {
                return Err(Error::NonConvergent("gamma argument shift"));
            }
        }
        let v = self.m.q * self.m.p / w;
        let (mut wk, mut vk) = (w, v);
        let mut s = Cx::<T>::zero();
        for &c in &self.coef {
            s += c * (wk - vk);
            wk *= w;
            vk *= v;
        }
        Ok(cx::exp(s) * fac.value())
    }

    pub fn eval_multi(&self, zs: &[Cx<T>]) -> Result<Cx<T>> {
        let mut prod = ScaledProd::new();
        for &z in zs {
            prod.mul(self.eval(z)?);
        }
        Ok(prod.value())
    }

    /// `Π Γ(a_i) / Π Γ(b_i)`, interleaved so intermediate products stay in range.
    pub fn ratio(&self, num: &[Cx<T>], den: &[Cx<T>]) -> Result<Cx<T>> {
        let mut prod = ScaledProd::new();
        for i in 0..num.len().max(den.len()) {
            if let Some(&a) = num.get(i) {
                prod.mul(self.eval(a)?);
            }
            if let Some(&b) = den.get(i) {
                let g = self.eval(b)?;
                if g.is_zero() {
                    return Err(Error::PoleHit { at: cx::lower(b) });
                }
                prod.div(g);
            }
        }
        Ok(prod.value())
    }

    /// `1 / (Γ(x) Γ(1/x)) = θ(x; p) θ(1/x; q)`, finite on the whole punctured plane.
    pub fn inv_pair(&self, x: Cx<T>) -> Result<Cx<T>> {
        Ok(theta(x, self.m.p)? * theta(cx::inv(x), self.m.q)?)
    }
}

/// `Π Γ(z_i; q, p)`; empty product is 1.
pub fn elliptic_gamma_multi<T: Real>(zs: &[Cx<T>], m: &Moduli<T>) -> Result<Cx<T>> {
    let policy = TruncationPolicy::for_real::<T>();
    let mut prod = ScaledProd::new();
    for &z in zs {
        prod.mul(elliptic_gamma(z, m, policy)?);
    }
    Ok(prod.value())
}

/// `θ(z; p; q)_s = Γ(z q^s) / Γ(z)` for complex order `s`.
pub fn elliptic_factorial_s<T: Real>(z: Cx<T>, s: Cx<T>, m: &Moduli<T>) -> Result<Cx<T>> {
    if s.is_zero() {
        return Ok(Cx::one());
    }
    if s.im == T::zero() {
        let r = s.re.to_f64();
        if r == libm::round(r) && r.abs() < 1e6 {
            return theta_factorial(z, m.p, m.q, r as i64);
        }
    }
    let policy = TruncationPolicy::for_real::<T>();
    let qs = cx::powc(m.q, s);
    Ok(elliptic_gamma(z * qs, m, policy)? / elliptic_gamma(z, m, policy)?)
}

/// Quasi-periods `(ω₁, ω₂, ω₃)` and the four bases they define.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiPeriods<T: Real> {
    pub omega1: Cx<T>,
    pub omega2: Cx<T>,
    pub omega3: Cx<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedBases<T: Real> {
    pub q: Cx<T>,
    pub q_tilde: Cx<T>,
    pub p: Cx<T>,
    pub p_tilde: Cx<T>,
}

impl<T: Real> DerivedBases<T> {
    /// Flags `|q| < 1`, `|p| < 1`, `|q̃| < 1`, `|p̃| < 1`.
    pub fn validity(&self) -> [bool; 4] {
        [
            cx::mag(self.q) < 1.0,
            cx::mag(self.p) < 1.0,
            cx::mag(self.q_tilde) < 1.0,
            cx::mag(self.p_tilde) < 1.0,
        ]
    }
}

fn two_pi_i<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::pi() * T::from_f64(2.0))
}

impl<T: Real> QuasiPeriods<T> {
    pub fn new(omega1: Cx<T>, omega2: Cx<T>, omega3: Cx<T>) -> Self {
        QuasiPeriods { omega1, omega2, omega3 }
    }

    /// Moves `ω₁` off the real ratio line: `ω₁ → ω₁ (1 + iδ)`.
    pub fn perturbed(&self, delta: f64) -> Self {
        let f = Cx::new(T::one(), T::from_f64(delta));
        QuasiPeriods { omega1: self.omega1 * f, ..*self }
    }

    pub fn bases(&self) -> DerivedBases<T> {
        let tpi = two_pi_i::<T>();
        DerivedBases {
            q: cx::exp(tpi * self.omega1 / self.omega2),
            q_tilde: cx::exp(-tpi * self.omega2 / self.omega1),
            p: cx::exp(tpi * self.omega3 / self.omega2),
            p_tilde: cx::exp(tpi * self.omega3 / self.omega1),
        }
    }
}

/// `S(u; ω₁, ω₂) = (e^{2πiu/ω₂}; q)_∞ / (e^{2πiu/ω₁} q̃; q̃)_∞`.
pub fn double_sine<T: Real>(u: Cx<T>, omega1: Cx<T>, omega2: Cx<T>) -> Result<Cx<T>> {
    let w = QuasiPeriods::new(omega1, omega2, omega2);
    let b = w.bases();
    if cx::mag(b.q) >= 1.0 || cx::mag(b.q_tilde) >= 1.0 {
        return Err(Error::NonConvergent("double sine needs |q|, |q~| < 1"));
    }
    let tpi = two_pi_i::<T>();
    let pol = TruncationPolicy::for_real::<T>();
    let num = qpochhammer(cx::exp(tpi * u / omega2), b.q, pol)?;
    let den = qpochhammer(cx::exp(tpi * u / omega1) * b.q_tilde, b.q_tilde, pol)?;
    if den.is_zero() {
        return Err(Error::PoleHit { at: cx::lower(u) });
    }
    Ok(num / den)
}

/// Modified elliptic gamma function
/// `G(u; ω) = Γ(e^{2πiu/ω₂}; q, p) / Γ(q̃ e^{2πiu/ω₁}; q̃, p̃)`,
/// which is the four-fold product regrouped into two double products.
pub fn modified_gamma_g<T: Real>(u: Cx<T>, w: &QuasiPeriods<T>) -> Result<Cx<T>> {
    let b = w.bases();
    let v = b.validity();
    if !(v[0] && v[1] && v[2] && v[3]) {
        return Err(Error::NonConvergent("G(u) needs |q|, |p|, |q~|, |p~| < 1"));
    }
    let tpi = two_pi_i::<T>();
    let pol = TruncationPolicy::for_real::<T>();
    let x2 = cx::exp(tpi * u / w.omega2);
    let x1 = cx::exp(tpi * u / w.omega1);
    let num = elliptic_gamma(x2, &Moduli { q: b.q, p: b.p }, pol)?;
    let den = elliptic_gamma(b.q_tilde * x1, &Moduli { q: b.q_tilde, p: b.p_tilde }, pol)?;
    if den.is_zero() {
        return Err(Error::PoleHit { at: cx::lower(u) });
    }
    Ok(num / den)
}
