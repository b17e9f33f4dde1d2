//! Truncated infinite products, theta functions and elliptic shifted factorials.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx};
use crate::error::{Error, Result};
use crate::real::Real;

/// The pair of bases `(q, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moduli<T: Real> {
    pub q: Cx<T>,
    pub p: Cx<T>,
}

impl<T: Real> Moduli<T> {
    pub fn new(q: Cx<T>, p: Cx<T>) -> Result<Self> {
        if cx::mag(q) >= 1.0 {
            return Err(Error::NonConvergent("|q| >= 1"));
        }
        if cx::mag(p) >= 1.0 {
            return Err(Error::NonConvergent("|p| >= 1"));
        }
        Ok(Moduli { q, p })
    }

    pub fn from_c64(q: cx::C64, p: cx::C64) -> Result<Self> {
        Moduli::new(cx::lift(q), cx::lift(p))
    }

    /// The same pair with the roles of `q` and `p` exchanged.
    pub fn swapped(&self) -> Self {
        Moduli { q: self.p, p: self.q }
    }

    pub fn pq(&self) -> Cx<T> {
        self.p * self.q
    }

    pub fn is_degenerate(&self) -> bool {
        self.q.is_zero() || self.p.is_zero()
    }

    pub fn lower(&self) -> Moduli<f64> {
        Moduli { q: cx::lower(self.q), p: cx::lower(self.p) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub eps: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { eps: 1e-16, max_terms: 4096 }
    }
}

impl TruncationPolicy {
    /// Default policy tightened to the unit roundoff of `T`.
    pub fn for_real<T: Real>() -> Self {
        let eps = if T::epsilon() < 1e-20 { 1e-33 } else { 1e-16 };
        TruncationPolicy { eps, max_terms: 4096 }
    }
}

/// Running complex product that keeps its binary exponent separately, so long
/// products neither overflow nor underflow before the final result.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScaledProd<T: Real> {
    acc: Cx<T>,
    exp2: i32,
    count: usize,
}

impl<T: Real> ScaledProd<T> {
    pub(crate) fn new() -> Self {
        ScaledProd { acc: Cx::one(), exp2: 0, count: 0 }
    }

    #[inline]
    pub(crate) fn mul(&mut self, f: Cx<T>) {
        self.acc *= f;
        self.count += 1;
        if self.count.is_multiple_of(8) {
            self.renorm();
        }
    }

    #[inline]
    pub(crate) fn div(&mut self, f: Cx<T>) {
        self.acc = cx::div(self.acc, f);
        self.count += 1;
        if self.count.is_multiple_of(8) {
            self.renorm();
        }
    }

    fn renorm(&mut self) {
        let m = cx::mag(self.acc);
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let (_, e) = libm::frexp(m);
        if e.abs() > 64 {
            self.acc *= T::from_f64(libm::scalbn(1.0, -e));
            self.exp2 += e;
        }
    }

    pub(crate) fn value(self) -> Cx<T> {
        if self.exp2 == 0 {
            return self.acc;
        }
        // Apply the exponent in steps that stay within f64 range.
        let mut v = self.acc;
        let mut e = self.exp2;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            v *= T::from_f64(libm::scalbn(1.0, step));
            e -= step;
        }
        v
    }
}

/// `(z; b)_∞ = Π_{k≥0} (1 − z b^k)`.
pub fn qpochhammer<T: Real>(z: Cx<T>, b: Cx<T>, policy: TruncationPolicy) -> Result<Cx<T>> {
    let bm = cx::mag(b);
    if bm >= 1.0 {
        return Err(Error::NonConvergent("|b| >= 1 in (z;b)_inf"));
    }
    let one = Cx::<T>::one();
    if z.is_zero() {
        return Ok(one);
    }
    if bm == 0.0 {
        return Ok(one - z);
    }
    let zm = cx::mag(z);
    let mut prod = ScaledProd::new();
    let mut x = z;
    let mut bk = 1.0;
    for _ in 0..policy.max_terms {
        if zm * bk / (1.0 - bm) < policy.eps {
            return Ok(prod.value());
        }
        prod.mul(one - x);
        x *= b;
        bk *= bm;
    }
    Err(Error::TruncationFailure { terms: policy.max_terms })
}

/// Integer `k` with `z = p^k` up to a few ulps, if any.
fn zero_lattice_index<T: Real>(z: Cx<T>, p: Cx<T>) -> Option<i64> {
    let pm = cx::mag(p);
    let zm = cx::mag(z);
    if pm == 0.0 {
        return if (zm - 1.0).abs() < 1e-300 && z == Cx::one() { Some(0) } else { None };
    }
    let k = libm::round(libm::log(zm) / libm::log(pm));
    if !k.is_finite() || k.abs() > 256.0 {
        return None;
    }
    let k = k as i64;
    let pk = cx::powi(p, k);
    let tol = 16.0 * T::epsilon() * (1.0 + k.unsigned_abs() as f64);
    if cx::mag(z - pk) <= tol * zm {
        Some(k)
    } else {
        None
    }
}

/// `θ(z; p) = (z; p)_∞ (p/z; p)_∞`.
pub fn theta<T: Real>(z: Cx<T>, p: Cx<T>) -> Result<Cx<T>> {
    theta_with(z, p, TruncationPolicy::for_real::<T>())
}

pub fn theta_with<T: Real>(z: Cx<T>, p: Cx<T>, policy: TruncationPolicy) -> Result<Cx<T>> {
    if z.is_zero() {
        return Err(Error::DomainError("theta at z = 0"));
    }
    let one = Cx::<T>::one();
    let pm = cx::mag(p);
    if pm >= 1.0 {
        return Err(Error::NonConvergent("|p| >= 1 in theta"));
    }
    if pm == 0.0 {
        return Ok(one - z);
    }
    if zero_lattice_index(z, p).is_some() {
        return Ok(Cx::zero());
    }
    let zm = cx::mag(z);
    let zi = cx::inv(z);
    let mut prod = ScaledProd::new();
    let mut a = z;
    let mut b = p * zi;
    let mut pk = 1.0;
    for _ in 0..policy.max_terms {
        if zm * pk + pm * pk / zm < policy.eps {
            return Ok(prod.value());
        }
        prod.mul((one - a) * (one - b));
        a *= p;
        b *= p;
        pk *= pm;
    }
    Err(Error::TruncationFailure { terms: policy.max_terms })
}

/// `Π θ(z_i; p)`; empty product is 1.
pub fn theta_multi<T: Real>(zs: &[Cx<T>], p: Cx<T>) -> Result<Cx<T>> {
    let mut prod = ScaledProd::new();
    for &z in zs {
        prod.mul(theta(z, p)?);
    }
    Ok(prod.value())
}

/// Elliptic shifted factorial `θ(z; p; q)_n`, with
/// `θ(z; p; q)_{-n} = 1 / Π_{l=1}^{n} θ(z q^{-l}; p)`.
pub fn theta_factorial<T: Real>(z: Cx<T>, p: Cx<T>, q: Cx<T>, n: i64) -> Result<Cx<T>> {
    let mut prod = ScaledProd::new();
    if n >= 0 {
        let mut x = z;
        for _ in 0..n {
            prod.mul(theta(x, p)?);
            x *= q;
        }
        Ok(prod.value())
    } else {
        let qi = cx::inv(q);
        let mut x = z * qi;
        for _ in 0..(-n) {
            let t = theta(x, p)?;
            if t.is_zero() {
                return Err(Error::PoleHit { at: cx::lower(x) });
            }
            prod.div(t);
            x *= qi;
        }
        Ok(prod.value())
    }
}

/// `Π_i θ(a_i; p; q)_n / Π_i θ(b_i; p; q)_n`, interleaved so intermediate
/// products stay in range.
pub fn theta_factorial_ratio<T: Real>(
    a: &[Cx<T>],
    b: &[Cx<T>],
    p: Cx<T>,
    q: Cx<T>,
    n: i64,
) -> Result<Cx<T>> {
    let mut prod = ScaledProd::new();
    let k = a.len().max(b.len());
    for i in 0..k {
        if let Some(&x) = a.get(i) {
            prod.mul(theta_factorial(x, p, q, n)?);
        }
        if let Some(&y) = b.get(i) {
            let d = theta_factorial(y, p, q, n)?;
            if d.is_zero() {
                return Err(Error::PoleHit { at: cx::lower(y) });
            }
            prod.div(d);
        }
    }
    Ok(prod.value())
}

/// `Π_i θ(z_i; p; q)_n`.
pub fn theta_factorial_multi<T: Real>(zs: &[Cx<T>], p: Cx<T>, q: Cx<T>, n: i64) -> Result<Cx<T>> {
    let mut prod = Cx::one();
    for &z in zs {
        prod *= theta_factorial(z, p, q, n)?;
    }
    Ok(prod)
}

/// Jacobi `θ₁(u; σ, τ) = p^{1/8} i q^{-u/2} (p; p)_∞ θ(q^u; p)` with
/// `q = e^{2πiσ}`, `p = e^{2πiτ}` and all fractional powers taken as exponentials.
pub fn theta1<T: Real>(u: Cx<T>, sigma: Cx<T>, tau: Cx<T>) -> Result<Cx<T>> {
    if tau.im <= T::zero() {
        return Err(Error::DomainError("Im(tau) must be positive"));
    }
    let two_pi_i = Cx::new(T::zero(), T::pi() * T::from_f64(2.0));
    let p = cx::exp(two_pi_i * tau);
    let qu = cx::exp(two_pi_i * sigma * u);
    let pref = cx::exp(two_pi_i * tau / T::from_f64(8.0))
        * Cx::new(T::zero(), T::one())
        * cx::exp(-two_pi_i * sigma * u / T::from_f64(2.0));
    let pp = qpochhammer(p, p, TruncationPolicy::for_real::<T>())?;
    if qu.is_zero() {
        return Err(Error::DomainError("q^u underflow"));
    }
    Ok(pref * pp * theta(qu, p)?)
}

/// Geometric sequence `z, z b, z b^2, ..` of length `n`.
pub fn geometric<T: Real>(z: Cx<T>, b: Cx<T>, n: usize) -> Vec<Cx<T>> {
    let mut out = Vec::with_capacity(n);
    let mut x = z;
    for _ in 0..n {
        out.push(x);
        x *= b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::{cx, mag};

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    #[test]
    fn qpochhammer_examples() {
        let pol = TruncationPolicy::default();
        assert_eq!(qpochhammer(c(0.0, 0.0), c(0.5, 0.0), pol).unwrap(), c(1.0, 0.0));
        assert_eq!(qpochhammer(c(0.5, 0.0), c(0.0, 0.0), pol).unwrap(), c(0.5, 0.0));
        let v = qpochhammer(c(0.5, 0.0), c(0.5, 0.0), pol).unwrap();
        let mut direct = 1.0;
        for k in 0..200 {
            direct *= 1.0 - 0.5 * 0.5f64.powi(k);
        }
        assert!((v.re - direct).abs() < 1e-15);
        assert!((v.re - 0.288_788_095_1).abs() < 1e-10);
        assert!(matches!(
            qpochhammer(c(0.5, 0.0), c(1.0, 0.0), pol),
            Err(Error::NonConvergent(_))
        ));
        let tiny = TruncationPolicy { eps: 1e-16, max_terms: 3 };
        assert!(matches!(
            qpochhammer(c(0.5, 0.0), c(0.9, 0.0), tiny),
            Err(Error::TruncationFailure { .. })
        ));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(c(1.0, 0.0), c(0.3, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(theta(c(0.4, 0.0), c(0.0, 0.0)).unwrap(), c(0.6, 0.0));
        assert!(theta(c(0.0, 0.0), c(0.3, 0.0)).is_err());
        let z = c(0.4, 0.1);
        let p = c(0.25, 0.0);
        let a = theta(z, p).unwrap();
        let b = -z * theta(p * z, p).unwrap();
        assert!(mag(a - b) < 1e-15 * mag(a));
    }

    #[test]
    fn zero_lattice() {
        let p = c(0.3, 0.2);
        for k in -3..=3 {
            assert_eq!(theta(cx::powi(p, k), p).unwrap(), c(0.0, 0.0), "k = {k}");
        }
    }

    #[test]
    fn theta_multi_examples() {
        let p = c(0.2, 0.0);
        assert_eq!(theta_multi::<f64>(&[], p).unwrap(), c(1.0, 0.0));
        assert_eq!(theta_multi(&[c(1.0, 0.0), c(0.5, 0.0)], p).unwrap(), c(0.0, 0.0));
        let v = theta_multi(&[c(0.3, 0.0), c(0.7, 0.0)], p).unwrap();
        let w = theta(c(0.3, 0.0), p).unwrap() * theta(c(0.7, 0.0), p).unwrap();
        assert!(mag(v - w) < 1e-16);
    }

    #[test]
    fn theta_factorial_examples() {
        let (z, p, q) = (c(0.5, 0.0), c(0.2, 0.0), c(0.3, 0.0));
        assert_eq!(theta_factorial(c(1.7, 0.3), p, q, 0).unwrap(), c(1.0, 0.0));
        let v = theta_factorial(z, p, q, 2).unwrap();
        let w = theta(z, p).unwrap() * theta(c(0.15, 0.0), p).unwrap();
        assert!(mag(v - w) < 1e-15);
        let v = theta_factorial(z, p, q, -1).unwrap();
        let w = cx::inv(theta(z / q, p).unwrap());
        assert!(mag(v - w) < 1e-15 * mag(w));
        for m in [-3i64, -1, 2, 4] {
            let a = theta_factorial(z, p, q, m).unwrap();
            let b = theta_factorial(z * cx::powi(q, m), p, q, -m).unwrap();
            assert!(mag(a * b - c(1.0, 0.0)) < 1e-13);
        }
    }

    #[test]
    fn factorial_pole() {
        let (p, q) = (c(0.2, 0.0), c(0.3, 0.0));
        assert!(matches!(theta_factorial(q, p, q, -1), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn theta1_properties() {
        let sigma = c(0.13, 0.21);
        let tau = c(-0.1, 0.35);
        let u = c(0.0, 0.0);
        assert!(mag(theta1(u, sigma, tau).unwrap()) < 1e-15);
        let u = c(0.37, -0.22);
        let a = theta1(u, sigma, tau).unwrap();
        let b = theta1(-u, sigma, tau).unwrap();
        assert!(mag(a + b) < 1e-13 * mag(a));
        let s_inv = cx::inv(sigma);
        let d = theta1(u + s_inv, sigma, tau).unwrap();
        assert!(mag(a + d) < 1e-12 * mag(a));
        assert!(theta1(u, sigma, c(0.1, -0.2)).is_err());
    }

    #[test]
    fn dd_theta_matches_f64() {
        use crate::dd::Dd;
        let z: Cx<Dd> = cx(0.41, -0.73);
        let p: Cx<Dd> = cx(0.3, 0.25);
        let a = theta(z, p).unwrap();
        let b = theta(c(0.41, -0.73), c(0.3, 0.25)).unwrap();
        assert!(mag(cx::lower(a) - b) < 1e-14 * mag(b));
        let lhs = theta(p * z, p).unwrap();
        let rhs = -cx::inv(z) * a;
        assert!(mag(lhs - rhs) < 1e-30 * mag(a));
    }
}
