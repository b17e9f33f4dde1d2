//! Complex helpers over [`Real`] scalars.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::real::Real;

pub type Cx<T> = Complex<T>;
pub type C64 = Complex<f64>;

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

#[inline]
pub fn real<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn lift<T: Real>(z: C64) -> Cx<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

#[inline]
pub fn lower<T: Real>(z: Cx<T>) -> C64 {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
pub fn abs<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}

/// Modulus as `f64`, for bookkeeping and tolerance checks.
#[inline]
pub fn mag<T: Real>(z: Cx<T>) -> f64 {
    let r = z.re.to_f64();
    let i = z.im.to_f64();
    libm::hypot(r, i)
}

#[inline]
pub fn inv<T: Real>(z: Cx<T>) -> Cx<T> {
    div(Cx::<T>::one(), z)
}

/// Quotient with the divisor prescaled by a power of two, so `|b|²` cannot
/// overflow or underflow.
pub fn div<T: Real>(a: Cx<T>, b: Cx<T>) -> Cx<T> {
    let m = libm::fmax(libm::fabs(b.re.to_f64()), libm::fabs(b.im.to_f64()));
    if m == 0.0 || !m.is_finite() || (1e-140..1e140).contains(&m) {
        return a / b;
    }
    let (_, e) = libm::frexp(m);
    let s = T::from_f64(libm::scalbn(1.0, -e));
    let bs = Cx::new(b.re * s, b.im * s);
    let q = a / bs;
    Cx::new(q.re * s, q.im * s)
}

pub fn exp<T: Real>(z: Cx<T>) -> Cx<T> {
    let r = z.re.exp();
    Complex::new(r * z.im.cos(), r * z.im.sin())
}

/// `e^{i x}`.
pub fn expi<T: Real>(x: T) -> Cx<T> {
    Complex::new(x.cos(), x.sin())
}

/// Principal logarithm.
pub fn ln<T: Real>(z: Cx<T>) -> Cx<T> {
    Complex::new(abs(z).ln(), z.im.atan2(z.re))
}

/// Principal square root.
pub fn sqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    let r = abs(z);
    if r == T::zero() {
        return Cx::zero();
    }
    let two = T::from_f64(2.0);
    let a = ((r + z.re.abs()) / two).sqrt();
    if z.re >= T::zero() {
        Complex::new(a, z.im / (two * a))
    } else {
        let b = if z.im < T::zero() { -a } else { a };
        Complex::new(z.im.abs() / (two * a), b)
    }
}

pub fn powi<T: Real>(z: Cx<T>, n: i64) -> Cx<T> {
    if n < 0 {
        return inv(powi(z, -n));
    }
    let mut acc = Cx::<T>::one();
    let mut base = z;
    let mut k = n as u64;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}

/// Principal power `z^s = exp(s log z)`.
pub fn powc<T: Real>(z: Cx<T>, s: Cx<T>) -> Cx<T> {
    if z.is_zero() {
        return Cx::zero();
    }
    exp(s * ln(z))
}

pub fn powf<T: Real>(z: Cx<T>, s: f64) -> Cx<T> {
    powc(z, cx(s, 0.0))
}

/// Largest modulus in a slice, 0 when empty.
pub fn max_mag<T: Real>(zs: &[Cx<T>]) -> f64 {
    zs.iter().map(|&z| mag(z)).fold(0.0, f64::max)
}

/// `|a - b| / |b|`, falling back to `|a - b|` when `b` vanishes.
pub fn rel_err<T: Real>(a: Cx<T>, b: Cx<T>) -> f64 {
    let d = mag(a - b);
    let s = mag(b);
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;

    #[test]
    fn exp_ln_roundtrip() {
        let z: Cx<f64> = cx(0.3, -2.7);
        let w = exp(ln(z));
        assert!(mag(w - z) < 1e-15);
        let z: Cx<Dd> = cx(0.3, -2.7);
        let w = exp(ln(z));
        assert!(mag(w - z) < 1e-30);
    }

    #[test]
    fn sqrt_branch() {
        let z: Cx<f64> = cx(-4.0, -1e-300);
        let s = sqrt(z);
        assert!(s.im < 0.0);
        assert!(mag(s * s - z) < 1e-14);
        let z: Cx<f64> = cx(-3.0, 4.0);
        assert!(mag(sqrt(z) - cx(1.0, 2.0)) < 1e-15);
    }

    #[test]
    fn integer_powers() {
        let z: Cx<f64> = cx(0.6, 0.2);
        assert!(mag(powi(z, 5) - z * z * z * z * z) < 1e-15);
        assert!(mag(powi(z, -2) * z * z - cx(1.0, 0.0)) < 1e-15);
        assert_eq!(powi(z, 0), cx(1.0, 0.0));
    }
}
