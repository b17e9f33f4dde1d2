//! Double-double arithmetic (about 32 significant digits).
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
//! Products use Dekker splitting so no fused multiply-add is required.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

use crate::real::Real;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    if libm::fabs(a) > 6.7e299 {
        let (h, l) = split(a * 3.725_290_298_461_914e-9);
        return (h * 268_435_456.0, l * 268_435_456.0);
    }
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

const LN2: Dd = Dd { hi: core::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };
const PI: Dd = Dd { hi: core::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
const FRAC_PI_2: Dd = Dd { hi: core::f64::consts::FRAC_PI_2, lo: 6.123_233_995_736_766e-17 };

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const fn from_f64_const(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (s, e) = quick_two_sum(p, e + self.lo * b);
        Dd::new(s, e)
    }

    fn ldexp(self, k: i32) -> Dd {
        Dd::new(libm::scalbn(self.hi, k), libm::scalbn(self.lo, k))
    }

    fn round(self) -> Dd {
        let hi = libm::round(self.hi);
        if hi == self.hi {
            let lo = libm::round(self.lo);
            let (s, e) = quick_two_sum(hi, lo);
            Dd::new(s, e)
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // Tie in the high word is broken by the sign of the low word.
            if (hi - self.hi) * self.lo < 0.0 {
                Dd::new(hi, 0.0)
            } else if hi > self.hi {
                Dd::new(hi - 1.0, 0.0)
            } else {
                Dd::new(hi + 1.0, 0.0)
            }
        } else {
            Dd::new(hi, 0.0)
        }
    }

    fn trunc(self) -> Dd {
        let hi = libm::trunc(self.hi);
        if hi == self.hi {
            Dd::new(hi, libm::trunc(self.lo))
        } else {
            Dd::new(hi, 0.0)
        }
    }

    /// sin and cos of |r| <= pi/4 by Taylor series.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r * r;
        let tiny = 1e-34;
        let mut s = r;
        let mut term = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2) / Dd::from_f64((k + 1.0) * (k + 2.0));
            s += term;
            k += 2.0;
            if term.hi.abs() < tiny {
                break;
            }
        }
        let mut c = Dd::one();
        let mut term = Dd::one();
        let mut k = 0.0;
        loop {
            term = -(term * r2) / Dd::from_f64((k + 1.0) * (k + 2.0));
            c += term;
            k += 2.0;
            if term.hi.abs() < tiny {
                break;
            }
        }
        (s, c)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        if !self.is_finite() {
            return (Dd::from_f64(f64::NAN), Dd::from_f64(f64::NAN));
        }
        let k = (self / FRAC_PI_2).round();
        let r = self - k * FRAC_PI_2;
        let (s, c) = Dd::sin_cos_reduced(r);
        match libm::fmod(k.hi, 4.0) as i64 {
            0 => (s, c),
            1 | -3 => (c, -s),
            2 | -2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi, f)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd::new(s1, s2)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (s, e) = quick_two_sum(p, e);
        Dd::new(s, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e) + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, b: Dd) { *self = *self $op b; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Zero for Dd {
    fn zero() -> Self {
        Dd::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::new(1.0, 0.0)
    }
}

impl Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Dd::from_f64)
    }
}

impl Real for Dd {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::new(x, 0.0)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::zero() } else { Dd::from_f64(f64::NAN) };
        }
        let s = Dd::from_f64(libm::sqrt(self.hi));
        s + (self - s * s) / s.mul_f64(2.0)
    }

    fn exp(self) -> Self {
        if self.hi > 709.7 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::zero();
        }
        let k = libm::round(self.hi / LN2.hi);
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // expm1 of the reduced argument, then undo the 2^10 scaling
        let mut e = r;
        let mut term = r;
        let mut i = 2.0;
        while term.hi.abs() > 1e-36 {
            term = term * r / Dd::from_f64(i);
            e += term;
            i += 1.0;
        }
        for _ in 0..10 {
            e = e.mul_f64(2.0) + e * e;
        }
        (e + Dd::one()).ldexp(k as i32)
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if !self.is_finite() {
            return self;
        }
        let mut y = Dd::from_f64(libm::log(self.hi));
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::one();
        }
        y
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn atan2(self, x: Self) -> Self {
        let y = self;
        if y.hi == 0.0 && x.hi == 0.0 {
            return Dd::zero();
        }
        let mut a = Dd::from_f64(libm::atan2(y.hi, x.hi));
        for _ in 0..2 {
            let (s, c) = a.sin_cos();
            let num = y * c - x * s;
            let den = x * c + y * s;
            a += num / den;
        }
        a
    }

    fn pi() -> Self {
        PI
    }

    fn epsilon() -> f64 {
        4.93e-32
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
}
