//! Integrand families and the closed forms of their integrals over `T^n`.
//!
//! Integrands are bare: the `1/(2πi)^n` and `dz/z` measure lives in
//! [`crate::quadrature`], so the torus average of an integrand equals the
//! closed form returned by [`Integrand::rhs`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx, C64};
use crate::error::{Error, Result};
use crate::gamma::GammaEval;
use crate::real::Real;
use crate::special::{qpochhammer, theta, Moduli, TruncationPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    E,
    CnI,
    CnII,
    CnIII,
    AnI,
    AnII,
    AnIII,
    GenericVwp,
    MinusA,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::E => "E",
            Family::CnI => "Cn_I",
            Family::CnII => "Cn_II",
            Family::CnIII => "Cn_III",
            Family::AnI => "An_I",
            Family::AnII => "An_II",
            Family::AnIII => "An_III",
            Family::GenericVwp => "GENERIC_VWP",
            Family::MinusA => "MINUS_A",
        }
    }

    pub fn is_an(self) -> bool {
        matches!(self, Family::AnI | Family::AnII | Family::AnIII)
    }
}

/// Named parameter groups; which ones a family reads is fixed by the family.
#[derive(Clone, Debug)]
pub struct ParamSet<T: Real> {
    pub t: Vec<Cx<T>>,
    pub f: Vec<Cx<T>>,
    pub s: Vec<Cx<T>>,
    pub x: Vec<Cx<T>>,
    /// Scalar `t` of the Type II/III families.
    pub tt: Option<Cx<T>>,
    /// Scalar `s` of `A_n` Type II.
    pub ss: Option<Cx<T>>,
    pub rho: Option<Cx<T>>,
    pub gamma: Option<Cx<T>>,
    /// Index `m` of the very-well-poised families.
    pub m: Option<usize>,
}

impl<T: Real> Default for ParamSet<T> {
    fn default() -> Self {
        ParamSet {
            t: Vec::new(),
            f: Vec::new(),
            s: Vec::new(),
            x: Vec::new(),
            tt: None,
            ss: None,
            rho: None,
            gamma: None,
            m: None,
        }
    }
}

impl<T: Real> ParamSet<T> {
    pub fn with_t(t: Vec<Cx<T>>) -> Self {
        ParamSet { t, ..Default::default() }
    }

    fn all(&self) -> impl Iterator<Item = &Cx<T>> {
        self.t
            .iter()
            .chain(&self.f)
            .chain(&self.s)
            .chain(&self.x)
            .chain(self.tt.iter())
            .chain(self.ss.iter())
            .chain(self.rho.iter())
    }
}

#[derive(Clone, Debug)]
pub struct IntegrandSpec<T: Real> {
    pub family: Family,
    pub n: usize,
    pub params: ParamSet<T>,
    pub moduli: Moduli<T>,
}

/// One inequality of a domain checklist; `margin > 0` means it holds.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainCheck {
    pub label: String,
    pub margin: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationResult {
    pub checks: Vec<DomainCheck>,
}

impl ValidationResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.margin > 0.0)
    }

    /// The check with the smallest margin.
    pub fn worst(&self) -> Option<&DomainCheck> {
        self.checks.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    fn push(&mut self, label: String, margin: f64) {
        self.checks.push(DomainCheck { label, margin });
    }

    fn inside_unit(&mut self, name: &str, zs: &[C64]) {
        for (i, z) in zs.iter().enumerate() {
            self.push(format!("|{name}{i}| < 1"), 1.0 - z.norm());
        }
    }
}

fn prod<T: Real>(zs: &[Cx<T>]) -> Cx<T> {
    zs.iter().fold(Cx::one(), |a, &b| a * b)
}

fn lows<T: Real>(zs: &[Cx<T>]) -> Vec<C64> {
    zs.iter().map(|&z| cx::lower(z)).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// `(q; q)_∞ (p; p)_∞`.
pub fn poch<T: Real>(m: &Moduli<T>) -> Result<Cx<T>> {
    let pol = TruncationPolicy::for_real::<T>();
    Ok(qpochhammer(m.q, m.q, pol)? * qpochhammer(m.p, m.p, pol)?)
}

/// Closed form `2 Π_{m<s} Γ(t_m t_s) / ((q;q)(p;p) Π_m Γ(A/t_m))` of the
/// elliptic beta integral, `A = Π t_m`.
pub fn n_e<T: Real>(t: &[Cx<T>], g: &GammaEval<T>) -> Result<Cx<T>> {
    let a = prod(t);
    let num: Vec<_> = pairs(t.len()).map(|(i, j)| t[i] * t[j]).collect();
    let den: Vec<_> = t.iter().map(|&x| a / x).collect();
    Ok(g.ratio(&num, &den)? * T::from_f64(2.0) / poch(g.moduli())?)
}

/// The `p = 0` limit `2 Π_m (A/t_m; q)_∞ / ((q;q)_∞ Π_{m<s} (t_m t_s; q)_∞)`.
pub fn n_e_p0<T: Real>(t: &[Cx<T>], q: Cx<T>) -> Result<Cx<T>> {
    let pol = TruncationPolicy::for_real::<T>();
    let a = prod(t);
    let mut v = cx::real::<T>(T::from_f64(2.0)) / qpochhammer(q, q, pol)?;
    for &x in t {
        v *= qpochhammer(a / x, q, pol)?;
    }
    for (i, j) in pairs(t.len()) {
        v = cx::div(v, qpochhammer(t[i] * t[j], q, pol)?);
    }
    Ok(v)
}

/// A validated integrand with its gamma evaluator and derived products.
#[derive(Clone, Debug)]
pub struct Integrand<T: Real> {
    pub spec: IntegrandSpec<T>,
    g: GammaEval<T>,
    /// `A` (or `B` for `C_n` Type II, `AB` for `A_n` Type I, the
    /// denominator argument for `A_n` Type II) as the family defines it.
    pub a: Cx<T>,
}

impl<T: Real> Integrand<T> {
    pub fn new(spec: IntegrandSpec<T>) -> Result<Self> {
        check_counts(&spec)?;
        if spec.params.all().any(|z| z.is_zero()) {
            return Err(Error::InvalidParams("parameters must be nonzero".into()));
        }
        let g = GammaEval::new(&spec.moduli);
        let a = derived_a(&spec);
        Ok(Integrand { spec, g, a })
    }

    pub fn gamma(&self) -> &GammaEval<T> {
        &self.g
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    /// Number of free integration variables.
    pub fn dim(&self) -> usize {
        match self.spec.family {
            Family::E | Family::GenericVwp | Family::MinusA => 1,
            _ => self.spec.n,
        }
    }

    /// Number of variables the factors see; `A_n` adds `z_{n+1} = 1/Π z_i`.
    pub fn vars(&self) -> usize {
        self.dim() + usize::from(self.spec.family.is_an())
    }

    fn p(&self) -> Cx<T> {
        self.spec.moduli.p
    }

    fn sym(&self, a: Cx<T>, z: Cx<T>) -> Result<Cx<T>> {
        Ok(self.g.eval(a * z)? * self.g.eval(a / z)?)
    }

    /// Factor of the integrand depending on variable `k` alone.
    pub fn single(&self, k: usize, z: Cx<T>) -> Result<Cx<T>> {
        let pr = &self.spec.params;
        let g = &self.g;
        let a = self.a;
        match self.spec.family {
            Family::E | Family::CnI | Family::CnII => {
                let mut v = g.inv_pair(z * z)?;
                for &t in &pr.t {
                    v *= self.sym(t, z)?;
                }
                Ok(cx::div(v, self.sym(a, z)?))
            }
            Family::CnIII => {
                let t = pr.tt.unwrap();
                let x = pr.x[k];
                let mut v = g.inv_pair(z * z)? * cx::powi(z, k as i64);
                for b in [x, pr.t[0], pr.t[1], pr.t[2], t / x] {
                    v *= self.sym(b, z)?;
                }
                Ok(cx::div(v, self.sym(a, z)?))
            }
            Family::AnI => {
                let mut v = Cx::one();
                for &t in &pr.t {
                    v *= g.eval(t / z)?;
                }
                for &f in &pr.f {
                    v *= g.eval(f * z)?;
                }
                Ok(cx::div(v, g.eval(a * z)?))
            }
            Family::AnII => {
                let t = &pr.t;
                let v = g.ratio(&[t[0] * z, t[1] * z, t[2] * z, t[3] / z, t[4] / z], &[a * z])?;
                Ok(v)
            }
            Family::AnIII => {
                let n = self.spec.n;
                let tt = pr.tt.unwrap();
                let mut num: Vec<_> = pr.t[..n + 1].iter().map(|&t| t / z).collect();
                num.extend(pr.t[n + 1..].iter().map(|&t| tt * t * z));
                g.ratio(&num, &[a / z])
            }
            Family::GenericVwp => self.vwp(z),
            Family::MinusA => {
                let mut v = g.inv_pair(z * z)?;
                for &t in &pr.t {
                    v *= self.sym(t, z)?;
                }
                Ok(cx::div(v, self.sym(-a, z)?))
            }
        }
    }

    fn vwp(&self, z: Cx<T>) -> Result<Cx<T>> {
        let pr = &self.spec.params;
        let m = pr.m.unwrap() as i64;
        let pq = self.spec.moduli.pq();
        let rho = pr.rho.unwrap_or(pq);
        let gam = pr.gamma.unwrap_or_else(Cx::zero);
        let tp = prod(&pr.t);
        let rho_pow = |k: i64| -> Cx<T> {
            // ρ^{k/2}
            if k % 2 == 0 {
                cx::powi(rho, k / 2)
            } else {
                cx::powi(cx::sqrt(rho), k)
            }
        };
        let mut num: Vec<_> = pr.t.iter().map(|&t| t * z).collect();
        num.push(rho_pow(m + 1) * cx::powi(pq, -6) / tp * z);
        let mut den: Vec<_> = pr.t.iter().map(|&t| rho * z / t).collect();
        let r = rho / pq;
        den.push(rho_pow(1 - m) * cx::powi(pq, 6) * tp * z);
        // 1/Γ(z^{-2}) = θ(z^2;p)θ(z^{-2};q)Γ(z^2), which cancels Γ(r²z²) at ρ = pq
        let mut v = self.g.ratio(&num, &den)? * self.g.inv_pair(z * z)?;
        if cx::mag(r * r - Cx::one()) > 1e-15 {
            v *= self.g.ratio(&[z * z], &[r * r * z * z])?;
        }
        let e = if gam.is_zero() {
            Cx::one()
        } else {
            cx::exp(gam * cx::ln(z) / cx::ln(self.spec.moduli.q))
        };
        Ok(v * e)
    }

    /// Factor depending on `x = z_i / z_j` for `i < j`.
    pub fn pair_diff(&self, x: Cx<T>) -> Result<Cx<T>> {
        let pr = &self.spec.params;
        let g = &self.g;
        match self.spec.family {
            Family::CnI | Family::AnI => g.inv_pair(x),
            Family::CnII => {
                let t = pr.tt.unwrap();
                Ok(g.inv_pair(x)? * g.eval(t * x)? * g.eval(t / x)?)
            }
            Family::CnIII => theta(x, self.p()),
            Family::AnII | Family::AnIII => g.inv_pair(x),
            _ => Ok(Cx::one()),
        }
    }

    /// Factor depending on `x = z_i z_j` for `i < j`.
    pub fn pair_sum(&self, x: Cx<T>) -> Result<Cx<T>> {
        let pr = &self.spec.params;
        let g = &self.g;
        match self.spec.family {
            Family::CnI => g.inv_pair(x),
            Family::CnII => {
                let t = pr.tt.unwrap();
                Ok(g.inv_pair(x)? * g.eval(t * x)? * g.eval(t / x)?)
            }
            Family::CnIII => theta(cx::inv(x), self.p()),
            Family::AnII => Ok(g.eval(pr.tt.unwrap() * x)? * g.eval(pr.ss.unwrap() / x)?),
            Family::AnIII => g.eval(pr.tt.unwrap() * x),
            _ => Ok(Cx::one()),
        }
    }

    pub fn has_pair_sum(&self) -> bool {
        !matches!(self.spec.family, Family::AnI) && self.vars() > 1
    }

    /// Full variable list, appending the constrained `z_{n+1}` for `A_n`.
    pub fn expand(&self, z: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut v = z.to_vec();
        if self.spec.family.is_an() {
            v.push(cx::inv(prod(z)));
        }
        v
    }

    /// Integrand at the free variables `z`.
    pub fn eval(&self, z: &[Cx<T>]) -> Result<Cx<T>> {
        if z.len() != self.dim() {
            return Err(Error::InvalidParams(format!("expected {} variables", self.dim())));
        }
        let zs = self.expand(z);
        let mut v = Cx::one();
        for (k, &zk) in zs.iter().enumerate() {
            v *= self.single(k, zk)?;
        }
        let sum = self.has_pair_sum();
        for (i, j) in pairs(zs.len()) {
            v *= self.pair_diff(zs[i] / zs[j])?;
            if sum {
                v *= self.pair_sum(zs[i] * zs[j])?;
            }
        }
        Ok(v)
    }

    pub fn validate(&self) -> ValidationResult {
        validate_domain(&self.spec)
    }

    /// Starting points `a` of the pole sequences `a q^j p^k` that must lie
    /// inside the contour, one list per variable.
    pub fn interior_seeds(&self) -> Vec<C64> {
        let pr = &self.spec.params;
        let pq = cx::lower(self.spec.moduli.pq());
        let a = cx::lower(self.a);
        match self.spec.family {
            Family::E | Family::CnI | Family::CnII | Family::GenericVwp | Family::MinusA => lows(&pr.t),
            Family::CnIII => {
                let t = cx::lower(pr.tt.unwrap());
                let mut v = lows(&pr.t);
                for &x in &pr.x {
                    v.push(cx::lower(x));
                    v.push(t / cx::lower(x));
                }
                v
            }
            Family::AnI => {
                let mut v = lows(&pr.t);
                v.extend(lows(&pr.f));
                v.push(pq / a);
                v
            }
            Family::AnII => {
                let mut v = lows(&pr.t);
                v.push(pq / a);
                v
            }
            Family::AnIII => {
                let tt = cx::lower(pr.tt.unwrap());
                let n = self.spec.n;
                let mut v = lows(&pr.t[..n + 1]);
                v.extend(pr.t[n + 1..].iter().map(|&t| tt * cx::lower(t)));
                v.push(pq / a);
                v
            }
        }
    }

    /// Closed form of the torus average.
    pub fn rhs(&self) -> Result<Cx<T>> {
        rhs_closed_form(self)
    }
}

fn check_counts<T: Real>(spec: &IntegrandSpec<T>) -> Result<()> {
    let pr = &spec.params;
    let n = spec.n;
    let bad = |what: String| Err(Error::InvalidParams(what));
    if n == 0 {
        return bad("rank n must be positive".into());
    }
    match spec.family {
        Family::E if pr.t.len() != 5 => bad("E needs 5 t's".into()),
        Family::CnI if pr.t.len() != 2 * n + 3 => bad(format!("Cn_I needs {} t's", 2 * n + 3)),
        Family::CnII if pr.t.len() != 5 || pr.tt.is_none() => bad("Cn_II needs 5 t's and extras.t".into()),
        Family::CnIII if pr.x.len() != n || pr.t.len() != 3 || pr.tt.is_none() => {
            bad(format!("Cn_III needs {n} x's, 3 t's and extras.t"))
        }
        Family::AnI if pr.t.len() != n + 1 || pr.f.len() != n + 2 => {
            bad(format!("An_I needs {} t's and {} f's", n + 1, n + 2))
        }
        Family::AnII if pr.t.len() != 5 || pr.tt.is_none() || pr.ss.is_none() => {
            bad("An_II needs 5 t's, extras.t and extras.s".into())
        }
        Family::AnIII if pr.t.len() != n + 4 || pr.tt.is_none() => bad(format!("An_III needs {} t's and extras.t", n + 4)),
        Family::GenericVwp => match pr.m {
            Some(m) if m >= 9 && pr.t.len() == m - 8 => Ok(()),
            _ => bad("GENERIC_VWP needs m >= 9 and m - 8 t's".into()),
        },
        Family::MinusA => match pr.m {
            Some(m) if m >= 7 && pr.t.len() == m - 6 => Ok(()),
            _ => bad("MINUS_A needs m >= 7 and m - 6 t's".into()),
        },
        _ => Ok(()),
    }
}

fn derived_a<T: Real>(spec: &IntegrandSpec<T>) -> Cx<T> {
    let pr = &spec.params;
    let n = spec.n as i64;
    let m = &spec.moduli;
    match spec.family {
        Family::E | Family::CnI => prod(&pr.t),
        Family::CnII => cx::powi(pr.tt.unwrap(), 2 * n - 2) * prod(&pr.t),
        Family::CnIII => pr.tt.unwrap() * prod(&pr.t) * cx::powi(m.q, n - 1),
        Family::AnI => prod(&pr.t) * prod(&pr.f),
        Family::AnII => cx::powi(pr.tt.unwrap() * pr.ss.unwrap(), n - 1) * prod(&pr.t),
        Family::AnIII => cx::powi(pr.tt.unwrap(), n + 2) * prod(&pr.t),
        Family::GenericVwp => {
            let k = 13 - pr.m.unwrap() as i64;
            pq_half(m.pq(), k) * prod(&pr.t)
        }
        Family::MinusA => {
            let k = 11 - pr.m.unwrap() as i64;
            pq_half(m.pq(), k) * prod(&pr.t)
        }
    }
}

fn pq_half<T: Real>(pq: Cx<T>, k: i64) -> Cx<T> {
    if k % 2 == 0 {
        cx::powi(pq, k / 2)
    } else {
        cx::powi(cx::sqrt(pq), k)
    }
}

/// Inequality checklist of the family, each with its margin.
pub fn validate_domain<T: Real>(spec: &IntegrandSpec<T>) -> ValidationResult {
    let mut v = ValidationResult::default();
    if let Err(e) = check_counts(spec) {
        v.push(format!("{e}"), -1.0);
        return v;
    }
    let pr = &spec.params;
    let pq = cx::mag(spec.moduli.pq());
    let a = cx::mag(derived_a(spec));
    let lt = lows(&pr.t);
    match spec.family {
        Family::E | Family::CnI => {
            v.inside_unit("t", &lt);
            v.push("|pq| < |A|".into(), a - pq);
        }
        Family::CnII => {
            v.inside_unit("t", &lt);
            v.push("|t| < 1".into(), 1.0 - cx::mag(pr.tt.unwrap()));
            v.push("|pq| < |B|".into(), a - pq);
        }
        Family::CnIII => {
            let t = cx::mag(pr.tt.unwrap());
            v.inside_unit("t", &lt);
            v.inside_unit("x", &lows(&pr.x));
            for (i, x) in pr.x.iter().enumerate() {
                v.push(format!("|t| < |x{i}|"), cx::mag(*x) - t);
            }
            v.push("|pq| < |A|".into(), a - pq);
        }
        Family::AnI => {
            v.inside_unit("t", &lt);
            v.inside_unit("f", &lows(&pr.f));
            v.push("|pq| < |AB|".into(), a - pq);
        }
        Family::AnII => {
            v.inside_unit("t", &lt);
            v.push("|t| < 1".into(), 1.0 - cx::mag(pr.tt.unwrap()));
            v.push("|s| < 1".into(), 1.0 - cx::mag(pr.ss.unwrap()));
            v.push("|pq| < |(ts)^(n-1) T|".into(), a - pq);
        }
        Family::AnIII => {
            let n = spec.n;
            let tt = pr.tt.unwrap();
            v.inside_unit("t", &lt[..n + 1]);
            let tk: Vec<C64> = pr.t[n + 1..].iter().map(|&x| cx::lower(tt * x)).collect();
            v.inside_unit("t*t", &tk);
            v.push("|t| < 1".into(), 1.0 - cx::mag(tt));
            v.push("|pq| < |A|".into(), a - pq);
        }
        Family::GenericVwp | Family::MinusA => {
            v.inside_unit("t", &lt);
            v.push("|pq| < |A|".into(), a - pq);
        }
    }
    v
}

fn rhs_closed_form<T: Real>(it: &Integrand<T>) -> Result<Cx<T>> {
    let spec = &it.spec;
    let pr = &spec.params;
    let g = &it.g;
    let n = spec.n;
    let ni = n as i64;
    let q = spec.moduli.q;
    let p = spec.moduli.p;
    let pc = poch(&spec.moduli)?;
    let pc_n = cx::powi(pc, ni);
    let a = it.a;
    match spec.family {
        Family::E => n_e(&pr.t, g),
        Family::CnI => {
            let t = &pr.t;
            let num: Vec<_> = pairs(t.len()).map(|(i, j)| t[i] * t[j]).collect();
            let den: Vec<_> = t.iter().map(|&x| a / x).collect();
            let c = T::from_f64(libm::pow(2.0, n as f64) * factorial(n));
            Ok(g.ratio(&num, &den)? * c / pc_n)
        }
        Family::CnII => {
            let t = &pr.t;
            let tt = pr.tt.unwrap();
            let mut num = Vec::new();
            let mut den = Vec::new();
            for j in 1..=ni {
                num.push(cx::powi(tt, j));
                den.push(tt);
                let tj = cx::powi(tt, j - 1);
                num.extend(pairs(5).map(|(r, s)| tj * t[r] * t[s]));
                den.extend(t.iter().map(|&x| cx::powi(tt, 1 - j) * a / x));
            }
            let c = T::from_f64(libm::pow(2.0, n as f64) * factorial(n));
            Ok(g.ratio(&num, &den)? * c / pc_n)
        }
        Family::CnIII => {
            let t = &pr.t;
            let tt = pr.tt.unwrap();
            let x = &pr.x;
            let mut num = vec![tt; n];
            let mut den = Vec::new();
            for i in 1..=ni {
                let xi = x[(i - 1) as usize];
                let qi = cx::powi(q, i - 1);
                num.extend(pairs(3).map(|(r, s)| t[r] * t[s] * qi));
                den.push(a / xi);
                den.push(a * xi / tt);
                for &tk in t.iter() {
                    num.push(xi * tk);
                    num.push(tt * tk / xi);
                    den.push(a / (qi * tk));
                }
            }
            let mut v = g.ratio(&num, &den)?;
            for (i, j) in pairs(n) {
                v = v * x[j] * theta(x[i] / x[j], p)? * theta(tt / (x[i] * x[j]), p)?;
            }
            let c = T::from_f64(libm::pow(2.0, n as f64));
            Ok(v * c / pc_n)
        }
        Family::AnI => {
            let (t, f) = (&pr.t, &pr.f);
            let aa = prod(t);
            let b = prod(f);
            let mut num = vec![aa];
            num.extend(f.iter().map(|&x| b / x));
            for &tk in t {
                num.extend(f.iter().map(|&fj| tk * fj));
            }
            let mut den: Vec<_> = t.iter().map(|&tk| tk * b).collect();
            den.extend(f.iter().map(|&fj| aa * b / fj));
            Ok(g.ratio(&num, &den)? * T::from_f64(factorial(n + 1)) / pc_n)
        }
        Family::AnII => Ok(an2_rhs(g, n, pr.tt.unwrap(), pr.ss.unwrap(), &pr.t)? * T::from_f64(factorial(n + 1)) / pc_n),
        Family::AnIII => Ok(an3_rhs(g, n, pr.tt.unwrap(), &pr.t)? * T::from_f64(factorial(n + 1)) / pc_n),
        Family::GenericVwp | Family::MinusA => Err(Error::UnsupportedFamily(spec.family.name())),
    }
}

fn an2_rhs<T: Real>(g: &GammaEval<T>, n: usize, t: Cx<T>, s: Cx<T>, tk: &[Cx<T>]) -> Result<Cx<T>> {
    let pw = cx::powi::<T>;
    let big_t = prod(tk);
    let (t1, t2, t3, t4, t5) = (tk[0], tk[1], tk[2], tk[3], tk[4]);
    let t123 = t1 * t2 * t3;
    let ts = t * s;
    let pr3 = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut num = Vec::new();
    let mut den = Vec::new();
    if n % 2 == 1 {
        let m = n.div_ceil(2) as i64;
        num.extend([pw(t, m), pw(s, m), pw(s, m - 1) * t4 * t5]);
        num.extend(pr3.iter().map(|&(i, j)| pw(t, m - 1) * tk[i] * tk[j]));
        den.extend([3, 4].iter().map(|&k| pw(t, 2 * m - 2) * pw(s, m - 1) * t123 * tk[k]));
        for j in 1..=m {
            for i in 0..3 {
                for k in [3, 4] {
                    num.push(pw(ts, j - 1) * tk[i] * tk[k]);
                }
            }
            den.extend(pr3.iter().map(|&(i, l)| pw(ts, m + j - 2) * tk[i] * tk[l] * t4 * t5));
        }
        for j in 1..m {
            num.push(pw(ts, j));
            num.push(pw(t, j) * pw(s, j - 1) * t4 * t5);
            num.extend(pr3.iter().map(|&(i, l)| pw(t, j - 1) * pw(s, j) * tk[i] * tk[l]));
            den.extend([3, 4].iter().map(|&k| pw(t, m + j - 2) * pw(s, m + j - 1) * t123 * tk[k]));
        }
    } else {
        let m = (n / 2) as i64;
        num.extend((0..3).map(|i| pw(t, m) * tk[i]));
        num.extend([3, 4].iter().map(|&k| pw(s, m) * tk[k]));
        num.push(pw(t, m - 1) * t123);
        den.push(pw(t, 2 * m - 1) * pw(s, m - 1) * big_t);
        den.push(pw(t, 2 * m - 1) * pw(s, m) * t123);
        for j in 1..=m {
            num.push(pw(ts, j));
            num.push(pw(t, j) * pw(s, j - 1) * t4 * t5);
            for i in 0..3 {
                for k in [3, 4] {
                    num.push(pw(ts, j - 1) * tk[i] * tk[k]);
                }
            }
            den.extend([3, 4].iter().map(|&k| pw(t, m + j - 2) * pw(s, m + j - 1) * big_t / tk[k]));
            num.extend(pr3.iter().map(|&(i, l)| pw(t, j - 1) * pw(s, j) * tk[i] * tk[l]));
            den.extend(pr3.iter().map(|&(i, l)| pw(ts, m + j - 1) * tk[i] * tk[l] * t4 * t5));
        }
    }
    g.ratio(&num, &den)
}

fn an3_rhs<T: Real>(g: &GammaEval<T>, n: usize, t: Cx<T>, tk: &[Cx<T>]) -> Result<Cx<T>> {
    let pw = cx::powi::<T>;
    // Π_{k=a}^{b} t_k with 1-based bounds
    let pp = |a: usize, b: usize| prod(&tk[a - 1..b]);
    let mut num = Vec::new();
    let mut den = Vec::new();
    if n % 2 == 1 {
        let l = n.div_ceil(2) as i64;
        let ll = 2 * l as usize;
        let all = pp(1, ll + 3);
        num.extend([pw(t, l), pp(1, ll)]);
        den.push(pw(t, l) * pp(1, ll));
        for i in 0..ll {
            for j in ll..ll + 3 {
                num.push(t * tk[i] * tk[j]);
            }
        }
        num.extend(pairs(ll).map(|(i, j)| t * tk[i] * tk[j]));
        num.extend(pairs(3).map(|(i, j)| pw(t, l + 1) * tk[ll + i] * tk[ll + j]));
        den.extend((0..ll).map(|i| pw(t, 2 * l + 1) * all / tk[i]));
        den.extend((ll..ll + 3).map(|i| pw(t, l + 1) * all / tk[i]));
    } else {
        let l = (n / 2) as i64;
        let ll = 2 * l as usize + 1;
        num.extend([pp(1, ll), pw(t, l + 2) * pp(ll + 1, ll + 3)]);
        den.push(pw(t, l + 2) * pp(1, ll + 3));
        for i in 0..ll {
            for j in ll..ll + 3 {
                num.push(t * tk[i] * tk[j]);
            }
        }
        num.extend(pairs(ll).map(|(i, j)| t * tk[i] * tk[j]));
        num.extend((ll..ll + 3).map(|i| pw(t, l + 1) * tk[i]));
        den.extend((0..ll).map(|i| pw(t, 2 * l + 2) * pp(1, ll + 3) / tk[i]));
        den.extend((ll..ll + 3).map(|i| pw(t, l + 1) * tk[i] * pp(1, ll)));
    }
    g.ratio(&num, &den)
}

fn spec_for<T: Real>(family: Family, n: usize, params: ParamSet<T>, m: &Moduli<T>) -> IntegrandSpec<T> {
    IntegrandSpec { family, n, params, moduli: *m }
}

/// `Δ_E(z)` without the measure.
pub fn delta_e<T: Real>(z: Cx<T>, t: &[Cx<T>], m: &Moduli<T>) -> Result<Cx<T>> {
    Integrand::new(spec_for(Family::E, 1, ParamSet::with_t(t.to_vec()), m))?.eval(&[z])
}

/// Pointwise value of any family at its free variables.
pub fn delta<T: Real>(spec: &IntegrandSpec<T>, z: &[Cx<T>]) -> Result<Cx<T>> {
    Integrand::new(spec.clone())?.eval(z)
}

/// The very-well-poised integrand for general `ρ` and `γ`, with its `A`.
pub fn generic_vwp_integrand<T: Real>(
    z: Cx<T>,
    m_index: usize,
    t: &[Cx<T>],
    rho: Cx<T>,
    gamma: Cx<T>,
    m: &Moduli<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    let params = ParamSet { t: t.to_vec(), rho: Some(rho), gamma: Some(gamma), m: Some(m_index), ..Default::default() };
    let it = Integrand::new(spec_for(Family::GenericVwp, 1, params, m))?;
    Ok((it.eval(&[z])?, it.a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::{cx, rel_err};

    fn mods() -> Moduli<f64> {
        Moduli::new(cx(0.31, 0.0), cx(0.23, 0.0)).unwrap()
    }

    fn ts() -> Vec<Cx<f64>> {
        vec![cx(0.6, 0.2), cx(-0.5, 0.4), cx(0.7, -0.1), cx(0.1, 0.75), cx(-0.65, -0.3)]
    }

    #[test]
    fn delta_e_symmetries() {
        let m = mods();
        let z = cx::expi(0.7);
        let a = delta_e(z, &ts(), &m).unwrap();
        assert!(rel_err(delta_e(cx::inv(z), &ts(), &m).unwrap(), a) < 1e-13);
        assert!(rel_err(delta_e(z, &ts(), &m.swapped()).unwrap(), a) < 1e-13);
    }

    #[test]
    fn vwp_m13_is_delta_e() {
        let m = mods();
        let z = cx::expi(1.1);
        let (v, a) = generic_vwp_integrand(z, 13, &ts(), m.pq(), cx(0.0, 0.0), &m).unwrap();
        assert!(rel_err(v, delta_e(z, &ts(), &m).unwrap()) < 1e-12);
        assert!(rel_err(a, prod(&ts())) < 1e-15);
    }

    #[test]
    fn domain_margins() {
        let m: Moduli<f64> = Moduli::new(cx(0.3, 0.0), cx(0.3, 0.0)).unwrap();
        let spec = spec_for(Family::E, 1, ParamSet::with_t(vec![cx(0.5, 0.0); 5]), &m);
        let v = validate_domain(&spec);
        assert!(!v.pass());
        assert!((v.worst().unwrap().margin + 0.05875).abs() < 1e-15);
        let spec = spec_for(Family::E, 1, ParamSet::with_t(vec![cx(0.8, 0.0); 5]), &m);
        assert!(validate_domain(&spec).pass());
    }

    #[test]
    fn cn2_n1_matches_e() {
        let m = mods();
        let params = ParamSet { t: ts(), tt: Some(cx(0.4, 0.1)), ..Default::default() };
        let it = Integrand::new(spec_for(Family::CnII, 1, params, &m)).unwrap();
        let e = Integrand::new(spec_for(Family::E, 1, ParamSet::with_t(ts()), &m)).unwrap();
        assert!(rel_err(it.rhs().unwrap(), e.rhs().unwrap()) < 1e-14);
        let z = cx::expi(0.3);
        assert!(rel_err(it.eval(&[z]).unwrap(), e.eval(&[z]).unwrap()) < 1e-14);
    }

    #[test]
    fn minus_a_has_no_closed_form() {
        let m = mods();
        let params = ParamSet { t: ts(), m: Some(11), ..Default::default() };
        let it = Integrand::new(spec_for(Family::MinusA, 1, params, &m)).unwrap();
        assert!(matches!(it.rhs(), Err(Error::UnsupportedFamily(_))));
        assert!(it.eval(&[cx::expi(0.4)]).unwrap().norm() > 0.0);
    }
}
