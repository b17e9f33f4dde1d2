//! Periodic trapezoid rules on `T^n` with node doubling.
//!
//! All integrals use the normalized measure `Π dz_k / (2πi z_k)`, so the rule
//! is the plain mean over the grid `z_k = e^{2πi j_k / N}`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx, C64};
use crate::error::{Error, Result};
use crate::integrands::Integrand;
use crate::real::Real;
use crate::series::pairwise_sum;

pub const DEFAULT_MAX_NODES: u64 = 10_000_000;

/// Runs independent jobs `0..n` and returns their results in index order.
pub trait Executor: Sync {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R>;
}

/// Single-threaded executor.
#[derive(Clone, Copy, Debug, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R> {
        (0..n).map(f).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// `z_{n+1} = 1/(z_1⋯z_n)`, computed by the integrand.
    AnProductOne,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub nodes_per_dim: usize,
    pub max_doublings: u32,
    pub rel_tol: f64,
    /// Cap on the total number of integrand evaluations over all levels.
    pub max_nodes: u64,
}

impl QuadratureConfig {
    /// 128, 96 or 64 nodes per dimension for `n = 1`, `2`, `≥ 3`.
    pub fn for_dim(n: usize) -> Self {
        let nodes = match n {
            0 | 1 => 128,
            2 => 96,
            _ => 64,
        };
        QuadratureConfig { nodes_per_dim: nodes, max_doublings: 4, rel_tol: 1e-12, max_nodes: DEFAULT_MAX_NODES }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes_per_dim = nodes;
        self
    }

    fn check(&self) -> Result<()> {
        if self.nodes_per_dim < 8 {
            return Err(Error::InvalidParams("nodes_per_dim must be at least 8".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult<T: Real> {
    pub value: Cx<T>,
    /// `|I_{2N} − I_N|` of the last doubling.
    pub est_error: f64,
    /// Evaluations over all levels.
    pub nodes_used: u64,
    /// Nodes per dimension of the final level.
    pub nodes_per_dim: usize,
    pub dim: usize,
    pub converged: bool,
}

impl<T: Real> QuadratureResult<T> {
    pub fn lower(&self) -> C64 {
        cx::lower(self.value)
    }
}

/// Nodes `e^{2πik/N}`, `k = 0..N`.
pub fn roots_of_unity<T: Real>(n: usize) -> Vec<Cx<T>> {
    let two_pi = T::pi() * T::from_f64(2.0);
    (0..n)
        .map(|k| {
            if (4 * k) % n == 0 {
                // exact quarter turns
                return match (4 * k) / n {
                    0 => Cx::new(T::one(), T::zero()),
                    1 => Cx::new(T::zero(), T::one()),
                    2 => Cx::new(-T::one(), T::zero()),
                    _ => Cx::new(T::zero(), -T::one()),
                };
            }
            let a = two_pi * T::from_i64(k as i64) / T::from_i64(n as i64);
            Cx::new(a.cos(), a.sin())
        })
        .collect()
}

fn pow_u64(n: usize, d: usize) -> Option<u64> {
    (n as u64).checked_pow(d as u32)
}

/// Doubling driver: `level(N)` returns the rule at `N` nodes per dimension.
fn doubling<T: Real>(
    dim: usize,
    cfg: &QuadratureConfig,
    mut level: impl FnMut(usize) -> Result<Cx<T>>,
) -> Result<QuadratureResult<T>> {
    cfg.check()?;
    let first = pow_u64(cfg.nodes_per_dim, dim).unwrap_or(u64::MAX);
    if first > cfg.max_nodes {
        return Err(Error::ResourceLimit { requested: first, limit: cfg.max_nodes });
    }
    let mut n = cfg.nodes_per_dim;
    let mut used = first;
    let mut prev = level(n)?;
    let mut est = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        let next_n = n * 2;
        let cost = pow_u64(next_n, dim).unwrap_or(u64::MAX);
        if used.saturating_add(cost) > cfg.max_nodes {
            break;
        }
        let v = level(next_n)?;
        used += cost;
        est = cx::mag(v - prev);
        n = next_n;
        prev = v;
        if est <= cfg.rel_tol * cx::mag(v) {
            break;
        }
    }
    let converged = est <= cfg.rel_tol * cx::mag(prev);
    Ok(QuadratureResult { value: prev, est_error: est, nodes_used: used, nodes_per_dim: n, dim, converged })
}

/// `(1/2πi) ∮ f(z) dz/z` on the unit circle.
pub fn circle_integral<T: Real, F>(f: F, cfg: &QuadratureConfig, exec: &impl Executor) -> Result<QuadratureResult<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    circle_integral_at(f, 1.0, cfg, exec)
}

/// Same over `|z| = radius`.
pub fn circle_integral_at<T: Real, F>(f: F, radius: f64, cfg: &QuadratureConfig, exec: &impl Executor) -> Result<QuadratureResult<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    let r = T::from_f64(radius);
    doubling(1, cfg, |n| {
        let mut w = roots_of_unity::<T>(n);
        if radius != 1.0 {
            w.iter_mut().for_each(|z| *z *= r);
        }
        let vals = exec.map(n, |k| f(w[k]));
        mean(vals, n as u64)
    })
}

fn mean<T: Real>(vals: Vec<Result<Cx<T>>>, count: u64) -> Result<Cx<T>> {
    let v: Vec<Cx<T>> = vals.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&v) / T::from_f64(count as f64))
}

/// Mean over `T^n` of `f`, parallel over the outermost index only.
pub fn torus_integral<T: Real, F>(
    f: F,
    n: usize,
    cfg: &QuadratureConfig,
    _constraint: Constraint,
    exec: &impl Executor,
) -> Result<QuadratureResult<T>>
where
    F: Fn(&[Cx<T>]) -> Result<Cx<T>> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidParams("torus dimension must be positive".into()));
    }
    doubling(n, cfg, |nn| {
        let w = roots_of_unity::<T>(nn);
        let outer = exec.map(nn, |k0| -> Result<Cx<T>> {
            let mut idx = vec![0usize; n];
            idx[0] = k0;
            let mut z = vec![w[k0]; n];
            let mut acc = Vec::with_capacity(pow_u64(nn, n - 1).unwrap_or(0) as usize);
            loop {
                for d in 1..n {
                    z[d] = w[idx[d]];
                }
                acc.push(f(&z)?);
                if !advance(&mut idx[1..], nn) {
                    break;
                }
            }
            Ok(pairwise_sum(&acc))
        });
        mean(outer, pow_u64(nn, n).unwrap())
    })
}

fn advance(idx: &mut [usize], n: usize) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < n {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// Lookup tables of one grid level for a factorized integrand.
struct Tables<T: Real> {
    n: usize,
    single: Vec<Vec<Cx<T>>>,
    diff: Vec<Cx<T>>,
    sum: Option<Vec<Cx<T>>>,
}

fn build_tables<T: Real>(it: &Integrand<T>, n: usize, exec: &impl Executor) -> Result<Tables<T>> {
    let w = roots_of_unity::<T>(n);
    let vars = it.vars();
    let single = (0..vars)
        .map(|v| exec.map(n, |k| it.single(v, w[k])).into_iter().collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let diff = if vars > 1 {
        exec.map(n, |k| it.pair_diff(w[k])).into_iter().collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let sum = if it.has_pair_sum() {
        Some(exec.map(n, |k| it.pair_sum(w[k])).into_iter().collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(Tables { n, single, diff, sum })
}

impl<T: Real> Tables<T> {
    fn value(&self, idx: &[usize]) -> Cx<T> {
        let n = self.n;
        let mut v = Cx::<T>::one();
        for (var, &k) in idx.iter().enumerate() {
            v *= self.single[var][k];
        }
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                v *= self.diff[(idx[i] + n - idx[j]) % n];
                if let Some(s) = &self.sum {
                    v *= s[(idx[i] + idx[j]) % n];
                }
            }
        }
        v
    }
}

/// Torus average of a family integrand using per-variable and per-pair
/// lookup tables; agrees with [`torus_integral`] on `it.eval`.
pub fn integrate<T: Real>(it: &Integrand<T>, cfg: &QuadratureConfig, exec: &impl Executor) -> Result<QuadratureResult<T>> {
    let dim = it.dim();
    let an = it.family().is_an();
    doubling(dim, cfg, |nn| {
        let tab = build_tables(it, nn, exec)?;
        let outer = exec.map(nn, |k0| {
            let mut free = vec![0usize; dim];
            free[0] = k0;
            let mut full = vec![0usize; it.vars()];
            let mut acc = Vec::new();
            loop {
                full[..dim].copy_from_slice(&free);
                if an {
                    let s: usize = free.iter().sum();
                    full[dim] = (nn - s % nn) % nn;
                }
                acc.push(tab.value(&full));
                if !advance(&mut free[1..], nn) {
                    break;
                }
            }
            pairwise_sum(&acc)
        });
        Ok(pairwise_sum(&outer) / T::from_f64(pow_u64(nn, dim).unwrap() as f64))
    })
}

/// Circle rule for an integrand with `f(z) = f(1/z)`, using only the upper
/// half circle.
pub fn half_circle_integral<T: Real, F>(f: F, n: usize) -> Result<Cx<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>>,
{
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::InvalidParams("half-circle rule needs an even node count".into()));
    }
    let w = roots_of_unity::<T>(n);
    let mut terms = vec![f(w[0])?, f(w[n / 2])?];
    for k in 1..n / 2 {
        terms.push(f(w[k])? * T::from_f64(2.0));
    }
    Ok(pairwise_sum(&terms) / T::from_f64(n as f64))
}

/// `(1/2πi) ∮ f(z) dz/z` over a small positively oriented circle.
pub fn small_circle<T: Real, F>(f: &F, center: C64, radius: f64, nodes: usize) -> Result<Cx<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let c: Cx<T> = cx::lift(center);
    let r = T::from_f64(radius);
    let w = roots_of_unity::<T>(nodes);
    let mut terms = Vec::with_capacity(nodes);
    for &u in &w {
        let d = u * r;
        let z = c + d;
        terms.push(f(z)? * d / z);
    }
    Ok(pairwise_sum(&terms) / T::from_f64(nodes as f64))
}

/// Contour correction for poles on the wrong side of the circle `|z| = circle`.
///
/// `include` are points of inner pole sequences lying outside it;
/// `exclude` are points of outer sequences lying inside. Each gets a small
/// circle of radius `0.4` times its distance to the nearest point in
/// `neighbours` (other than itself), to the main circle or to `0`, whichever
/// is smallest.
pub fn residue_correction<T: Real, F>(
    f: &F,
    include: &[C64],
    exclude: &[C64],
    neighbours: &[C64],
    circle: f64,
    nodes: usize,
) -> Result<Cx<T>>
where
    F: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let radius = |c: C64| -> f64 {
        let mut d = c.norm().min((c.norm() - circle).abs());
        for &o in neighbours {
            let e = (o - c).norm();
            if e > 1e-12 * (1.0 + c.norm()) {
                d = d.min(e);
            }
        }
        0.4 * d
    };
    let mut total = Cx::<T>::zero();
    for &c in include {
        total += small_circle(f, c, radius(c), nodes)?;
    }
    for &c in exclude {
        total -= small_circle(f, c, radius(c), nodes)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::cx;

    #[test]
    fn monomials() {
        let cfg = QuadratureConfig::for_dim(1).with_nodes(16);
        let one = circle_integral(|_z: Cx<f64>| Ok(cx(1.0, 0.0)), &cfg, &Serial).unwrap();
        assert_eq!(one.value, cx(1.0, 0.0));
        for k in 1..16 {
            let r = circle_integral(|z: Cx<f64>| Ok(cx::powi(z, k)), &cfg.with_tol(1.0), &Serial).unwrap();
            assert!(r.value.norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn torus_monomials() {
        let cfg = QuadratureConfig::for_dim(2).with_nodes(8).with_tol(1.0);
        let one = torus_integral(|_z: &[Cx<f64>]| Ok(cx(1.0, 0.0)), 2, &cfg, Constraint::None, &Serial).unwrap();
        assert!((one.value - cx(1.0, 0.0)).norm() < 1e-15);
        let r = torus_integral(|z: &[Cx<f64>]| Ok(z[0] / z[1]), 2, &cfg, Constraint::None, &Serial).unwrap();
        assert!(r.value.norm() < 1e-15);
    }

    #[test]
    fn budget() {
        let cfg = QuadratureConfig { max_nodes: 100, ..QuadratureConfig::for_dim(2) };
        let r = torus_integral(|_z: &[Cx<f64>]| Ok(cx(1.0, 0.0)), 2, &cfg, Constraint::None, &Serial);
        assert!(matches!(r, Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn small_circle_residue() {
        // (1/2πi)∮ dz/(z (z − c)) around c is 1/c
        let c = C64::new(1.5, 0.5);
        let f = |z: Cx<f64>| Ok(cx::inv(z - cx::lift::<f64>(c)));
        let v = small_circle(&f, c, 0.3, 64).unwrap();
        assert!((v - cx::inv(cx::lift::<f64>(c))).norm() < 1e-14);
    }
}
