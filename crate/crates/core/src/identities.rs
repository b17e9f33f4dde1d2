//! Theta-function identities, an elliptic determinant evaluation, and the
//! difference equation and symmetry transformation of the `A_n` integral.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cx::{self, Cx};
use crate::error::{Error, Result};
use crate::gamma::GammaEval;
use crate::integrands::{Family, Integrand, IntegrandSpec, ParamSet};
use crate::quadrature::{integrate, torus_integral, Constraint, Executor, QuadratureConfig};
use crate::real::Real;
use crate::series::Residual;
use crate::special::{theta, theta_factorial, theta_multi, Moduli};

fn prod<T: Real>(zs: &[Cx<T>]) -> Cx<T> {
    zs.iter().fold(Cx::one(), |a, &b| a * b)
}

fn nonzero<T: Real>(v: Cx<T>, what: &'static str) -> Result<Cx<T>> {
    if v.is_zero() || !cx::mag(v).is_finite() {
        Err(Error::DegenerateConfiguration(what))
    } else {
        Ok(v)
    }
}

/// `θ(xw, x/w, yz, y/z) − θ(xz, x/z, yw, y/w) − (y/w) θ(xy, x/y, wz, w/z)`.
pub fn riemann_identity_residual<T: Real>(x: Cx<T>, y: Cx<T>, z: Cx<T>, w: Cx<T>, p: Cx<T>) -> Result<Residual<T>> {
    let a = theta_multi(&[x * w, x / w, y * z, y / z], p)?;
    let b = theta_multi(&[x * z, x / z, y * w, y / w], p)?;
    let c = y / w * theta_multi(&[x * y, x / y, w * z, w / z], p)?;
    Ok(Residual::new(a - b - c, &[a, b, c]))
}

/// Partial fraction expansion of `Π θ(t/b_k) / Π θ(t/a_k)`, as left side
/// minus the sum over `r`.
pub fn partial_fraction_residual<T: Real>(a: &[Cx<T>], b: &[Cx<T>], t: Cx<T>, p: Cx<T>) -> Result<Residual<T>> {
    let n = a.len();
    if b.len() != n || n == 0 {
        return Err(Error::InvalidParams("a and b need the same positive length".into()));
    }
    let (pa, pb) = (prod(a), prod(b));
    let tab = nonzero(theta(pa / pb, p)?, "a_1⋯a_n = b_1⋯b_n")?;
    let mut lhs = Cx::one();
    for k in 0..n {
        lhs *= cx::div(theta(t / b[k], p)?, nonzero(theta(t / a[k], p)?, "t on a pole")?);
    }
    let mut parts = vec![lhs];
    let mut rhs = Cx::<T>::zero();
    for r in 0..n {
        let mut v = cx::div(theta(t * pa / (a[r] * pb), p)?, theta(t / a[r], p)? * tab);
        for j in 0..n {
            v *= theta(a[r] / b[j], p)?;
            if j != r {
                v = cx::div(v, nonzero(theta(a[r] / a[j], p)?, "a_r/a_j on the theta lattice")?);
            }
        }
        parts.push(v);
        rhs += v;
    }
    Ok(Residual::new(lhs - rhs, &parts))
}

/// Sum over `r` of the `A_n` kernel identity minus one; needs `Π z_k = 1`.
pub fn id1_residual<T: Real>(t: &[Cx<T>], z: &[Cx<T>], b: Cx<T>, p: Cx<T>) -> Result<Residual<T>> {
    let n1 = t.len();
    if z.len() != n1 {
        return Err(Error::InvalidParams("t and z need the same length".into()));
    }
    if cx::mag(prod(z) - Cx::one()) > 1e-12 {
        return Err(Error::ConstraintViolation("product of z must be 1".into()));
    }
    let a = prod(t);
    let ab = a * b;
    let ta = nonzero(theta(a, p)?, "theta(A) = 0")?;
    let mut parts = vec![Cx::<T>::one()];
    let mut sum = Cx::<T>::zero();
    for r in 0..n1 {
        let mut v = theta(b * t[r], p)? / ta;
        for j in 0..n1 {
            if j != r {
                v *= cx::div(theta(ab * t[j], p)?, nonzero(theta(t[r] / t[j], p)?, "t_r/t_j on the theta lattice")?);
            }
        }
        for &zk in z {
            v *= cx::div(theta(t[r] / zk, p)?, nonzero(theta(ab * zk, p)?, "ABz on the theta lattice")?);
        }
        parts.push(v);
        sum += v;
    }
    Ok(Residual::new(sum - Cx::one(), &parts))
}

/// `Π_j θ(AB/f_j) / Π_k θ(AB t_k)` minus its partial fraction sum.
pub fn id3_residual<T: Real>(t: &[Cx<T>], f: &[Cx<T>], p: Cx<T>) -> Result<Residual<T>> {
    let n1 = t.len();
    if f.len() != n1 + 1 {
        return Err(Error::InvalidParams("f needs one more entry than t".into()));
    }
    let ab = prod(t) * prod(f);
    let mut lhs = Cx::one();
    for k in 0..n1 + 1 {
        lhs *= theta(ab / f[k], p)?;
        if k < n1 {
            lhs = cx::div(lhs, nonzero(theta(ab * t[k], p)?, "ABt on the theta lattice")?);
        }
    }
    let mut parts = vec![lhs];
    let mut rhs = Cx::<T>::zero();
    for k in 0..n1 {
        let mut v = cx::inv(theta(ab * t[k], p)?);
        for &fj in f {
            v *= theta(t[k] * fj, p)?;
        }
        for j in 0..n1 {
            if j != k {
                v = cx::div(v, nonzero(theta(t[k] / t[j], p)?, "t_k/t_j on the theta lattice")?);
            }
        }
        parts.push(v);
        rhs += v;
    }
    Ok(Residual::new(lhs - rhs, &parts))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<T: Real>(mut m: Vec<Vec<Cx<T>>>) -> Cx<T> {
    let n = m.len();
    let mut d = Cx::<T>::one();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| cx::mag(m[i][c]).total_cmp(&cx::mag(m[j][c]))).unwrap();
        if m[piv][c].is_zero() {
            return Cx::zero();
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = cx::div(m[r][c], m[c][c]);
            for k in c..n {
                let s = f * m[c][k];
                m[r][k] -= s;
            }
        }
    }
    d
}

fn binom(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Determinant of `θ(aX_i, ac/X_i; p; q)_{n−j} / θ(bX_i, bc/X_i; p; q)_{n−j}`
/// and its product evaluation.
pub fn krattenthaler_det_sides<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, x: &[Cx<T>], m: &Moduli<T>) -> Result<(Cx<T>, Cx<T>)> {
    let n = x.len();
    let (p, q) = (m.p, m.q);
    let fac = |z: Cx<T>, k: usize| theta_factorial(z, p, q, k as i64);
    let mut mat = vec![vec![Cx::<T>::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let k = n - 1 - j;
            let den = fac(b * x[i], k)? * fac(b * c / x[i], k)?;
            if den.is_zero() {
                return Err(Error::PoleHit { at: cx::lower(x[i]) });
            }
            mat[i][j] = cx::div(fac(a * x[i], k)? * fac(a * c / x[i], k)?, den);
        }
    }
    let lhs = det(mat);
    let mut rhs = cx::powi(a, binom(n, 2)) * cx::powi(q, binom(n, 3));
    for i in 0..n {
        for j in i + 1..n {
            rhs = rhs * x[j] * theta(x[i] / x[j], p)? * theta(c / (x[i] * x[j]), p)?;
        }
    }
    for i in 1..=n {
        let num = fac(b / a, i - 1)? * fac(a * b * c * cx::powi(q, 2 * (n - i) as i64), i - 1)?;
        let den = fac(b * x[i - 1], n - 1)? * fac(b * c / x[i - 1], n - 1)?;
        if den.is_zero() {
            return Err(Error::PoleHit { at: cx::lower(x[i - 1]) });
        }
        rhs *= cx::div(num, den);
    }
    Ok((lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Integral,
    ClosedForm,
}

/// Both sides of a check evaluated by quadrature, with the total node count.
#[derive(Clone, Copy, Debug)]
pub struct Sides<T: Real> {
    pub lhs: Cx<T>,
    pub rhs: Cx<T>,
    pub nodes: u64,
}

/// `Σ_r c_r I_n(…, q t_r, …) − I_n(t, f)` for the `A_n` Type I integral.
pub fn an_difference_residual<T: Real>(
    t: &[Cx<T>],
    f: &[Cx<T>],
    m: &Moduli<T>,
    side: Side,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<(Residual<T>, u64)> {
    let n = t.len().checked_sub(1).filter(|&n| n >= 1).ok_or(Error::InvalidParams("need at least two t's".into()))?;
    if side == Side::Integral && n > 2 {
        return Err(Error::InvalidParams("integral side is limited to n <= 2".into()));
    }
    let p = m.p;
    let a = prod(t);
    let b = prod(f);
    let mut nodes = 0u64;
    let mut value = |ts: Vec<Cx<T>>| -> Result<Cx<T>> {
        let spec = IntegrandSpec { family: Family::AnI, n, params: ParamSet { t: ts, f: f.to_vec(), ..Default::default() }, moduli: *m };
        let v = crate::integrands::validate_domain(&spec);
        if side == Side::Integral && !v.pass() {
            let w = v.worst().unwrap();
            return Err(Error::DomainViolation(alloc::format!("{} (margin {:e})", w.label, w.margin)));
        }
        let it = Integrand::new(spec)?;
        match side {
            Side::ClosedForm => it.rhs(),
            Side::Integral => {
                let r = integrate(&it, cfg, exec)?;
                nodes += r.nodes_used;
                Ok(r.value)
            }
        }
    };
    let base = value(t.to_vec())?;
    let ta = nonzero(theta(a, p)?, "theta(A) = 0")?;
    let mut parts = vec![base];
    let mut sum = Cx::<T>::zero();
    for r in 0..=n {
        let mut c = theta(b * t[r], p)? / ta;
        for j in 0..=n {
            if j != r {
                c *= cx::div(theta(a * b * t[j], p)?, nonzero(theta(t[r] / t[j], p)?, "t_r/t_j on the theta lattice")?);
            }
        }
        let mut ts = t.to_vec();
        ts[r] *= m.q;
        let v = c * value(ts)?;
        parts.push(v);
        sum += v;
    }
    Ok((Residual::new(sum - base, &parts), nodes))
}

/// Both sides of the `f ↔ s` symmetry transformation of `A_n` integrals,
/// each by quadrature.
pub fn an_transformation_sides<T: Real>(
    t: Cx<T>,
    f: &[Cx<T>],
    s: &[Cx<T>],
    m: &Moduli<T>,
    cfg: &QuadratureConfig,
    exec: &impl Executor,
) -> Result<Sides<T>> {
    let n = f.len().checked_sub(2).filter(|&n| n >= 1).ok_or(Error::InvalidParams("f needs at least three entries".into()))?;
    if s.len() != f.len() {
        return Err(Error::InvalidParams("f and s need the same length".into()));
    }
    let g = GammaEval::new(m);
    let (b, sp) = (prod(f), prod(s));
    let tn = cx::powi(t, n as i64 + 1);
    let pq = cx::mag(m.pq());
    let mut worst = f64::INFINITY;
    for &z in f.iter().chain(s).chain(core::iter::once(&t)) {
        worst = worst.min(1.0 - cx::mag(z));
    }
    worst = worst.min(cx::mag(tn * b) - pq).min(cx::mag(tn * sp) - pq);
    if worst <= 0.0 {
        return Err(Error::DomainViolation(alloc::format!("transformation parameters outside the domain (margin {worst:e})")));
    }
    let side = |f: &[Cx<T>], s: &[Cx<T>], b: Cx<T>, sp: Cx<T>| -> Result<(Cx<T>, u64)> {
        let num: Vec<_> = f.iter().map(|&x| b / x).collect();
        let den: Vec<_> = f.iter().map(|&x| tn * b / x).collect();
        let pre = g.ratio(&num, &den)?;
        let integrand = |zf: &[Cx<T>]| -> Result<Cx<T>> {
            let mut z = zf.to_vec();
            z.push(cx::inv(prod(zf)));
            let mut v = Cx::<T>::one();
            for &zk in &z {
                let mut num: Vec<_> = f.iter().map(|&x| t * x / zk).collect();
                num.extend(s.iter().map(|&x| x * zk));
                v *= g.ratio(&num, &[tn * sp * zk, t * b / zk])?;
            }
            for i in 0..z.len() {
                for j in i + 1..z.len() {
                    v *= g.inv_pair(z[i] / z[j])?;
                }
            }
            Ok(v)
        };
        let r = torus_integral(integrand, n, cfg, Constraint::AnProductOne, exec)?;
        Ok((pre * r.value, r.nodes_used))
    };
    let (lhs, n1) = side(f, s, b, sp)?;
    let (rhs, n2) = side(s, f, sp, b)?;
    Ok(Sides { lhs, rhs, nodes: n1 + n2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::cx;

    #[test]
    fn riemann_trivial_cases() {
        let p = cx::<f64>(0.3, 0.1);
        let (x, y, z) = (cx(0.7, 0.2), cx(-0.4, 1.1), cx(0.9, -0.3));
        assert!(cx::mag(riemann_identity_residual(x, y, z, z, p).unwrap().value) < 1e-15);
        let r = riemann_identity_residual(x, y, z, cx(1.2, 0.5), cx(0.0, 0.0)).unwrap();
        assert!(cx::mag(r.value) < 1e-15);
    }

    #[test]
    fn determinant_of_permutation() {
        let o = cx::<f64>(1.0, 0.0);
        let z = cx::<f64>(0.0, 0.0);
        let m = vec![vec![z, o, z], vec![z, z, o], vec![o, z, z]];
        assert_eq!(det(m), o);
        let m = vec![vec![z, o], vec![o, z]];
        assert_eq!(det(m), -o);
    }

    #[test]
    fn kratt_rank_one() {
        let m: Moduli<f64> = Moduli::new(cx(0.3, 0.1), cx(0.2, -0.1)).unwrap();
        let (l, r) = krattenthaler_det_sides(cx(0.5, 0.2), cx(0.7, -0.1), cx(1.1, 0.3), &[cx(0.8, 0.4)], &m).unwrap();
        assert_eq!(l, cx(1.0, 0.0));
        assert!((r - cx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_fraction_degenerate() {
        let p = cx::<f64>(0.3, 0.0);
        let a = [cx(0.5, 0.1), cx(0.7, 0.2)];
        let r = partial_fraction_residual(&a, &a, cx(1.3, 0.4), p);
        assert!(matches!(r, Err(Error::DegenerateConfiguration(_))));
    }
}
