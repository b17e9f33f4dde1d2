use ehv_core::cx::{self, cx, rel_err, Cx};
use ehv_core::identities::*;
use ehv_core::quadrature::{QuadratureConfig, Serial};
use ehv_core::cx::lift;
use ehv_core::{Dd, Moduli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Cx<f64> {
    let r = rng.gen_range(lo..hi);
    cx::expi(rng.gen_range(0.0..core::f64::consts::TAU)) * r
}

fn many(rng: &mut ChaCha8Rng, n: usize) -> Vec<Cx<f64>> {
    (0..n).map(|_| polar(rng, 0.2, 2.0)).collect()
}

#[test]
fn theta_identities_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = [0f64; 4];
    for i in 0..1000 {
        let p = polar(&mut rng, 0.0, 0.5);
        let n = 1 + i % 3;
        let v = many(&mut rng, 4);
        worst[0] = worst[0].max(riemann_identity_residual(v[0], v[1], v[2], v[3], p).unwrap().relative());
        let (a, b) = (many(&mut rng, n), many(&mut rng, n));
        worst[1] = worst[1].max(partial_fraction_residual(&a, &b, polar(&mut rng, 0.2, 2.0), p).unwrap().relative());
        let t = many(&mut rng, n + 1);
        let mut z = many(&mut rng, n);
        z.push(cx::inv(z.iter().fold(cx(1.0, 0.0), |a, &b| a * b)));
        worst[2] = worst[2].max(id1_residual(&t, &z, polar(&mut rng, 0.2, 2.0), p).unwrap().relative());
        let f = many(&mut rng, n + 2);
        worst[3] = worst[3].max(id3_residual(&t, &f, p).unwrap().relative());
    }
    for (k, w) in worst.iter().enumerate() {
        assert!(*w <= 1e-12, "identity {k}: {w:e}");
    }
}

#[test]
fn partial_fractions_near_diagonal() {
    let p: Cx<f64> = cx(0.35, 0.1);
    let a = [cx(0.5, 0.3), cx(-0.6, 0.9), cx(1.2, -0.4)];
    let b: Vec<_> = a.iter().map(|&x| x * cx(1.0 + 1e-3, 0.0)).collect();
    let r = partial_fraction_residual(&a, &b, cx(0.8, 0.7), p).unwrap();
    assert!(r.relative() <= 1e-12, "{:e}", r.relative());
}

#[test]
fn krattenthaler_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let m: Moduli<Dd> = Moduli::new(cx(0.31, 0.05), cx(0.23, -0.1)).unwrap();
    let mut draw = || -> Cx<Dd> { lift(polar(&mut rng, 0.5, 1.5)) };
    for n in 1..=5 {
        let (a, b, c) = (draw(), draw(), draw());
        let x: Vec<_> = (0..n).map(|_| draw()).collect();
        let (l, r) = krattenthaler_det_sides(a, b, c, &x, &m).unwrap();
        assert!(rel_err(l, r) <= 1e-10, "n={n}: {:e}", rel_err(l, r));
        // X → λX with a → a/λ, b → b/λ, c → λ²c leaves both sides fixed
        let lam: Cx<Dd> = cx(0.8, 0.3);
        let xs: Vec<_> = x.iter().map(|&v| v * lam).collect();
        let (l2, r2) = krattenthaler_det_sides(a / lam, b / lam, c * lam * lam, &xs, &m).unwrap();
        assert!(rel_err(l2, r2) <= 1e-10);
        assert!(rel_err(l2, l) <= 1e-10);
    }
}

fn an_params(rng: &mut ChaCha8Rng, n: usize, m: &Moduli<f64>) -> (Vec<Cx<f64>>, Vec<Cx<f64>>) {
    loop {
        let t: Vec<_> = (0..=n).map(|_| polar(rng, 0.6, 0.85)).collect();
        let f: Vec<_> = (0..n + 2).map(|_| polar(rng, 0.6, 0.85)).collect();
        let ab = t.iter().chain(&f).fold(cx::<f64>(1.0, 0.0), |a, &b| a * b);
        if ab.norm() > 1.3 * m.pq().norm() {
            return (t, f);
        }
    }
}

#[test]
fn an_difference_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let m: Moduli<f64> = Moduli::new(cx(0.31, 0.0), cx(0.23, 0.0)).unwrap();
    for n in 1..=3 {
        let (t, f) = an_params(&mut rng, n, &m);
        let (r, _) = an_difference_residual(&t, &f, &m, Side::ClosedForm, &QuadratureConfig::for_dim(n), &Serial).unwrap();
        assert!(r.relative() <= 1e-12, "n={n}: {:e}", r.relative());
    }
    let (t, f) = loop {
        let (t, f) = an_params(&mut rng, 1, &m);
        if t.iter().chain(&f).fold(cx::<f64>(1.0, 0.0), |a, &b| a * b).norm() > 1.3 * m.p.norm() {
            break (t, f);
        }
    };
    let cfg = QuadratureConfig::for_dim(1).with_tol(1e-11);
    let (r, nodes) = an_difference_residual(&t, &f, &m, Side::Integral, &cfg, &Serial).unwrap();
    assert!(r.relative() <= 1e-8, "{:e}", r.relative());
    assert!(nodes > 0);
}

#[test]
fn an_transformation() {
    let m: Moduli<f64> = Moduli::new(cx(0.31, 0.0), cx(0.23, 0.0)).unwrap();
    let cfg = QuadratureConfig::for_dim(1).with_tol(1e-11);
    let t: Cx<f64> = cx(0.8, 0.1);
    let f = [cx(0.7, 0.2), cx(-0.6, 0.5), cx(0.3, -0.75)];
    let s = [cx(0.75, -0.3), cx(0.1, 0.8), cx(-0.7, -0.2)];
    let same = an_transformation_sides(t, &f, &f, &m, &cfg, &Serial).unwrap();
    assert!(rel_err(same.lhs, same.rhs) < 1e-12);
    let r = an_transformation_sides(t, &f, &s, &m, &cfg, &Serial).unwrap();
    assert!(rel_err(r.lhs, r.rhs) <= 1e-8, "{:e}", rel_err(r.lhs, r.rhs));
    let bad = [cx(1.0001, 0.0), f[1], f[2]];
    assert!(matches!(
        an_transformation_sides(t, &bad, &s, &m, &cfg, &Serial),
        Err(ehv_core::Error::DomainViolation(_))
    ));
}
