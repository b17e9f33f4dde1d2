use ehv_core::cx::{self, cx, rel_err, Cx};
use ehv_core::gamma::elliptic_gamma;
use ehv_core::integrands::*;
use ehv_core::quadrature::*;
use ehv_core::special::qpochhammer;
use ehv_core::{Moduli, TruncationPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn polar(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<Cx<f64>> {
    (0..n)
        .map(|_| {
            let r = rng.gen_range(lo..hi);
            cx::expi(rng.gen_range(0.0..core::f64::consts::TAU)) * r
        })
        .collect()
}

fn prod(z: &[Cx<f64>]) -> Cx<f64> {
    z.iter().fold(cx(1.0, 0.0), |a, &b| a * b)
}

fn mods() -> Moduli<f64> {
    Moduli::new(cx(0.31, 0.0), cx(0.23, 0.0)).unwrap()
}

fn check(family: Family, n: usize, params: ParamSet<f64>, tol: f64) -> f64 {
    let spec = IntegrandSpec { family, n, params, moduli: mods() };
    assert!(validate_domain(&spec).pass(), "{family:?} n={n} outside domain");
    let it = Integrand::new(spec).unwrap();
    let cfg = QuadratureConfig::for_dim(it.dim()).with_tol(tol);
    let r = integrate(&it, &cfg, &Serial).unwrap();
    let e = rel_err(r.value, it.rhs().unwrap());
    assert!(e <= tol, "{family:?} n={n}: rel_err {e:e}");
    e
}

#[test]
fn theorem1_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pq = 0.31 * 0.23;
    let mut done = 0;
    while done < 5 {
        let t = polar(&mut rng, 5, 0.3, 0.85);
        if prod(&t).norm() <= pq * 1.2 {
            continue;
        }
        check(Family::E, 1, ParamSet::with_t(t), 1e-9);
        done += 1;
    }
}

#[test]
fn rank_one_families_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = polar(&mut rng, 5, 0.6, 0.85);
    let tt = cx(0.4, 0.2);
    check(Family::CnI, 1, ParamSet::with_t(t.clone()), 1e-9);
    check(Family::CnII, 1, ParamSet { t: t.clone(), tt: Some(tt), ..Default::default() }, 1e-9);
    let f = polar(&mut rng, 3, 0.6, 0.85);
    check(Family::AnI, 1, ParamSet { t: t[..2].to_vec(), f, ..Default::default() }, 1e-9);
}

fn admissible(family: Family, n: usize, mut draw: impl FnMut() -> ParamSet<f64>) -> ParamSet<f64> {
    loop {
        let params = draw();
        let spec = IntegrandSpec { family, n, params: params.clone(), moduli: mods() };
        if validate_domain(&spec).worst().is_none_or(|c| c.margin > 0.01) {
            return params;
        }
    }
}

#[test]
fn rank_two_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = admissible(Family::CnIII, 2, || ParamSet {
        t: polar(&mut rng, 3, 0.6, 0.9),
        x: polar(&mut rng, 2, 0.7, 0.9),
        tt: Some(polar(&mut rng, 1, 0.3, 0.6)[0]),
        ..Default::default()
    });
    check(Family::CnIII, 2, p, 1e-6);
    let p = admissible(Family::AnI, 2, || ParamSet { t: polar(&mut rng, 3, 0.7, 0.9), f: polar(&mut rng, 4, 0.7, 0.9), ..Default::default() });
    check(Family::AnI, 2, p, 1e-6);
    let p = admissible(Family::AnIII, 2, || ParamSet { t: polar(&mut rng, 6, 0.7, 0.9), tt: Some(polar(&mut rng, 1, 0.7, 0.9)[0]), ..Default::default() });
    check(Family::AnIII, 2, p, 1e-6);
}

#[test]
fn weyl_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let m = mods();
    let t = polar(&mut rng, 7, 0.5, 0.9);
    let it = Integrand::new(IntegrandSpec { family: Family::CnI, n: 2, params: ParamSet::with_t(t), moduli: m }).unwrap();
    for _ in 0..100 {
        let z = polar(&mut rng, 2, 0.95, 1.05);
        let v = it.eval(&z).unwrap();
        for w in [[z[1], z[0]], [cx::inv(z[0]), z[1]], [z[0], cx::inv(z[1])]] {
            assert!(rel_err(it.eval(&w).unwrap(), v) < 1e-12);
        }
    }
}

#[test]
fn cn3_is_not_symmetric_in_q_and_p() {
    let m = mods();
    let params = ParamSet {
        t: vec![cx(0.6, 0.2), cx(-0.5, 0.4), cx(0.7, -0.1)],
        x: vec![cx(0.8, 0.1), cx(-0.2, 0.75)],
        tt: Some(cx(0.3, 0.1)),
        ..Default::default()
    };
    let a = IntegrandSpec { family: Family::CnIII, n: 2, params, moduli: m };
    let b = IntegrandSpec { moduli: m.swapped(), ..a.clone() };
    let z = [cx::expi(0.4), cx::expi(2.1)];
    let e = rel_err(delta(&a, &z).unwrap(), delta(&b, &z).unwrap());
    assert!(e > 1e-3, "asymmetry only {e:e}");
}

#[test]
fn deterministic() {
    let t = vec![cx(0.6, 0.2), cx(-0.5, 0.4), cx(0.7, -0.1), cx(0.1, 0.75), cx(-0.65, -0.3)];
    let it = Integrand::new(IntegrandSpec { family: Family::E, n: 1, params: ParamSet::with_t(t), moduli: mods() }).unwrap();
    let cfg = QuadratureConfig::for_dim(1);
    let a = integrate(&it, &cfg, &Serial).unwrap();
    let b = integrate(&it, &cfg, &Serial).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.nodes_used, b.nodes_used);
}

#[test]
fn half_circle_matches_full() {
    let t = vec![cx(0.6, 0.2), cx(-0.5, 0.4), cx(0.7, -0.1), cx(0.1, 0.75), cx(-0.65, -0.3)];
    let m = mods();
    let f = |z: Cx<f64>| delta_e(z, &t, &m);
    let h = half_circle_integral(f, 256).unwrap();
    let full = circle_integral(f, &QuadratureConfig::for_dim(1).with_nodes(256).with_tol(1.0), &Serial).unwrap();
    assert!(rel_err(h, full.value) < 1e-13);
}

#[test]
fn p_to_zero_limit() {
    let m: Moduli<f64> = Moduli::new(cx(0.31, 0.0), cx(1e-10, 0.0)).unwrap();
    let t = vec![cx(0.6, 0.2), cx(-0.5, 0.4), cx(0.7, -0.1), cx(0.1, 0.75), cx(-0.65, -0.3)];
    let it = Integrand::new(IntegrandSpec { family: Family::E, n: 1, params: ParamSet::with_t(t.clone()), moduli: m }).unwrap();
    let r = integrate(&it, &QuadratureConfig::for_dim(1).with_tol(1e-8), &Serial).unwrap();
    assert!(rel_err(r.value, n_e_p0(&t, m.q).unwrap()) < 1e-6);
}

#[test]
fn gamma_at_p_zero_inverts_pochhammer() {
    let m: Moduli<f64> = Moduli::new(cx(0.31, 0.05), cx(0.0, 0.0)).unwrap();
    let pol = TruncationPolicy::for_real::<f64>();
    for z in [cx(0.3, 0.2), cx(-0.7, 0.1), cx(1.4, -0.6)] {
        let v = elliptic_gamma(z, &m, pol).unwrap() * qpochhammer(z, m.q, pol).unwrap();
        assert!((v - cx(1.0, 0.0)).norm() < 1e-13);
    }
}
