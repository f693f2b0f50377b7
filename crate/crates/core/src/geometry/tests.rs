use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::bodies::{construct_body, BodySpec};
use crate::rng::{stream, uniform_sphere};
use crate::{Matrix, Vector};

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

fn body(spec: &str) -> crate::Body {
    construct_body(&serde_json::from_str::<BodySpec>(spec).unwrap()).unwrap()
}

#[test]
fn haar_rotations_are_orthogonal_and_reproducible() {
    for n in [1, 2, 5, 16] {
        let u = haar_rotation(n, 3).unwrap();
        assert!(u.residual() <= ORTHO_TOL);
        assert_eq!(u, haar_rotation(n, 3).unwrap());
    }
    assert_ne!(haar_rotation(4, 3).unwrap(), haar_rotation(4, 4).unwrap());
    assert!(haar_rotation(0, 1).is_err());
}

#[test]
fn haar_first_column_is_centered() {
    let mut g = stream(9, "t", 0);
    let n = 3;
    let draws = 100_000;
    let (mut s, mut s2) = (0.0, 0.0);
    let mut dets = [0usize; 2];
    for _ in 0..draws {
        let u = Rotation::haar(&mut g, n);
        let x = u.matrix()[(0, 0)];
        s += x;
        s2 += x * x;
        dets[usize::from(u.matrix().determinant() > 0.0)] += 1;
    }
    let mean = s / draws as f64;
    let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
    assert!(mean.abs() <= 3.0 * se, "mean {mean} se {se}");
    // both components of O(n) are hit about equally often
    let frac = dets[1] as f64 / draws as f64;
    assert!((frac - 0.5).abs() <= 3.0 * (0.25 / draws as f64).sqrt());
}

#[test]
fn haar_left_invariance() {
    // ⟨U e₁, w⟩ and ⟨V U e₁, w⟩ have the same law; compare means of squares
    let n = 4;
    let mut g = stream(10, "t", 0);
    let vfix = Rotation::haar(&mut g, n);
    let w = uniform_sphere(&mut g, n);
    let draws = 50_000;
    let stat = |rot: &dyn Fn(&Rotation) -> Matrix, label: &str| {
        let mut r = stream(11, label, 0);
        let xs: Vec<f64> = (0..draws)
            .map(|_| {
                let u = Rotation::haar(&mut r, n);
                let m = rot(&u);
                let col = m.column(0).into_owned();
                let t = col.dot(&w);
                t * t
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64;
        (mean, var / draws as f64)
    };
    let (m1, v1) = stat(&|u| u.matrix().clone(), "a");
    let (m2, v2) = stat(&|u| vfix.matrix() * u.matrix(), "b");
    assert!((m1 - m2).abs() <= 3.0 * (v1 + v2).sqrt(), "{m1} {m2}");
    assert!((m1 - 0.25).abs() <= 3.0 * v1.sqrt());
}

#[test]
fn rotation_validation_and_serde() {
    assert!(matches!(
        Rotation::new(Matrix::from_row_slice(2, 2, &[1.0, 1e-8, 0.0, 1.0])),
        Err(crate::Error::NotOrthogonal(_))
    ));
    let u = haar_rotation(3, 1).unwrap();
    let back: Rotation = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
    assert_eq!(u, back);
}

#[test]
fn subspaces() {
    let full = random_subspace(4, 4, 2).unwrap();
    assert!(full.gram_residual() <= ORTHO_TOL);
    assert!(Rotation::new(full.frame().clone()).is_ok());
    assert!(random_subspace(3, 4, 1).is_err());
    assert_eq!(random_subspace(5, 2, 8).unwrap(), random_subspace(5, 2, 8).unwrap());

    // squared length of the projection of e₁ onto a random line in R³
    let mut g = stream(12, "t", 0);
    let draws = 100_000;
    let e1 = v(&[1.0, 0.0, 0.0]);
    let xs: Vec<f64> = (0..draws)
        .map(|_| Subspace::random(&mut g, 3, 1).unwrap().coords(&e1).norm_squared())
        .collect();
    let mean = xs.iter().sum::<f64>() / draws as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64;
    assert!((mean - 1.0 / 3.0).abs() <= 3.0 * (var / draws as f64).sqrt());

    let s = Subspace::coordinate(3, &[0, 2]).unwrap();
    let back: Subspace = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(s, back);
}

#[test]
fn geodesic_examples() {
    assert_abs_diff_eq!(geodesic_distance(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), FRAC_PI_2);
    let x = v(&[0.6, 0.0, 0.8]);
    assert_abs_diff_eq!(geodesic_distance(&x, &-&x).unwrap(), PI, epsilon = 1e-15);
    let y = v(&[0.3f64.cos(), 0.3f64.sin(), 0.0]);
    assert_abs_diff_eq!(geodesic_distance(&v(&[1.0, 0.0, 0.0]), &y).unwrap(), 0.3, epsilon = 1e-15);
    assert!(geodesic_distance(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])).is_err());
    assert!(geodesic_distance(&v(&[1.0 + 1e-9, 0.0]), &v(&[1.0, 0.0])).is_ok());
    assert!(geodesic_distance(&v(&[1.1, 0.0]), &v(&[1.0, 0.0])).is_err());
}

#[test]
fn spherical_projection_examples() {
    let x = v(&[0.6, 0.8]);
    assert_eq!(spherical_projection(&x, 2).unwrap(), x);
    let p = spherical_projection(&v(&[0.6, 0.0, 0.8]), 2).unwrap();
    assert_abs_diff_eq!(p[0], 1.0);
    assert_abs_diff_eq!(p[1], 0.0);
    assert!(matches!(
        spherical_projection(&v(&[0.0, 0.0, 1.0]), 2),
        Err(crate::Error::UndefinedProjection)
    ));
}

#[test]
fn projection_claim_on_symmetric_caps() {
    let mut g = stream(13, "t", 0);
    let caps = CapUnion::random_symmetric(&mut g, 3, 2, (0.1, 0.5));
    assert!(caps.is_symmetric());
    let a = SphereSet::Caps(caps);
    for _ in 0..100_000 {
        let x = uniform_sphere(&mut g, 5);
        let x1 = spherical_projection(&x, 3).unwrap();
        assert!(a.distance(&x1).unwrap() <= a.distance(&x).unwrap() + 1e-12);
    }
}

#[test]
fn embedded_cap_distance_matches_brute_force() {
    let mut g = stream(14, "t", 0);
    let caps = CapUnion::new(&[Cap { center: vec![1.0, 0.0], radius: 0.3 }]).unwrap();
    let a = SphereSet::Caps(caps);
    for _ in 0..200 {
        let x = uniform_sphere(&mut g, 3);
        let brute = (0..20_000)
            .map(|i| {
                let t = -0.3 + 0.6 * i as f64 / 19_999.0;
                v(&[t.cos(), t.sin(), 0.0]).dot(&x).clamp(-1.0, 1.0).acos()
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(a.distance(&x).unwrap(), brute, epsilon = 1e-4);
    }
}

#[test]
fn nets_cover() {
    let net = build_net(2, FRAC_PI_4, 1).unwrap();
    assert!(net.cardinality() <= 8, "{}", net.cardinality());
    assert!(net.resolution <= FRAC_PI_4 && net.exhaustive);
    // independent exhaustive check on the circle
    for i in 0..100_000 {
        let t = 2.0 * PI * i as f64 / 100_000.0;
        assert!(net.nearest(&v(&[t.cos(), t.sin()])).1 <= net.resolution + 1e-12);
    }
    for (n, delta) in [(3, 0.4), (4, 0.5), (6, 0.9)] {
        let net = build_net(n, delta, 2).unwrap();
        assert!(net.resolution <= delta && net.probe_max <= delta);
        assert!(net.within_volumetric_bound);
        let mut g = stream(15, "probe", n as u64);
        for _ in 0..10_000 {
            let d = net.nearest(&uniform_sphere(&mut g, n)).1;
            assert!(d <= delta, "n={n} d={d} N={} probe_max={}", net.cardinality(), net.probe_max);
        }
    }
    assert!(build_net(2, PI, 1).is_err());
    assert_eq!(build_net(3, 0.5, 4).unwrap(), build_net(3, 0.5, 4).unwrap());
    let s = serde_json::to_string(&build_net(2, 0.7, 1).unwrap()).unwrap();
    assert!(s.contains("\"points\""));
}

#[test]
fn lift_examples() {
    let p = Subspace::leading(3, 2).unwrap();
    let ball = body(r#"{"kind":"ball","dim":3}"#);
    let x = v(&[0.6, -0.8]);
    let w = lift_waist(&ball, &p, &x).unwrap();
    assert_abs_diff_eq!(w.g[0], 0.6, epsilon = 1e-9);
    assert_abs_diff_eq!(w.g[1], -0.8, epsilon = 1e-9);
    assert_abs_diff_eq!(w.g[2], 0.0, epsilon = 1e-9);

    let p1 = Subspace::leading(2, 1).unwrap();
    let cube = body(r#"{"kind":"cube","dim":2}"#);
    let w = lift_waist(&cube, &p1, &v(&[1.0])).unwrap();
    assert_abs_diff_eq!(w.g[0], 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(w.g[1], 0.0, epsilon = 1e-9);

    let k = body(r#"{"kind":"slab_intersection","slabs":[{"normal":[1,0],"width":1},{"normal":[-1,1],"width":0.5}]}"#);
    let w = lift_waist(&k, &p1, &v(&[1.0])).unwrap();
    assert_abs_diff_eq!(w.g[0], 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(w.g[1], 0.5, epsilon = 1e-8);
    assert_abs_diff_eq!(w.f[0], 0.89443, epsilon = 1e-5);
    assert_abs_diff_eq!(w.f[1], 0.44721, epsilon = 1e-5);
    let wm = lift_waist(&k, &p1, &v(&[-1.0])).unwrap();
    assert_eq!(wm.g, w.g.iter().map(|t| -t).collect::<Vec<_>>());

    let thin = body(r#"{"kind":"cube","dim":2,"half_width":0.5}"#);
    assert!(verify_projection_hypothesis(&thin, &p1, 100, 1).is_err());
    assert!(matches!(lift_waist(&thin, &p1, &v(&[1.0])), Err(crate::Error::Hypothesis { .. })));
}

#[test]
fn waist_containment_and_modulus() {
    let k = body(r#"{"kind":"ellipsoid","semiaxes":[1.2,1.0,0.7,2.0]}"#);
    let p = Subspace::leading(4, 2).unwrap();
    verify_projection_hypothesis(&k, &p, 1000, 3).unwrap();
    let mut g = stream(16, "t", 0);
    for _ in 0..2000 {
        let x = uniform_sphere(&mut g, 2);
        let w = lift_waist(&k, &p, &x).unwrap();
        let f = Vector::from_vec(w.f.clone());
        let gv = Vector::from_vec(w.g.clone());
        assert!(k.contains(&f) && gv.norm() >= 1.0 - 1e-9);
        assert!((p.coords(&gv) - &x).norm() <= 1e-8);
        let t = 1e-4 * g.random::<f64>();
        let (c, s) = (t.cos(), t.sin());
        let x2 = v(&[c * x[0] - s * x[1], s * x[0] + c * x[1]]);
        let g2 = Vector::from_vec(lift_waist(&k, &p, &x2).unwrap().g);
        assert!((g2 - &gv).norm() <= 0.1);
    }
}

#[test]
fn segment_cap_examples() {
    let y = v(&[1.0, 0.0]);
    let a = PI / 6.0;
    let z = v(&[a.cos(), a.sin()]);
    assert!(segment_cap_check(&y, &z, 0.5));
    assert_abs_diff_eq!(segment_distance(&y, &z), 0.5, epsilon = 1e-15);
    assert!(segment_cap_check(&y, &y, 0.01));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn segment_cap_property(seed in any::<u64>(), eps in 1e-6f64..0.999_999, n in 2usize..8, frac in 0.0f64..=1.0) {
        let mut g = stream(seed, "seg", 0);
        let y = uniform_sphere(&mut g, n);
        let mut w = uniform_sphere(&mut g, n);
        w -= &y * w.dot(&y);
        let w = w.normalize();
        let t = frac * eps.asin();
        let z = &y * t.cos() + &w * t.sin();
        prop_assert!(segment_cap_check(&y, &z, eps));
    }

    #[test]
    fn lifting_is_odd(seed in any::<u64>()) {
        let k = body(r#"{"kind":"cross_polytope","dim":3,"radius":2}"#);
        let p = Subspace::random(&mut stream(seed, "l", 0), 3, 2).unwrap();
        let x = uniform_sphere(&mut stream(seed, "l", 1), 2);
        let a = lift_waist(&k, &p, &x).unwrap();
        let b = lift_waist(&k, &p, &-&x).unwrap();
        for (s, t) in a.g.iter().zip(&b.g) {
            prop_assert_eq!(*s, -*t);
        }
    }
}
