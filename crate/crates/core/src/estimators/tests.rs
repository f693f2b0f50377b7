use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};

use approx::{assert_abs_diff_eq, assert_relative_eq};

use super::*;
use crate::bodies::{construct_body, rotate_body, BodySpec};
use crate::geometry::{haar_rotation, Rotation, Subspace};
use crate::measure::{sigma_exact, SubsphereQuery};
use crate::{Matrix, Vector};

fn body(spec: &str) -> Body {
    construct_body(&serde_json::from_str::<BodySpec>(spec).unwrap()).unwrap()
}

fn rot2(phi: f64) -> Rotation {
    Rotation::new(Matrix::from_row_slice(2, 2, &[phi.cos(), -phi.sin(), phi.sin(), phi.cos()])).unwrap()
}

fn opt() -> OptimizerConfig {
    OptimizerConfig::default()
}

#[test]
fn sigma_body_examples() {
    assert_eq!(mc_sigma_body(&body(r#"{"kind":"ball","dim":3}"#), 0.1, 10_000, 1).unwrap().estimate, 1.0);
    assert_eq!(mc_sigma_body(&body(r#"{"kind":"point","dim":3}"#), 0.5, 10_000, 1).unwrap().estimate, 0.0);
    let seg = body(r#"{"kind":"subspace_ball","dim":3,"k":1}"#);
    let est = mc_sigma_body(&seg, 0.5, 1_000_000, 2).unwrap();
    let exact = sigma_exact(&SubsphereQuery::new(2, 0, 0.5f64.asin()).unwrap());
    assert_abs_diff_eq!(exact, 1.0 - 0.75f64.sqrt(), epsilon = 1e-14);
    assert!(est.z_score(exact) <= 3.0, "{est:?}");
    assert_eq!(est, mc_sigma_body(&seg, 0.5, 1_000_000, 2).unwrap());
}

#[test]
fn covering_examples() {
    let d = body(r#"{"kind":"ball","dim":3}"#);
    assert_eq!(covering_number_upper(&d, &d, &CoverParams::default()).unwrap().count, 1);
    let l = body(r#"{"kind":"cube","dim":1,"half_width":1}"#);
    let k = body(r#"{"kind":"cube","dim":1,"half_width":0.5}"#);
    assert_eq!(covering_number_upper(&l, &k, &CoverParams::default()).unwrap().count, 2);
    let d2 = body(r#"{"kind":"ball","dim":2}"#);
    let half = body(r#"{"kind":"ball","dim":2,"radius":0.5}"#);
    let c = covering_number_upper(&d2, &half, &CoverParams::default()).unwrap();
    assert_abs_diff_eq!(c.volumetric_bound.unwrap(), 25.0, epsilon = 1e-12);
    assert!(c.count <= 25 && c.count as f64 <= c.volumetric_bound.unwrap(), "{}", c.count);
    // every probe really is covered by some centre
    let mut g = crate::rng::stream(3, "t", 0);
    for _ in 0..2000 {
        let x = crate::rng::uniform_ball(&mut g, 2, 0.999);
        assert!(c.centers.iter().any(|cc| half.contains(&(&x - Vector::from_vec(cc.clone())))));
    }
}

#[test]
fn entropy_examples() {
    let d = body(r#"{"kind":"ball","dim":3}"#);
    assert_abs_diff_eq!(entropy_bound(&d, 1.0).unwrap(), 8.0, epsilon = 1e-12);
    assert_abs_diff_eq!(entropy_bound(&d, 1.0 - 0.75f64.sqrt()).unwrap(), 59.7128, epsilon = 1e-4);
    let big = entropy_bound(&d, 1e-9).unwrap();
    assert!(big.is_finite() && big > 1e9);
    assert!(entropy_bound(&d, 0.0).is_err());
}

#[test]
fn diameter_examples() {
    let d = body(r#"{"kind":"ball","dim":4}"#);
    let r = diameter_of_intersection(&d, &d, &haar_rotation(4, 1).unwrap(), &opt()).unwrap();
    assert_abs_diff_eq!(r.diameter, 2.0, epsilon = 1e-12);
    let c = body(r#"{"kind":"cube","dim":3}"#);
    let r = diameter_of_intersection(&c, &c, &Rotation::identity(3), &opt()).unwrap();
    assert_relative_eq!(r.diameter, 2.0 * 3f64.sqrt(), max_relative = 1e-9);
    assert!(r.upper_bracket.unwrap() >= r.diameter);
    let l1 = body(r#"{"kind":"cross_polytope","dim":2}"#);
    let r = diameter_of_intersection(&l1, &l1, &rot2(FRAC_PI_4), &opt()).unwrap();
    let want = 2.0 / (FRAC_PI_8.cos() + FRAC_PI_8.sin());
    assert_relative_eq!(r.diameter, want, max_relative = 1e-8);
    assert_abs_diff_eq!(r.diameter, 1.53073, epsilon = 1e-5);
    assert!(!r.truncation_active);
}

#[test]
fn inclusion_examples() {
    let d = body(r#"{"kind":"ball","dim":3}"#);
    let r = inclusion_radius(&d, &d, &haar_rotation(3, 2).unwrap(), &opt()).unwrap();
    assert_abs_diff_eq!(r.radius, 2.0, epsilon = 1e-12);
    let c = body(r#"{"kind":"cube","dim":3}"#);
    let r = inclusion_radius(&c, &c, &Rotation::identity(3), &opt()).unwrap();
    assert_abs_diff_eq!(r.radius, 2.0, epsilon = 1e-9);
    assert!(r.lower_bracket.unwrap() <= r.radius);
    let l1 = body(r#"{"kind":"cross_polytope","dim":2}"#);
    let r = inclusion_radius(&l1, &l1, &Rotation::identity(2), &opt()).unwrap();
    assert_abs_diff_eq!(r.radius, SQRT_2, epsilon = 1e-9);
}

#[test]
fn section_examples() {
    let c = body(r#"{"kind":"cube","dim":3}"#);
    let e = Subspace::coordinate(3, &[0, 1]).unwrap();
    assert_relative_eq!(section_diameter(&c, &e, &opt()).unwrap().diameter, 2.0 * SQRT_2, max_relative = 1e-9);
    let d = body(r#"{"kind":"ball","dim":5}"#);
    let e = crate::geometry::random_subspace(5, 3, 1).unwrap();
    assert_abs_diff_eq!(section_diameter(&d, &e, &opt()).unwrap().diameter, 2.0, epsilon = 1e-12);
    let el = body(r#"{"kind":"ellipsoid","semiaxes":[1,2,0.5]}"#);
    let e = Subspace::coordinate(3, &[1]).unwrap();
    assert_abs_diff_eq!(section_diameter(&el, &e, &opt()).unwrap().diameter, 4.0, epsilon = 1e-12);
}

#[test]
fn truncation_is_flagged() {
    let cyl = body(
        r#"{"kind":"truncated_cylinder","core":{"kind":"ball","dim":2,"radius":0.5},"extra_dim":2,"truncation":1000}"#,
    );
    let r = diameter_of_intersection(&cyl, &cyl, &Rotation::identity(4), &opt()).unwrap();
    assert!(r.truncation_active);
    let r = diameter_of_intersection(&cyl, &cyl, &haar_rotation(4, 3).unwrap(), &opt()).unwrap();
    assert!(!r.truncation_active && r.diameter < 100.0, "{r:?}");
}

#[test]
fn common_rotation_invariance() {
    let k = body(r#"{"kind":"cube","dim":3}"#);
    let l = body(r#"{"kind":"ellipsoid","semiaxes":[1.5,0.8,1.1]}"#);
    let u = haar_rotation(3, 7).unwrap();
    let v = haar_rotation(3, 8).unwrap();
    let vk = rotate_body(&k, v.matrix()).unwrap();
    let vl = rotate_body(&l, v.matrix()).unwrap();
    let vuvt = v.compose(&u).compose(&v.transpose());
    let a = diameter_of_intersection(&k, &l, &u, &opt()).unwrap().diameter;
    let b = diameter_of_intersection(&vk, &vl, &vuvt, &opt()).unwrap().diameter;
    assert_relative_eq!(a, b, max_relative = 1e-6);
    let a = inclusion_radius(&k, &l, &u, &opt()).unwrap().radius;
    let b = inclusion_radius(&vk, &vl, &vuvt, &opt()).unwrap().radius;
    assert_relative_eq!(a, b, max_relative = 1e-6);
}

#[test]
fn enlarging_bodies_is_monotone() {
    let k = body(r#"{"kind":"cross_polytope","dim":3}"#);
    let k2 = body(r#"{"kind":"cross_polytope","dim":3,"radius":1.3}"#);
    let l = body(r#"{"kind":"cube","dim":3,"half_width":0.6}"#);
    let u = haar_rotation(3, 9).unwrap();
    let small = diameter_of_intersection(&k, &l, &u, &opt()).unwrap().diameter;
    let large = diameter_of_intersection(&k2, &l, &u, &opt()).unwrap().diameter;
    assert!(large >= small * (1.0 - 1e-6));
    let small = inclusion_radius(&k, &l, &u, &opt()).unwrap().radius;
    let large = inclusion_radius(&k2, &l, &u, &opt()).unwrap().radius;
    assert!(large >= small * (1.0 - 1e-6));
}

#[test]
fn polar_duality_of_hull_radius() {
    let k = body(r#"{"kind":"cube","dim":3}"#);
    let l = body(r#"{"kind":"ellipsoid","semiaxes":[1.5,0.8,1.1]}"#);
    let u = haar_rotation(3, 4).unwrap();
    let kp = crate::bodies::polar(&k).unwrap();
    let lp = crate::bodies::polar(&l).unwrap();
    let diam = diameter_of_intersection(&kp, &lp, &u, &opt()).unwrap().diameter;
    let hull = hull_inclusion_radius(&k, &l, &u, &opt()).unwrap().radius;
    assert_relative_eq!(diam * hull, 2.0, max_relative = 1e-6);
}
