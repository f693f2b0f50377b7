//! Generic evaluators built from other oracles: Frank–Wolfe projection from
//! the support-point oracle, Dykstra projection onto intersections, gauge by
//! bisection, and the closed-form projections used by the catalog.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::ConvexBody;
use crate::Vector;

/// Gap tolerance of the Frank–Wolfe projection.
pub const FW_TOL: f64 = 1e-8;
pub const FW_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct FwResult {
    pub point: Vector,
    /// `|x − point|`, an upper bound on the distance.
    pub upper: f64,
    /// Separating-hyperplane lower bound on the distance.
    pub lower: f64,
    pub iterations: usize,
}

/// Active-set cap; beyond it away steps are skipped and new atoms are
/// merged into the iterate (smooth bodies never repeat an atom).
const MAX_ATOMS: usize = 512;

fn fw_run<B, S>(body: &B, x: &Vector, stop: S) -> FwResult
where
    B: ConvexBody + ?Sized,
    S: Fn(f64, f64) -> bool,
{
    let start_dir = if x.norm() > 0.0 {
        x.clone()
    } else {
        let mut e = Vector::zeros(x.len());
        e[0] = 1.0;
        e
    };
    let first = body.support_point(&start_dir);
    let mut y = first.clone();
    // convex combination representing y (away-step Frank–Wolfe)
    let mut atoms: Vec<(Vector, f64)> = vec![(first, 1.0)];
    let mut lower: f64 = 0.0;
    let mut upper = (&y - x).norm();
    for it in 0..FW_MAX_ITER {
        let g = &y - x;
        let gn = g.norm();
        upper = gn;
        if gn <= 1e-15 {
            return FwResult { point: y, upper: 0.0, lower: 0.0, iterations: it };
        }
        let s = body.support_point(&(-&g));
        let gap = g.dot(&(&y - &s)).max(0.0);
        lower = lower.max(gn - gap / gn);
        if stop(upper, lower) {
            return FwResult { point: y, upper, lower, iterations: it };
        }
        let (away_idx, away_gap) = if atoms.len() > 1 && atoms.len() < MAX_ATOMS {
            let (i, val) = atoms
                .iter()
                .enumerate()
                .map(|(i, (a, _))| (i, g.dot(a)))
                .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
            (Some(i), val - g.dot(&y))
        } else {
            (None, 0.0)
        };
        let (d, gamma_max, away) = match away_idx {
            Some(i) if away_gap > gap => {
                let w = atoms[i].1;
                (&y - &atoms[i].0, w / (1.0 - w), Some(i))
            }
            _ => (&s - &y, 1.0, None),
        };
        let dd = d.norm_squared();
        if dd == 0.0 {
            return FwResult { point: y, upper, lower: upper, iterations: it };
        }
        let gamma = ((x - &y).dot(&d) / dd).clamp(0.0, gamma_max);
        if gamma == 0.0 {
            return FwResult { point: y, upper, lower: lower.max(upper - FW_TOL), iterations: it };
        }
        y += &d * gamma;
        match away {
            Some(i) => {
                for (_, w) in atoms.iter_mut() {
                    *w *= 1.0 + gamma;
                }
                atoms[i].1 -= gamma;
                if gamma >= gamma_max {
                    atoms.swap_remove(i);
                }
            }
            None => {
                for (_, w) in atoms.iter_mut() {
                    *w *= 1.0 - gamma;
                }
                if gamma >= 1.0 {
                    atoms.clear();
                    atoms.push((s, 1.0));
                } else if let Some(a) = atoms.iter_mut().find(|(a, _)| *a == s) {
                    a.1 += gamma;
                } else if atoms.len() < MAX_ATOMS {
                    atoms.push((s, gamma));
                } else {
                    // forget the decomposition
                    atoms.clear();
                    atoms.push((y.clone(), 1.0));
                }
            }
        }
        atoms.retain(|(_, w)| *w > 0.0);
    }
    FwResult { point: y, upper, lower: lower.min(upper), iterations: FW_MAX_ITER }
}

/// Nearest point of `body` to `x` using only `support_point`, to an
/// absolute duality gap of [`FW_TOL`] or [`FW_MAX_ITER`] iterations.
pub fn frank_wolfe_project<B: ConvexBody + ?Sized>(body: &B, x: &Vector) -> FwResult {
    fw_run(body, x, |u, l| u - l <= FW_TOL || u <= FW_TOL * 1e-2)
}

/// Decides `dist(x, body) ≤ tol`, stopping as soon as the bounds settle it.
pub fn frank_wolfe_within<B: ConvexBody + ?Sized>(body: &B, x: &Vector, tol: f64) -> bool {
    let r = fw_run(body, x, |u, l| u <= tol || l > tol);
    if r.upper <= tol {
        true
    } else if r.lower > tol {
        false
    } else {
        0.5 * (r.upper + r.lower) <= tol
    }
}

/// `inf { t > 0 : x ∈ tK }` by geometric bisection on membership.
pub fn gauge_by_bisection<B: ConvexBody + ?Sized>(body: &B, x: &Vector) -> f64 {
    let nx = x.norm();
    if nx == 0.0 {
        return 0.0;
    }
    let outer = body.outer_radius();
    let mut lo = if outer.is_finite() && outer > 0.0 { nx / outer } else { 0.0 };
    let inner = body.inner_radius();
    let mut hi = if inner > 0.0 {
        nx / inner
    } else {
        let mut t = if lo > 0.0 { lo } else { nx };
        let cap = t * 1e12;
        loop {
            if body.contains(&(x / t)) {
                break t;
            }
            lo = t;
            t *= 2.0;
            if t > cap {
                return f64::INFINITY;
            }
        }
    };
    if lo <= 0.0 {
        lo = hi * 1e-12;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if body.contains(&(x / mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Central-difference gradient.
pub fn numeric_gradient<F: Fn(&Vector) -> f64>(f: F, x: &Vector) -> Vector {
    let h = 1e-6 * x.norm().max(1.0);
    let mut g = Vector::zeros(x.len());
    let mut y = x.clone();
    for i in 0..x.len() {
        let xi = y[i];
        y[i] = xi + h;
        let fp = f(&y);
        y[i] = xi - h;
        let fm = f(&y);
        y[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Dykstra's alternating projections onto the intersection of the sets
/// whose projections are given.
pub fn dykstra(x: &Vector, projections: &[&dyn Fn(&Vector) -> Vector], tol: f64, max_iter: usize) -> Vector {
    let m = projections.len();
    let mut y = x.clone();
    let mut incs = vec![Vector::zeros(x.len()); m];
    for _ in 0..max_iter {
        let mut change = 0.0;
        for (i, proj) in projections.iter().enumerate() {
            let z = &y + &incs[i];
            let p = proj(&z);
            let inc = &z - &p;
            change += (&p - &y).norm_squared() + (&inc - &incs[i]).norm_squared();
            incs[i] = inc;
            y = p;
        }
        if change <= tol * tol {
            break;
        }
    }
    y
}

/// Euclidean projection onto the ℓ¹ ball of radius `r`.
pub fn project_l1_ball(x: &Vector, r: f64) -> Vector {
    if x.iter().map(|v| v.abs()).sum::<f64>() <= r {
        return x.clone();
    }
    let mut u: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - r) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    x.map(|v| v.signum() * (v.abs() - theta).max(0.0))
}

/// Euclidean projection onto the axis-aligned ellipsoid `Σ (yᵢ/aᵢ)² ≤ 1`.
pub fn project_ellipsoid(x: &Vector, axes: &[f64]) -> Vector {
    let q: f64 = x.iter().zip(axes).map(|(v, a)| (v / a).powi(2)).sum();
    if q <= 1.0 {
        return x.clone();
    }
    // φ(λ) = Σ (aᵢ xᵢ / (aᵢ² + λ))² − 1 is convex and decreasing on λ ≥ 0,
    // so Newton from λ = 0 increases monotonically to the root.
    let phi = |lam: f64| -> (f64, f64) {
        let mut f = -1.0;
        let mut df = 0.0;
        for (v, a) in x.iter().zip(axes) {
            let d = a * a + lam;
            let t = a * v / d;
            f += t * t;
            df += -2.0 * t * t / d;
        }
        (f, df)
    };
    let mut lam = 0.0;
    for _ in 0..500 {
        let (f, df) = phi(lam);
        if f <= 0.0 || df == 0.0 {
            break;
        }
        let next = lam - f / df;
        if next - lam <= 1e-16 * next.max(1e-300) {
            lam = next;
            break;
        }
        lam = next;
    }
    Vector::from_iterator(
        x.len(),
        x.iter().zip(axes).map(|(v, a)| a * a * v / (a * a + lam)),
    )
}

/// `max ⟨u, x⟩` subject to `|⟨nᵢ, x⟩| ≤ wᵢ`. `None` if unbounded.
pub fn lp_slab_support(normals: &[Vector], widths: &[f64], u: &Vector) -> Option<(f64, Vector)> {
    let n = u.len();
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..n)
        .map(|i| p.add_var(u[i], (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (nv, &w) in normals.iter().zip(widths) {
        let row: Vec<_> = vars.iter().zip(nv.iter()).map(|(&v, &c)| (v, c)).collect();
        p.add_constraint(row.as_slice(), ComparisonOp::Le, w);
        p.add_constraint(row.as_slice(), ComparisonOp::Ge, -w);
    }
    let sol = p.solve().ok()?;
    let x = Vector::from_iterator(n, vars.iter().map(|&v| sol[v]));
    Some((sol.objective(), x))
}

/// `min Σλⱼ` subject to `Σ λⱼ vⱼ = x`, `λ ≥ 0`; the gauge of `conv(V)` when
/// the origin lies in the hull. `∞` when infeasible.
pub fn lp_vertex_gauge(vertices: &[Vector], x: &Vector) -> f64 {
    let n = x.len();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = vertices.iter().map(|_| p.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for i in 0..n {
        let row: Vec<_> = vars.iter().zip(vertices).map(|(&v, vert)| (v, vert[i])).collect();
        p.add_constraint(row.as_slice(), ComparisonOp::Eq, x[i]);
    }
    match p.solve() {
        Ok(sol) => sol.objective().max(0.0),
        Err(_) => f64::INFINITY,
    }
}

/// Feasibility of `x = Σ λⱼ vⱼ`, `Σ λⱼ = 1`, `λ ≥ 0`.
pub fn lp_vertex_contains(vertices: &[Vector], x: &Vector) -> bool {
    let n = x.len();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = vertices.iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for i in 0..n {
        let row: Vec<_> = vars.iter().zip(vertices).map(|(&v, vert)| (v, vert[i])).collect();
        p.add_constraint(row.as_slice(), ComparisonOp::Eq, x[i]);
    }
    let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    p.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    p.solve().is_ok()
}

/// Counter-clockwise convex hull of planar points (monotone chain).
pub fn convex_hull_2d(points: &[Vector]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Area of a simple polygon (shoelace).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    #[test]
    fn l1_projection_lands_on_ball() {
        let p = project_l1_ball(&v(&[3.0, -1.0, 0.5]), 1.0);
        assert_abs_diff_eq!(p.iter().map(|x| x.abs()).sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
        let inside = v(&[0.2, 0.3]);
        assert_eq!(project_l1_ball(&inside, 1.0), inside);
    }

    #[test]
    fn ellipsoid_projection_satisfies_kkt() {
        let axes = [1.0, 2.0, 0.5];
        let x = v(&[2.0, 3.0, -1.0]);
        let p = project_ellipsoid(&x, &axes);
        let q: f64 = p.iter().zip(&axes).map(|(v, a)| (v / a).powi(2)).sum();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-10);
        // x − p is parallel to the normal A⁻²p
        let normal = Vector::from_iterator(3, p.iter().zip(&axes).map(|(v, a)| v / (a * a)));
        let r = &x - &p;
        let cos = r.dot(&normal) / (r.norm() * normal.norm());
        assert_abs_diff_eq!(cos, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hull_and_area() {
        let pts = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.2, 0.2])];
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull.len(), 3);
        assert_abs_diff_eq!(polygon_area(&hull), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn lp_helpers() {
        let normals = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let (h, x) = lp_slab_support(&normals, &[1.0, 2.0], &v(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(h, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-9);
        let square = [v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[1.0, -1.0]), v(&[-1.0, -1.0])];
        assert_abs_diff_eq!(lp_vertex_gauge(&square, &v(&[0.5, 0.25])), 0.5, epsilon = 1e-9);
        assert!(lp_vertex_contains(&square, &v(&[0.9, -0.9])));
        assert!(!lp_vertex_contains(&square, &v(&[1.1, 0.0])));
    }
}
