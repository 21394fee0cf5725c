//! Two-point geodesic problem and the distance function.
//!
//! After translating the base to the origin, write `ρ = |q*|` and
//! `z' = z − xy/2` (invariant under rotations about the fibre). With
//! `φ = wt/2`, a geodesic reaches `q` iff
//!
//! ```text
//!   2φ + ρ²·(2φ − sin 2φ)/(8 sin²φ) = z',    t² = ρ²/sinc²φ + 4φ²
//! ```
//!
//! The left side is odd and strictly increasing on `(−π, π)`, so below the
//! first conjugate length there is exactly one solution. The multistart
//! Newton solver is kept as an independent cross-check and to enumerate
//! longer branches.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{NilError, Result};
use crate::geodesic::{geodesic_point, geodesic_point_from, geodesic_velocity_from, sinc, u_minus_sin_over_u2, GeodesicParams};
use crate::nil::{metric_at, translate, translation_to_origin, Point};
use crate::numeric::{brent, levenberg_step3, norm3, solve3, wrap_angle};

/// Solved geodesic from `base` to some target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSolution {
    pub params: GeodesicParams,
    pub base: Point,
    /// Euclidean endpoint error in model coordinates.
    pub residual: f64,
    /// Number of distinct solutions with `t ≤ 2π` known to exist.
    pub branch_count: usize,
}

/// All branches found by the multistart solver, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartSolution {
    pub best: GeodesicSolution,
    pub branches: Vec<GeodesicParams>,
    /// More than one distinct solution with `t ≤ 2π`.
    pub ambiguous: bool,
}

const RESIDUAL_TOL: f64 = 1e-9;

fn relative_target(base: Point, target: Point) -> Point {
    translate(target, translation_to_origin(base))
}

fn endpoint_residual(params: &GeodesicParams, q: Point) -> f64 {
    geodesic_point(params).model_distance(&q)
}

/// `(2φ − sin 2φ)/(8 sin²φ)`, smooth through `φ = 0`.
fn height_excess(phi: f64) -> f64 {
    let s = sinc(phi);
    u_minus_sin_over_u2(2.0 * phi) / (2.0 * s * s)
}

/// Exact principal solution from the origin.
fn reduce_from_origin(q: Point) -> Result<GeodesicParams> {
    let rho = q.x.hypot(q.y);
    let zp = q.z - 0.5 * q.x * q.y;
    if rho <= 1e-14 * (1.0 + zp.abs()) {
        if zp == 0.0 {
            return GeodesicParams::new(0.0, 0.0, 0.0);
        }
        return GeodesicParams::new(0.0, zp.signum() * FRAC_PI_2, zp.abs());
    }
    let target = zp.abs();
    let g = |phi: f64| 2.0 * phi + rho * rho * height_excess(phi) - target;
    let phi = if target == 0.0 {
        0.0
    } else {
        // walk the upper end towards π until the bracket closes
        let mut delta = 1e-2;
        let mut hi = PI - delta;
        let mut g_hi = g(hi);
        while g_hi < 0.0 && delta > 1e-300 {
            delta *= 1e-2;
            hi = PI - delta;
            g_hi = g(hi);
        }
        if g_hi < 0.0 {
            return Err(NilError::OutOfModelRange { required: f64::INFINITY });
        }
        brent(g, 0.0, hi, -target, g_hi, 1e-17, 200)
    };
    let s = sinc(phi);
    let t = (rho * rho / (s * s) + 4.0 * phi * phi).sqrt();
    let signed_phi = zp.signum() * phi;
    let w = if t > 0.0 { (2.0 * signed_phi / t).clamp(-1.0, 1.0) } else { 0.0 };
    GeodesicParams::new(q.y.atan2(q.x) - signed_phi, w.asin(), t)
}

/// Damped Newton on the endpoint map with a forward-difference Jacobian.
fn newton_refine(start: GeodesicParams, q: Point, max_iter: usize) -> (GeodesicParams, f64) {
    let h = 1e-7;
    let mut p = start;
    let resid = |p: &GeodesicParams| {
        let e = geodesic_point(p);
        [e.x - q.x, e.y - q.y, e.z - q.z]
    };
    let mut r = resid(&p);
    let mut rn = norm3(r);
    for _ in 0..max_iter {
        if rn < 1e-13 {
            break;
        }
        let vars = [p.alpha, p.theta, p.t];
        let mut jac = [[0.0; 3]; 3];
        for k in 0..3 {
            let mut v = vars;
            // step away from the θ and t boundaries
            let step = if k == 1 && v[1] + h > FRAC_PI_2 { -h } else { h };
            v[k] += step;
            let e = geodesic_point(&GeodesicParams { alpha: v[0], theta: v[1].clamp(-FRAC_PI_2, FRAC_PI_2), t: v[2].max(0.0) });
            let col = [(e.x - q.x - r[0]) / step, (e.y - q.y - r[1]) / step, (e.z - q.z - r[2]) / step];
            for i in 0..3 {
                jac[i][k] = col[i];
            }
        }
        let delta = solve3(jac, [-r[0], -r[1], -r[2]]).or_else(|| levenberg_step3(jac, r, 1e-12 + rn));
        let Some(delta) = delta else { break };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = GeodesicParams {
                alpha: wrap_angle(vars[0] + lambda * delta[0]),
                theta: (vars[1] + lambda * delta[1]).clamp(-FRAC_PI_2, FRAC_PI_2),
                t: (vars[2] + lambda * delta[2]).max(0.0),
            };
            let rc = resid(&cand);
            let rcn = norm3(rc);
            if rcn < rn {
                p = cand;
                r = rc;
                rn = rcn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (p, rn)
}

/// Minimal geodesic from `base` to `target`.
pub fn solve_geodesic(base: Point, target: Point) -> Result<GeodesicSolution> {
    if !(base.is_finite() && target.is_finite()) {
        return Err(NilError::InvalidParameter("points must be finite".into()));
    }
    if base == target {
        return Err(NilError::DuplicatePoints);
    }
    let q = relative_target(base, target);
    let mut params = reduce_from_origin(q)?;
    let mut residual = endpoint_residual(&params, q);
    if residual > 1e-12 && !params.is_fibre() {
        let (polished, r) = newton_refine(params, q, 8);
        if r < residual {
            params = polished;
            residual = r;
        }
    }
    if residual > RESIDUAL_TOL * (1.0 + q.to_array().iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
        return Err(NilError::NoConvergence { best_residual: residual });
    }
    if params.t > TAU {
        return Err(NilError::OutOfModelRange { required: params.t });
    }
    Ok(GeodesicSolution { params, base, residual, branch_count: 1 })
}

fn same_branch(a: &GeodesicParams, b: &GeodesicParams) -> bool {
    let tol = 1e-6;
    if (a.theta - b.theta).abs() > tol || (a.t - b.t).abs() > tol {
        return false;
    }
    // α is meaningless on the fibre
    a.c() < tol || wrap_angle(a.alpha - b.alpha).abs() <= tol
}

/// Multistart damped Newton over a 16 × 17 (α, θ) seed grid.
pub fn solve_geodesic_multistart(base: Point, target: Point) -> Result<MultistartSolution> {
    if base == target {
        return Err(NilError::DuplicatePoints);
    }
    let q = relative_target(base, target);
    let rho = q.x.hypot(q.y);
    let zp = q.z - 0.5 * q.x * q.y;
    let mut found: Vec<(GeodesicParams, f64)> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for i in 0..16 {
        let alpha = -PI + TAU * i as f64 / 16.0;
        for j in 0..=16 {
            let theta = (-FRAC_PI_2 + PI * j as f64 / 16.0).clamp(-FRAC_PI_2 + 1e-3, FRAC_PI_2 - 1e-3);
            let (c, w) = (theta.cos(), theta.sin());
            // choose t so the seed's cylinder radius matches ρ
            let t = if rho < 1e-12 {
                zp.abs().max(1e-3)
            } else if w.abs() < 1e-9 {
                rho / c
            } else {
                2.0 * (rho * w.abs() / (2.0 * c)).min(1.0).asin() / w.abs()
            };
            let seed = GeodesicParams { alpha, theta, t: t.min(TAU) };
            let (p, r) = newton_refine(seed, q, 60);
            best_residual = best_residual.min(r);
            if r < 1e-10 && p.t <= TAU + 1e-9 && !found.iter().any(|(f, _)| same_branch(f, &p)) {
                found.push((p, r));
            }
        }
    }
    if found.is_empty() {
        return Err(NilError::NoConvergence { best_residual });
    }
    found.sort_by(|(a, _), (b, _)| {
        a.t.total_cmp(&b.t).then(a.theta.abs().total_cmp(&b.theta.abs())).then(a.alpha.total_cmp(&b.alpha))
    });
    // collapse near-ties in t that are the same endpoint family
    let (params, residual) = found[0];
    let branches: Vec<GeodesicParams> = found.iter().map(|(p, _)| *p).collect();
    Ok(MultistartSolution {
        best: GeodesicSolution { params, base, residual, branch_count: branches.len() },
        ambiguous: branches.len() > 1,
        branches,
    })
}

/// Geodesic distance; zero for equal points.
pub fn distance(p: Point, q: Point) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    Ok(solve_geodesic(p, q)?.params.t)
}

/// Distance from `base` to `q` and its differential with respect to `q`
/// (a covector: `g(q)` applied to the unit end velocity).
pub fn distance_gradient(base: Point, q: Point) -> Result<(f64, [f64; 3])> {
    let sol = solve_geodesic(base, q)?;
    let v = geodesic_velocity_from(base, &sol.params);
    Ok((sol.params.t, metric_at(q).apply(v)))
}

/// Point `P` on the geodesic line `AB` with signed simple ratio `s = d(A,P)/d(P,B)`.
pub fn point_at_ratio(a: Point, b: Point, s: f64) -> Result<Point> {
    if !s.is_finite() || s == -1.0 {
        return Err(NilError::InvalidParameter(format!("ratio {s} is not admissible")));
    }
    if a == b {
        return Err(NilError::DuplicatePoints);
    }
    if s == 0.0 {
        return Ok(a);
    }
    if s > 0.0 {
        let sol = solve_geodesic(a, b)?;
        return Ok(geodesic_point_from(a, &sol.params.with_t(s / (1.0 + s) * sol.params.t)));
    }
    let m = -s;
    if m > 1.0 {
        // beyond B, continuing from A
        let sol = solve_geodesic(a, b)?;
        let t = m * sol.params.t / (m - 1.0);
        if t > TAU {
            return Err(NilError::OutOfModelRange { required: t });
        }
        Ok(geodesic_point_from(a, &sol.params.with_t(t)))
    } else {
        // beyond A, continuing from B
        let sol = solve_geodesic(b, a)?;
        let t = sol.params.t / (1.0 - m);
        if t > TAU {
            return Err(NilError::OutOfModelRange { required: t });
        }
        Ok(geodesic_point_from(b, &sol.params.with_t(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nil::rotate_about_z;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const A0: Point = Point::new(1.0, 0.0, 0.0);
    const A1: Point = Point::new(1.0 / 3.0, 2.0, 1.0);
    const A2: Point = Point::new(0.5, -1.0, 1.0);

    /// Coarse-to-fine grid search of the endpoint map over (α, θ, t ≤ 2π).
    fn grid_search_distance(q: Point) -> f64 {
        let n = 40;
        let mut cells: Vec<(f64, [f64; 3])> = Vec::new();
        for i in 0..n {
            for j in 0..=n {
                for k in 1..=n {
                    let v = [-PI + TAU * i as f64 / n as f64, -FRAC_PI_2 + PI * j as f64 / n as f64, TAU * k as f64 / n as f64];
                    let e = endpoint_residual(&GeodesicParams { alpha: v[0], theta: v[1], t: v[2] }, q);
                    cells.push((e, v));
                }
            }
        }
        cells.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = (f64::INFINITY, 0.0);
        for &(_, start) in cells.iter().take(12) {
            let mut centre = start;
            let mut half = [PI / n as f64, FRAC_PI_2 / n as f64, PI / n as f64];
            let mut err = f64::INFINITY;
            for _ in 0..40 {
                let m = 6;
                let mut local = (f64::INFINITY, centre);
                for a in -m..=m {
                    for b in -m..=m {
                        for c in -m..=m {
                            let v = [
                                centre[0] + half[0] * a as f64 / m as f64,
                                (centre[1] + half[1] * b as f64 / m as f64).clamp(-FRAC_PI_2, FRAC_PI_2),
                                (centre[2] + half[2] * c as f64 / m as f64).max(0.0),
                            ];
                            let e = endpoint_residual(&GeodesicParams { alpha: v[0], theta: v[1], t: v[2] }, q);
                            if e < local.0 {
                                local = (e, v);
                            }
                        }
                    }
                }
                centre = local.1;
                err = local.0;
                half = half.map(|h| h * 0.5);
            }
            if err < 1e-8 && (best.0 > 1e-8 || centre[2] < best.1) {
                best = (err, centre[2]);
            }
        }
        assert!(best.0 < 1e-8, "grid search did not converge: {}", best.0);
        best.1
    }

    #[test]
    fn fibre_and_straight_targets() {
        let s = solve_geodesic(Point::ORIGIN, Point::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(s.params.theta, FRAC_PI_2);
        assert_eq!(s.params.t, 1.0);
        let s = solve_geodesic(Point::ORIGIN, Point::new(1.0, 0.0, 0.0)).unwrap();
        assert!(s.params.theta.abs() < 1e-15 && s.params.alpha.abs() < 1e-15 && (s.params.t - 1.0).abs() < 1e-15);
        for &tau in &[0.1, 1.0, 3.0, TAU] {
            assert!((distance(Point::ORIGIN, Point::new(0.0, 0.0, tau)).unwrap() - tau).abs() < 1e-14);
        }
        assert_eq!(distance(A1, A1).unwrap(), 0.0);
    }

    #[test]
    fn figure_vertex_matches_grid_search() {
        let sol = solve_geodesic(Point::ORIGIN, A2).unwrap();
        assert!(sol.residual < 1e-9);
        let oracle = grid_search_distance(A2);
        assert!((sol.params.t - oracle).abs() < 1e-6, "{} vs {}", sol.params.t, oracle);
    }

    #[test]
    fn figure_side_lengths() {
        let d01 = distance(A0, A1).unwrap();
        let d02 = distance(A0, A2).unwrap();
        let d12 = distance(A1, A2).unwrap();
        let q = relative_target(A1, A2);
        assert!((d12 - grid_search_distance(q)).abs() < 1e-6);
        assert!(d01 < PI && d02 < PI && d12 > PI);
    }

    #[test]
    fn round_trip_and_multistart_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let params = GeodesicParams::new(rng.gen_range(-PI..PI), rng.gen_range(-1.5..1.5), rng.gen_range(0.05..2.0)).unwrap();
            let q = geodesic_point(&params);
            let sol = solve_geodesic(Point::ORIGIN, q).unwrap();
            assert!(sol.residual < 1e-9);
            assert!((sol.params.t - params.t).abs() < 1e-8);
            let ms = solve_geodesic_multistart(Point::ORIGIN, q).unwrap();
            assert!((ms.best.params.t - sol.params.t).abs() < 1e-7);
        }
    }

    #[test]
    fn long_targets_have_extra_branches() {
        // fibre point above 2π-conjugate length: many geodesics reach it
        let q = Point::new(0.3, 0.0, 5.5);
        let ms = solve_geodesic_multistart(Point::ORIGIN, q).unwrap();
        let fast = solve_geodesic(Point::ORIGIN, q).unwrap();
        assert!((ms.best.params.t - fast.params.t).abs() < 1e-7);
        assert!(ms.branches.iter().all(|b| b.t >= fast.params.t - 1e-9));
    }

    #[test]
    fn invariance_under_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pt = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for _ in 0..50 {
            let (p, q, t) = (pt(&mut rng), pt(&mut rng), pt(&mut rng).as_translation());
            let d = distance(p, q).unwrap();
            assert!((d - distance(translate(p, t), translate(q, t)).unwrap()).abs() < 1e-7);
            let om = rng.gen_range(-PI..PI);
            assert!((d - distance(rotate_about_z(p, om), rotate_about_z(q, om)).unwrap()).abs() < 1e-7);
            assert!((d - distance(q, p).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let base = A0;
        let q = Point::new(0.2, 0.7, 0.4);
        let (d, g) = distance_gradient(base, q).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let mut a = q.to_array();
            let mut b = q.to_array();
            a[k] += h;
            b[k] -= h;
            let fd = (distance(base, Point::from_array(a)).unwrap() - distance(base, Point::from_array(b)).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6, "k={k} fd={fd} g={}", g[k]);
        }
        assert!(d > 0.0);
    }

    #[test]
    fn ratio_points() {
        let mid = point_at_ratio(A0, A2, 1.0).unwrap();
        assert!((distance(A0, mid).unwrap() - distance(mid, A2).unwrap()).abs() < 1e-8);
        assert_eq!(point_at_ratio(A0, A2, 0.0).unwrap(), A0);
        assert!(point_at_ratio(A0, A2, -1.0).is_err());
        for &s in &[0.5, 3.0, -2.0, -0.25] {
            let p = point_at_ratio(A0, A1, s).unwrap();
            let (dap, dpb, dab) = (distance(A0, p).unwrap(), distance(p, A1).unwrap(), distance(A0, A1).unwrap());
            let between = (dap + dpb - dab).abs() < 1e-7;
            assert_eq!(between, s > 0.0);
            assert!((s.abs() - dap / dpb).abs() < 1e-6, "s={s}");
        }
        assert!(matches!(point_at_ratio(A0, A1, -1.1), Err(NilError::OutOfModelRange { .. })));
    }

    #[test]
    fn out_of_range_targets() {
        assert!(matches!(solve_geodesic(Point::ORIGIN, Point::new(0.0, 0.0, 7.0)), Err(NilError::OutOfModelRange { .. })));
        assert!(matches!(solve_geodesic(A0, A0), Err(NilError::DuplicatePoints)));
    }
}
