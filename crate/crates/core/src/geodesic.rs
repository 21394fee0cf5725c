//! Closed-form unit-speed geodesics from the origin and their translates.
//!
//! A geodesic leaves the origin with velocity `(c·cos α, c·sin α, w)` where
//! `c = cos θ`, `w = sin θ`. For `0 < |w| < 1` it is a helix over a circle in
//! the base plane; `w = 0` gives a straight line with parabolic height, and
//! `|w| = 1` runs up the fibre.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{NilError, Result};
use crate::nil::{metric_at, translate, translation_pushforward, Point};
use crate::numeric::wrap_angle;

/// Direction angles and arc length of a unit-speed geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    /// Base-plane direction, wrapped into `[−π, π)`.
    pub alpha: f64,
    /// Elevation in `[−π/2, π/2]`.
    pub theta: f64,
    /// Arc length, `≥ 0`.
    pub t: f64,
}

impl GeodesicParams {
    pub fn new(alpha: f64, theta: f64, t: f64) -> Result<Self> {
        if !(alpha.is_finite() && theta.is_finite() && t.is_finite()) {
            return Err(NilError::InvalidParameter("geodesic parameters must be finite".into()));
        }
        if theta.abs() > FRAC_PI_2 + 1e-12 {
            return Err(NilError::InvalidParameter(format!("θ = {theta} outside [−π/2, π/2]")));
        }
        if t < 0.0 {
            return Err(NilError::InvalidParameter(format!("arc length {t} is negative")));
        }
        Ok(GeodesicParams { alpha: wrap_angle(alpha), theta: theta.clamp(-FRAC_PI_2, FRAC_PI_2), t })
    }

    pub fn c(&self) -> f64 {
        self.theta.cos()
    }

    pub fn w(&self) -> f64 {
        self.theta.sin()
    }

    pub fn with_t(&self, t: f64) -> Self {
        GeodesicParams { t, ..*self }
    }

    pub fn is_fibre(&self) -> bool {
        self.theta.abs() == FRAC_PI_2
    }
}

/// `sin v / v`.
pub(crate) fn sinc(v: f64) -> f64 {
    if v.abs() < 1e-4 {
        let v2 = v * v;
        1.0 - v2 / 6.0 + v2 * v2 / 120.0
    } else {
        v.sin() / v
    }
}

/// `(u − sin u) / u²`.
pub(crate) fn u_minus_sin_over_u2(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        u * (1.0 / 6.0 - u2 * (1.0 / 120.0 - u2 * (1.0 / 5040.0 - u2 * (1.0 / 362_880.0 - u2 / 39_916_800.0))))
    } else {
        (u - u.sin()) / (u * u)
    }
}

/// `(1 − cos u) / u²`.
pub(crate) fn one_minus_cos_over_u2(u: f64) -> f64 {
    let s = sinc(0.5 * u);
    0.5 * s * s
}

/// Geodesic endpoint from the origin.
pub fn geodesic_point(params: &GeodesicParams) -> Point {
    let (alpha, t) = (params.alpha, params.t);
    if params.is_fibre() {
        return Point::new(0.0, 0.0, params.w().signum() * t);
    }
    let (c, w) = (params.c(), params.w());
    let u = w * t;
    // 2c/w·sin(u/2) = c·t·sinc(u/2); the w → 0 limit is the straight case
    let radial = c * t * sinc(0.5 * u);
    let phase = 0.5 * u + alpha;
    let x = radial * phase.cos();
    let y = radial * phase.sin();
    let z = u + 0.5 * c * c * t * t * (u_minus_sin_over_u2(u) + one_minus_cos_over_u2(u) * (u + 2.0 * alpha).sin());
    Point::new(x, y, z)
}

/// Velocity of the geodesic from the origin at its endpoint.
pub fn geodesic_velocity(params: &GeodesicParams) -> [f64; 3] {
    if params.is_fibre() {
        return [0.0, 0.0, params.w().signum()];
    }
    let (c, w) = (params.c(), params.w());
    let heading = params.alpha + w * params.t;
    let p = geodesic_point(params);
    let vy = c * heading.sin();
    [c * heading.cos(), vy, w + p.x * vy]
}

/// Geodesic endpoint starting from `base`.
pub fn geodesic_point_from(base: Point, params: &GeodesicParams) -> Point {
    translate(geodesic_point(params), base.as_translation())
}

/// Endpoint velocity of the geodesic starting from `base`.
pub fn geodesic_velocity_from(base: Point, params: &GeodesicParams) -> [f64; 3] {
    translation_pushforward(base.as_translation(), geodesic_velocity(params))
}

/// Samples `n + 1` evenly spaced points of the geodesic from `base`.
pub fn sample_geodesic(base: Point, params: &GeodesicParams, n: usize) -> Vec<Point> {
    (0..=n)
        .map(|k| geodesic_point_from(base, &params.with_t(params.t * k as f64 / n as f64)))
        .collect()
}

/// Numerical geodesic from the origin: RK4 on `ẍᵏ = −Γᵏᵢⱼ ẋⁱ ẋʲ` with Christoffel
/// symbols taken by central differences of the metric tensor.
///
/// Integrates with `step` and `step/2`; fails when the two endpoints differ by
/// more than 1e-6. Intended as a test oracle.
pub fn geodesic_ode_oracle(params: &GeodesicParams, t: f64, step: f64) -> Result<Point> {
    if !(step > 0.0) {
        return Err(NilError::InvalidParameter("oracle step must be positive".into()));
    }
    let coarse = integrate_rk4(params, t, step);
    let fine = integrate_rk4(params, t, 0.5 * step);
    let gap = coarse.model_distance(&fine);
    if gap > 1e-6 {
        return Err(NilError::NoConvergence { best_residual: gap });
    }
    Ok(fine)
}

fn christoffel(p: [f64; 3]) -> [[[f64; 3]; 3]; 3] {
    let h = 1e-5;
    let g_at = |q: [f64; 3]| metric_at(Point::from_array(q)).g;
    let mut dg = [[[0.0; 3]; 3]; 3]; // dg[l][i][j] = ∂_l g_ij
    for l in 0..3 {
        let mut plus = p;
        let mut minus = p;
        plus[l] += h;
        minus[l] -= h;
        let (gp, gm) = (g_at(plus), g_at(minus));
        for i in 0..3 {
            for j in 0..3 {
                dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    let ginv = metric_at(Point::from_array(p)).inverse().g;
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                gamma[k][i][j] = (0..3)
                    .map(|l| 0.5 * ginv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    gamma
}

fn geodesic_rhs(state: [f64; 6]) -> [f64; 6] {
    let (p, v) = ([state[0], state[1], state[2]], [state[3], state[4], state[5]]);
    let gamma = christoffel(p);
    let mut out = [v[0], v[1], v[2], 0.0, 0.0, 0.0];
    for k in 0..3 {
        let mut a = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                a -= gamma[k][i][j] * v[i] * v[j];
            }
        }
        out[3 + k] = a;
    }
    out
}

fn integrate_rk4(params: &GeodesicParams, t: f64, step: f64) -> Point {
    let (c, w) = (params.c(), params.w());
    let mut s = [0.0, 0.0, 0.0, c * params.alpha.cos(), c * params.alpha.sin(), w];
    if t <= 0.0 {
        return Point::ORIGIN;
    }
    let n = (t / step).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let axpy = |s: [f64; 6], k: [f64; 6], a: f64| {
        let mut o = s;
        for i in 0..6 {
            o[i] += a * k[i];
        }
        o
    };
    for _ in 0..n {
        let k1 = geodesic_rhs(s);
        let k2 = geodesic_rhs(axpy(s, k1, 0.5 * h));
        let k3 = geodesic_rhs(axpy(s, k2, 0.5 * h));
        let k4 = geodesic_rhs(axpy(s, k3, h));
        for i in 0..6 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Point::new(s[0], s[1], s[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nil::tangent_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn gp(a: f64, th: f64, t: f64) -> GeodesicParams {
        GeodesicParams::new(a, th, t).unwrap()
    }

    /// Expanded three-bracket form of the height, with the corrected terms.
    fn z_expanded(p: &GeodesicParams) -> f64 {
        let (c, w, a, t) = (p.c(), p.w(), p.alpha, p.t);
        let wt = w * t;
        let big_a = (2.0 * wt + 2.0 * a).sin() - (2.0 * a).sin();
        let big_b = (wt + 2.0 * a).sin() - (2.0 * a).sin();
        wt * (1.0
            + c * c / (2.0 * w * w)
                * ((1.0 - big_a / (2.0 * wt)) + (1.0 - wt.sin() / wt) - (1.0 - big_b / wt)))
    }

    /// Final simplified line exactly as printed, with (1 − cos 2wt).
    fn z_printed_final(p: &GeodesicParams) -> f64 {
        let (c, w, a, t) = (p.c(), p.w(), p.alpha, p.t);
        let wt = w * t;
        wt * (1.0 + c * c / (2.0 * w * w) * ((1.0 - wt.sin() / wt) + (1.0 - (2.0 * wt).cos()) / wt * (wt + 2.0 * a).sin()))
    }

    #[test]
    fn fibre_geodesic() {
        let p = geodesic_point(&gp(0.7, FRAC_PI_2, 1.0));
        assert_eq!(p, Point::new(0.0, 0.0, 1.0));
        assert_eq!(geodesic_point(&gp(-2.0, -FRAC_PI_2, 2.5)), Point::new(0.0, 0.0, -2.5));
    }

    #[test]
    fn straight_geodesics() {
        let p = geodesic_point(&gp(0.0, 0.0, 1.0));
        assert!(p.model_distance(&Point::new(1.0, 0.0, 0.0)) < 1e-15);
        let q = geodesic_point(&gp(FRAC_PI_4, 0.0, 1.0));
        let h = 0.5f64.sqrt();
        assert!(q.model_distance(&Point::new(h, h, 0.25)) < 1e-15);
        let oracle = geodesic_ode_oracle(&gp(FRAC_PI_4, 0.0, 1.0), 1.0, 1e-3).unwrap();
        assert!(q.model_distance(&oracle) < 1e-9);
    }

    #[test]
    fn small_w_is_continuous() {
        for &w in &[1e-3, 1e-5, 1e-7, 2e-8, 1e-12] {
            let a = geodesic_point(&gp(0.4, w, 2.0));
            let b = geodesic_point(&gp(0.4, -w, 2.0));
            let flat = geodesic_point(&gp(0.4, 0.0, 2.0));
            assert!(a.model_distance(&flat) < 10.0 * w && b.model_distance(&flat) < 10.0 * w);
        }
    }

    #[test]
    fn from_base() {
        let params = gp(1.0, 0.3, 1.7);
        assert_eq!(geodesic_point_from(Point::ORIGIN, &params), geodesic_point(&params));
        let base = Point::new(1.0, 2.0, 3.0);
        assert_eq!(geodesic_point_from(base, &params.with_t(0.0)), base);
        let up = geodesic_point_from(base, &gp(0.0, FRAC_PI_2, 2.0));
        assert_eq!(up, translate(Point::new(0.0, 0.0, 2.0), base.as_translation()));
    }

    #[test]
    fn oracle_basics() {
        assert_eq!(geodesic_ode_oracle(&gp(0.3, 0.2, 1.0), 0.0, 1e-2).unwrap(), Point::ORIGIN);
        let up = geodesic_ode_oracle(&gp(0.3, FRAC_PI_2, 1.0), 2.0, 1e-2).unwrap();
        assert!(up.x.abs() < 1e-10 && up.y.abs() < 1e-10 && (up.z - 2.0).abs() < 1e-10);
        assert!(geodesic_ode_oracle(&gp(0.3, 0.2, 1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let params = gp(rng.gen_range(-PI..PI), rng.gen_range(-FRAC_PI_2..FRAC_PI_2), 0.0);
            for &t in &[0.5, 1.0, 2.0] {
                let exact = geodesic_point(&params.with_t(t));
                let numeric = geodesic_ode_oracle(&params, t, 1e-2).unwrap();
                assert!(exact.model_distance(&numeric) < 1e-6, "{params:?} t={t}");
            }
        }
    }

    #[test]
    fn corrected_forms_agree_and_printed_final_form_is_off() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst_printed: f64 = 0.0;
        for _ in 0..200 {
            let params = gp(rng.gen_range(-PI..PI), rng.gen_range(0.05..1.5), rng.gen_range(0.1..3.0));
            let z = geodesic_point(&params).z;
            assert!((z - z_expanded(&params)).abs() < 1e-10);
            worst_printed = worst_printed.max((z - z_printed_final(&params)).abs());
        }
        // the literal (1 − cos 2wt) variant disagrees with the integrated geodesic
        assert!(worst_printed > 1e-2);
    }

    #[test]
    fn unit_speed_by_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for _ in 0..50 {
            let params = gp(rng.gen_range(-PI..PI), rng.gen_range(-FRAC_PI_2..FRAC_PI_2), 0.0);
            for k in 1..=6 {
                let t = 0.5 * k as f64;
                let (a, b) = (geodesic_point(&params.with_t(t - h)), geodesic_point(&params.with_t(t + h)));
                let v = [(b.x - a.x) / (2.0 * h), (b.y - a.y) / (2.0 * h), (b.z - a.z) / (2.0 * h)];
                let at = geodesic_point(&params.with_t(t));
                assert!((tangent_norm(at, v) - 1.0).abs() < 1e-6);
                let exact = geodesic_velocity(&params.with_t(t));
                assert!((tangent_norm(at, exact) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cylinder_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let params = gp(rng.gen_range(-PI..PI), rng.gen_range(0.01..1.55) * if rng.gen() { 1.0 } else { -1.0 }, rng.gen_range(0.0..6.0));
            let p = geodesic_point(&params);
            let (c, w) = (params.c(), params.w());
            let expected = 4.0 * c * c / (w * w) * (0.5 * w * params.t).sin().powi(2);
            assert!((p.x * p.x + p.y * p.y - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GeodesicParams::new(0.0, 2.0, 1.0).is_err());
        assert!(GeodesicParams::new(0.0, 0.2, -1.0).is_err());
        assert!(GeodesicParams::new(f64::NAN, 0.2, 1.0).is_err());
    }
}
