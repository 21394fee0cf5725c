//! Points, isometries and the Riemannian metric of the Heisenberg model.
//!
//! Points are affine triples; the homogeneous form `(1; x, y, z)` is implicit.
//! Translations act from the right:
//! `(1; a, b, c) -> (1; x + a, y + b, z + b·x + c)`.

use serde::{Deserialize, Serialize};

/// A point of Nil in affine coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean distance in model coordinates.
    pub fn model_distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    /// The point viewed as the group element that translates the origin onto it.
    pub fn as_translation(&self) -> TranslationParams {
        TranslationParams::new(self.x, self.y, self.z)
    }
}

/// A translating element of the Heisenberg group `L(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TranslationParams {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TranslationParams {
    pub const IDENTITY: TranslationParams = TranslationParams { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        TranslationParams { x, y, z }
    }

    /// Translation equal to applying `self` first and then `then`.
    pub fn then(&self, then: &TranslationParams) -> TranslationParams {
        TranslationParams::new(self.x + then.x, self.y + then.y, self.z + then.z + self.y * then.x)
    }
}

/// Right translation of `p` by `t`.
pub fn translate(p: Point, t: TranslationParams) -> Point {
    Point::new(t.x + p.x, t.y + p.y, t.z + p.y * t.x + p.z)
}

/// Params `u` with `translate(translate(p, t), u) == p`.
pub fn inverse_translation(t: TranslationParams) -> TranslationParams {
    TranslationParams::new(-t.x, -t.y, t.x * t.y - t.z)
}

/// The translation carrying `p` onto the origin.
pub fn translation_to_origin(p: Point) -> TranslationParams {
    inverse_translation(p.as_translation())
}

/// Differential of `translate(·, t)`; constant in the point.
pub fn translation_pushforward(t: TranslationParams, v: [f64; 3]) -> [f64; 3] {
    [v[0], v[1], v[2] + t.x * v[1]]
}

/// Forward quadratic conjugacy `z' = z − xy/2`.
pub fn quadratic_map(p: Point) -> Point {
    Point::new(p.x, p.y, p.z - 0.5 * p.x * p.y)
}

pub fn quadratic_map_inverse(p: Point) -> Point {
    Point::new(p.x, p.y, p.z + 0.5 * p.x * p.y)
}

/// Rotation through `omega` about the z-axis at the origin.
pub fn rotate_about_z(p: Point, omega: f64) -> Point {
    let (s, c) = omega.sin_cos();
    let (s2, c2) = (2.0 * omega).sin_cos();
    Point::new(
        p.x * c - p.y * s,
        p.x * s + p.y * c,
        p.z - 0.5 * p.x * p.y + 0.25 * (p.x * p.x - p.y * p.y) * s2 + 0.5 * p.x * p.y * c2,
    )
}

/// Rotation through `omega` about the fibre line through `center`.
pub fn rotate_about(p: Point, center: Point, omega: f64) -> Point {
    let to_origin = translation_to_origin(center);
    let rotated = rotate_about_z(translate(p, to_origin), omega);
    translate(rotated, center.as_translation())
}

/// Symmetric metric tensor at a point; depends on `x` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g: [[f64; 3]; 3],
}

impl MetricTensor {
    pub fn determinant(&self) -> f64 {
        let g = &self.g;
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }

    pub fn inverse(&self) -> MetricTensor {
        // closed form; det = 1
        let x = -self.g[1][2];
        MetricTensor { g: [[1.0, 0.0, 0.0], [0.0, 1.0, x], [0.0, x, 1.0 + x * x]] }
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let g = &self.g;
        [
            g[0][0] * v[0] + g[0][1] * v[1] + g[0][2] * v[2],
            g[1][0] * v[0] + g[1][1] * v[1] + g[1][2] * v[2],
            g[2][0] * v[0] + g[2][1] * v[1] + g[2][2] * v[2],
        ]
    }

    pub fn quadratic_form(&self, v: [f64; 3]) -> f64 {
        let gv = self.apply(v);
        gv[0] * v[0] + gv[1] * v[1] + gv[2] * v[2]
    }
}

pub fn metric_at(p: Point) -> MetricTensor {
    let x = p.x;
    MetricTensor { g: [[1.0, 0.0, 0.0], [0.0, 1.0 + x * x, -x], [0.0, -x, 1.0]] }
}

/// Riemannian length of the tangent vector `v` at `p`.
pub fn tangent_norm(p: Point, v: [f64; 3]) -> f64 {
    // (dx)² + (dy)² + (dz − x dy)² avoids the cancellation in the expanded form
    let w = v[2] - p.x * v[1];
    (v[0] * v[0] + v[1] * v[1] + w * w).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        a.model_distance(&b) <= tol
    }

    #[test]
    fn translate_examples() {
        let t = TranslationParams::new(4.0, 5.0, 6.0);
        assert_eq!(translate(Point::ORIGIN, t), Point::new(4.0, 5.0, 6.0));
        assert_eq!(translate(Point::new(1.0, 2.0, 3.0), TranslationParams::IDENTITY), Point::new(1.0, 2.0, 3.0));
        // z' = 6 + 2·4 + 3
        assert_eq!(translate(Point::new(1.0, 2.0, 3.0), t), Point::new(5.0, 7.0, 17.0));
    }

    /// Heisenberg matrix product, written out independently of `translate`.
    fn heisenberg_mul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        m
    }

    fn heisenberg(x: f64, y: f64, z: f64) -> [[f64; 3]; 3] {
        [[1.0, x, z], [0.0, 1.0, y], [0.0, 0.0, 1.0]]
    }

    #[test]
    fn translate_matches_matrix_product() {
        // (x,y,z)·(a,b,c) = (a+x, b+y, c+xb+z): translation on the left, point on the right
        let (p, t) = (Point::new(1.0, 2.0, 3.0), TranslationParams::new(4.0, 5.0, 6.0));
        let m = heisenberg_mul(heisenberg(t.x, t.y, t.z), heisenberg(p.x, p.y, p.z));
        let q = translate(p, t);
        assert_eq!([m[0][1], m[1][2], m[0][2]], [q.x, q.y, q.z]);
    }

    #[test]
    fn inverse_translation_examples() {
        assert_eq!(inverse_translation(TranslationParams::IDENTITY), TranslationParams::new(-0.0, -0.0, 0.0));
        assert_eq!(inverse_translation(TranslationParams::new(2.5, 0.0, 0.0)), TranslationParams::new(-2.5, -0.0, 0.0));
    }

    #[test]
    fn translation_to_origin_examples() {
        assert_eq!(translate(Point::new(1.0, 0.0, 0.0), translation_to_origin(Point::new(1.0, 0.0, 0.0))), Point::ORIGIN);
        let u = translation_to_origin(Point::new(1.0, 0.0, 0.0));
        assert_eq!((u.x, u.y, u.z), (-1.0, -0.0, 0.0));
        let a1 = Point::new(1.0 / 3.0, 2.0, 1.0);
        assert!(close(translate(a1, translation_to_origin(a1)), Point::ORIGIN, 1e-14));
    }

    #[test]
    fn quadratic_map_examples() {
        assert_eq!(quadratic_map(Point::new(0.0, 0.0, 4.0)), Point::new(0.0, 0.0, 4.0));
        assert_eq!(quadratic_map(Point::new(2.0, 3.0, 0.0)), Point::new(2.0, 3.0, -3.0));
    }

    #[test]
    fn rotation_examples() {
        let p = Point::new(0.3, -1.2, 0.7);
        assert!(close(rotate_about_z(p, 0.0), p, 1e-15));
        let axis = Point::new(0.0, 0.0, 2.0);
        assert!(close(rotate_about_z(axis, 1.1), axis, 1e-15));
        // (1,1,0) by π/2: x̄=−1, ȳ=1, z̄ = −1/2 + 0 + ½·cos π = −1
        let r = rotate_about_z(Point::new(1.0, 1.0, 0.0), std::f64::consts::FRAC_PI_2);
        assert!(close(r, Point::new(-1.0, 1.0, -1.0), 1e-12));
        assert!(close(r, rotate_by_conjugation(Point::new(1.0, 1.0, 0.0), std::f64::consts::FRAC_PI_2), 1e-12));
    }

    fn rotate_by_conjugation(p: Point, omega: f64) -> Point {
        let q = quadratic_map(p);
        let (s, c) = omega.sin_cos();
        // row vector times the linear rotation matrix
        let lin = Point::new(q.x * c - q.y * s, q.x * s + q.y * c, q.z);
        quadratic_map_inverse(lin)
    }

    #[test]
    fn metric_examples() {
        assert_eq!(metric_at(Point::ORIGIN).g, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(metric_at(Point::new(1.0, 5.0, -2.0)).g, [[1.0, 0.0, 0.0], [0.0, 2.0, -1.0], [0.0, -1.0, 1.0]]);
        let m = metric_at(Point::new(-3.7, 0.0, 0.0));
        let inv = m.inverse();
        for i in 0..3 {
            for j in 0..3 {
                let e: f64 = (0..3).map(|k| m.g[i][k] * inv.g[k][j]).sum();
                assert!((e - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tangent_norm_examples() {
        assert_eq!(tangent_norm(Point::new(1.0, 2.0, 3.0), [0.0; 3]), 0.0);
        assert_eq!(tangent_norm(Point::ORIGIN, [1.0, 0.0, 0.0]), 1.0);
        let p = Point::new(1.3, 0.0, 0.0);
        let v = [0.2, -0.4, 0.9];
        assert!((tangent_norm(p, v) - metric_at(p).quadratic_form(v).sqrt()).abs() < 1e-14);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -5.0f64..5.0
    }

    fn point() -> impl Strategy<Value = Point> {
        (coord(), coord(), coord()).prop_map(|(x, y, z)| Point::new(x, y, z))
    }

    fn params() -> impl Strategy<Value = TranslationParams> {
        (coord(), coord(), coord()).prop_map(|(x, y, z)| TranslationParams::new(x, y, z))
    }

    proptest! {
        #[test]
        fn group_law_composes(p in point(), t1 in params(), t2 in params()) {
            let seq = translate(translate(p, t1), t2);
            // composition via the matrix product: t1 acts first, so it sits rightmost
            let m = heisenberg_mul(heisenberg(t2.x, t2.y, t2.z), heisenberg(t1.x, t1.y, t1.z));
            let composed = TranslationParams::new(m[0][1], m[1][2], m[0][2]);
            prop_assert!(close(seq, translate(p, composed), 1e-12 * (1.0 + seq.z.abs())));
            prop_assert!(close(seq, translate(p, t1.then(&t2)), 1e-12 * (1.0 + seq.z.abs())));
        }

        #[test]
        fn inverse_round_trip(p in point(), t in params()) {
            let back = translate(translate(p, t), inverse_translation(t));
            prop_assert!(close(back, p, 1e-12 * (1.0 + p.z.abs() + t.x.abs() * t.y.abs())));
        }

        #[test]
        fn to_origin_maps_to_origin(p in point()) {
            prop_assert!(close(translate(p, translation_to_origin(p)), Point::ORIGIN, 1e-13));
        }

        #[test]
        fn quadratic_round_trip(p in point()) {
            prop_assert!(close(quadratic_map_inverse(quadratic_map(p)), p, 1e-14));
        }

        #[test]
        fn rotation_is_conjugated_linear_rotation(p in point(), w in -7.0f64..7.0) {
            prop_assert!(close(rotate_about_z(p, w), rotate_by_conjugation(p, w), 1e-12));
        }

        #[test]
        fn metric_determinant_is_one(p in point()) {
            prop_assert!((metric_at(p).determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn metric_invariant_under_translation(p in point(), t in params(), v in (coord(), coord(), coord())) {
            let v = [v.0, v.1, v.2];
            // finite-difference Jacobian of translate(·, t), step 1e-6
            let h = 1e-6;
            let mut pushed = [0.0; 3];
            for (i, vi) in v.iter().enumerate() {
                let mut e = [0.0; 3];
                e[i] = h;
                let plus = translate(Point::new(p.x + e[0], p.y + e[1], p.z + e[2]), t);
                let minus = translate(Point::new(p.x - e[0], p.y - e[1], p.z - e[2]), t);
                let col = [(plus.x - minus.x) / (2.0 * h), (plus.y - minus.y) / (2.0 * h), (plus.z - minus.z) / (2.0 * h)];
                for k in 0..3 {
                    pushed[k] += col[k] * vi;
                }
            }
            let q = translate(p, t);
            prop_assert!((tangent_norm(p, v) - tangent_norm(q, pushed)).abs() < 1e-8 * (1.0 + tangent_norm(p, v)));
            let exact = translation_pushforward(t, v);
            prop_assert!((tangent_norm(p, v) - tangent_norm(q, exact)).abs() < 1e-12 * (1.0 + tangent_norm(p, v)));
        }

        #[test]
        fn rotation_about_point_fixes_center(c in point(), w in -3.0f64..3.0) {
            prop_assert!(close(rotate_about(c, c, w), c, 1e-12 * (1.0 + c.x.abs() * c.y.abs())));
        }
    }
}
