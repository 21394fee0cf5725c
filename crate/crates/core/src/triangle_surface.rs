//! Surfaces of geodesic triangles.
//!
//! `P(λ1, λ2)` is the point closest to `A0` on the curve
//! `AS_{A0A1}(λ1) ∩ AS_{A2A0}(λ2)`, i.e. `d(A0,Q) = λ1·d(Q,A1)` and
//! `d(A2,Q) = λ2·d(Q,A0)`. At such a minimiser the three distance gradients
//! are linearly dependent; `det[∇d0, ∇d1, ∇d2] = 0` does not involve λ and
//! serves as the implicit equation of the surface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::apollonius::Lambda;
use crate::error::{NilError, Result};
use crate::mesh::{par_map, Mesh};
use crate::nil::Point;
use crate::numeric::{brent, cross3, det3, dot3, levenberg_step3, norm3, solve3};
use crate::projection::{fibre_project, Point2D};
use crate::solver::{distance, distance_gradient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleType {
    FibreType,
    GeneralType,
}

/// Fibre-type iff the projected vertices are collinear (a vertical plane holds them).
pub fn classify_triangle(a0: Point, a1: Point, a2: Point) -> TriangleType {
    let (p0, p1, p2) = (fibre_project(a0), fibre_project(a1), fibre_project(a2));
    if p1.sub(p0).cross(p2.sub(p0)).abs() <= 1e-12 {
        TriangleType::FibreType
    } else {
        TriangleType::GeneralType
    }
}

/// Vertices must be distinct and lie in the ball of radius π about `A0`.
pub fn check_triangle(a0: Point, a1: Point, a2: Point) -> Result<()> {
    if a0 == a1 || a1 == a2 || a0 == a2 {
        return Err(NilError::DuplicatePoints);
    }
    let max_distance = distance(a0, a1)?.max(distance(a0, a2)?);
    if max_distance > PI {
        return Err(NilError::TriangleTooLarge { max_distance });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        SurfaceOptions { restarts: 24, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub point: Point,
    /// Larger of the two normalised ratio residuals.
    pub residual: f64,
    /// Restarts landing within 1e-4 of the reported point.
    pub agreeing_restarts: usize,
    /// Another restart found a different point with the same objective.
    pub ambiguous: bool,
}

impl SurfacePoint {
    fn exact(point: Point) -> Self {
        SurfacePoint { point, residual: 0.0, agreeing_restarts: 0, ambiguous: false }
    }
}

struct Problem {
    v: [Point; 3],
    l1: f64,
    l2: f64,
}

struct Eval {
    d: [f64; 3],
    g: [[f64; 3]; 3],
}

impl Eval {
    fn constraints(&self, p: &Problem) -> [f64; 2] {
        [(self.d[0] - p.l1 * self.d[1]) / (1.0 + p.l1), (self.d[2] - p.l2 * self.d[0]) / (1.0 + p.l2)]
    }

    fn constraint_grads(&self, p: &Problem) -> [[f64; 3]; 2] {
        let mut out = [[0.0; 3]; 2];
        for k in 0..3 {
            out[0][k] = (self.g[0][k] - p.l1 * self.g[1][k]) / (1.0 + p.l1);
            out[1][k] = (self.g[2][k] - p.l2 * self.g[0][k]) / (1.0 + p.l2);
        }
        out
    }
}

fn evaluate(vertices: &[Point; 3], x: [f64; 3]) -> Option<Eval> {
    let q = Point::from_array(x);
    let mut d = [0.0; 3];
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        let (di, gi) = distance_gradient(vertices[i], q).ok()?;
        d[i] = di;
        g[i] = gi;
    }
    Some(Eval { d, g })
}

/// `det[∇d0, ∇d1, ∇d2]` at `q`; zero on the triangle surface.
pub fn surface_implicit(vertices: &[Point; 3], q: Point) -> Result<f64> {
    let e = evaluate(vertices, q.to_array()).ok_or(NilError::InvalidParameter("gradient undefined at a vertex".into()))?;
    Ok(det3(e.g))
}

fn add(x: [f64; 3], d: [f64; 3], s: f64) -> [f64; 3] {
    [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]]
}

/// Levenberg–Marquardt on `(d0, √μ·c1, √μ·c2)` for increasing μ.
fn penalty_descent(p: &Problem, start: [f64; 3]) -> Option<[f64; 3]> {
    let mut x = start;
    for &mu in &[1.0, 1e2, 1e4, 1e6, 1e8] {
        let sm: f64 = f64::sqrt(mu);
        let system = |e: &Eval| {
            let c = e.constraints(p);
            let cg = e.constraint_grads(p);
            let r = [e.d[0], sm * c[0], sm * c[1]];
            let j = [e.g[0], cg[0].map(|v| sm * v), cg[1].map(|v| sm * v)];
            (r, j)
        };
        let mut e = evaluate(&p.v, x)?;
        let (mut r, mut j) = system(&e);
        let mut phi = dot3(r, r);
        let mut nu = 1e-3;
        for _ in 0..60 {
            let scale = (0..3).map(|k| (0..3).map(|i| j[i][k] * j[i][k]).sum::<f64>()).fold(0.0, f64::max);
            let Some(delta) = levenberg_step3(j, r, nu * scale) else { break };
            let xn = add(x, delta, 1.0);
            match evaluate(&p.v, xn) {
                Some(en) => {
                    let (rn, jn) = system(&en);
                    let phin = dot3(rn, rn);
                    if phin < phi {
                        x = xn;
                        e = en;
                        r = rn;
                        j = jn;
                        let done = phi - phin <= 1e-15 * phi || norm3(delta) < 1e-13;
                        phi = phin;
                        nu = (nu / 3.0).max(1e-12);
                        if done {
                            break;
                        }
                        continue;
                    }
                }
                None => {}
            }
            nu *= 4.0;
            if nu > 1e10 {
                break;
            }
        }
        let _ = e;
    }
    Some(x)
}

/// Minimum-norm Newton projection onto both constraints.
fn project(p: &Problem, start: [f64; 3]) -> Option<([f64; 3], f64)> {
    let mut x = start;
    let mut res = f64::INFINITY;
    for _ in 0..30 {
        let e = evaluate(&p.v, x)?;
        let c = e.constraints(p);
        res = c[0].abs().max(c[1].abs());
        if res < 1e-14 {
            break;
        }
        let j = e.constraint_grads(p);
        let m = [[dot3(j[0], j[0]), dot3(j[0], j[1])], [dot3(j[1], j[0]), dot3(j[1], j[1])]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let y = [(m[1][1] * c[0] - m[0][1] * c[1]) / det, (m[0][0] * c[1] - m[1][0] * c[0]) / det];
        let delta = [0, 1, 2].map(|k| -(j[0][k] * y[0] + j[1][k] * y[1]));
        x = add(x, delta, 1.0);
    }
    Some((x, res))
}

fn kkt_residual(p: &Problem, x: [f64; 3]) -> Option<[f64; 3]> {
    let e = evaluate(&p.v, x)?;
    let c = e.constraints(p);
    Some([c[0], c[1], det3(e.g)])
}

/// Newton on `(c1, c2, det[∇d0, ∇d1, ∇d2]) = 0`.
fn kkt_polish(p: &Problem, start: [f64; 3]) -> [f64; 3] {
    let mut x = start;
    let Some(mut r) = kkt_residual(p, x) else { return x };
    let h = 1e-6;
    for _ in 0..12 {
        if norm3(r) < 1e-13 {
            break;
        }
        let mut jac = [[0.0; 3]; 3];
        let mut ok = true;
        for k in 0..3 {
            let (mut a, mut b) = (x, x);
            a[k] += h;
            b[k] -= h;
            match (kkt_residual(p, a), kkt_residual(p, b)) {
                (Some(ra), Some(rb)) => {
                    for i in 0..3 {
                        jac[i][k] = (ra[i] - rb[i]) / (2.0 * h);
                    }
                }
                _ => ok = false,
            }
        }
        if !ok {
            break;
        }
        let Some(delta) = solve3(jac, r.map(|v| -v)) else { break };
        let mut s = 1.0;
        let mut moved = false;
        for _ in 0..20 {
            let xn = add(x, delta, s);
            if let Some(rn) = kkt_residual(p, xn) {
                if norm3(rn) < norm3(r) {
                    x = xn;
                    r = rn;
                    moved = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

/// Whether `x` is a local minimum of `d0` along the constraint curve.
fn is_local_min(p: &Problem, x: [f64; 3], d0: f64) -> bool {
    let Some(e) = evaluate(&p.v, x) else { return false };
    let cg = e.constraint_grads(p);
    let tangent = cross3(cg[0], cg[1]);
    let tn = norm3(tangent);
    if tn == 0.0 {
        return false;
    }
    let eps = 1e-3;
    for s in [-1.0, 1.0] {
        let Some((y, res)) = project(p, add(x, tangent, s * eps / tn)) else { return false };
        if res > 1e-10 {
            continue;
        }
        match evaluate(&p.v, y) {
            Some(ey) if ey.d[0] < d0 - 1e-11 => return false,
            None => return false,
            _ => {}
        }
    }
    true
}

/// Full pipeline from one seed: penalty descent, projection, KKT polish.
/// Returns the point, its `d0`, and the constraint residual.
fn descend(p: &Problem, seed: [f64; 3]) -> Option<([f64; 3], f64, f64)> {
    let x = penalty_descent(p, seed)?;
    let (x, res) = project(p, x)?;
    if res > 1e-6 {
        return None;
    }
    let y = kkt_polish(p, x);
    let (y, res) = project(p, y)?;
    if res > 1e-9 {
        return None;
    }
    let d0 = evaluate(&p.v, y)?.d[0];
    if !is_local_min(p, y, d0) {
        return None;
    }
    Some((y, d0, res))
}

fn seeds(p: &Problem) -> Vec<[f64; 3]> {
    let n = 10;
    let mut scored: Vec<(f64, [f64; 3])> = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let (b1, b2) = (i as f64 / n as f64, j as f64 / n as f64);
            let b0 = 1.0 - b1 - b2;
            let x = [0, 1, 2].map(|k| b0 * p.v[0].to_array()[k] + b1 * p.v[1].to_array()[k] + b2 * p.v[2].to_array()[k]);
            if let Some(e) = evaluate(&p.v, x) {
                let c = e.constraints(p);
                scored.push((c[0].abs() + c[1].abs(), x));
            }
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.into_iter().take(4).map(|(_, x)| x).collect()
}

/// `P(λ1, λ2)`. `λ1 = 0 → A0` and `λ2 = 0 → A2` take precedence; the
/// infinite limits are pinned to `A1` (λ1) and `A0` (λ2).
pub fn triangle_surface_point(vertices: [Point; 3], l1: Lambda, l2: Lambda, opts: &SurfaceOptions) -> Result<SurfacePoint> {
    let [a0, a1, a2] = vertices;
    let (v1, v2) = (l1.value(), l2.value());
    if !(v1 >= 0.0 && v2 >= 0.0) {
        return Err(NilError::InvalidParameter("λ1, λ2 must be ≥ 0".into()));
    }
    if v1 == 0.0 && v2 == 0.0 {
        return Err(NilError::InvalidParameter("λ1 = λ2 = 0 is excluded".into()));
    }
    if v1 == 0.0 {
        return Ok(SurfacePoint::exact(a0));
    }
    if v2 == 0.0 {
        return Ok(SurfacePoint::exact(a2));
    }
    match (l1, l2) {
        (Lambda::Infinite, Lambda::Infinite) => return Err(NilError::InvalidParameter("λ1 = λ2 = ∞ has no limit point".into())),
        (Lambda::Infinite, _) => return Ok(SurfacePoint::exact(a1)),
        (_, Lambda::Infinite) => return Ok(SurfacePoint::exact(a0)),
        _ => {}
    }
    let p = Problem { v: vertices, l1: v1, l2: v2 };
    let mut best: Option<([f64; 3], f64, f64)> = None;
    let consider = |best: &mut Option<([f64; 3], f64, f64)>, cand: ([f64; 3], f64, f64)| {
        if best.is_none_or(|b| cand.1 < b.1 - 1e-12) {
            *best = Some(cand);
        }
    };
    for s in seeds(&p) {
        if let Some(c) = descend(&p, s) {
            consider(&mut best, c);
        }
    }
    let Some(first) = best else {
        return Err(NilError::EmptyIntersection { residual: f64::INFINITY });
    };
    // restarts around the winner
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ v1.to_bits().rotate_left(17) ^ v2.to_bits());
    let mut outcomes = Vec::with_capacity(opts.restarts);
    for _ in 0..opts.restarts {
        let r = 0.1 * rng.gen::<f64>().cbrt();
        let (u, phi): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-PI..PI));
        let s = (1.0 - u * u).sqrt();
        let dir = [s * phi.cos(), s * phi.sin(), u];
        if let Some(c) = descend(&p, add(first.0, dir, r)) {
            outcomes.push(c);
            consider(&mut best, c);
        }
    }
    let (x, d0, res) = best.unwrap();
    let q = Point::from_array(x);
    let agreeing_restarts = outcomes.iter().filter(|o| Point::from_array(o.0).model_distance(&q) <= 1e-4).count();
    let ambiguous = outcomes.iter().any(|o| Point::from_array(o.0).model_distance(&q) > 1e-3 && (o.1 - d0).abs() < 1e-6);
    let point = if ambiguous {
        // keep the lexicographically smallest of the tied candidates
        outcomes
            .iter()
            .filter(|o| (o.1 - d0).abs() < 1e-6)
            .map(|o| o.0)
            .chain(std::iter::once(x))
            .min_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2])))
            .map(Point::from_array)
            .unwrap()
    } else {
        q
    };
    Ok(SurfacePoint { point, residual: res, agreeing_restarts, ambiguous })
}

/// Normalised ratio residuals `(|d0 − λ1·d1|/(1+λ1), |d2 − λ2·d0|/(1+λ2))` at `q`.
pub fn ratio_residuals(vertices: [Point; 3], l1: f64, l2: f64, q: Point) -> Result<[f64; 2]> {
    let d0 = distance(vertices[0], q)?;
    let d1 = distance(q, vertices[1])?;
    let d2 = distance(vertices[2], q)?;
    Ok([(d0 - l1 * d1).abs() / (1.0 + l1), (d2 - l2 * d0).abs() / (1.0 + l2)])
}

/// Compactified parameter: `λ = tan(u·π/2)`, with `u = 1` the infinite limit.
pub fn grid_lambda(i: usize, n: usize) -> Lambda {
    if i >= n {
        Lambda::Infinite
    } else {
        Lambda::Finite((i as f64 / n as f64 * FRAC_PI_2).tan())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub i: usize,
    pub j: usize,
    pub lambda1: Lambda,
    pub lambda2: Lambda,
    pub point: Option<SurfacePoint>,
    /// Why the sample is a hole.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleSurface {
    pub vertices: [Point; 3],
    pub n: usize,
    pub kind: TriangleType,
    /// Row-major over `(i, j)`, `(n + 1)²` entries.
    pub samples: Vec<GridSample>,
}

impl TriangleSurface {
    pub fn sample(&self, i: usize, j: usize) -> &GridSample {
        &self.samples[i * (self.n + 1) + j]
    }

    pub fn holes(&self) -> usize {
        self.samples.iter().filter(|s| s.point.is_none()).count()
    }

    pub fn ambiguous(&self) -> usize {
        self.samples.iter().filter(|s| s.point.is_some_and(|p| p.ambiguous)).count()
    }
}

/// Samples `P(λ1, λ2)` on the compactified `(n + 1)²` grid and triangulates
/// neighbouring samples. Failed samples become holes.
pub fn triangle_surface_mesh(vertices: [Point; 3], n: usize, opts: &SurfaceOptions, jobs: usize) -> Result<(TriangleSurface, Mesh)> {
    if n < 4 {
        return Err(NilError::InvalidResolution(format!("triangle grid needs n ≥ 4 (got {n})")));
    }
    check_triangle(vertices[0], vertices[1], vertices[2])?;
    let ij: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
    let samples = par_map(&ij, jobs, |&(i, j)| {
        let (lambda1, lambda2) = (grid_lambda(i, n), grid_lambda(j, n));
        match triangle_surface_point(vertices, lambda1, lambda2, opts) {
            Ok(p) => GridSample { i, j, lambda1, lambda2, point: Some(p), error: None },
            Err(e) => GridSample { i, j, lambda1, lambda2, point: None, error: Some(e.to_string()) },
        }
    });
    let surface = TriangleSurface { vertices, n, kind: classify_triangle(vertices[0], vertices[1], vertices[2]), samples };
    let mut mesh = Mesh { tags: Some(Vec::new()), ..Default::default() };
    let mut index = vec![None; surface.samples.len()];
    for (k, s) in surface.samples.iter().enumerate() {
        if let Some(p) = s.point {
            index[k] = Some(mesh.vertices.len());
            mesh.vertices.push(p.point);
            let u = |l: Lambda| if let Lambda::Finite(v) = l { v.atan() / FRAC_PI_2 } else { 1.0 };
            mesh.tags.as_mut().unwrap().push([u(s.lambda1), u(s.lambda2)]);
        }
    }
    let at = |i: usize, j: usize| index[i * (n + 1) + j];
    for i in 0..n {
        for j in 0..n {
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1));
            if let (Some(a), Some(b), Some(d)) = (a, b, d) {
                mesh.push_triangle([a, b, d]);
            }
            if let (Some(a), Some(d), Some(c)) = (a, d, c) {
                mesh.push_triangle([a, d, c]);
            }
        }
    }
    Ok((surface, mesh))
}

/// Distance from `q` to `P(λ1(q), λ2(q))`, the surface point with the same ratios.
pub fn surface_deviation(vertices: [Point; 3], q: Point, opts: &SurfaceOptions) -> Result<f64> {
    if vertices.contains(&q) {
        return Ok(0.0);
    }
    let d0 = distance(vertices[0], q)?;
    let l1 = d0 / distance(q, vertices[1])?;
    let l2 = distance(vertices[2], q)? / d0;
    let p = triangle_surface_point(vertices, Lambda::Finite(l1), Lambda::Finite(l2), opts)?;
    Ok(p.point.model_distance(&q))
}

/// Point of the surface on the fibre over `xy`, nearest to height `z_guess`,
/// as a root of the implicit equation.
pub fn fibre_lookup(vertices: [Point; 3], xy: Point2D, z_guess: f64) -> Result<Point> {
    let f = |z: f64| surface_implicit(&vertices, Point::new(xy.x, xy.y, z)).unwrap_or(f64::NAN);
    let f0 = f(z_guess);
    if f0 == 0.0 {
        return Ok(Point::new(xy.x, xy.y, z_guess));
    }
    let step = 1e-3;
    let mut prev = [(z_guess, f0), (z_guess, f0)];
    let mut k = 1.0;
    while k * step <= 2.0 {
        for (side, sign) in [(0usize, -1.0), (1usize, 1.0)] {
            let z = z_guess + sign * k * step;
            let fz = f(z);
            let (zp, fp) = prev[side];
            if fz.is_finite() && fp.is_finite() && fz * fp <= 0.0 {
                let root = brent(f, zp.min(z), zp.max(z), if zp < z { fp } else { fz }, if zp < z { fz } else { fp }, 1e-14, 200);
                return Ok(Point::new(xy.x, xy.y, root));
            }
            prev[side] = (z, fz);
        }
        k = (k * 1.25).ceil();
    }
    Err(NilError::ArcSurfaceMiss { from: z_guess - 2.0, to: z_guess + 2.0 })
}
