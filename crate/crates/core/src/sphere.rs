//! Geodesic spheres: meridian cross-section, rotation into a surface of
//! revolution about the fibre, meshing, and the embeddedness/convexity scans.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{NilError, Result};
use crate::geodesic::{sinc, u_minus_sin_over_u2};
use crate::mesh::Mesh;
use crate::nil::{rotate_about_z, translate, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSpec {
    pub center: Point,
    pub radius: f64,
}

impl SphereSpec {
    /// Geodesic spheres are embedded only for `0 < R ≤ 2π`.
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= TAU) {
            return Err(NilError::RadiusOutOfRange { radius });
        }
        if !center.is_finite() {
            return Err(NilError::InvalidParameter("sphere center must be finite".into()));
        }
        Ok(SphereSpec { center, radius })
    }
}

/// `(X, Z)` of the sphere's trace in the `[x, z]` plane, i.e. the endpoint of
/// the geodesic of elevation `θ` and length `R` that ends on `y = 0`.
/// Any `R > 0` is accepted so the scan can look beyond 2π.
pub fn sphere_cross_section(radius: f64, theta: f64) -> (f64, f64) {
    if theta.abs() == FRAC_PI_2 {
        return (0.0, theta.signum() * radius);
    }
    let (c, w) = (theta.cos(), theta.sin());
    let u = w * radius;
    (c * radius * sinc(0.5 * u), u + 0.5 * c * c * radius * radius * u_minus_sin_over_u2(u))
}

/// Sphere point at elevation `θ`, rotated by `α` about the fibre through the center.
pub fn sphere_point(spec: &SphereSpec, theta: f64, alpha: f64) -> Point {
    let (x, z) = sphere_cross_section(spec.radius, theta);
    translate(rotate_about_z(Point::new(x, 0.0, z), alpha), spec.center.as_translation())
}

/// Structured `(θ, α)` mesh with single pole vertices; closed, genus 0.
pub fn sphere_mesh(spec: &SphereSpec, n_theta: usize, n_alpha: usize) -> Result<Mesh> {
    if n_theta < 3 || n_alpha < 3 {
        return Err(NilError::InvalidResolution(format!("sphere mesh needs nθ, nα ≥ 3 (got {n_theta}, {n_alpha})")));
    }
    let mut mesh = Mesh { tags: Some(Vec::new()), ..Default::default() };
    let tags = mesh.tags.as_mut().unwrap();
    mesh.vertices.push(sphere_point(spec, -FRAC_PI_2, 0.0));
    tags.push([-FRAC_PI_2, 0.0]);
    for i in 1..n_theta {
        let theta = -FRAC_PI_2 + PI * i as f64 / n_theta as f64;
        for j in 0..n_alpha {
            let alpha = -PI + TAU * j as f64 / n_alpha as f64;
            mesh.vertices.push(sphere_point(spec, theta, alpha));
            tags.push([theta, alpha]);
        }
    }
    mesh.vertices.push(sphere_point(spec, FRAC_PI_2, 0.0));
    tags.push([FRAC_PI_2, 0.0]);
    let north = mesh.vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * n_alpha + (j % n_alpha);
    for j in 0..n_alpha {
        mesh.push_triangle([0, ring(1, j + 1), ring(1, j)]);
        mesh.push_triangle([north, ring(n_theta - 1, j), ring(n_theta - 1, j + 1)]);
    }
    for i in 1..n_theta - 1 {
        for j in 0..n_alpha {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1));
            mesh.push_triangle([a, b, d]);
            mesh.push_triangle([a, d, c]);
        }
    }
    Ok(mesh)
}

/// Smallest meridian `X(R, θ)` over `n` interior samples of `θ ∈ (0, π/2)`.
/// Negative values mean the meridian crosses the fibre axis: self-intersection.
pub fn meridian_min_x(radius: f64, n: usize) -> f64 {
    (1..=n)
        .map(|k| sphere_cross_section(radius, FRAC_PI_2 * k as f64 / (n + 1) as f64).0)
        .fold(f64::INFINITY, f64::min)
}

fn hull_cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull (counterclockwise, collinear points dropped).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && hull_cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - s * d[0]).hypot(p[1] - a[1] - s * d[1])
}

/// Trace of the sphere in the vertical plane through the fibre axis at azimuth
/// `ω`: the meridian rotated by `ω` gains height `X²·sin 2ω / 4`.
pub fn sphere_axial_section(radius: f64, theta: f64, omega: f64) -> (f64, f64) {
    let (x, z) = sphere_cross_section(radius, theta);
    (x, z + 0.25 * x * x * (2.0 * omega).sin())
}

/// Largest distance from a sampled section point (or its mirror) to the
/// boundary of their convex hull. Zero, up to rounding, for a convex section.
pub fn axial_convexity_defect(radius: f64, omega: f64, n: usize) -> f64 {
    let mut pts = Vec::with_capacity(2 * (n + 1));
    for k in 0..=n {
        let (x, z) = sphere_axial_section(radius, -FRAC_PI_2 + PI * k as f64 / n as f64, omega);
        pts.push([x, z]);
        pts.push([-x, z]);
    }
    let hull = convex_hull(&pts);
    let on_hull: std::collections::HashSet<[u64; 2]> = hull.iter().map(|p| p.map(f64::to_bits)).collect();
    pts.iter()
        .filter(|p| !on_hull.contains(&p.map(f64::to_bits)))
        .map(|&p| (0..hull.len()).map(|i| segment_distance(p, hull[i], hull[(i + 1) % hull.len()])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Worst convexity defect over axial sections at 8 azimuths in `[0, π)`.
///
/// The `[x, z]` section alone (ω = 0) stays convex well past π/2; the shear
/// `xy/2` of the rotation first bends the caps outwards along the diagonals.
pub fn ball_convexity_defect(radius: f64, n: usize) -> f64 {
    (0..8).map(|k| axial_convexity_defect(radius, PI * k as f64 / 8.0, n)).fold(0.0, f64::max)
}

/// Every sampled axial section bounds a convex region (within 1e-9).
pub fn ball_is_convex(radius: f64, n: usize) -> bool {
    ball_convexity_defect(radius, n) <= 1e-9
}
