//! Apollonius surfaces `d(P1, Q) = λ·d(Q, P2)`, sampled as the zero set of
//! `d(P1, Q) − λ·d(Q, P2)` by marching tetrahedra.
//!
//! Each lattice cube is split into the six Kuhn tetrahedra around its main
//! diagonal, so there are no ambiguous cells and neighbouring cubes share
//! faces consistently. Edge crossings get one false-position step on the
//! true field.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{NilError, Result};
use crate::mesh::{par_map, Mesh};
use crate::nil::Point;
use crate::solver::distance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lambda {
    Finite(f64),
    Infinite,
}

impl Lambda {
    pub fn value(&self) -> f64 {
        match self {
            Lambda::Finite(v) => *v,
            Lambda::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApolloniusSpec {
    pub p1: Point,
    pub p2: Point,
    pub lambda: Lambda,
}

impl ApolloniusSpec {
    pub fn new(p1: Point, p2: Point, lambda: Lambda) -> Result<Self> {
        if p1 == p2 {
            return Err(NilError::DuplicatePoints);
        }
        if let Lambda::Finite(v) = lambda {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(NilError::InvalidParameter(format!("λ = {v} must be finite and ≥ 0")));
            }
        }
        Ok(ApolloniusSpec { p1, p2, lambda })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y && min.z < max.z) {
            return Err(NilError::InvalidParameter("bounding box must have min < max on every axis".into()));
        }
        Ok(BoundingBox { min, max })
    }

    pub fn diagonal(&self) -> f64 {
        self.min.model_distance(&self.max)
    }

    fn lattice(&self, n: usize, i: usize, j: usize, k: usize) -> Point {
        let f = |lo: f64, hi: f64, a: usize| lo + (hi - lo) * a as f64 / n as f64;
        Point::new(f(self.min.x, self.max.x, i), f(self.min.y, self.max.y, j), f(self.min.z, self.max.z, k))
    }
}

fn combine(d1: f64, d2: f64, lambda: Lambda) -> f64 {
    match lambda {
        Lambda::Finite(l) => d1 - l * d2,
        Lambda::Infinite => -d2,
    }
}

/// `d(P1, Q) − λ·d(Q, P2)`; `−d(Q, P2)` for infinite λ.
pub fn apollonius_field(spec: &ApolloniusSpec, q: Point) -> Result<f64> {
    let d2 = distance(q, spec.p2)?;
    match spec.lambda {
        Lambda::Infinite => Ok(-d2),
        Lambda::Finite(l) => Ok(distance(spec.p1, q)? - l * d2),
    }
}

/// Both focal distances on an `(n+1)³` lattice; reusable across λ.
/// Lattice points whose distances are unavailable hold NaN.
#[derive(Debug, Clone)]
pub struct DistanceGrid {
    pub p1: Point,
    pub p2: Point,
    pub bbox: BoundingBox,
    pub n: usize,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl DistanceGrid {
    pub fn compute(p1: Point, p2: Point, bbox: BoundingBox, n: usize, jobs: usize) -> Result<Self> {
        if n < 2 {
            return Err(NilError::InvalidResolution(format!("lattice needs at least 2 cells per axis (got {n})")));
        }
        let m = n + 1;
        let points: Vec<Point> = (0..m * m * m).map(|idx| bbox.lattice(n, idx % m, (idx / m) % m, idx / (m * m))).collect();
        let pairs = par_map(&points, jobs, |&q| (distance(p1, q).unwrap_or(f64::NAN), distance(q, p2).unwrap_or(f64::NAN)));
        let (d1, d2) = pairs.into_iter().unzip();
        Ok(DistanceGrid { p1, p2, bbox, n, d1, d2 })
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.n + 1;
        (k * m + j) * m + i
    }

    fn position(&self, idx: usize) -> Point {
        let m = self.n + 1;
        self.bbox.lattice(self.n, idx % m, (idx / m) % m, idx / (m * m))
    }

    pub fn field(&self, idx: usize, lambda: Lambda) -> f64 {
        combine(self.d1[idx], self.d2[idx], lambda)
    }

    /// Zero set of the field for `spec.lambda`. The spec's foci must match the grid's.
    pub fn extract(&self, spec: &ApolloniusSpec, jobs: usize) -> Result<Mesh> {
        if spec.p1 != self.p1 || spec.p2 != self.p2 {
            return Err(NilError::InvalidParameter("grid foci differ from the surface foci".into()));
        }
        let lambda = spec.lambda;
        let values: Vec<f64> = (0..self.d1.len()).map(|i| self.field(i, lambda)).collect();
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut faces: Vec<[usize; 3]> = Vec::new();
        let mut edge_id = |a: usize, b: usize| {
            let key = (a.min(b), a.max(b));
            *edge_ids.entry(key).or_insert_with(|| {
                edges.push(key);
                edges.len() - 1
            })
        };
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for k in 0..self.n {
            for j in 0..self.n {
                for i in 0..self.n {
                    let corner = |bits: usize| self.index(i + (bits & 1), j + ((bits >> 1) & 1), k + ((bits >> 2) & 1));
                    for p in PERMS {
                        let tet = [corner(0), corner(1 << p[0]), corner((1 << p[0]) | (1 << p[1])), corner(7)];
                        let v = tet.map(|t| values[t]);
                        if v.iter().any(|x| x.is_nan()) {
                            continue;
                        }
                        let inside: Vec<usize> = (0..4).filter(|&q| v[q] < 0.0).collect();
                        let outside: Vec<usize> = (0..4).filter(|&q| v[q] >= 0.0).collect();
                        match inside.len() {
                            1 | 3 => {
                                let (lone, rest) = if inside.len() == 1 { (inside[0], &outside) } else { (outside[0], &inside) };
                                faces.push([
                                    edge_id(tet[lone], tet[rest[0]]),
                                    edge_id(tet[lone], tet[rest[1]]),
                                    edge_id(tet[lone], tet[rest[2]]),
                                ]);
                            }
                            2 => {
                                let (a, b, c, d) = (tet[inside[0]], tet[inside[1]], tet[outside[0]], tet[outside[1]]);
                                let (ac, ad, bd, bc) = (edge_id(a, c), edge_id(a, d), edge_id(b, d), edge_id(b, c));
                                faces.push([ac, ad, bd]);
                                faces.push([ac, bd, bc]);
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        if edges.is_empty() {
            return Err(NilError::EmptySurface);
        }
        let vertices = par_map(&edges, jobs, |&(a, b)| self.crossing(spec, self.position(a), values[a], self.position(b), values[b]));
        let mut mesh = Mesh { vertices, ..Default::default() };
        for f in faces {
            mesh.push_triangle(f);
        }
        Ok(mesh)
    }

    fn crossing(&self, spec: &ApolloniusSpec, a: Point, fa: f64, b: Point, fb: f64) -> Point {
        let lerp = |a: Point, b: Point, s: f64| Point::new(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y), a.z + s * (b.z - a.z));
        let s = fa / (fa - fb);
        let p = lerp(a, b, s);
        let Ok(fp) = apollonius_field(spec, p) else { return p };
        if fp == 0.0 {
            return p;
        }
        if (fp < 0.0) == (fa < 0.0) {
            lerp(p, b, fp / (fp - fb))
        } else {
            lerp(a, p, fa / (fa - fp))
        }
    }
}

/// Samples the Apollonius surface on an `n³`-cell lattice over `bbox`.
pub fn apollonius_sample(spec: &ApolloniusSpec, bbox: BoundingBox, n: usize, jobs: usize) -> Result<Mesh> {
    DistanceGrid::compute(spec.p1, spec.p2, bbox, n, jobs)?.extract(spec, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::geodesic_point_from;
    use crate::solver::solve_geodesic;

    fn foci() -> (Point, Point) {
        (Point::new(-0.4, 0.0, 0.0), Point::new(0.4, 0.1, 0.2))
    }

    fn bbox() -> BoundingBox {
        BoundingBox::new(Point::new(-1.2, -1.2, -1.2), Point::new(1.2, 1.2, 1.2)).unwrap()
    }

    #[test]
    fn field_examples() {
        let (p1, p2) = foci();
        let bisector = ApolloniusSpec::new(p1, p2, Lambda::Finite(1.0)).unwrap();
        let sol = solve_geodesic(p1, p2).unwrap();
        let mid = geodesic_point_from(p1, &sol.params.with_t(0.5 * sol.params.t));
        assert!(apollonius_field(&bisector, mid).unwrap().abs() < 1e-7);
        assert!(apollonius_field(&bisector, p1).unwrap() < 0.0 && apollonius_field(&bisector, p2).unwrap() > 0.0);
        assert!((apollonius_field(&ApolloniusSpec::new(p1, p2, Lambda::Finite(3.0)).unwrap(), p2).unwrap() - sol.params.t).abs() < 1e-12);
        let zero = ApolloniusSpec::new(p1, p2, Lambda::Finite(0.0)).unwrap();
        assert_eq!(apollonius_field(&zero, p1).unwrap(), 0.0);
        assert!(apollonius_field(&zero, mid).unwrap() > 0.0);
        assert!(ApolloniusSpec::new(p1, p1, Lambda::Finite(1.0)).is_err());
        assert!(ApolloniusSpec::new(p1, p2, Lambda::Finite(-1.0)).is_err());
    }

    #[test]
    fn extracted_vertices_satisfy_ratio() {
        let (p1, p2) = foci();
        let grid = DistanceGrid::compute(p1, p2, bbox(), 16, 1).unwrap();
        for l in [0.5, 1.0, 2.0] {
            let spec = ApolloniusSpec::new(p1, p2, Lambda::Finite(l)).unwrap();
            let mesh = grid.extract(&spec, 2).unwrap();
            assert!(!mesh.triangles.is_empty() && mesh.indices_valid());
            for v in &mesh.vertices {
                let ratio = distance(p1, *v).unwrap() / distance(*v, p2).unwrap();
                assert!((ratio / l - 1.0).abs() < 0.02, "λ={l}: {ratio}");
            }
        }
    }

    #[test]
    fn closed_surface_around_focus() {
        let (p1, p2) = foci();
        let spec = ApolloniusSpec::new(p1, p2, Lambda::Finite(2.0)).unwrap();
        let big = BoundingBox::new(Point::new(-1.6, -1.6, -1.6), Point::new(1.6, 1.6, 1.6)).unwrap();
        let mesh = apollonius_sample(&spec, big, 12, 1).unwrap();
        assert!(mesh.is_closed());
        assert_eq!(mesh.euler_characteristic(), 2);
    }

    #[test]
    fn degenerate_lambda_is_empty() {
        let (p1, p2) = foci();
        let spec = ApolloniusSpec::new(p1, p2, Lambda::Finite(1e-6)).unwrap();
        assert!(matches!(apollonius_sample(&spec, bbox(), 8, 1), Err(NilError::EmptySurface)));
        assert!(matches!(apollonius_sample(&spec, bbox(), 1, 1), Err(NilError::InvalidResolution(_))));
    }
}
