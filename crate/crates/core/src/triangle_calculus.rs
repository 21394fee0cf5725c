//! Simple ratios on geodesic lines, Menelaus points, lines on triangle
//! surfaces and Ceva configurations.
//!
//! Surface lines are built in the base plane and lifted back onto the
//! surface along the fibres. Fibre projection keeps simple ratios along a
//! geodesic, so every construction can measure ratios on projected sides.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{NilError, Result};
use crate::geodesic::{geodesic_point_from, GeodesicParams};
use crate::nil::Point;
use crate::numeric::brent;
use crate::projection::{circle_through, fibre_project, projected_arc, ArcDescriptor, ArcShape, Point2D, TangentCircle};
use crate::solver::{distance, point_at_ratio, solve_geodesic};
use crate::triangle_surface::{check_triangle, classify_triangle, fibre_lookup, surface_deviation, SurfaceOptions, TriangleType};

/// Largest endpoint residual for a point to count as on a geodesic line.
pub const LINE_TOL: f64 = 1e-6;
/// Slack in `d(A,P) + d(P,B) = d(A,B)` for betweenness.
pub const BETWEEN_TOL: f64 = 1e-7;
const SIDE_TOL: f64 = 1e-7;
const MIDPOINT_TOL: f64 = 1e-9;

/// Signed simple ratio `s(A,P,B) = ±d(A,P)/d(P,B)`, positive iff `P` lies between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleRatio {
    pub value: f64,
    /// Distance from `P` to the point at the same arc length on the line through `A`, `B`.
    pub residual: f64,
}

pub fn simple_ratio(a: Point, p: Point, b: Point) -> Result<SimpleRatio> {
    if a == b || a == p || p == b {
        return Err(NilError::DuplicatePoints);
    }
    let (dap, dpb, dab) = (distance(a, p)?, distance(p, b)?, distance(a, b)?);
    // P beyond B is reached from A, P beyond A from B; between works both ways.
    let fwd = solve_geodesic(a, b)?.params;
    let bwd = solve_geodesic(b, a)?.params;
    let r1 = geodesic_point_from(a, &fwd.with_t(dap)).model_distance(&p);
    let r2 = geodesic_point_from(b, &bwd.with_t(dpb)).model_distance(&p);
    let residual = r1.min(r2);
    if residual > LINE_TOL {
        return Err(NilError::NotOnLine { residual });
    }
    let between = (dap + dpb - dab).abs() <= BETWEEN_TOL;
    Ok(SimpleRatio { value: if between { dap / dpb } else { -dap / dpb }, residual })
}

/// `s(A*, P*, B*)` measured by arc length along the projected line `arc`
/// (from `A*` to `B*`); `p` is assumed to lie on its carrier.
pub fn simple_ratio_projected(arc: &ArcDescriptor, p: Point2D) -> f64 {
    let f = unwrapped_fraction(arc, p);
    f / (1.0 - f)
}

/// Fraction along `arc`, choosing the circle representative nearest `[0, 1]`.
fn unwrapped_fraction(arc: &ArcDescriptor, p: Point2D) -> f64 {
    let f = arc.fraction_of(p);
    match arc.shape {
        ArcShape::CircleArc { start_angle, end_angle, .. } if f > 1.0 => {
            let turn = TAU / (end_angle - start_angle).abs();
            if turn - f < f - 1.0 {
                f - turn
            } else {
                f
            }
        }
        _ => f,
    }
}

/// Menelaus point on the line `AjAk` for `P1 ∈ AiAj`, `P2 ∈ AiAk`:
/// `s(Aj,P3,Ak) = m / (s(Aj,P1,Ai)·s(Ai,P2,Ak))`, with `m = −1` classically.
pub fn menelaus_point(ai: Point, aj: Point, ak: Point, p1: Point, p2: Point, m: f64) -> Result<Point> {
    let s1 = simple_ratio(aj, p1, ai)?.value;
    let s2 = simple_ratio(ai, p2, ak)?.value;
    if s1 <= 0.0 || s2 <= 0.0 {
        return Err(NilError::InvalidParameter("Menelaus points must lie inside their sides".into()));
    }
    if (s1 - 1.0).abs() < MIDPOINT_TOL && (s2 - 1.0).abs() < MIDPOINT_TOL {
        return Err(NilError::BothMidpoints);
    }
    point_at_ratio(aj, ak, m / (s1 * s2))
}

/// Side `k` joins `A_k` and `A_{k+1}`.
fn side_ends(k: usize) -> (usize, usize) {
    (k, (k + 1) % 3)
}

fn side_of(a: usize, b: usize) -> usize {
    (0..3).find(|&k| side_ends(k) == (a, b) || side_ends(k) == (b, a)).expect("distinct vertices")
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Location {
    Vertex(usize),
    /// Inside side `side` with `ratio = s(A_k, P, A_{k+1})`.
    Side { side: usize, ratio: f64 },
    Interior,
}

impl Location {
    fn sides(&self) -> Vec<usize> {
        match *self {
            Location::Vertex(i) => vec![i, (i + 2) % 3],
            Location::Side { side, .. } => vec![side],
            Location::Interior => Vec::new(),
        }
    }
}

fn locate(vertices: &[Point; 3], p: Point) -> Location {
    if let Some(i) = vertices.iter().position(|v| v.model_distance(&p) < 1e-12) {
        return Location::Vertex(i);
    }
    for k in 0..3 {
        let (a, b) = side_ends(k);
        if let Ok(s) = simple_ratio(vertices[a], p, vertices[b]) {
            if s.value > 0.0 && s.residual <= SIDE_TOL {
                return Location::Side { side: k, ratio: s.value };
            }
        }
    }
    Location::Interior
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineCase {
    /// Both points on one fibre.
    FibreSegment,
    /// Both points on one side: the side geodesic itself.
    SideGeodesic,
    /// Arc through the projected Menelaus configuration.
    MenelausArc,
    /// Midpoints of two sides: projected geodesic parallel to the third side.
    MidpointCase,
    /// One endpoint is a vertex.
    Cevian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineOptions {
    /// Number of segments in the lifted polyline.
    pub samples: usize,
    pub menelaus_constant: f64,
    /// Largest accepted distance from the surface for inputs and checked samples.
    pub membership_tol: f64,
    /// Also check every lifted sample against the surface (slow).
    pub verify_samples: bool,
    pub surface: SurfaceOptions,
}

impl Default for LineOptions {
    fn default() -> Self {
        LineOptions {
            samples: 32,
            menelaus_constant: -1.0,
            membership_tol: 1e-5,
            verify_samples: false,
            surface: SurfaceOptions { restarts: 4, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLine {
    pub p1: Point,
    pub p2: Point,
    pub case: LineCase,
    /// Projected line from `P1*` to `P2*`.
    pub arc: ArcDescriptor,
    /// Lifted polyline from `P1` to `P2`.
    pub samples: Vec<Point>,
    /// Projected Menelaus point on the carrier, when one defines the line.
    pub anchor: Option<Point2D>,
    /// θ of the geodesic whose projection is the line (midpoint case).
    pub generating_theta: Option<f64>,
    /// Other Menelaus arcs through two interior points; the construction does
    /// not single out one of them.
    pub alternatives: Vec<ArcDescriptor>,
}

fn reversed(arc: &ArcDescriptor) -> ArcDescriptor {
    match arc.shape {
        ArcShape::CircleArc { center, radius, start_angle, end_angle, .. } => ArcDescriptor::circle_arc(center, radius, end_angle, start_angle),
        ArcShape::LineSegment { start, end } => ArcDescriptor::segment(end, start),
        ArcShape::DegeneratePoint { .. } => *arc,
    }
}

/// Lifts `arc` onto the surface by continuation along the fibres; the
/// endpoints are kept exactly.
fn lift(vertices: [Point; 3], arc: &ArcDescriptor, from: Point, to: Point, m: usize) -> Result<Vec<Point>> {
    let m = m.max(2);
    let mut out = vec![from];
    for k in 1..m {
        let guess = match out.len() {
            1 => from.z + (to.z - from.z) / m as f64,
            n => 2.0 * out[n - 1].z - out[n - 2].z,
        };
        let xy = arc.point_at(k as f64 / m as f64);
        let p = fibre_lookup(vertices, xy, guess).map_err(|_| NilError::ArcSurfaceMiss { from: (k - 1) as f64 / m as f64, to: k as f64 / m as f64 })?;
        out.push(p);
    }
    out.push(to);
    Ok(out)
}

fn side_arcs(vertices: &[Point; 3]) -> Result<[ArcDescriptor; 3]> {
    let arc = |k: usize| -> Result<ArcDescriptor> {
        let (a, b) = side_ends(k);
        Ok(projected_arc(vertices[a], &solve_geodesic(vertices[a], vertices[b])?.params))
    };
    Ok([arc(0)?, arc(1)?, arc(2)?])
}

/// Projected point with `s(Aa*, X*, Ab*) = s` on the projected line `AaAb`.
fn projected_point_at_ratio(arcs: &[ArcDescriptor; 3], a: usize, b: usize, s: f64) -> Point2D {
    let g = s / (1.0 + s);
    let k = side_of(a, b);
    arcs[k].point_at(if side_ends(k).0 == a { g } else { 1.0 - g })
}

/// `s(Aa, X, Ab)` for a point at fraction `f` of side `k`.
fn side_ratio(k: usize, f: f64, a: usize) -> f64 {
    if side_ends(k).0 == a {
        f / (1.0 - f)
    } else {
        (1.0 - f) / f
    }
}

/// Vertex shared by two distinct sides.
fn common_vertex(s: usize, t: usize) -> usize {
    let (a, b) = side_ends(s);
    let (c, d) = side_ends(t);
    if a == c || a == d {
        a
    } else {
        debug_assert!(b == c || b == d);
        b
    }
}

fn other_end(k: usize, v: usize) -> usize {
    let (a, b) = side_ends(k);
    if a == v {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    /// Arc length beyond the start of the search.
    dist: f64,
    side: usize,
    frac: f64,
}

/// Crossings of `curve` with the projected sides, split into those behind its
/// origin and those past `q2`, each ordered by distance.
fn ordered_hits(curve: &TangentCircle, arcs: &[ArcDescriptor; 3], q2: Point2D) -> (Vec<Hit>, Vec<Hit>) {
    let eps = 1e-9;
    let reach = curve.param(q2);
    let period = curve.period();
    let (mut back, mut fwd) = (Vec::new(), Vec::new());
    for (side, arc) in arcs.iter().enumerate() {
        for (x, frac) in curve.intersect_arc(arc) {
            let s = curve.param(x);
            let (b, a) = if curve.is_straight() {
                ((s <= eps).then_some(-s), (s >= reach - eps).then_some(s - reach))
            } else if s < eps || s > period - eps {
                (Some((period - s) % period), None)
            } else {
                ((s > reach + eps).then_some(period - s), (s >= reach - eps).then_some(s - reach))
            };
            if let Some(dist) = b {
                back.push(Hit { dist: dist.max(0.0), side, frac });
            }
            if let Some(dist) = a {
                fwd.push(Hit { dist: dist.max(0.0), side, frac });
            }
        }
    }
    back.sort_by(|a, b| a.dist.total_cmp(&b.dist));
    fwd.sort_by(|a, b| a.dist.total_cmp(&b.dist));
    (back, fwd)
}

/// Projected sides with their generating geodesics.
struct Sides {
    vertices: [Point; 3],
    params: [GeodesicParams; 3],
    arcs: [ArcDescriptor; 3],
}

impl Sides {
    fn new(vertices: &[Point; 3]) -> Result<Self> {
        let p = |k: usize| -> Result<GeodesicParams> {
            let (a, b) = side_ends(k);
            Ok(solve_geodesic(vertices[a], vertices[b])?.params)
        };
        let params = [p(0)?, p(1)?, p(2)?];
        let arcs = [0, 1, 2].map(|k| projected_arc(vertices[k], &params[k]));
        Ok(Sides { vertices: *vertices, params, arcs })
    }

    fn point(&self, k: usize, frac: f64) -> Point {
        geodesic_point_from(self.vertices[k], &self.params[k].with_t(frac * self.params[k].t))
    }
}

/// Index of the first crossing where the lift of `curve`, continued from
/// `start` (at arc length `s0`, moving in direction `dir`), meets the side
/// geodesic itself rather than passing above or below it.
fn lifted_exit(sides: &Sides, curve: &TangentCircle, hits: &[Hit], start: Point, s0: f64, dir: f64) -> Option<usize> {
    const STEP: f64 = 0.05;
    let mut trail = [(0.0, start.z), (0.0, start.z)];
    let mut travelled = 0.0;
    let at = |d: f64, trail: &mut [(f64, f64); 2]| -> Option<f64> {
        let [(sa, za), (sb, zb)] = *trail;
        let guess = if sb > sa { zb + (zb - za) * (d - sb) / (sb - sa) } else { zb };
        let z = fibre_lookup(sides.vertices, curve.point_at(s0 + dir * d), guess).ok()?.z;
        *trail = [(sb, zb), (d, z)];
        Some(z)
    };
    for (idx, h) in hits.iter().enumerate() {
        while travelled + STEP < h.dist {
            travelled += STEP;
            at(travelled, &mut trail)?;
        }
        let z = if h.dist == 0.0 { start.z } else { at(h.dist, &mut trail)? };
        travelled = travelled.max(h.dist);
        if (z - sides.point(h.side, h.frac).z).abs() < 1e-6 {
            return Some(idx);
        }
    }
    None
}

/// Crossing ranks `(behind q1, past q2)` identifying a Menelaus configuration.
type Roles = (usize, usize, usize, usize);

/// Menelaus defect of a pencil member with given exits: signed level of the
/// predicted third point on the curve.
fn menelaus_defect(sides: &Sides, curve: &TangentCircle, x1: Hit, x2: Hit, m: f64) -> Option<(f64, Point2D)> {
    if x1.side == x2.side {
        return None;
    }
    let ai = common_vertex(x1.side, x2.side);
    let (aj, ak) = (other_end(x1.side, ai), other_end(x2.side, ai));
    let s3 = m / (side_ratio(x1.side, x1.frac, aj) * side_ratio(x2.side, x2.frac, ai));
    if !s3.is_finite() || (1.0 + s3).abs() < 1e-12 {
        return None;
    }
    let p3 = projected_point_at_ratio(&sides.arcs, aj, ak, s3);
    Some((curve.level(p3), p3))
}

/// Pencil members through `p1*`, `p2*` whose lifted exits satisfy the
/// Menelaus relation, as `(chord angle, projected Menelaus point)`, nearest
/// to the straight chord first.
fn menelaus_pencil(sides: &Sides, p1: Point, p2: Point, m: f64) -> Result<Vec<(f64, Point2D)>> {
    let (q1, q2) = (fibre_project(p1), fibre_project(p2));
    let with_roles = |g: f64| -> Option<(Roles, f64, Point2D)> {
        let curve = TangentCircle::from_chord_angle(q1, q2, g);
        let (back, fwd) = ordered_hits(&curve, &sides.arcs, q2);
        let b = lifted_exit(sides, &curve, &back, p1, 0.0, -1.0)?;
        let f = lifted_exit(sides, &curve, &fwd, p2, curve.param(q2), 1.0)?;
        let (v, p3) = menelaus_defect(sides, &curve, back[b], fwd[f], m)?;
        Some(((back[b].side, b, fwd[f].side, f), v, p3))
    };
    let fixed = |g: f64, roles: Roles| -> f64 {
        let curve = TangentCircle::from_chord_angle(q1, q2, g);
        let (back, fwd) = ordered_hits(&curve, &sides.arcs, q2);
        match (back.get(roles.1), fwd.get(roles.3)) {
            (Some(&x1), Some(&x2)) if x1.side == roles.0 && x2.side == roles.2 => menelaus_defect(sides, &curve, x1, x2, m).map_or(f64::NAN, |r| r.0),
            _ => f64::NAN,
        }
    };
    let lim = PI - 0.05;
    // fine enough to separate close root pairs (seen ~0.02 apart)
    let steps = 480;
    let mut roots: Vec<(f64, Point2D)> = Vec::new();
    let mut consider = |ga: f64, gb: f64, roles: Roles, va: f64, vb: f64| {
        if va * vb > 0.0 {
            return;
        }
        let root = brent(|g| fixed(g, roles), ga, gb, va, vb, 1e-15, 200);
        if let Some((r, v, p3)) = with_roles(root) {
            // sign flips through a pole of the predicted point are rejected here
            if r == roles && v.abs() < 1e-9 && roots.iter().all(|(g, _)| (g - root).abs() > 1e-9) {
                roots.push((root, p3));
            }
        }
    };
    // Roles change where the curve becomes tangent to a side; intervals
    // whose ends disagree are bisected so that no bracket is lost.
    let mut stack = Vec::new();
    let mut prev = (-lim, with_roles(-lim).map(|(r, v, _)| (r, v)));
    for i in 1..=steps {
        let g = -lim + 2.0 * lim * i as f64 / steps as f64;
        let cur = (g, with_roles(g).map(|(r, v, _)| (r, v)));
        stack.push((prev, cur, 0));
        prev = cur;
    }
    while let Some(((ga, a), (gb, b), depth)) = stack.pop() {
        match (a, b) {
            (Some((ra, va)), Some((rb, vb))) if ra == rb => consider(ga, gb, ra, va, vb),
            (None, None) => {}
            _ if depth < 10 => {
                let gm = 0.5 * (ga + gb);
                let mid = (gm, with_roles(gm).map(|(r, v, _)| (r, v)));
                stack.push(((ga, a), mid, depth + 1));
                stack.push((mid, (gb, b), depth + 1));
            }
            _ => {}
        }
    }
    if roots.is_empty() {
        return Err(NilError::NoArcIntersection);
    }
    roots.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    Ok(roots)
}

fn root_nearest_zero<F: Fn(f64) -> Option<((usize, usize), f64, Point2D)>>(f: F, lo: f64, hi: f64, steps: usize) -> Option<(f64, Point2D)> {
    let mut best: Option<(f64, Point2D)> = None;
    let mut prev: Option<(f64, (usize, usize), f64)> = None;
    for i in 0..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        let cur = f(x).map(|(roles, v, _)| (x, roles, v));
        if let (Some((xa, ra, va)), Some((xb, rb, vb))) = (prev, cur) {
            if ra == rb && va * vb <= 0.0 {
                let g = |x: f64| f(x).filter(|r| r.0 == ra).map_or(f64::NAN, |r| r.1);
                let root = brent(g, xa, xb, va, vb, 1e-15, 200);
                if let Some((_, v, p3)) = f(root) {
                    // skip sign flips through a pole of the predicted point
                    if v.abs() < 1e-9 && best.is_none_or(|(r, _)| root.abs() < r.abs()) {
                        best = Some((root, p3));
                    }
                }
            }
        }
        prev = cur;
    }
    best
}

fn check_on_surface(vertices: [Point; 3], p: Point, opts: &LineOptions) -> Result<()> {
    let deviation = surface_deviation(vertices, p, &opts.surface)?;
    if deviation > opts.membership_tol {
        return Err(NilError::NotOnSurface { deviation });
    }
    Ok(())
}

/// Whether the projected line crosses no projected side strictly between its
/// endpoints. Only then are its exits from the triangle unique, so that any
/// two of its interior points determine it again.
pub fn stays_inside(vertices: &[Point; 3], arc: &ArcDescriptor) -> Result<bool> {
    let Some(curve) = TangentCircle::from_arc(arc) else {
        return Ok(true);
    };
    let end = curve.param(arc.end());
    let eps = 1e-9 * (1.0 + end);
    let sides = Sides::new(vertices)?;
    Ok(sides.arcs.iter().all(|side| {
        curve.intersect_arc(side).iter().all(|(x, _)| {
            let s = curve.param(*x);
            s <= eps || s >= end - eps
        })
    }))
}

/// Smaller angle at which a projected line meets the projected sides at its
/// endpoints (π/2 when an endpoint is not on a side).
pub fn crossing_angle(vertices: &[Point; 3], line: &SurfaceLine) -> Result<f64> {
    let Some(curve) = TangentCircle::from_arc(&line.arc) else {
        return Ok(std::f64::consts::FRAC_PI_2);
    };
    let sides = Sides::new(vertices)?;
    let end = curve.param(line.arc.end());
    let mut angle = std::f64::consts::FRAC_PI_2;
    for (p, s) in [(line.p1, 0.0), (line.p2, end)] {
        if let Location::Side { side, ratio } = locate(vertices, p) {
            let h = 1e-6;
            let t = curve.point_at(s + h).sub(curve.point_at(s - h)).unit();
            let f = ratio / (1.0 + ratio);
            let u = sides.arcs[side].point_at(f + h).sub(sides.arcs[side].point_at(f - h)).unit();
            angle = angle.min(t.cross(u).abs().asin());
        }
    }
    Ok(angle)
}

/// Line of the triangle surface through `p1` and `p2`.
pub fn surface_line(vertices: [Point; 3], p1: Point, p2: Point, opts: &LineOptions) -> Result<SurfaceLine> {
    check_triangle(vertices[0], vertices[1], vertices[2])?;
    if classify_triangle(vertices[0], vertices[1], vertices[2]) == TriangleType::FibreType {
        return Err(NilError::DegenerateProjection);
    }
    if p1 == p2 {
        return Err(NilError::DuplicatePoints);
    }
    for p in [p1, p2] {
        check_on_surface(vertices, p, opts)?;
    }
    let (q1, q2) = (fibre_project(p1), fibre_project(p2));
    let m = opts.samples.max(2);
    let line = |case, arc: ArcDescriptor, samples, anchor, generating_theta| SurfaceLine { p1, p2, case, arc, samples, anchor, generating_theta, alternatives: Vec::new() };

    if q1.dist(q2) <= 1e-10 {
        let samples = (0..=m).map(|k| Point::new(p1.x, p1.y, p1.z + (p2.z - p1.z) * k as f64 / m as f64)).collect();
        return Ok(line(LineCase::FibreSegment, ArcDescriptor { shape: ArcShape::DegeneratePoint { at: q1 }, provenance: None }, samples, None, None));
    }

    let (l1, l2) = (locate(&vertices, p1), locate(&vertices, p2));
    let result = if l1.sides().iter().any(|k| l2.sides().contains(k)) {
        let arc = projected_arc(p1, &solve_geodesic(p1, p2)?.params);
        line(LineCase::SideGeodesic, arc, lift(vertices, &arc, p1, p2, m)?, None, None)
    } else if let Location::Vertex(i) = l1 {
        let arc = cevian_arc(&vertices, i, p2, l2)?;
        line(LineCase::Cevian, arc, lift(vertices, &arc, p1, p2, m)?, None, None)
    } else if let Location::Vertex(i) = l2 {
        let arc = cevian_arc(&vertices, i, p1, l1)?;
        let mut samples = lift(vertices, &arc, p2, p1, m)?;
        samples.reverse();
        line(LineCase::Cevian, reversed(&arc), samples, None, None)
    } else if let (Location::Side { side: k1, ratio: r1 }, Location::Side { side: k2, ratio: r2 }) = (l1, l2) {
        let ai = common_vertex(k1, k2);
        let (aj, ak) = (other_end(k1, ai), other_end(k2, ai));
        if (r1 - 1.0).abs() < MIDPOINT_TOL && (r2 - 1.0).abs() < MIDPOINT_TOL {
            let theta = solve_geodesic(vertices[aj], vertices[ak])?.params.theta;
            let arc = midpoint_arc(q1, q2, theta)?;
            line(LineCase::MidpointCase, arc, lift(vertices, &arc, p1, p2, m)?, None, Some(theta))
        } else {
            let p3 = menelaus_point(vertices[ai], vertices[aj], vertices[ak], p1, p2, opts.menelaus_constant)?;
            let anchor = fibre_project(p3);
            let full = circle_through(q1, q2, anchor)?;
            let arc = match full.shape {
                ArcShape::CircleArc { center, radius, start_angle, orientation, .. } => {
                    let sweep = (orientation as f64 * (q2.sub(center).angle() - start_angle)).rem_euclid(TAU);
                    ArcDescriptor::circle_arc(center, radius, start_angle, start_angle + orientation as f64 * sweep)
                }
                _ => ArcDescriptor::segment(q1, q2),
            };
            line(LineCase::MenelausArc, arc, lift(vertices, &arc, p1, p2, m)?, Some(anchor), None)
        }
    } else {
        let sides = Sides::new(&vertices)?;
        let roots = menelaus_pencil(&sides, p1, p2, opts.menelaus_constant)?;
        let arcs: Vec<ArcDescriptor> = roots.iter().map(|(g, _)| TangentCircle::from_chord_angle(q1, q2, *g).arc_to(q2)).collect();
        let mut l = line(LineCase::MenelausArc, arcs[0], lift(vertices, &arcs[0], p1, p2, m)?, Some(roots[0].1), None);
        l.alternatives = arcs[1..].to_vec();
        l
    };
    if opts.verify_samples {
        for &s in &result.samples[1..m] {
            check_on_surface(vertices, s, opts)?;
        }
    }
    Ok(result)
}

/// Minor arc from `q1` to `q2` of the projection of a geodesic with angle `theta`
/// (radius `|cot θ|`, counterclockwise for `θ > 0`).
fn midpoint_arc(q1: Point2D, q2: Point2D, theta: f64) -> Result<ArcDescriptor> {
    let chord = q1.dist(q2);
    let kappa = theta.tan();
    let s = 0.5 * kappa * chord;
    if s.abs() > 1.0 {
        return Err(NilError::TargetNotOnArc { distance: chord - 2.0 / kappa.abs() });
    }
    Ok(TangentCircle::from_chord_angle(q1, q2, s.asin()).arc_to(q2))
}

/// Projected unit direction and length of the side from vertex `i` to `j`.
fn side_tangent(vertices: &[Point; 3], i: usize, j: usize) -> Result<(Point2D, f64)> {
    let params = solve_geodesic(vertices[i], vertices[j])?.params;
    Ok((Point2D::polar(params.alpha), params.t * params.theta.cos()))
}

/// Cevian from vertex `i` towards the foot `foot` on the opposite side, where
/// `delta = s(Aj, foot, Ak)`: the circle through both projections tangent at
/// the vertex to `Lj·uj + δ·Lk·uk`.
fn cevian_curve(vertices: &[Point; 3], i: usize, delta: f64, foot: Point2D) -> Result<TangentCircle> {
    let (j, k) = side_ends(side_of((i + 1) % 3, (i + 2) % 3));
    let (uj, lj) = side_tangent(vertices, i, j)?;
    let (uk, lk) = side_tangent(vertices, i, k)?;
    let dir = uj.scale(lj).add(uk.scale(delta * lk));
    Ok(TangentCircle::through(fibre_project(vertices[i]), dir, foot))
}

/// Projected cevian from vertex `i` through `q`, stopping at `q`.
fn cevian_arc(vertices: &[Point; 3], i: usize, q: Point, at: Location) -> Result<ArcDescriptor> {
    let qs = fibre_project(q);
    let opposite = side_of((i + 1) % 3, (i + 2) % 3);
    if let Location::Side { side, ratio } = at {
        if side == opposite {
            return Ok(cevian_curve(vertices, i, ratio, qs)?.arc_to(qs));
        }
    }
    let arcs = side_arcs(vertices)?;
    let f = |u: f64| -> Option<((usize, usize), f64, Point2D)> {
        let delta = u / (1.0 - u);
        let foot = arcs[opposite].point_at(u);
        let curve = cevian_curve(vertices, i, delta, foot).ok()?;
        // q must come before the foot
        (curve.param(qs) < curve.param(foot)).then(|| ((0, 0), curve.level(qs), foot))
    };
    let (u, _) = root_nearest_zero(|u| f(0.5 + u), -0.499, 0.499, 400).ok_or(NilError::NoArcIntersection)?;
    let foot = arcs[opposite].point_at(0.5 + u);
    Ok(cevian_curve(vertices, i, (0.5 + u) / (0.5 - u), foot)?.arc_to(qs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CevaOptions {
    /// Fail instead of warning when the third cevian misses `T*`.
    pub strict: bool,
    pub miss_tol: f64,
    pub line: LineOptions,
}

impl Default for CevaOptions {
    fn default() -> Self {
        CevaOptions { strict: false, miss_tol: 1e-4, line: LineOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CevaConfig {
    pub vertices: [Point; 3],
    pub delta1: f64,
    pub delta2: f64,
    /// Feet `[P12, P02, P01]` on the sides opposite `A0`, `A1`, `A2`.
    pub feet: [Point; 3],
    /// Cevians from `A0`, `A1`, `A2` to their feet.
    pub cevians: [SurfaceLine; 3],
    pub t_star: Point2D,
    /// Lift of `T*` onto the surface.
    pub t: Point,
    /// Intersections of the first two projected cevians.
    pub crossings: usize,
    /// Distance from `T*` to the third projected cevian.
    pub third_cevian_miss: f64,
    pub warnings: Vec<String>,
}

/// Ceva configuration with `s(A1,P12,A2) = δ1`, `s(A2,P02,A0) = δ2` and
/// `s(A0,P01,A1) = 1/(δ1·δ2)`.
pub fn ceva_config(vertices: [Point; 3], delta1: f64, delta2: f64, opts: &CevaOptions) -> Result<CevaConfig> {
    if !(delta1 > 0.0 && delta2 > 0.0 && delta1.is_finite() && delta2.is_finite()) {
        return Err(NilError::InvalidParameter(format!("ratios must be positive, got {delta1}, {delta2}")));
    }
    check_triangle(vertices[0], vertices[1], vertices[2])?;
    if classify_triangle(vertices[0], vertices[1], vertices[2]) == TriangleType::FibreType {
        return Err(NilError::DegenerateProjection);
    }
    let [a0, a1, a2] = vertices;
    let feet = [point_at_ratio(a1, a2, delta1)?, point_at_ratio(a2, a0, delta2)?, point_at_ratio(a0, a1, 1.0 / (delta1 * delta2))?];
    let deltas = [delta1, delta2, 1.0 / (delta1 * delta2)];
    let curves: Vec<TangentCircle> = (0..3).map(|i| cevian_curve(&vertices, i, deltas[i], fibre_project(feet[i]))).collect::<Result<_>>()?;
    let arcs: Vec<ArcDescriptor> = (0..3).map(|i| curves[i].arc_to(fibre_project(feet[i]))).collect();

    let reach1 = curves[1].param(fibre_project(feet[1]));
    let hits: Vec<Point2D> = curves[1]
        .intersect_arc(&arcs[0])
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| curves[1].param(p) <= reach1 + 1e-12 && p.dist(fibre_project(a1)) > 1e-12)
        .collect();
    let centroid = fibre_project(a0).add(fibre_project(a1)).add(fibre_project(a2)).scale(1.0 / 3.0);
    let t_star = *hits.iter().min_by(|p, q| p.dist(centroid).total_cmp(&q.dist(centroid))).ok_or(NilError::NoArcIntersection)?;

    let m = opts.line.samples.max(2);
    let lifted: Vec<Vec<Point>> = (0..3).map(|i| lift(vertices, &arcs[i], vertices[i], feet[i], m)).collect::<Result<_>>()?;
    let f = arcs[0].fraction_of(t_star);
    let near = lifted[0][((f * m as f64).round() as usize).min(m)];
    let t = fibre_lookup(vertices, t_star, near.z)?;

    let third_cevian_miss = curves[2].distance(t_star);
    let mut warnings = Vec::new();
    if third_cevian_miss > opts.miss_tol {
        if opts.strict {
            return Err(NilError::ThirdCevianMiss { miss: third_cevian_miss });
        }
        warnings.push(format!("third cevian misses T* by {third_cevian_miss:.3e}"));
    }
    if hits.len() > 1 {
        warnings.push(format!("first two cevians cross {} times; kept the crossing nearest the centroid", hits.len()));
    }
    let mut lines = lifted.into_iter().enumerate().map(|(i, samples)| SurfaceLine {
        p1: vertices[i],
        p2: feet[i],
        case: LineCase::Cevian,
        arc: arcs[i],
        samples,
        anchor: None,
        generating_theta: None,
        alternatives: Vec::new(),
    });
    let cevians = [lines.next().unwrap(), lines.next().unwrap(), lines.next().unwrap()];
    Ok(CevaConfig { vertices, delta1, delta2, feet, cevians, t_star, t, crossings: hits.len(), third_cevian_miss, warnings })
}

/// `s(A0,P01,A1)·s(A1,P12,A2)·s(A2,P02,A0)`, re-measured from distances.
pub fn ceva_product(config: &CevaConfig) -> Result<f64> {
    let [a0, a1, a2] = config.vertices;
    let [p12, p02, p01] = config.feet;
    Ok(simple_ratio(a0, p01, a1)?.value * simple_ratio(a1, p12, a2)?.value * simple_ratio(a2, p02, a0)?.value)
}

/// The same product measured by arc length along the projected sides.
pub fn ceva_product_projected(config: &CevaConfig) -> Result<f64> {
    let arcs = side_arcs(&config.vertices)?;
    let [p12, p02, p01] = config.feet.map(fibre_project);
    Ok(simple_ratio_projected(&arcs[0], p01) * simple_ratio_projected(&arcs[1], p12) * simple_ratio_projected(&arcs[2], p02))
}
