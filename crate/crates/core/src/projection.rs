//! Fibre projection onto the `[x, y]` base plane and plane circle geometry.
//!
//! Geodesics project to circle arcs of radius `|c/w|` (counterclockwise for
//! `w > 0`), straight segments for `w = 0`, and a single point on the fibre.
//! Projected speed is `c`, so projected length is `t·cos θ`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{NilError, Result};
use crate::geodesic::GeodesicParams;
use crate::nil::Point;
use crate::numeric::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn sub(self, o: Point2D) -> Point2D {
        Point2D::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point2D) -> Point2D {
        Point2D::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point2D {
        Point2D::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2D) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2D) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2D) -> f64 {
        self.sub(o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn unit(self) -> Point2D {
        self.scale(1.0 / self.norm())
    }

    /// Rotated by +90°.
    pub fn perp(self) -> Point2D {
        Point2D::new(-self.y, self.x)
    }

    pub fn polar(angle: f64) -> Point2D {
        Point2D::new(angle.cos(), angle.sin())
    }
}

pub fn fibre_project(p: Point) -> Point2D {
    Point2D::new(p.x, p.y)
}

/// Full circle in the base plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2D,
    pub radius: f64,
}

/// Generating geodesic of a projected arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcProvenance {
    pub base: Point,
    pub params: GeodesicParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArcShape {
    /// Runs from `start_angle` to `end_angle` (unwrapped); `orientation` is +1
    /// for counterclockwise.
    CircleArc { center: Point2D, radius: f64, start_angle: f64, end_angle: f64, orientation: i8 },
    LineSegment { start: Point2D, end: Point2D },
    DegeneratePoint { at: Point2D },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcDescriptor {
    pub shape: ArcShape,
    pub provenance: Option<ArcProvenance>,
}

impl ArcDescriptor {
    pub fn circle_arc(center: Point2D, radius: f64, start_angle: f64, end_angle: f64) -> Self {
        let orientation = if end_angle >= start_angle { 1 } else { -1 };
        ArcDescriptor { shape: ArcShape::CircleArc { center, radius, start_angle, end_angle, orientation }, provenance: None }
    }

    pub fn segment(start: Point2D, end: Point2D) -> Self {
        ArcDescriptor { shape: ArcShape::LineSegment { start, end }, provenance: None }
    }

    pub fn start(&self) -> Point2D {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point2D {
        self.point_at(1.0)
    }

    /// Point at fraction `f` of the arc; values outside `[0, 1]` extend it.
    pub fn point_at(&self, f: f64) -> Point2D {
        match self.shape {
            ArcShape::CircleArc { center, radius, start_angle, end_angle, .. } => {
                center.add(Point2D::polar(start_angle + f * (end_angle - start_angle)).scale(radius))
            }
            ArcShape::LineSegment { start, end } => start.add(end.sub(start).scale(f)),
            ArcShape::DegeneratePoint { at } => at,
        }
    }

    pub fn length(&self) -> f64 {
        match self.shape {
            ArcShape::CircleArc { radius, start_angle, end_angle, .. } => radius * (end_angle - start_angle).abs(),
            ArcShape::LineSegment { start, end } => start.dist(end),
            ArcShape::DegeneratePoint { .. } => 0.0,
        }
    }

    /// Euclidean distance from `p` to the full carrier circle or line.
    pub fn carrier_distance(&self, p: Point2D) -> f64 {
        match self.shape {
            ArcShape::CircleArc { center, radius, .. } => (p.dist(center) - radius).abs(),
            ArcShape::LineSegment { start, end } => {
                let d = end.sub(start);
                d.cross(p.sub(start)).abs() / d.norm()
            }
            ArcShape::DegeneratePoint { at } => p.dist(at),
        }
    }

    /// Fraction of `p` along the arc, measured in the arc's direction and
    /// wrapped into `[0, 2π/sweep)` for circles. `p` is assumed to lie on the carrier.
    pub fn fraction_of(&self, p: Point2D) -> f64 {
        match self.shape {
            ArcShape::CircleArc { center, start_angle, end_angle, orientation, .. } => {
                let sweep = (end_angle - start_angle).abs();
                let along = (orientation as f64 * (p.sub(center).angle() - start_angle)).rem_euclid(TAU);
                if sweep > 0.0 {
                    along / sweep
                } else {
                    0.0
                }
            }
            ArcShape::LineSegment { start, end } => {
                let d = end.sub(start);
                p.sub(start).dot(d) / d.dot(d)
            }
            ArcShape::DegeneratePoint { .. } => 0.0,
        }
    }

    pub fn circle(&self) -> Option<Circle> {
        match self.shape {
            ArcShape::CircleArc { center, radius, .. } => Some(Circle { center, radius }),
            _ => None,
        }
    }

    /// Samples `n + 1` points evenly in fraction.
    pub fn sample(&self, n: usize) -> Vec<Point2D> {
        (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect()
    }
}

/// Projection of the geodesic `t ∈ [0, params.t]` from `base`.
pub fn projected_arc(base: Point, params: &GeodesicParams) -> ArcDescriptor {
    let b = fibre_project(base);
    let provenance = Some(ArcProvenance { base, params: *params });
    if params.is_fibre() {
        return ArcDescriptor { shape: ArcShape::DegeneratePoint { at: b }, provenance };
    }
    let (c, w, a) = (params.c(), params.w(), params.alpha);
    if w == 0.0 {
        let end = b.add(Point2D::polar(a).scale(params.t));
        return ArcDescriptor { shape: ArcShape::LineSegment { start: b, end }, provenance };
    }
    let k = c / w;
    let center = b.add(Point2D::new(-k * a.sin(), k * a.cos()));
    let start_angle = b.sub(center).angle();
    ArcDescriptor {
        shape: ArcShape::CircleArc {
            center,
            radius: k.abs(),
            start_angle,
            end_angle: start_angle + w * params.t,
            orientation: if w > 0.0 { 1 } else { -1 },
        },
        provenance,
    }
}

/// Length of the portion between fractions `f1 ≤ f2`; `(f2 − f1)·t·cos θ` for a projected geodesic.
pub fn arc_length(arc: &ArcDescriptor, f1: f64, f2: f64) -> f64 {
    (f2 - f1) * arc.length()
}

/// Circle through three points, as the arc from `p1` through `p2` to `p3`;
/// a segment `p1 → p3` when they are collinear.
pub fn circle_through(p1: Point2D, p2: Point2D, p3: Point2D) -> Result<ArcDescriptor> {
    let scale = p1.dist(p2).max(p2.dist(p3)).max(p1.dist(p3));
    if p1.dist(p2) <= 1e-12 * (1.0 + scale) || p2.dist(p3) <= 1e-12 * (1.0 + scale) || p1.dist(p3) <= 1e-12 * (1.0 + scale) {
        return Err(NilError::DuplicatePoints);
    }
    let (b, c) = (p2.sub(p1), p3.sub(p1));
    let cross = b.cross(c);
    if 0.5 * cross.abs() < 1e-9 {
        return Ok(ArcDescriptor::segment(p1, p3));
    }
    // perpendicular-bisector intersection, relative to p1
    let (bb, cc) = (b.dot(b), c.dot(c));
    let rel = Point2D::new(c.y * bb - b.y * cc, b.x * cc - c.x * bb).scale(0.5 / cross);
    let center = p1.add(rel);
    let radius = rel.norm();
    let orientation = if cross > 0.0 { 1.0 } else { -1.0 };
    let start = p1.sub(center).angle();
    let sweep = (orientation * (p3.sub(center).angle() - start)).rem_euclid(TAU);
    Ok(ArcDescriptor::circle_arc(center, radius, start, start + orientation * sweep))
}

/// Unique geodesic from the lift of the arc's start whose projection follows
/// the arc to `target`. The base height is taken from provenance when present.
pub fn lift_arc_params(arc: &ArcDescriptor, target: Point2D) -> Result<GeodesicParams> {
    let tol = 1e-9;
    match arc.shape {
        ArcShape::DegeneratePoint { at } => {
            let d = target.dist(at);
            if d > 0.0 {
                return Err(NilError::TargetNotOnArc { distance: d });
            }
            GeodesicParams::new(0.0, 0.0, 0.0)
        }
        ArcShape::LineSegment { start, end } => {
            let d = arc.carrier_distance(target);
            let dir = end.sub(start).unit();
            let along = target.sub(start).dot(dir);
            if d > tol || along < -tol {
                return Err(NilError::TargetNotOnArc { distance: d.max(-along) });
            }
            GeodesicParams::new(dir.angle(), 0.0, along.max(0.0))
        }
        ArcShape::CircleArc { center, radius, start_angle, end_angle, orientation } => {
            if (end_angle - start_angle).abs() >= TAU {
                return Err(NilError::ArcAmbiguous);
            }
            let d = arc.carrier_distance(target);
            if d > tol {
                return Err(NilError::TargetNotOnArc { distance: d });
            }
            let sigma = orientation as f64;
            let theta = sigma * (1.0 / radius).atan();
            let alpha = start_angle + sigma * FRAC_PI_2;
            let sweep = (sigma * (target.sub(center).angle() - start_angle)).rem_euclid(TAU);
            // a target at the start reads as a zero sweep, not a full turn
            let sweep = if TAU - sweep < 1e-12 { 0.0 } else { sweep };
            GeodesicParams::new(wrap_angle(alpha), theta, sweep / theta.sin().abs())
        }
    }
}

/// Intersections of two circles; a near-tangent pair yields one point.
pub fn circle_circle_intersections(a: &Circle, b: &Circle) -> Vec<Point2D> {
    let d = a.center.dist(b.center);
    if d == 0.0 {
        return Vec::new();
    }
    let along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let disc = a.radius * a.radius - along * along;
    let u = b.center.sub(a.center).scale(1.0 / d);
    let foot = a.center.add(u.scale(along));
    if disc < -1e-10 * (1.0 + a.radius * a.radius) {
        return Vec::new();
    }
    if disc <= 1e-10 * (1.0 + a.radius * a.radius) {
        return vec![foot];
    }
    let h = disc.sqrt();
    vec![foot.add(u.perp().scale(h)), foot.sub(u.perp().scale(h))]
}

/// Intersections of a circle with the line through `p` in direction `dir`.
pub fn circle_line_intersections(c: &Circle, p: Point2D, dir: Point2D) -> Vec<Point2D> {
    let u = dir.unit();
    let along = c.center.sub(p).dot(u);
    let foot = p.add(u.scale(along));
    let off = foot.dist(c.center);
    let disc = c.radius * c.radius - off * off;
    if disc < -1e-10 * (1.0 + c.radius * c.radius) {
        return Vec::new();
    }
    if disc <= 1e-10 * (1.0 + c.radius * c.radius) {
        return vec![foot];
    }
    let h = disc.sqrt();
    vec![foot.sub(u.scale(h)), foot.add(u.scale(h))]
}

/// Circle through `origin` with unit `tangent` there and signed curvature
/// `kappa` (positive turns left); `kappa = 0` is the straight line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentCircle {
    pub origin: Point2D,
    pub tangent: Point2D,
    pub kappa: f64,
}

const STRAIGHT: f64 = 1e-12;

impl TangentCircle {
    /// The member of the family tangent to `tangent` at `origin` that passes through `target`.
    pub fn through(origin: Point2D, tangent: Point2D, target: Point2D) -> Self {
        let t = tangent.unit();
        let chord = target.sub(origin);
        let gamma = t.cross(chord).atan2(t.dot(chord));
        TangentCircle { origin, tangent: t, kappa: 2.0 * gamma.sin() / chord.norm() }
    }

    /// Pencil through `q1`, `q2`: the circle whose tangent at `q1` makes angle
    /// `gamma` with the chord (`gamma = 0` is the chord line).
    pub fn from_chord_angle(q1: Point2D, q2: Point2D, gamma: f64) -> Self {
        let chord = q2.sub(q1);
        let u = chord.unit();
        let (s, c) = (-gamma).sin_cos();
        let tangent = Point2D::new(c * u.x - s * u.y, s * u.x + c * u.y);
        TangentCircle { origin: q1, tangent, kappa: 2.0 * gamma.sin() / chord.norm() }
    }

    /// The carrier of a circle arc or segment, starting at its start.
    pub fn from_arc(arc: &ArcDescriptor) -> Option<Self> {
        match arc.shape {
            ArcShape::CircleArc { center, radius, start_angle, orientation, .. } => {
                let sigma = orientation as f64;
                Some(TangentCircle {
                    origin: center.add(Point2D::polar(start_angle).scale(radius)),
                    tangent: Point2D::polar(start_angle + sigma * FRAC_PI_2),
                    kappa: sigma / radius,
                })
            }
            ArcShape::LineSegment { start, end } => Some(TangentCircle { origin: start, tangent: end.sub(start).unit(), kappa: 0.0 }),
            ArcShape::DegeneratePoint { .. } => None,
        }
    }

    pub fn is_straight(&self) -> bool {
        self.kappa.abs() < STRAIGHT
    }

    pub fn normal(&self) -> Point2D {
        self.tangent.perp()
    }

    pub fn center(&self) -> Option<Point2D> {
        (!self.is_straight()).then(|| self.origin.add(self.normal().scale(1.0 / self.kappa)))
    }

    pub fn circle(&self) -> Option<Circle> {
        self.center().map(|center| Circle { center, radius: 1.0 / self.kappa.abs() })
    }

    /// Point at signed arc length `s` from the origin.
    pub fn point_at(&self, s: f64) -> Point2D {
        let x = self.kappa * s;
        let half = crate::geodesic::sinc(0.5 * x);
        self.origin.add(self.tangent.scale(s * crate::geodesic::sinc(x))).add(self.normal().scale(s * 0.5 * x * half * half))
    }

    /// `κ/2·|x − o|² − n·(x − o)`: zero on the curve, smooth in κ.
    pub fn level(&self, x: Point2D) -> f64 {
        let d = x.sub(self.origin);
        0.5 * self.kappa * d.dot(d) - self.normal().dot(d)
    }

    /// Euclidean distance from `x` to the curve.
    pub fn distance(&self, x: Point2D) -> f64 {
        match self.circle() {
            Some(c) => (x.dist(c.center) - c.radius).abs(),
            None => self.normal().dot(x.sub(self.origin)).abs(),
        }
    }

    /// Arc length from the origin to `x` (assumed on the curve), in `[0, 2π/|κ|)`
    /// along the orientation; signed along the line for `κ = 0`.
    pub fn param(&self, x: Point2D) -> f64 {
        match self.center() {
            Some(c) => {
                let sweep = (self.kappa.signum() * (x.sub(c).angle() - self.origin.sub(c).angle())).rem_euclid(TAU);
                sweep / self.kappa.abs()
            }
            None => self.tangent.dot(x.sub(self.origin)),
        }
    }

    /// Circumference, infinite for the line.
    pub fn period(&self) -> f64 {
        if self.is_straight() {
            f64::INFINITY
        } else {
            TAU / self.kappa.abs()
        }
    }

    /// Crossings with an arc's carrier whose fraction on the arc lies in `[0, 1]`,
    /// as `(point, fraction)`.
    pub fn intersect_arc(&self, arc: &ArcDescriptor) -> Vec<(Point2D, f64)> {
        let raw = match (self.circle(), arc.shape) {
            (Some(a), ArcShape::CircleArc { center, radius, .. }) => circle_circle_intersections(&a, &Circle { center, radius }),
            (Some(a), ArcShape::LineSegment { start, end }) => circle_line_intersections(&a, start, end.sub(start)),
            (None, ArcShape::CircleArc { center, radius, .. }) => circle_line_intersections(&Circle { center, radius }, self.origin, self.tangent),
            (None, ArcShape::LineSegment { start, end }) => line_line_intersection(self.origin, self.tangent, start, end.sub(start)).into_iter().collect(),
            (_, ArcShape::DegeneratePoint { .. }) => Vec::new(),
        };
        raw.into_iter()
            .map(|p| (p, arc.fraction_of(p)))
            .map(|(p, f)| (p, if f > 1.0 && (f - 1.0) * arc.length() > 0.5 * arc_period(arc) { f - arc_period(arc) / arc.length() } else { f }))
            .filter(|&(_, f)| (-1e-10..=1.0 + 1e-10).contains(&f))
            .collect()
    }

    /// The arc from the origin to `to` along the orientation.
    pub fn arc_to(&self, to: Point2D) -> ArcDescriptor {
        match self.center() {
            Some(c) => {
                let start = self.origin.sub(c).angle();
                ArcDescriptor::circle_arc(c, 1.0 / self.kappa.abs(), start, start + self.kappa * self.param(to))
            }
            None => ArcDescriptor::segment(self.origin, to),
        }
    }
}

/// Full turn of a circle arc's carrier, in arc length; infinite for segments.
fn arc_period(arc: &ArcDescriptor) -> f64 {
    match arc.shape {
        ArcShape::CircleArc { radius, .. } => TAU * radius,
        _ => f64::INFINITY,
    }
}

/// Intersection of the lines `p + s·u` and `a + r·v`.
pub fn line_line_intersection(p: Point2D, u: Point2D, a: Point2D, v: Point2D) -> Option<Point2D> {
    let den = u.cross(v);
    if den.abs() < 1e-15 * u.norm() * v.norm() {
        return None;
    }
    Some(p.add(u.scale(a.sub(p).cross(v) / den)))
}
