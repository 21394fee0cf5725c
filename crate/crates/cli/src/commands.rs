//! One function per subcommand. Each fills a [`Report`] and may write a mesh
//! or curve file; errors propagate and are attached to the report by the caller.

use std::path::Path;

use nil_geometry::geodesic::sample_geodesic;
use nil_geometry::solver::solve_geodesic_multistart;
use nil_geometry::sphere::{ball_convexity_defect, meridian_min_x};
use nil_geometry::triangle_surface::{ratio_residuals, surface_implicit};
use nil_geometry::{
    ceva_config, ceva_product, ceva_product_projected, classify_triangle, distance, fibre_project, projected_arc, solve_geodesic, sphere_mesh, surface_line,
    triangle_surface_mesh, triangle_surface_point, ApolloniusSpec, BoundingBox, CevaOptions, DistanceGrid, Lambda, LineOptions, Point, SphereSpec, SurfaceOptions,
};

use crate::args::{parse_box, parse_lambda, parse_point, parse_triangle, Common, Format};
use crate::export::{resolve_format, write_curves, write_mesh};
use crate::report::{Check, Report};
use crate::CliError;

pub const ANCHOR_DISTANCE: &str = "geodesic distance: two-point boundary value problem";
pub const ANCHOR_GEODESIC: &str = "closed-form geodesic curves";
pub const ANCHOR_SPHERE: &str = "geodesic sphere of radius R";
pub const ANCHOR_SPHERE_EMBEDDED: &str = "geodesic sphere is embedded iff R <= 2π";
pub const ANCHOR_BALL_CONVEX: &str = "geodesic ball is convex iff R <= π/2";
pub const ANCHOR_APOLLONIUS: &str = "Apollonius surface";
pub const ANCHOR_TRIANGLE: &str = "surface of a geodesic triangle";
pub const ANCHOR_LINE: &str = "line (connecting curve) on a triangle surface";
pub const ANCHOR_CEVA: &str = "Ceva's theorem on the triangle surface";
pub const ANCHOR_CEVA_PROJECTED: &str = "Ceva's theorem for projected arcs";

fn out_path(common: &Common) -> Option<&Path> {
    common.out.as_deref()
}

pub fn distance_cmd(from: &str, to: &str, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let (p, q) = (parse_point(from)?, parse_point(to)?);
    r.input("from", p);
    r.input("to", q);
    let sol = solve_geodesic(p, q)?;
    r.result("distance", sol.params.t);
    r.result("alpha", sol.params.alpha);
    r.result("theta", sol.params.theta);
    r.result("residual", sol.residual);
    r.check(Check::at_most("endpoint residual", ANCHOR_DISTANCE, sol.residual, c.tol_distance));
    match solve_geodesic_multistart(p, q) {
        Ok(multi) => {
            r.result("branches", &multi.branches);
            r.result("ambiguous", multi.ambiguous);
            r.check(Check::at_most("multistart agrees on the length", ANCHOR_DISTANCE, (multi.best.params.t - sol.params.t).abs(), c.tol_distance));
        }
        Err(e) => r.warnings.push(format!("multistart cross-check failed: {e}")),
    }
    Ok(())
}

pub fn geodesic_cmd(from: &str, to: &str, n: usize, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let (p, q) = (parse_point(from)?, parse_point(to)?);
    if n == 0 {
        return Err(CliError::Input("--n must be positive".into()));
    }
    r.input("from", p);
    r.input("to", q);
    r.input("n", n);
    let sol = solve_geodesic(p, q)?;
    let samples = sample_geodesic(p, &sol.params, n);
    let end = samples.last().map_or(f64::INFINITY, |s| s.model_distance(&q));
    r.result("length", sol.params.t);
    r.result("params", sol.params);
    r.result("projection", projected_arc(p, &sol.params));
    r.result("samples", samples.len());
    r.check(Check::at_most("last sample hits the target", ANCHOR_GEODESIC, end, c.tol_distance));
    if let Some(path) = out_path(c) {
        write_curves(path, resolve_format(path, c.format, Format::Csv), &[samples])?;
    }
    Ok(())
}

pub fn sphere_cmd(radius: f64, center: &str, n: usize, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let center = parse_point(center)?;
    r.input("R", radius);
    r.input("center", center);
    r.input("n", n);
    let spec = SphereSpec::new(center, radius)?;
    let mesh = sphere_mesh(&spec, n, 2 * n)?;
    let worst = mesh
        .vertices
        .iter()
        .map(|v| distance(center, *v).map(|d| (d - radius).abs()))
        .try_fold(0.0_f64, |m, d| d.map(|d| m.max(d)))?;
    r.result("vertices", mesh.vertices.len());
    r.result("triangles", mesh.triangles.len());
    r.result("closed", mesh.is_closed());
    r.result("euler_characteristic", mesh.euler_characteristic());
    let min_x = meridian_min_x(radius, 400);
    let defect = ball_convexity_defect(radius, 400);
    r.result("meridian_min_x", min_x);
    r.result("ball_convexity_defect", defect);
    r.result("ball_convex", defect <= 1e-9);
    r.check(Check::at_most("vertices at distance R", ANCHOR_SPHERE, worst, c.tol_distance));
    r.check(Check::above("meridian stays off the fibre axis", ANCHOR_SPHERE_EMBEDDED, min_x, 0.0));
    if let Some(path) = out_path(c) {
        write_mesh(path, resolve_format(path, c.format, Format::Obj), &mesh)?;
    }
    Ok(())
}

/// Fidelity target for extracted Apollonius vertices: relative ratio error.
pub const APOLLONIUS_RATIO_TOL: f64 = 1e-2;

pub fn apollonius_cmd(from: &str, to: &str, lambda: &str, bbox: &str, n: usize, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let (p1, p2) = (parse_point(from)?, parse_point(to)?);
    let lambda = parse_lambda(lambda)?;
    let (lo, hi) = parse_box(bbox)?;
    r.input("from", p1);
    r.input("to", p2);
    r.input("lambda", lambda);
    r.input("box", [lo, hi]);
    r.input("n", n);
    let spec = ApolloniusSpec::new(p1, p2, lambda)?;
    let grid = DistanceGrid::compute(p1, p2, BoundingBox::new(lo, hi)?, n, c.jobs.max(1))?;
    let mesh = grid.extract(&spec, c.jobs.max(1))?;
    r.result("vertices", mesh.vertices.len());
    r.result("triangles", mesh.triangles.len());
    r.result("closed", mesh.is_closed());
    if let Lambda::Finite(l) = lambda {
        if l > 0.0 {
            let mut worst = 0.0_f64;
            for v in &mesh.vertices {
                let ratio = distance(p1, *v)? / distance(*v, p2)?;
                worst = worst.max((ratio / l - 1.0).abs());
            }
            r.result("max_ratio_error", worst);
            r.check(Check::at_most("re-measured distance ratio", ANCHOR_APOLLONIUS, worst, APOLLONIUS_RATIO_TOL));
        }
    }
    if !mesh.is_closed() {
        r.warnings.push("surface leaves the sampling box; mesh has a boundary".into());
    }
    if let Some(path) = out_path(c) {
        write_mesh(path, resolve_format(path, c.format, Format::Obj), &mesh)?;
    }
    Ok(())
}

pub fn triangle_surface_cmd(triangle: &[String], n: usize, l1: Option<&str>, l2: Option<&str>, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let v = parse_triangle(triangle)?;
    r.input("triangle", v);
    let opts = SurfaceOptions { seed: c.seed, ..Default::default() };
    r.result("type", classify_triangle(v[0], v[1], v[2]));
    match (l1, l2) {
        (Some(a), Some(b)) => {
            let (l1, l2) = (parse_lambda(a)?, parse_lambda(b)?);
            r.input("l1", l1);
            r.input("l2", l2);
            let sp = triangle_surface_point(v, l1, l2, &opts)?;
            r.result("point", sp.point);
            r.result("residual", sp.residual);
            r.result("agreeing_restarts", sp.agreeing_restarts);
            r.result("ambiguous", sp.ambiguous);
            r.check(Check::at_most("ratio constraints", ANCHOR_TRIANGLE, sp.residual, c.tol_surface));
            if sp.ambiguous {
                r.warnings.push("restarts found a different point with the same objective".into());
            }
            Ok(())
        }
        (None, None) => {
            r.input("n", n);
            let (surface, mesh) = triangle_surface_mesh(v, n, &opts, c.jobs.max(1))?;
            let mut worst = 0.0_f64;
            for s in &surface.samples {
                // λ = 0 and ∞ rows are pinned to vertices by definition
                if let (Some(p), Lambda::Finite(a), Lambda::Finite(b)) = (s.point, s.lambda1, s.lambda2) {
                    if a == 0.0 || b == 0.0 {
                        continue;
                    }
                    let [r1, r2] = ratio_residuals(v, a, b, p.point)?;
                    worst = worst.max(r1).max(r2);
                }
            }
            r.result("samples", surface.samples.len());
            r.result("holes", surface.holes());
            r.result("ambiguous", surface.ambiguous());
            r.result("vertices", mesh.vertices.len());
            r.result("triangles", mesh.triangles.len());
            r.result("max_ratio_residual", worst);
            r.check(Check::at_most("ratio constraints at existing samples", ANCHOR_TRIANGLE, worst, c.tol_surface));
            if surface.holes() > 0 {
                r.warnings.push(format!("{} of {} grid samples have no surface point", surface.holes(), surface.samples.len()));
            }
            if let Some(path) = out_path(c) {
                write_mesh(path, resolve_format(path, c.format, Format::Obj), &mesh)?;
            }
            Ok(())
        }
        _ => Err(CliError::Input("--l1 and --l2 go together".into())),
    }
}

fn line_options(c: &Common, samples: usize, verify: bool) -> LineOptions {
    let mut o = LineOptions { samples, membership_tol: c.tol_surface, verify_samples: verify, ..Default::default() };
    o.surface.seed = c.seed;
    o
}

pub fn surface_line_cmd(triangle: &[String], from: &str, to: &str, n: usize, verify: bool, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let v = parse_triangle(triangle)?;
    let (p1, p2) = (parse_point(from)?, parse_point(to)?);
    r.input("triangle", v);
    r.input("from", p1);
    r.input("to", p2);
    r.input("n", n);
    let line = surface_line(v, p1, p2, &line_options(c, n.max(2), verify))?;
    // endpoints may be vertices, where the implicit function has no gradient
    let inner = &line.samples[1..line.samples.len().saturating_sub(1).max(1)];
    let worst = inner.iter().map(|s| surface_implicit(&v, *s).map(f64::abs)).try_fold(0.0_f64, |m, d| d.map(|d| m.max(d)))?;
    r.result("case", line.case);
    r.result("arc", line.arc);
    r.result("anchor", line.anchor);
    r.result("generating_theta", line.generating_theta);
    r.result("alternatives", &line.alternatives);
    r.result("samples", line.samples.len());
    r.result("max_implicit_residual", worst);
    if !line.alternatives.is_empty() {
        r.warnings.push(format!("{} other line(s) pass through both points", line.alternatives.len()));
    }
    if let Some(path) = out_path(c) {
        write_curves(path, resolve_format(path, c.format, Format::Csv), &[line.samples])?;
    }
    Ok(())
}

pub fn ceva_cmd(triangle: &[String], d1: f64, d2: f64, strict: bool, c: &Common, r: &mut Report) -> Result<(), CliError> {
    let v = parse_triangle(triangle)?;
    r.input("triangle", v);
    r.input("d1", d1);
    r.input("d2", d2);
    r.input("strict", strict);
    let opts = CevaOptions { strict, line: line_options(c, 32, false), ..Default::default() };
    let cfg = ceva_config(v, d1, d2, &opts)?;
    let (prod, proj) = (ceva_product(&cfg)?, ceva_product_projected(&cfg)?);
    r.result("feet", cfg.feet);
    r.result("feet_projected", cfg.feet.map(fibre_project));
    r.result("t", cfg.t);
    r.result("t_star", cfg.t_star);
    r.result("crossings", cfg.crossings);
    r.result("third_cevian_miss", cfg.third_cevian_miss);
    r.result("product", prod);
    r.result("product_projected", proj);
    r.check(Check::at_most("|product - 1|", ANCHOR_CEVA, (prod - 1.0).abs(), c.tol_ratio));
    r.check(Check::at_most("|projected product - 1|", ANCHOR_CEVA_PROJECTED, (proj - 1.0).abs(), c.tol_ratio));
    r.warnings.extend(cfg.warnings.iter().cloned());
    if let Some(path) = out_path(c) {
        let curves: Vec<Vec<Point>> = cfg.cevians.iter().map(|l| l.samples.clone()).collect();
        write_curves(path, resolve_format(path, c.format, Format::Obj), &curves)?;
    }
    Ok(())
}
