//! Seeded invariant suites behind `nilgeo verify`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nil_geometry::geodesic::geodesic_velocity;
use nil_geometry::nil::rotate_about_z;
use nil_geometry::sphere::{ball_convexity_defect, meridian_min_x};
use nil_geometry::triangle_calculus::simple_ratio_projected;
use nil_geometry::{
    ceva_config, ceva_product, ceva_product_projected, distance, fibre_project, geodesic_ode_oracle, geodesic_point, geodesic_point_from, menelaus_point,
    point_at_ratio, projected_arc, simple_ratio, solve_geodesic, tangent_norm, translate, CevaOptions, GeodesicParams, NilError, Point, TranslationParams,
};

use crate::args::{Common, Suite};
use crate::report::{Check, Report};
use crate::CliError;

pub const REF_TRIANGLE: [Point; 3] = [Point::new(1.0, 0.0, 0.0), Point::new(1.0 / 3.0, 2.0, 1.0), Point::new(0.5, -1.0, 1.0)];

const ANCHOR_ODE: &str = "closed-form geodesic curves vs geodesic equations";
const ANCHOR_CIRCLE: &str = "fibre projection of a geodesic is a circle arc";
const ANCHOR_RATIO: &str = "fibre projection preserves simple ratios";
const ANCHOR_ROUND_TRIP: &str = "geodesic distance: two-point boundary value problem";
const ANCHOR_ISOMETRY: &str = "translations and fibre rotations are isometries";
const ANCHOR_MENELAUS: &str = "Menelaus condition";

fn params(rng: &mut ChaCha8Rng, t_max: f64) -> GeodesicParams {
    GeodesicParams::new(rng.gen_range(-PI..PI), rng.gen_range(-FRAC_PI_2..FRAC_PI_2), rng.gen_range(0.05..t_max)).expect("valid sample")
}

fn point(rng: &mut ChaCha8Rng, r: f64) -> Point {
    Point::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn geodesic_suite(rng: &mut ChaCha8Rng, r: &mut Report) -> Result<(), CliError> {
    let (mut ode, mut speed) = (0.0_f64, 0.0_f64);
    for _ in 0..40 {
        let p = params(rng, 3.0);
        let exact = geodesic_point(&p);
        ode = ode.max(exact.model_distance(&geodesic_ode_oracle(&p, p.t, 1e-2)?));
        for k in 0..=8 {
            let q = p.with_t(p.t * k as f64 / 8.0);
            speed = speed.max((tangent_norm(geodesic_point(&q), geodesic_velocity(&q)) - 1.0).abs());
        }
    }
    r.check(Check::at_most("geodesic: closed form vs ODE", ANCHOR_ODE, ode, 1e-6));
    r.check(Check::at_most("geodesic: unit speed", ANCHOR_ODE, speed, 1e-6));
    Ok(())
}

fn projection_suite(rng: &mut ChaCha8Rng, r: &mut Report) -> Result<(), CliError> {
    let mut circle = 0.0_f64;
    for _ in 0..100 {
        let p = params(rng, 6.0);
        let base = point(rng, 1.0);
        let arc = projected_arc(base, &p);
        for k in 0..=10 {
            let q = geodesic_point_from(base, &p.with_t(p.t * k as f64 / 10.0));
            circle = circle.max(arc.carrier_distance(fibre_project(q)));
        }
    }
    let mut ratio = 0.0_f64;
    for _ in 0..50 {
        let p = params(rng, 3.0);
        let base = point(rng, 1.0);
        let mid = geodesic_point_from(base, &p.with_t(p.t * rng.gen_range(0.1..0.9)));
        let end = geodesic_point_from(base, &p);
        let s = simple_ratio(base, mid, end)?.value;
        let arc = projected_arc(base, &p);
        ratio = ratio.max((simple_ratio_projected(&arc, fibre_project(mid)) - s).abs());
    }
    r.check(Check::at_most("projection: circle residual", ANCHOR_CIRCLE, circle, 1e-10));
    r.check(Check::at_most("projection: arc ratio vs distance ratio", ANCHOR_RATIO, ratio, 1e-8));
    Ok(())
}

fn distance_suite(rng: &mut ChaCha8Rng, tol: f64, r: &mut Report) -> Result<(), CliError> {
    let mut round = 0.0_f64;
    for _ in 0..40 {
        let base = point(rng, 1.0);
        let p = params(rng, 2.0);
        let target = geodesic_point_from(base, &p);
        let sol = solve_geodesic(base, target)?;
        round = round.max(geodesic_point_from(base, &sol.params).model_distance(&target));
    }
    let mut invariance = 0.0_f64;
    for _ in 0..20 {
        let (p, q) = (point(rng, 1.0), point(rng, 1.0));
        let d = distance(p, q)?;
        let t = TranslationParams::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let w = rng.gen_range(-PI..PI);
        invariance = invariance.max((distance(translate(p, t), translate(q, t))? - d).abs());
        invariance = invariance.max((distance(rotate_about_z(p, w), rotate_about_z(q, w))? - d).abs());
    }
    r.check(Check::at_most("distance: round trip", ANCHOR_ROUND_TRIP, round, tol));
    r.check(Check::at_most("distance: isometry invariance", ANCHOR_ISOMETRY, invariance, 1e-7));
    Ok(())
}

fn sphere_suite(r: &mut Report) {
    use crate::commands::{ANCHOR_BALL_CONVEX, ANCHOR_SPHERE_EMBEDDED};
    for radius in [1.0, 3.0, 6.0, 2.0 * PI - 0.01] {
        r.check(Check::above(format!("sphere: meridian off the axis at R = {radius}"), ANCHOR_SPHERE_EMBEDDED, meridian_min_x(radius, 400), 0.0));
    }
    for radius in [2.0 * PI + 0.05, 7.0] {
        r.check(Check::below(format!("sphere: meridian crosses the axis at R = {radius}"), ANCHOR_SPHERE_EMBEDDED, meridian_min_x(radius, 400), 0.0));
    }
    r.check(Check::at_most("sphere: ball convex at R = π/2", ANCHOR_BALL_CONVEX, ball_convexity_defect(FRAC_PI_2, 400), 1e-9));
    r.check(Check::above("sphere: ball not convex at R = 2", ANCHOR_BALL_CONVEX, ball_convexity_defect(2.0, 400), 1e-9));
}

fn ceva_suite(rng: &mut ChaCha8Rng, tol: f64, seed: u64, r: &mut Report) -> Result<(), CliError> {
    use crate::commands::{ANCHOR_CEVA, ANCHOR_CEVA_PROJECTED};
    let (mut prod, mut proj) = (0.0_f64, 0.0_f64);
    let mut opts = CevaOptions::default();
    opts.line.surface.seed = seed;
    for _ in 0..4 {
        let (d1, d2) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        let cfg = ceva_config(REF_TRIANGLE, d1, d2, &opts)?;
        prod = prod.max((ceva_product(&cfg)? - 1.0).abs());
        proj = proj.max((ceva_product_projected(&cfg)? - 1.0).abs());
    }
    r.check(Check::at_most("ceva: |product - 1|", ANCHOR_CEVA, prod, tol));
    r.check(Check::at_most("ceva: |projected product - 1|", ANCHOR_CEVA_PROJECTED, proj, tol));
    Ok(())
}

/// Ordered Menelaus product `s(Aj,P1,Ai)·s(Ai,P2,Ak)·s(Aj,P3,Ak)` for side
/// points with ratios `s1`, `s2`; `None` when P3 falls outside the model range.
pub fn menelaus_product(v: [Point; 3], (i, j, k): (usize, usize, usize), s1: f64, s2: f64) -> Result<Option<f64>, NilError> {
    let p1 = point_at_ratio(v[j], v[i], s1)?;
    let p2 = point_at_ratio(v[i], v[k], s2)?;
    let p3 = match menelaus_point(v[i], v[j], v[k], p1, p2, -1.0) {
        Ok(p) => p,
        Err(NilError::OutOfModelRange { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some(simple_ratio(v[j], p1, v[i])?.value * simple_ratio(v[i], p2, v[k])?.value * simple_ratio(v[j], p3, v[k])?.value))
}

fn menelaus_suite(rng: &mut ChaCha8Rng, tol: f64, r: &mut Report) -> Result<(), CliError> {
    const ORDERS: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
    let (mut worst, mut used) = (0.0_f64, 0);
    for _ in 0..20 {
        let order = ORDERS[rng.gen_range(0..3)];
        let (s1, s2) = (rng.gen_range(-1.5_f64..1.5).exp(), rng.gen_range(-1.5_f64..1.5).exp());
        if let Some(p) = menelaus_product(REF_TRIANGLE, order, s1, s2)? {
            worst = worst.max((p + 1.0).abs());
            used += 1;
        }
    }
    r.result("menelaus_configs", used);
    r.check(Check::at_most("menelaus: |ordered product + 1|", ANCHOR_MENELAUS, worst, tol));
    Ok(())
}

pub fn verify_cmd(suite: Suite, c: &Common, r: &mut Report) -> Result<(), CliError> {
    r.input("suite", suite_name(suite));
    r.input("seed", c.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let all = suite == Suite::All;
    if all || suite == Suite::Geodesic {
        geodesic_suite(&mut rng, r)?;
    }
    if all || suite == Suite::Projection {
        projection_suite(&mut rng, r)?;
    }
    if all || suite == Suite::Distance {
        distance_suite(&mut rng, c.tol_distance, r)?;
    }
    if all || suite == Suite::Sphere {
        sphere_suite(r);
    }
    if all || suite == Suite::Ceva {
        ceva_suite(&mut rng, c.tol_ratio, c.seed, r)?;
    }
    if all || suite == Suite::Menelaus {
        menelaus_suite(&mut rng, c.tol_ratio, r)?;
    }
    r.result("checks", r.checks.len());
    r.result("failed", r.failed());
    Ok(())
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::All => "all",
        Suite::Geodesic => "geodesic",
        Suite::Projection => "projection",
        Suite::Distance => "distance",
        Suite::Sphere => "sphere",
        Suite::Ceva => "ceva",
        Suite::Menelaus => "menelaus",
    }
}
