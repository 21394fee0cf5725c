//! End-to-end checks through the public API only.

use std::f64::consts::PI;

use nil_geometry::triangle_surface::surface_deviation;
use nil_geometry::*;
use proptest::prelude::*;

const REF_TRIANGLE: [Point; 3] = [Point::new(1.0, 0.0, 0.0), Point::new(1.0 / 3.0, 2.0, 1.0), Point::new(0.5, -1.0, 1.0)];

fn point() -> impl Strategy<Value = Point> {
    (-1.0..1.0, -1.0..1.0, -1.0..1.0).prop_map(|(x, y, z)| Point::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric(p in point(), q in point(), r in point()) {
        let (pq, qp) = (distance(p, q).unwrap(), distance(q, p).unwrap());
        prop_assert!((pq - qp).abs() < 1e-9);
        let (pr, rq) = (distance(p, r).unwrap(), distance(r, q).unwrap());
        prop_assert!(pq <= pr + rq + 1e-9);
    }

    #[test]
    fn projection_lifts_back(alpha in -PI..PI, theta in -1.4..1.4_f64, t in 0.1..5.0_f64, base in point()) {
        prop_assume!(theta.abs() > 1e-3);
        let params = GeodesicParams::new(alpha, theta, t).unwrap();
        let arc = projected_arc(base, &params);
        let end = geodesic_point_from(base, &params);
        let lifted = lift_arc_params(&arc, fibre_project(end)).unwrap();
        prop_assert!((lifted.t - t).abs() < 1e-8, "{lifted:?} vs {params:?}");
        prop_assert!(geodesic_point_from(base, &lifted).model_distance(&end) < 1e-8);
    }
}

#[test]
fn sphere_vertices_sit_at_the_radius() {
    let spec = SphereSpec::new(Point::new(0.3, -0.2, 0.5), 2.5).unwrap();
    let mesh = sphere_mesh(&spec, 10, 20).unwrap();
    assert!(mesh.is_closed());
    for v in &mesh.vertices {
        assert!((distance(spec.center, *v).unwrap() - 2.5).abs() < 1e-9);
    }
}

#[test]
fn bisector_separates_the_foci() {
    let (p1, p2) = (Point::new(-0.5, 0.0, 0.1), Point::new(0.5, 0.2, -0.1));
    let spec = ApolloniusSpec::new(p1, p2, Lambda::Finite(1.0)).unwrap();
    let bbox = BoundingBox::new(Point::new(-1.5, -1.5, -1.5), Point::new(1.5, 1.5, 1.5)).unwrap();
    let mesh = apollonius_sample(&spec, bbox, 24, 2).unwrap();
    assert!(!mesh.vertices.is_empty() && mesh.indices_valid());
    for v in mesh.vertices.iter().step_by(17) {
        let (a, b) = (distance(p1, *v).unwrap(), distance(*v, p2).unwrap());
        assert!((a / b - 1.0).abs() < 2e-2);
    }
}

#[test]
fn surface_lines_stay_on_the_surface() {
    let side = |k: usize, r: f64| point_at_ratio(REF_TRIANGLE[k], REF_TRIANGLE[(k + 1) % 3], r).unwrap();
    let opts = LineOptions { samples: 6, ..Default::default() };
    for (p1, p2, case) in [
        (side(0, 0.3), side(2, 0.5), LineCase::MenelausArc),
        (side(0, 1.0), side(1, 1.0), LineCase::MidpointCase),
        (REF_TRIANGLE[0], side(1, 1.0), LineCase::Cevian),
        (side(1, 0.4), side(1, 2.0), LineCase::SideGeodesic),
    ] {
        let line = surface_line(REF_TRIANGLE, p1, p2, &opts).unwrap();
        assert_eq!(line.case, case);
        assert_eq!((line.samples[0], *line.samples.last().unwrap()), (p1, p2));
        for s in &line.samples[1..line.samples.len() - 1] {
            assert!(surface_deviation(REF_TRIANGLE, *s, &SurfaceOptions { restarts: 4, ..Default::default() }).unwrap() < 1e-5, "{case:?}");
        }
    }
}

#[test]
fn ceva_and_menelaus_on_the_reference_triangle() {
    let cfg = ceva_config(REF_TRIANGLE, 0.8, 1.6, &CevaOptions::default()).unwrap();
    assert!((ceva_product(&cfg).unwrap() - 1.0).abs() < 1e-9);
    assert!((ceva_product_projected(&cfg).unwrap() - 1.0).abs() < 1e-9);
    let [a0, a1, a2] = REF_TRIANGLE;
    // P1 on A0A2, P2 on A2A1, P3 on the extension of A0A1
    let (p1, p2) = (point_at_ratio(a0, a2, 0.7).unwrap(), point_at_ratio(a2, a1, 0.5).unwrap());
    let p3 = menelaus_point(a2, a0, a1, p1, p2, -1.0).unwrap();
    let s3 = simple_ratio(a0, p3, a1).unwrap().value;
    assert!(s3 < 0.0);
    assert!((0.7 * 0.5 * s3 + 1.0).abs() < 1e-9);
}
