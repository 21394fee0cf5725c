use std::process::{Command, Output};

use serde_json::Value;

const TRIANGLE: [&str; 3] = ["1,0,0", "0.333333,2,1", "0.5,-1,1"];

fn nilgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilgeo")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains("NaN"));
    serde_json::from_str(&text).expect("stdout is one JSON report")
}

fn with_triangle<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd, "--triangle"];
    v.extend(TRIANGLE);
    v.extend(rest);
    v
}

#[test]
fn distance_examples() {
    for to in ["0,0,1", "1,0,0"] {
        let out = nilgeo(&["distance", "--from", "0,0,0", "--to", to]);
        assert_eq!(out.status.code(), Some(0));
        let r = report(&out);
        assert!((r["results"]["distance"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(!r["results"]["branches"].as_array().unwrap().is_empty());
        assert!(r["error"].is_null());
    }
}

#[test]
fn homogeneous_points_and_negative_coordinates() {
    let a = report(&nilgeo(&["distance", "--from", "1,0,0,0", "--to", "1,-0.5,0.2,-1"]));
    let b = report(&nilgeo(&["distance", "--from", "0,0,0", "--to", "-0.5,0.2,-1"]));
    assert_eq!(a["results"]["distance"], b["results"]["distance"]);
}

#[test]
fn exit_codes() {
    let out = nilgeo(&["sphere", "--R", "7"]);
    assert_eq!(out.status.code(), Some(4));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "RadiusOutOfRange");
    assert!(r["error"]["message"].as_str().unwrap().contains("2π"));

    assert_eq!(nilgeo(&["distance", "--from", "1,2", "--to", "0,0,0"]).status.code(), Some(2));
    assert_eq!(nilgeo(&["distance", "--from", "0,0,0"]).status.code(), Some(2));
    assert_eq!(nilgeo(&["surface-line", "--triangle", TRIANGLE[0], TRIANGLE[1], TRIANGLE[2], "--from", "1,0,0", "--to", "1,0,0"]).status.code(), Some(2));
    let far = nilgeo(&["surface-line", "--triangle", TRIANGLE[0], TRIANGLE[1], TRIANGLE[2], "--from", "1,0,0", "--to", "5,5,5"]);
    assert_eq!(far.status.code(), Some(4));
    let strict = nilgeo(&with_triangle("ceva", &["--d1", "1.3", "--d2", "0.7", "--strict"]));
    assert_eq!(strict.status.code(), Some(3));
    assert_eq!(report(&strict)["error"]["kind"], "ThirdCevianMiss");
}

#[test]
fn sphere_obj_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.obj");
    let out = nilgeo(&["sphere", "--R", "1.5", "--n", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["closed"], true);
    assert_eq!(r["results"]["euler_characteristic"], 2);
    let text = std::fs::read_to_string(&path).unwrap();
    let nv = text.lines().filter(|l| l.starts_with("v ")).count();
    let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
    assert_eq!(nv, r["results"]["vertices"].as_u64().unwrap() as usize);
    // all `v` lines precede the `f` lines, indices are 1-based
    let first_f = text.lines().position(|l| l.starts_with("f ")).unwrap();
    assert!(text.lines().skip(first_f).all(|l| l.starts_with("f ")));
    for f in faces {
        for i in f.split_whitespace().skip(1) {
            let i: usize = i.parse().unwrap();
            assert!((1..=nv).contains(&i));
        }
    }
}

#[test]
fn geodesic_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = nilgeo(&["geodesic", "--from", "0,0,0", "--to", "1,1,1", "--n", "8", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,index,x,y,z"));
    let last: Vec<f64> = lines.last().unwrap().split(',').skip(2).map(|v| v.parse().unwrap()).collect();
    assert!(last.iter().all(|v| (v - 1.0).abs() < 1e-9));
}

#[test]
fn apollonius_formats() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("a.json");
    let args = ["apollonius", "--from", "-0.4,0,0", "--to", "0.4,0.1,0.2", "--lambda", "2", "--box", "-1.6,-1.6,-1.6,1.6,1.6,1.6", "--n", "32"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", json.to_str().unwrap()]);
    let r = report(&nilgeo(&with_out));
    assert_eq!(r["checks"][0]["pass"], true);
    let mesh: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(mesh["vertices"].as_array().unwrap().len() as u64, r["results"]["vertices"].as_u64().unwrap());

    let csv = dir.path().join("a.txt");
    let mut with_csv = args.to_vec();
    with_csv.extend(["--out", csv.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(nilgeo(&with_csv).status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x,y,z\n"));

    let out = nilgeo(&["apollonius", "--from", "0,0,0", "--to", "0,0,0", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(nilgeo(&["apollonius", "--from", "0,0,0", "--to", "1,0,0", "--lambda", "-1"]).status.code(), Some(2));
}

#[test]
fn ceva_example() {
    let out = nilgeo(&with_triangle("ceva", &["--d1", "1", "--d2", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["results"]["product"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((r["results"]["product_projected"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(r["results"]["feet"].as_array().unwrap().len(), 3);
    assert_eq!(r["anchor"], "Ceva's theorem on the triangle surface");
}

#[test]
fn triangle_surface_point_and_line() {
    let r = report(&nilgeo(&with_triangle("triangle-surface", &["--l1", "0", "--l2", "2"])));
    assert_eq!(r["results"]["point"]["x"], 1.0);
    assert_eq!(r["results"]["type"], "general-type");
    let r = report(&nilgeo(&with_triangle("triangle-surface", &["--l1", "1", "--l2", "1"])));
    assert!(r["results"]["residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(nilgeo(&with_triangle("triangle-surface", &["--l1", "1"])).status.code(), Some(2));

    let out = nilgeo(&with_triangle("surface-line", &["--from", "1,0,0", "--to", "0.5,-1,1", "--n", "8"]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["case"], "side-geodesic");
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.cfg");
    std::fs::write(&cfg, format!("# Ceva job\ntriangle = {} {} {}\nd1 = 2\nd2 = 2\ntol_ratio = 1e-7\n", TRIANGLE[0], TRIANGLE[1], TRIANGLE[2])).unwrap();
    let r = report(&nilgeo(&["ceva", "--config", cfg.to_str().unwrap(), "--d2", "0.5"]));
    assert_eq!(r["input"]["d1"], 2.0);
    assert_eq!(r["input"]["d2"], 0.5);
    assert_eq!(r["checks"][0]["tolerance"], 1e-7);
    let missing = nilgeo(&["ceva", "--config", dir.path().join("none").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_suites_are_deterministic() {
    let a = nilgeo(&["verify", "--suite", "sphere"]);
    let b = nilgeo(&["verify", "--suite", "sphere"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["results"]["failed"], 0);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true && c["anchor"].is_string()));
    let other = nilgeo(&["verify", "--suite", "distance", "--seed", "7"]);
    assert_eq!(other.status.code(), Some(0));
}
