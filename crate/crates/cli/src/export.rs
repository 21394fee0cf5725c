//! OBJ / CSV / JSON writers. Numbers carry 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use nil_geometry::{Mesh, Point};

use crate::args::Format;
use crate::CliError;

pub fn resolve_format(path: &Path, requested: Option<Format>, fallback: Format) -> Format {
    requested.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("obj") => Format::Obj,
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        _ => fallback,
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn mesh_obj(mesh: &Mesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", num(v.x), num(v.y), num(v.z));
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn mesh_csv(mesh: &Mesh) -> String {
    let mut s = String::from(if mesh.tags.is_some() { "x,y,z,u,v\n" } else { "x,y,z\n" });
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = write!(s, "{},{},{}", num(v.x), num(v.y), num(v.z));
        if let Some(tags) = &mesh.tags {
            let _ = write!(s, ",{},{}", num(tags[i][0]), num(tags[i][1]));
        }
        s.push('\n');
    }
    s
}

/// Polylines as OBJ `l` elements, one per curve.
pub fn curves_obj(curves: &[Vec<Point>]) -> String {
    let mut s = String::new();
    for c in curves {
        for v in c {
            let _ = writeln!(s, "v {} {} {}", num(v.x), num(v.y), num(v.z));
        }
    }
    let mut base = 1;
    for c in curves {
        let idx: Vec<String> = (base..base + c.len()).map(|i| i.to_string()).collect();
        let _ = writeln!(s, "l {}", idx.join(" "));
        base += c.len();
    }
    s
}

pub fn curves_csv(curves: &[Vec<Point>]) -> String {
    let mut s = String::from("curve,index,x,y,z\n");
    for (c, pts) in curves.iter().enumerate() {
        for (i, v) in pts.iter().enumerate() {
            let _ = writeln!(s, "{c},{i},{},{},{}", num(v.x), num(v.y), num(v.z));
        }
    }
    s
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("finite geometry serialises");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_mesh(path: &Path, format: Format, mesh: &Mesh) -> Result<(), CliError> {
    let text = match format {
        Format::Obj => mesh_obj(mesh),
        Format::Csv => mesh_csv(mesh),
        Format::Json => json(mesh),
    };
    write(path, &text)
}

pub fn write_curves(path: &Path, format: Format, curves: &[Vec<Point>]) -> Result<(), CliError> {
    let text = match format {
        Format::Obj => curves_obj(curves),
        Format::Csv => curves_csv(curves),
        Format::Json => json(&curves),
    };
    write(path, &text)
}
