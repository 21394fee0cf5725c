//! Command-line flags, point parsing and the optional key-value config file.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use nil_geometry::{Lambda, Point};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "nilgeo", version, about = "Geodesics, spheres and surfaces in Nil geometry", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Obj,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output file for meshes and sample tables; the report goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; defaults to the extension of --out.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for grid sampling.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Flat `key = value` file mirroring the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Acceptance threshold for distance-solver residuals.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_distance: f64,
    /// Acceptance threshold for surface constraints and membership.
    #[arg(long, default_value_t = 1e-5)]
    pub tol_surface: f64,
    /// Acceptance threshold for ratio products.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_ratio: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geodesic distance and every minimising branch.
    Distance {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[command(flatten)]
        common: Common,
    },
    /// Samples of the minimal geodesic between two points.
    Geodesic {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Geodesic sphere mesh.
    Sphere {
        #[arg(long = "R", allow_hyphen_values = true)]
        radius: f64,
        /// Sphere center.
        #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
        from: String,
        #[arg(long, default_value_t = 48)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Apollonius surface `d(P1,Q) = λ·d(Q,P2)`.
    Apollonius {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        /// Ratio λ, or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// `xmin,ymin,zmin,xmax,ymax,zmax`.
        #[arg(long, default_value = "-2,-2,-2,2,2,2", allow_hyphen_values = true)]
        r#box: String,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Surface of a geodesic triangle, or one point of it with --l1/--l2.
    TriangleSurface {
        #[arg(long, num_args = 3, allow_hyphen_values = true)]
        triangle: Vec<String>,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        l1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        l2: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Line of a triangle surface through two of its points.
    SurfaceLine {
        #[arg(long, num_args = 3, allow_hyphen_values = true)]
        triangle: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Re-check every lifted sample against the surface (slow).
        #[arg(long)]
        check_samples: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Ceva configuration with feet ratios δ1, δ2 and 1/(δ1·δ2).
    Ceva {
        #[arg(long, num_args = 3, allow_hyphen_values = true)]
        triangle: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        d1: f64,
        #[arg(long, allow_hyphen_values = true)]
        d2: f64,
        /// Fail when the third cevian misses the crossing of the first two.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded invariant suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Geodesic,
    Projection,
    Distance,
    Sphere,
    Ceva,
    Menelaus,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Distance { common, .. }
            | Command::Geodesic { common, .. }
            | Command::Sphere { common, .. }
            | Command::Apollonius { common, .. }
            | Command::TriangleSurface { common, .. }
            | Command::SurfaceLine { common, .. }
            | Command::Ceva { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }
}

fn numbers(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Input(format!("`{v}` in `{s}` is not a number"))))
        .collect()
}

/// `x,y,z`, or a homogeneous `w,x,y,z` (normalised by `w`).
pub fn parse_point(s: &str) -> Result<Point, CliError> {
    let v = numbers(s)?;
    let p = match v[..] {
        [x, y, z] => Point::new(x, y, z),
        [w, x, y, z] if w != 0.0 => Point::new(x / w, y / w, z / w),
        _ => return Err(CliError::Input(format!("`{s}` is not a point; expected x,y,z or 1,x,y,z"))),
    };
    if !p.is_finite() {
        return Err(CliError::Input(format!("point `{s}` is not finite")));
    }
    Ok(p)
}

pub fn parse_triangle(v: &[String]) -> Result<[Point; 3], CliError> {
    match v {
        [a, b, c] => Ok([parse_point(a)?, parse_point(b)?, parse_point(c)?]),
        _ => Err(CliError::Input("--triangle takes three points".into())),
    }
}

pub fn parse_lambda(s: &str) -> Result<Lambda, CliError> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Lambda::Infinite),
        v => match v.parse::<f64>() {
            Ok(x) if x >= 0.0 && x.is_finite() => Ok(Lambda::Finite(x)),
            _ => Err(CliError::Input(format!("`{s}` is not a ratio ≥ 0 or `inf`"))),
        },
    }
}

pub fn parse_box(s: &str) -> Result<(Point, Point), CliError> {
    match numbers(s)?[..] {
        [a, b, c, d, e, f] => Ok((Point::new(a, b, c), Point::new(d, e, f))),
        _ => Err(CliError::Input(format!("`{s}` is not a box; expected six numbers"))),
    }
}

/// Reads `key = value` lines (`#` starts a comment) into flag arguments.
pub fn config_args(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", no + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        out.push(format!("--{key}"));
        let value = value.trim();
        match value {
            "true" => {}
            _ if key == "triangle" => out.extend(value.split_whitespace().map(str::to_owned)),
            _ => out.push(value.to_owned()),
        }
    }
    Ok(out)
}

/// Splices the config file's flags in front of the explicit ones, so that
/// explicit flags override them.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else {
        return Ok(argv);
    };
    let path = match argv[pos].split_once('=') {
        Some((_, p)) => p.to_owned(),
        None => argv.get(pos + 1).cloned().ok_or_else(|| CliError::Input("--config needs a path".into()))?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("cannot read config {path}: {e}")))?;
    let extra = config_args(&text)?;
    // argv[0] is the program, argv[1] the subcommand
    if argv.len() < 2 {
        return Ok(argv);
    }
    let mut out = argv[..2].to_vec();
    out.extend(extra);
    out.extend(argv[2..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points() {
        assert_eq!(parse_point("1,2,3").unwrap(), Point::new(1.0, 2.0, 3.0));
        assert_eq!(parse_point("1, 0.5,-1,1").unwrap(), Point::new(0.5, -1.0, 1.0));
        assert_eq!(parse_point("2,2,4,6").unwrap(), Point::new(1.0, 2.0, 3.0));
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("a,b,c").is_err());
        assert!(parse_point("0,1,2,3").is_err());
    }

    #[test]
    fn lambdas_and_boxes() {
        assert_eq!(parse_lambda("inf").unwrap(), Lambda::Infinite);
        assert_eq!(parse_lambda("2").unwrap(), Lambda::Finite(2.0));
        assert!(parse_lambda("-1").is_err());
        let (a, b) = parse_box("-1,-2,-3,1,2,3").unwrap();
        assert_eq!((a.z, b.y), (-3.0, 2.0));
        assert!(parse_box("1,2,3").is_err());
    }

    #[test]
    fn config_lines() {
        let args = config_args("# job\nR = 3\ntriangle = 1,0,0 0,1,0 0,0,1\nstrict = true\ntol_surface=1e-4\n").unwrap();
        assert_eq!(args, ["--R", "3", "--triangle", "1,0,0", "0,1,0", "0,0,1", "--strict", "--tol-surface", "1e-4"]);
        assert!(config_args("nonsense").is_err());
    }
}
