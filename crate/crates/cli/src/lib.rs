//! `nilgeo`: command-line front end for `nil-geometry`.

pub mod args;
pub mod commands;
pub mod error;
pub mod export;
pub mod report;
pub mod verify;

use std::time::Instant;

use clap::Parser;

pub use error::CliError;
use args::{Cli, Command};
use report::Report;

/// Parses `argv`, runs the command, prints the JSON report to stdout and
/// returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match args::expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    let (report, outcome) = execute(&cli.command);
    print!("{}", report.to_json());
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: &Command) -> (Report, Result<(), CliError>) {
    use commands::*;
    let c = cmd.common();
    let (name, anchor) = match cmd {
        Command::Distance { .. } => ("distance", ANCHOR_DISTANCE),
        Command::Geodesic { .. } => ("geodesic", ANCHOR_GEODESIC),
        Command::Sphere { .. } => ("sphere", ANCHOR_SPHERE),
        Command::Apollonius { .. } => ("apollonius", ANCHOR_APOLLONIUS),
        Command::TriangleSurface { .. } => ("triangle-surface", ANCHOR_TRIANGLE),
        Command::SurfaceLine { .. } => ("surface-line", ANCHOR_LINE),
        Command::Ceva { .. } => ("ceva", ANCHOR_CEVA),
        Command::Verify { .. } => ("verify", "invariant suites"),
    };
    let mut r = Report::new(name, anchor);
    let outcome = match cmd {
        Command::Distance { from, to, .. } => distance_cmd(from, to, c, &mut r),
        Command::Geodesic { from, to, n, .. } => geodesic_cmd(from, to, *n, c, &mut r),
        Command::Sphere { radius, from, n, .. } => sphere_cmd(*radius, from, *n, c, &mut r),
        Command::Apollonius { from, to, lambda, r#box, n, .. } => apollonius_cmd(from, to, lambda, r#box, *n, c, &mut r),
        Command::TriangleSurface { triangle, n, l1, l2, .. } => triangle_surface_cmd(triangle, *n, l1.as_deref(), l2.as_deref(), c, &mut r),
        Command::SurfaceLine { triangle, from, to, n, check_samples, .. } => surface_line_cmd(triangle, from, to, *n, *check_samples, c, &mut r),
        Command::Ceva { triangle, d1, d2, strict, .. } => ceva_cmd(triangle, *d1, *d2, *strict, c, &mut r),
        Command::Verify { suite, .. } => verify::verify_cmd(*suite, c, &mut r),
    };
    let outcome = outcome.and_then(|()| match r.failed() {
        0 => Ok(()),
        n => Err(CliError::Checks(n)),
    });
    if let Err(e) = &outcome {
        r.set_error(e);
    }
    (r, outcome)
}
