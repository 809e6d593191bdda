//! Batch front end: solve a configured problem, run verification suites, or
//! inspect a grid.
//!
//! Exit codes for `solve`: 0 converged, 2 reached the iteration budget
//! without converging (report still written), 3 invalid configuration.

mod config;
mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use icurv_core::functional::FunctionalContext;
use icurv_core::grid::{sphere_area, GridFunction, SphereGrid};
use icurv_core::solver::{minimize, SolveReport};

use config::ProblemConfig;

#[derive(Parser)]
#[command(name = "icurv", version, about = "Curvature-type integral equations on spheres: solve and verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the quotient functional for a configured problem
    Solve {
        /// JSON problem configuration
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a named verification suite
    Verify {
        /// one of: constants, stereographic, bubble, covariance, manifold, ode
        suite: String,
        /// optional JSON report path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print grid statistics and optionally export the nodes as CSV
    GridInfo {
        n: usize,
        resolution: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve { config } => cmd_solve(&config),
        Command::Verify { suite, report } => cmd_verify(&suite, report.as_deref()),
        Command::GridInfo { n, resolution, csv } => cmd_grid_info(n, resolution, csv.as_deref()),
    };
    ExitCode::from(code)
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    config: &'a ProblemConfig,
    report: &'a SolveReport,
}

fn cmd_solve(config_path: &std::path::Path) -> u8 {
    let config = match ProblemConfig::load(config_path) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 3;
        }
    };
    let grid = match SphereGrid::build(config.n, config.resolution) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let curvature = match config.sample_curvature(&grid) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 3;
        }
    };
    let ctx = match FunctionalContext::new(&grid, config.alpha, &curvature) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    if let Err(e) = config.solver.validate() {
        eprintln!("error: {e}");
        return 3;
    }
    let report = match minimize(&ctx, &config.solver) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    if let Err(msg) = write_outputs(&config, &ctx, &curvature, &report) {
        eprintln!("error: {msg}");
        return 3;
    }
    println!(
        "{}: J = {:.12}, multiplier = {:.9}, Euler-Lagrange residual = {:.3e}, {} iterations",
        if report.converged { "converged" } else { "not converged" },
        report.j_value,
        report.lambda,
        report.el_residual,
        report.iterations
    );
    if report.converged {
        0
    } else {
        2
    }
}

fn write_outputs(
    config: &ProblemConfig,
    ctx: &FunctionalContext,
    curvature: &GridFunction,
    report: &SolveReport,
) -> Result<(), String> {
    let document = SolveDocument { config, report };
    let json = serde_json::to_string_pretty(&document).map_err(|e| e.to_string())?;
    std::fs::write(&config.output.report, json)
        .map_err(|e| format!("cannot write report {}: {e}", config.output.report.display()))?;

    let grid = ctx.grid();
    let f_star = GridFunction::new(grid, report.f_star.clone()).map_err(|e| e.to_string())?;
    let image = ctx.apply(&f_star).map_err(|e| e.to_string())?;
    let q = ctx.exponent_q();
    let file = File::create(&config.output.fields)
        .map_err(|e| format!("cannot write fields {}: {e}", config.output.fields.display()))?;
    let mut out = BufWriter::new(file);
    let dim = grid.n() + 1;
    let coord_header: Vec<String> = (0..dim).map(|d| format!("x{d}")).collect();
    writeln!(out, "index,{},weight,R,f,u,el_residual", coord_header.join(","))
        .map_err(|e| e.to_string())?;
    for i in 0..grid.len() {
        let coords: Vec<String> = grid.points()[i][..dim].iter().map(|c| format!("{c:.17e}")).collect();
        let target = report.lambda * report.f_star[i].powf(q);
        let pointwise = (image.values()[i] - target).abs() / target;
        writeln!(
            out,
            "{i},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}",
            coords.join(","),
            grid.weights()[i],
            curvature.values()[i],
            report.f_star[i],
            report.u_star[i],
            pointwise
        )
        .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn cmd_verify(suite: &str, report_path: Option<&std::path::Path>) -> u8 {
    let checks = match verify::run_suite(suite) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 3;
        }
    };
    if let Some(path) = report_path {
        match serde_json::to_string_pretty(&checks) {
            Ok(json) => {
                if let Err(e) = std::fs::write(path, json) {
                    eprintln!("error: cannot write report {}: {e}", path.display());
                    return 3;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 3;
            }
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        0
    } else {
        1
    }
}

fn cmd_grid_info(n: usize, resolution: usize, csv: Option<&std::path::Path>) -> u8 {
    let grid = match SphereGrid::build(n, resolution) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let total = grid.total_weight();
    let area = sphere_area(n);
    let mut closure = 0.0f64;
    for (i, p) in grid.points().iter().enumerate() {
        let a = grid.antipode()[i];
        for d in 0..4 {
            closure = closure.max((grid.points()[a][d] + p[d]).abs());
        }
    }
    println!("nodes: {}", grid.len());
    println!(
        "total weight: {total:.15} (surface area {area:.15}, relative defect {:.3e})",
        (total - area).abs() / area
    );
    println!("antipodal closure defect: {closure:.3e}");
    if let Some(path) = csv {
        let file = match File::create(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 3;
            }
        };
        let mut out = BufWriter::new(file);
        if let Err(e) = grid.write_csv(&mut out) {
            eprintln!("error: {e}");
            return 3;
        }
        println!("wrote {}", path.display());
    }
    0
}
