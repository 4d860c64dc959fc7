mod commands;
mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "folia", version, about = "Singular subalgebroids: exact fiber invariants, flows, holonomy and graphs")]
struct Cli {
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify involutivity of the generators.
    Check { file: PathBuf },
    /// Fiber, evaluation and isotropy dimensions at points.
    Dims {
        file: PathBuf,
        /// Rational point, e.g. `1/2,-3`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        /// Grid `lo:hi:n` on every axis.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Projectivity verdict from fiber dimensions at sample points.
    Proj {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:2:5")]
        grid: String,
    },
    /// Search for a leaf path between two points.
    Leaf {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Compare the same-leaf relations of two modules on a grid.
    GraphEq {
        first: PathBuf,
        second: PathBuf,
        /// Coordinate values used on every axis.
        #[arg(long, allow_hyphen_values = true, default_value = "-2,-1,-1/2,0,1/2,1,2")]
        values: String,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Path-holonomy exponential `exp_x Σ λᵢ gᵢ`.
    Exp {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// 1-parameter group of bisections of a module element, with group-law and derivative probes.
    Family {
        file: PathBuf,
        /// Generator index.
        #[arg(long, default_value_t = 0, conflicts_with = "section")]
        generator: usize,
        /// Section expression instead of a generator.
        #[arg(long, allow_hyphen_values = true)]
        section: Option<String>,
        /// Half-width of the box domain.
        #[arg(long = "box", default_value_t = 1.0)]
        half_width: f64,
        #[arg(long, default_value_t = 200)]
        triples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Integrate a Lie subalgebra of a named matrix Lie algebra.
    Integrate {
        /// so2, so3, su2, gl2 or t2.
        #[arg(long)]
        algebra: String,
        /// Basis vector in frame coordinates; repeatable.
        #[arg(long, allow_hyphen_values = true, required = true)]
        basis: Vec<String>,
        #[arg(long, default_value_t = 20.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Differentiate a bisection family of the path-holonomy chart.
    Differentiate {
        file: PathBuf,
        /// Coefficient polynomial in `l` and the coordinates; one per generator.
        #[arg(long, allow_hyphen_values = true, required = true)]
        family: Vec<String>,
        #[arg(long = "box", default_value_t = 0.5)]
        half_width: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// The graph counterexamples.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Draw leaves, rank strata or bisection traces as SVG.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = RenderKind::Leaves)]
        kind: RenderKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "box", default_value_t = 2.0)]
        half_width: f64,
        #[arg(long, default_value_t = 16)]
        cells: usize,
        #[arg(long, default_value_t = 0)]
        generator: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Counterexample {
    /// Saturation of a proper arc of rotations is not open.
    Openness {
        /// Arc `lo,hi` in radians containing 0.
        #[arg(long, allow_hyphen_values = true, default_value = "-0.7853981633974483,0.7853981633974483")]
        arc: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Derivative of a leaf-preserving family that leaves the module.
    Subspace {
        file: PathBuf,
        /// Component polynomials in `l` and the coordinates.
        #[arg(long, allow_hyphen_values = true, required = true)]
        family: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RenderKind {
    Leaves,
    Strata,
    Bisection,
}

/// Result of a subcommand: its report and whether it refutes a claim.
pub struct Report {
    pub schema: &'static str,
    pub json: Value,
    pub summary: String,
    pub refuted: bool,
}

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("FOLIA_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError(format!("FOLIA_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError("FOLIA_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Report, CliError> {
    use commands::*;
    let seed = cli.seed;
    match cli.command {
        Command::Check { file } => check(&file),
        Command::Dims { file, point, grid } => dims(&file, &point, grid.as_deref()),
        Command::Proj { file, point, grid } => proj(&file, &point, &grid),
        Command::Leaf { file, from, to, budget } => leaf(&file, &from, &to, budget),
        Command::GraphEq { first, second, values, budget } => graph_eq(&first, &second, &values, budget),
        Command::Exp { file, lambda, point, tol } => exp(&file, &lambda, &point, tol),
        Command::Family { file, generator, section, half_width, triples, tol } => {
            family(&file, generator, section.as_deref(), half_width, triples, tol, seed)
        }
        Command::Integrate { algebra, basis, lambda_max, step } => integrate(&algebra, &basis, lambda_max, step, seed),
        Command::Differentiate { file, family, half_width, tol } => differentiate(&file, &family, half_width, tol),
        Command::Counterexample { which: Counterexample::Openness { arc, samples } } => openness(&arc, samples, seed),
        Command::Counterexample { which: Counterexample::Subspace { file, family, point } } => subspace(&file, &family, &point),
        Command::Render { file, kind, out, half_width, cells, generator } => {
            let kind = match kind {
                RenderKind::Leaves => render::Kind::Leaves,
                RenderKind::Strata => render::Kind::Strata,
                RenderKind::Bisection => render::Kind::Bisection,
            };
            render::render(&file, kind, &out, half_width, cells, generator)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.0);
        return ExitCode::from(1);
    }
    let json_path = cli.json.clone();
    match run(cli) {
        Ok(report) => {
            let mut doc = serde_json::Map::new();
            doc.insert("schema".into(), Value::String(report.schema.into()));
            if let Value::Object(m) = report.json {
                doc.extend(m);
            }
            if let Some(path) = json_path {
                let text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable report") + "\n";
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            println!("{}", report.summary);
            ExitCode::from(if report.refuted { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(1)
        }
    }
}
