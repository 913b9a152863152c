//! `cvp` — solve causal variational problems from the command line.
//!
//! Exit codes: 0 success, 2 validation failure, 3 infeasible or no solution
//! at tolerance, 4 size cap exceeded. Diagnostics go to standard error; the
//! result file goes to standard output and is byte-identical across reruns
//! on the same input.

mod io;
mod report;

use clap::{Parser, Subcommand};
use cvp_core::continuum::{circle_instance, CircleDiscretization};
use cvp_core::optimizer::ProblemTag;
use cvp_core::solver::IterativeConfig;
use cvp_core::{Measure, Potential};
use nalgebra::DVector;

use report::Report;

#[derive(Parser)]
#[command(name = "cvp", version, about = "Solver for causal variational principles on finite point spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a problem file.
    Validate { file: String },
    /// Minimize the inner action for the potential in the file.
    Solve {
        file: String,
        /// Use projected gradient descent instead of support enumeration.
        #[arg(long)]
        iterative: bool,
    },
    /// Report Euler-Lagrange residuals of a given measure.
    Check {
        file: String,
        /// Comma-separated weights, e.g. 0.5,0.5,0.5
        #[arg(long)]
        measure: String,
    },
    /// Check admissibility of the initial data in the file.
    Admissible { file: String },
    /// Solve the initial value problem with the potential from the file.
    Ivp { file: String },
    /// Solve an optimal-potential problem over the solution set.
    Optimize {
        file: String,
        #[arg(long)]
        problem: ProblemTag,
    },
    /// Compute the domain of dependence of the initial data.
    Dod { file: String },
    /// Enumerate solution germs and the maximal optimal solution.
    Germs { file: String },
    /// List the maximal certified-dependent sets.
    Maximal { file: String },
    /// Emit a discretized circle instance as a problem file.
    DiscretizeCircle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modified: bool,
        /// Constant external potential to store in the instance.
        #[arg(long)]
        phi_const: Option<f64>,
    },
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(e) => {
            eprintln!("cvp: {}", e.message);
            e.code
        }
    });
}

/// Honors CVP_THREADS (0 or unset = automatic).
fn configure_threads() {
    if let Ok(value) = std::env::var("CVP_THREADS") {
        if let Ok(k) = value.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn no_solution(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<cvp_core::Error> for CliError {
    fn from(e: cvp_core::Error) -> Self {
        use cvp_core::Error::*;
        let code = match e {
            TooManyPoints { .. } => 4,
            NotAdmissible | NoDependentSet | NoGerms | NotConverged { .. } => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::ParseError> for CliError {
    fn from(e: io::ParseError) -> Self {
        Self::validation(e.to_string())
    }
}

struct Loaded {
    instance: cvp_core::ProblemInstance,
    digest: String,
}

fn load(file: &str) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(file)
        .map_err(|e| CliError::validation(format!("cannot read {file}: {e}")))?;
    let instance = io::parse_problem(&bytes)?;
    Ok(Loaded { instance, digest: io::digest(&bytes) })
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Validate { file } => {
            let loaded = load(&file)?;
            let mut r = Report::new("validate", &loaded.digest);
            r.field("status", "valid");
            r.field("points", loaded.instance.n());
            r.number("s", loaded.instance.s());
            Ok(r.render())
        }
        Command::Solve { file, iterative } => {
            let loaded = load(&file)?;
            let phi = loaded.instance.potential_or_zero();
            let mut r = Report::new(if iterative { "solve --iterative" } else { "solve" }, &loaded.digest);
            if iterative {
                let out = cvp_core::solver::minimize_iterative(
                    &loaded.instance,
                    &phi,
                    &IterativeConfig::default(),
                )?;
                r.field("converged", out.converged);
                r.number("pg-residual", out.pg_residual);
                report::solutions_block(&mut r, std::slice::from_ref(&out.record), &loaded.instance);
                if !out.converged {
                    eprintln!(
                        "cvp: iterative solver stopped above tolerance (pg residual {:.3e})",
                        out.pg_residual
                    );
                    print!("{}", r.render());
                    return Err(CliError::no_solution("not converged"));
                }
            } else {
                let records = cvp_core::solver::minimize_exact(&loaded.instance, &phi)?;
                report::solutions_block(&mut r, &records, &loaded.instance);
            }
            Ok(r.render())
        }
        Command::Check { file, measure } => {
            let loaded = load(&file)?;
            let weights: Result<Vec<f64>, _> =
                measure.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let weights = weights
                .map_err(|e| CliError::validation(format!("bad --measure value: {e}")))?;
            let rho = Measure::new(DVector::from_vec(weights)).map_err(CliError::from)?;
            let phi = loaded.instance.potential_or_zero();
            let rep = cvp_core::el_residuals(&rho, &phi, &loaded.instance)?;
            let mut r = Report::new("check", &loaded.digest);
            report::el_block(&mut r, &rep);
            Ok(r.render())
        }
        Command::Admissible { file } => {
            let loaded = load(&file)?;
            let initial = loaded.instance.initial_or_empty();
            let rep = cvp_core::ivp::check_admissible(&initial, &loaded.instance)?;
            let mut r = Report::new("admissible", &loaded.digest);
            report::admissibility_block(&mut r, &rep);
            Ok(r.render())
        }
        Command::Ivp { file } => {
            let loaded = load(&file)?;
            let initial = loaded.instance.initial_or_empty();
            let phi = loaded.instance.potential_or_zero();
            let records = cvp_core::ivp::solve_ivp(&initial, &phi, &loaded.instance)?;
            let mut r = Report::new("ivp", &loaded.digest);
            if records.is_empty() {
                r.field("status", "no-solution");
                report::solutions_block(&mut r, &records, &loaded.instance);
                print!("{}", r.render());
                return Err(CliError::no_solution(
                    "the stored potential admits no solution of the initial value problem",
                ));
            }
            r.field("status", "ok");
            report::solutions_block(&mut r, &records, &loaded.instance);
            Ok(r.render())
        }
        Command::Optimize { file, problem } => {
            let loaded = load(&file)?;
            let initial = loaded.instance.initial_or_empty();
            let result = cvp_core::optimizer::optimize(problem, &initial, &loaded.instance)?;
            let mut r = Report::new("optimize", &loaded.digest);
            report::optimization_block(&mut r, &result, &loaded.instance);
            Ok(r.render())
        }
        Command::Dod { file } => {
            let loaded = load(&file)?;
            let initial = loaded.instance.initial_or_empty();
            let dod = cvp_core::dependence::domain_of_dependence(&initial, &loaded.instance)?;
            let maximal =
                cvp_core::dependence::maximal_dependent_sets(&initial, &loaded.instance)?;
            let mut r = Report::new("dod", &loaded.digest);
            r.field("maximal-dependent-sets", maximal.len());
            r.labels("domain-of-dependence", &dod, &loaded.instance);
            Ok(r.render())
        }
        Command::Germs { file } => {
            let loaded = load(&file)?;
            let initial = loaded.instance.initial_or_empty();
            let germs = cvp_core::dependence::solution_germs(&initial, &loaded.instance)?;
            if germs.is_empty() {
                return Err(CliError::from(cvp_core::Error::NoGerms));
            }
            let mut r = Report::new("germs", &loaded.digest);
            r.field("germs", germs.len());
            for (i, g) in germs.iter().enumerate() {
                r.field(&format!("germ {}", i + 1), "");
                r.labels("  subset", &g.subset, &loaded.instance);
                r.numbers("  weights", g.rho.weights().iter().copied());
                r.number("  volume", g.volume);
            }
            let maximal =
                cvp_core::dependence::maximal_optimal_solution(&initial, &loaded.instance)?;
            r.numbers("maximal-optimal-solution", maximal.weights().iter().copied());
            Ok(r.render())
        }
        Command::Maximal { file } => {
            let loaded = load(&file)?;
            let initial = loaded.instance.initial_or_empty();
            let maximal =
                cvp_core::dependence::maximal_dependent_sets(&initial, &loaded.instance)?;
            let mut r = Report::new("maximal", &loaded.digest);
            r.field("maximal-dependent-sets", maximal.len());
            for (i, set) in maximal.iter().enumerate() {
                r.labels(&format!("set {}", i + 1), set, &loaded.instance);
            }
            Ok(r.render())
        }
        Command::DiscretizeCircle { n, modified, phi_const } => {
            let disc = CircleDiscretization::new(n).map_err(CliError::from)?;
            let instance = circle_instance(&disc, modified, phi_const)?;
            // sanity: the stored potential must be a valid potential
            if let Some(c) = phi_const {
                Potential::constant(c, n).map_err(CliError::from)?;
            }
            Ok(io::render_problem(&instance))
        }
    }
}
