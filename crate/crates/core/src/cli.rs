//! Command-line front end. Exit codes: 0 success, 1 input error (or a failed
//! verification), 2 solver non-convergence.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::figure::PartitionFigure;
use crate::instances;
use crate::problem::{self, InstanceFile, Problem, RunOptions, SolveMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "conveq",
    version,
    about = "Equilibrium problems and metric projection over convex hulls"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonFlags {
    /// Slack in equilibrium inequalities (overrides the file).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid spacing for brute-force testers.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<SolveMode>,
    /// Run reductions whose soundness conditions are not declared.
    #[arg(long)]
    pub force_unsound: bool,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonFlags {
    fn run_options(&self) -> RunOptions {
        RunOptions {
            tol: self.tol,
            seed: self.seed,
            resolution: self.resolution,
            mode: self.mode,
            force_unsound: self.force_unsound,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the instance's solver and print a JSON report.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Compare the reduced solver with the brute-force grid oracle.
    Verify {
        path: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        /// Succeed only if the two routes disagree.
        #[arg(long)]
        expect_disagree: bool,
    },
    /// Draw the normal-cone partition of a 2-D polytope (SVG + CSV).
    Figure {
        path: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// SVG output; the CSV table goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in instances, or write them as instance files.
    Catalog {
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Replay built-in instances (all when no id is given).
    Replay { ids: Vec<String> },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    }
}

fn emit(json: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let _ = writeln!(stdout, "{json}");
    if let Some(path) = out {
        std::fs::write(path, format!("{json}\n")).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { path, flags } => {
            let file = InstanceFile::load(&path)?;
            let report = problem::execute(&file, &flags.run_options())?;
            emit(&to_json(&report), flags.out.as_deref(), stdout)
        }
        Command::Verify {
            path,
            flags,
            expect_disagree,
        } => {
            let file = InstanceFile::load(&path)?;
            let report = problem::verify(&file, &flags.run_options(), expect_disagree)?;
            emit(&to_json(&report), flags.out.as_deref(), stdout)?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_INPUT,
                    message: if expect_disagree {
                        "verification failed: the routes agree but disagreement was expected".into()
                    } else {
                        "verification failed: reduced and brute-force solution sets differ".into()
                    },
                })
            }
        }
        Command::Figure { path, seed, out } => {
            let file = InstanceFile::load(&path)?;
            let (samples, bound) = match file.problem {
                Problem::PartitionFigure { samples, bound } => (samples, bound),
                _ => (2000, 3.0),
            };
            let seed = seed.or(file.seed).unwrap_or(crate::geometry::DEFAULT_SEED);
            let fig = PartitionFigure::build(&file.body, samples, bound, seed, &file.tolerances)?;
            let svg_path = out.unwrap_or_else(|| path.with_extension("svg"));
            let csv_path = svg_path.with_extension("csv");
            std::fs::write(&svg_path, fig.to_svg()).map_err(|e| io_failure(&svg_path, e))?;
            std::fs::write(&csv_path, fig.to_csv()).map_err(|e| io_failure(&csv_path, e))?;
            let _ = writeln!(
                stdout,
                "wrote {} and {} ({} samples, seed {seed})",
                svg_path.display(),
                csv_path.display(),
                fig.samples.len()
            );
            Ok(())
        }
        Command::Catalog { export } => {
            for inst in instances::catalog() {
                match &export {
                    Some(dir) => {
                        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
                        let p = dir.join(format!("{}.json", inst.id));
                        std::fs::write(&p, inst.to_file().to_json() + "\n")
                            .map_err(|e| io_failure(&p, e))?;
                        let _ = writeln!(stdout, "{}", p.display());
                    }
                    None => {
                        let _ = writeln!(stdout, "{}\t{}", inst.id, inst.theorem_tags.join(","));
                    }
                }
            }
            Ok(())
        }
        Command::Replay { ids } => {
            let selected: Vec<_> = instances::catalog()
                .into_iter()
                .filter(|i| ids.is_empty() || ids.contains(&i.id))
                .collect();
            if selected.is_empty() {
                return Err(Failure {
                    code: EXIT_INPUT,
                    message: "no matching catalog instance".into(),
                });
            }
            let mut all = true;
            for inst in selected {
                let rep = instances::replay(&inst)?;
                all &= rep.passed();
                let _ = writeln!(
                    stdout,
                    "[{}] {}",
                    if rep.passed() { "PASS" } else { "FAIL" },
                    rep.id
                );
                for (name, ok) in &rep.checks {
                    let _ = writeln!(stdout, "    {} {name}", if *ok { "ok  " } else { "FAIL" });
                }
            }
            if all {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_INPUT,
                    message: "some replays failed".into(),
                })
            }
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
