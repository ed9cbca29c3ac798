use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ckg_cli::instance::InstanceFile;
use ckg_cli::{generate_instance, run_checks, run_suite, CheckKind, CheckReport, CliError, SuiteRun};
use ckg_core::random::Shape;
use ckg_core::{canonical_dual, Tolerance};

#[derive(Parser)]
#[command(name = "ckgframe", version, about = "Verify continuous K-g-frame constructions on finite quadratures")]
struct Cli {
    /// Relative tolerance for every check
    #[arg(long, global = true, value_name = "R")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in an instance file
    Check {
        file: PathBuf,
        /// Write the report here instead of standard output
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        /// Include wall-clock time per check (makes reports non-reproducible)
        #[arg(long)]
        timings: bool,
    },
    /// Generate a seeded instance file
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        maxblock: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Add the canonical dual of a family to an instance file
    Dual {
        file: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long)]
        operator: String,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Run a verification suite (or `all`) over generated instances
    Suite {
        name: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(report: Option<&Path>, text: &str) -> Result<(), CliError> {
    match report {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Exit status 0 or 1 from a completed run.
fn run(cli: Cli) -> Result<bool, CliError> {
    let tol = match cli.tol {
        Some(r) => Tolerance::default().with_rel(r).map_err(|e| CliError::Usage(format!("--tol: {e}")))?,
        None => Tolerance::default(),
    };
    match cli.command {
        Command::Check { file, report, timings } => {
            let (_, instance) = InstanceFile::load(&file)?;
            let results = run_checks(&instance, &tol, timings);
            for r in results.iter().filter(|r| !r.pass) {
                eprintln!(
                    "FAIL {} ({}): verdict {}, expected {}{}",
                    r.name,
                    r.kind,
                    r.verdict,
                    r.expected,
                    r.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
                );
            }
            let rep = CheckReport::new(&file.display().to_string(), &tol, results);
            emit(report.as_deref(), &rep.to_json())?;
            Ok(rep.all_pass())
        }
        Command::Gen { seed, profile, n, points, maxblock, out } => {
            let shape = Shape { n, points, max_block: maxblock };
            let file = generate_instance(seed, &profile, &shape)?;
            write(&out, &file.to_json())?;
            Ok(true)
        }
        Command::Dual { file, family, operator, out } => {
            let (mut doc, instance) = InstanceFile::load(&file)?;
            let fam = instance
                .families
                .get(&family)
                .ok_or_else(|| CliError::Usage(format!("no family named `{family}`")))?;
            let k = instance
                .operators
                .get(&operator)
                .ok_or_else(|| CliError::Usage(format!("no operator named `{operator}`")))?;
            if k.rows() != fam.domain_dim() || k.cols() != fam.domain_dim() {
                return Err(CliError::Usage(format!(
                    "operator `{operator}` is {}x{}, family `{family}` acts on dimension {}",
                    k.rows(),
                    k.cols(),
                    fam.domain_dim()
                )));
            }
            let dual = match canonical_dual(fam, k, &tol) {
                Ok(d) => d,
                Err(e @ ckg_core::Error::NotKgFrame { .. }) => {
                    eprintln!("no dual: {e}");
                    return Ok(false);
                }
                Err(e) => return Err(e.into()),
            };
            let mut name = format!("{family}_dual");
            while doc.families.iter().any(|f| f.name == name) {
                name.push('_');
            }
            doc.add_family(&name, &dual.family);
            let mut check = format!("verify_{name}");
            while doc.checks.iter().any(|c| c.name == check) {
                check.push('_');
            }
            doc.add_check(
                &check,
                CheckKind::VerifyDual {
                    family: family.clone(),
                    dual: name.clone(),
                    operator: operator.clone(),
                },
                None,
            );
            write(&out, &doc.to_json())?;
            eprintln!(
                "canonical dual `{name}`: ||T||^2 = {:.17e}, duality residual {:.3e}",
                dual.certificate.synthesis_norm_sq, dual.certificate.duality_residual
            );
            Ok(dual.certificate.is_valid)
        }
        Command::Suite { name, trials, seed, report } => {
            let suites = run_suite(&name, trials, seed, &tol)?;
            for s in &suites {
                eprintln!("{:<24} {:>6}/{:<6} passed", s.name, s.passed, s.trials);
                for f in &s.failures {
                    eprintln!("  trial {}: {}", f.trial, f.reason);
                }
            }
            let run = SuiteRun::new(&name, trials, seed, &tol, suites);
            emit(report.as_deref(), &run.to_json())?;
            Ok(run.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
