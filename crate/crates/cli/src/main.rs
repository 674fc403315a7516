use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use octavic::embedding::Calibration;
use serde::Serialize;

use octavic_cli::commands::{cmd_cusp_matrix, cmd_eval_theta, cmd_rank, cmd_report, cmd_verify, verification_error};
use octavic_cli::config::Config;
use octavic_cli::error::CliError;
use octavic_cli::parse::{parse_characteristic, parse_complex, parse_coords, parse_primes};
use octavic_cli::report::to_json;
use octavic_cli::suites::{settled_calibration, Suite};

#[derive(Parser, Debug)]
#[command(name = "octavic", version, about = "Octave modular embedding, cusp matrix and rank certificate")]
struct Cli {
    /// TOML configuration file; created on the first successful calibration if missing.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "OCTAVIC_THREADS")]
    threads: Option<usize>,
    /// Force the chart calibration (identity or neg_conj) instead of the configured one.
    #[arg(long, global = true)]
    calibration: Option<Calibration>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Build the cusp matrix and write it in OCTT format.
    CuspMatrix {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank certificate over the configured primes.
    Rank {
        /// OCTT file; the matrix is built in memory when omitted.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        primes: Option<String>,
    },
    /// Evaluate a theta series both as a restriction and on the Siegel side.
    EvalTheta {
        #[arg(long = "char")]
        characteristic: String,
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        #[arg(long, allow_hyphen_values = true)]
        z2: String,
        #[arg(long, allow_hyphen_values = true)]
        zf: String,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Full JSON report: all suites, matrix summary and rank certificate.
    Report,
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", to_json(v));
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        Some(p) if p.exists() => Ok(Config::load(p)?),
        _ => Ok(Config::default()),
    }
}

fn save_calibration(path: &Path, cfg: &Config, c: Calibration) -> Result<(), CliError> {
    let stored = Config { calibration: Some(c), ..cfg.clone() };
    std::fs::write(path, stored.to_toml_string()).map_err(|e| CliError::io(path, e))?;
    eprintln!("calibration {c} stored in {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let stored = load_config(cli.config.as_deref())?;
    let cfg = match cli.calibration {
        Some(c) => Config { calibration: Some(c), ..stored.clone() },
        None => stored.clone(),
    };
    match cli.command {
        Command::Verify { suite } => {
            let report = cmd_verify(&cfg, suite);
            for s in &report.suites {
                for line in &s.summary {
                    eprintln!("{}: {line}", s.suite);
                }
            }
            print_json(&report);
            if let Some(err) = verification_error(&report) {
                return Err(err);
            }
            if let (Some(path), None, Some(c)) =
                (cli.config.as_deref(), stored.calibration, settled_calibration(&report))
            {
                if cli.calibration.is_none() {
                    save_calibration(path, &stored, c)?;
                }
            }
            Ok(())
        }
        Command::CuspMatrix { out } => {
            let out = out.unwrap_or_else(|| cfg.paths.matrix.clone());
            print_json(&cmd_cusp_matrix(&cfg, Some(&out))?);
            Ok(())
        }
        Command::Rank { matrix, primes } => {
            let primes = match primes {
                Some(s) => parse_primes(&s)?,
                None => cfg.primes.clone(),
            };
            let report = cmd_rank(&cfg, matrix.as_deref(), &primes)?;
            print_json(&report);
            if !report.certificate.ranks_agree() {
                return Err(CliError::Verification("ranks differ between primes".into()));
            }
            Ok(())
        }
        Command::EvalTheta { characteristic, z1, z2, zf, bound } => {
            let a = parse_characteristic(&characteristic)?;
            let z1 = parse_complex(&z1)?;
            let z2 = parse_complex(&z2)?;
            let zf = parse_coords(&zf)?;
            let report = cmd_eval_theta(&cfg, a, z1, z2, zf, bound)?;
            print_json(&report);
            if !report.within_tolerance {
                return Err(CliError::Verification(format!(
                    "difference {:.3e} exceeds tolerance {:.1e}",
                    report.difference, report.tolerance
                )));
            }
            Ok(())
        }
        Command::Report => {
            let report = cmd_report(&cfg)?;
            let text = to_json(&report);
            if let Some(path) = &cfg.paths.report {
                std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            }
            println!("{text}");
            if !report.passed {
                return Err(verification_error(&report.verification)
                    .unwrap_or_else(|| CliError::Verification("dimension or span check failed".into())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
