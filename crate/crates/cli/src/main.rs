use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opmod_cli::{
    eval_expr, run_source, run_verification_suite, CliError, SessionConfig, SessionResult, Value,
};

#[derive(Parser)]
#[command(
    name = "opmod",
    version,
    about = "Functional calculus for regular operators on Hilbert C*-modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a session file and report its prints and checks.
    Run {
        file: PathBuf,
        /// Write the session as canonical JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run randomised verification suites.
    Verify {
        /// Suite name or `all`; repeat or separate with commas.
        #[arg(long, required = true, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include per-property runtimes in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Print the spectrum of an operator expression.
    Spectrum {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(file: &Path, json: Option<&Path>, cfg: SessionConfig) -> Result<i32, CliError> {
    let result = match std::fs::read_to_string(file) {
        Ok(text) => run_source(&text, cfg).unwrap_or_else(SessionResult::failed),
        Err(source) => SessionResult::failed(CliError::Io {
            path: file.display().to_string(),
            source,
        }),
    };
    for (span, value) in &result.outputs {
        println!("line {}: {}", span.line, value.render());
    }
    for c in &result.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {} (line {}): residual {:.3e}, tolerance {:.3e}",
            c.label, c.span.line, c.residual, c.tolerance
        );
    }
    if let Some(e) = &result.error {
        eprintln!("error: {e}");
    }
    if let Some(path) = json {
        write(path, &(result.to_json().render() + "\n"))?;
    }
    Ok(result.exit_status())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match SessionConfig::from_env() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Run { file, json } => run(&file, json.as_deref(), cfg),
        Command::Verify {
            suite,
            trials,
            seed,
            report,
            csv,
            timings,
        } => {
            let names: Vec<&str> = suite.iter().map(String::as_str).collect();
            run_verification_suite(&names, trials, seed, timings).and_then(|rep| {
                if trials == 0 {
                    println!("no trials requested");
                }
                for p in &rep.properties {
                    let verdict = if p.passed { "PASS" } else { "FAIL" };
                    println!(
                        "{verdict} {}.{}: max error {:.3e}, tolerance {:.3e}",
                        p.suite, p.name, p.max_error, p.tolerance
                    );
                }
                if let Some(path) = report {
                    write(&path, &(rep.to_json().render() + "\n"))?;
                }
                if let Some(path) = csv {
                    write(&path, &rep.to_csv())?;
                }
                Ok(if rep.passed() { 0 } else { 1 })
            })
        }
        Command::Spectrum { expr, csv } => eval_expr(&expr, cfg).and_then(|v| {
            let sigma = match v {
                Value::Spectrum(s) => s,
                Value::Op(t) => opmod_core::calculus::spectrum(&t, cfg.tol).map_err(|source| {
                    CliError::Eval {
                        source,
                        span: opmod_cli::Span { line: 1, col: 1 },
                    }
                })?,
                _ => {
                    return Err(CliError::type_error(
                        "expected an operator or spectrum expression",
                        opmod_cli::Span { line: 1, col: 1 },
                    ))
                }
            };
            println!(
                "{}",
                opmod_cli::json::sorted_points(&sigma.values()).render()
            );
            if let Some(path) = csv {
                let mut out = String::from("re,im,multiplicity\n");
                for (p, m) in sigma.points() {
                    out.push_str(&format!(
                        "{},{},{m}\n",
                        opmod_cli::json::number(p.re),
                        opmod_cli::json::number(p.im)
                    ));
                }
                write(&path, &out)?;
            }
            Ok(0)
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
