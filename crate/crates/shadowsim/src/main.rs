use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shadowsim::acceptance::{run_criterion, run_suite, CRITERIA};
use shadowsim::run::{run, RunConfig, Settings, DEFAULT_VERIFY_TOL};
use shadowsim::times::parse_times;
use shadowsim::{apply_env_cutoff, exit};

/// Shadow Hamiltonian simulation: evolve expectation values of an invariant
/// operator set instead of the state.
#[derive(Parser, Debug)]
#[command(name = "shadowsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a problem file and write series.csv and report.json.
    Run(RunArgs),
    /// Run the acceptance matrix and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Directory for series.csv and report.json.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// "start:stop:step" or a comma-separated list; overrides the file.
    #[arg(long)]
    times: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Compare every time point against the dense oracle.
    #[arg(long)]
    verify: bool,
    /// Largest oracle error accepted by --verify.
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    verify_tol: f64,
    /// Estimate overlaps from this many shots.
    #[arg(long)]
    shots: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run a single criterion.
    #[arg(long)]
    only: Option<u32>,
    /// Shift the golden values of one criterion (harness self-test).
    #[arg(long)]
    perturb: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = apply_env_cutoff() {
        eprintln!("error: {e}");
        return code(e.exit_code());
    }
    match cli.command {
        Command::Run(a) => {
            let times = match a.times.as_deref().map(parse_times).transpose() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(e.exit_code());
                }
            };
            let cfg = RunConfig {
                input: a.input,
                output_dir: a.output_dir,
                times,
                settings: Settings { tol: a.tol, seed: a.seed, verify: a.verify, verify_tol: a.verify_tol, shots: a.shots },
            };
            code(run(&cfg))
        }
        Command::Verify(a) => {
            let outcomes = match a.only {
                Some(id) if CRITERIA.iter().any(|c| c.0 == id) => vec![run_criterion(id, a.perturb)],
                Some(id) => {
                    eprintln!("error: no criterion {id}");
                    return code(exit::SCHEMA);
                }
                None => run_suite(a.perturb),
            };
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            code(if failed == 0 { exit::OK } else { exit::VERIFY })
        }
    }
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}
