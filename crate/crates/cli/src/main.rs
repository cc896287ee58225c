use clap::{Parser, Subcommand};
use fkslab::config::{ExperimentConfig, RawConfig, Suite};
use fkslab::experiments::run_experiment;
use fkslab::suites::{run_suites, SuiteParams};
use fkslab::sweep::run_sweep;
use fkslab::{summary_lines, Result, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fkslab", version, about = "Fractional Keller-Segel laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a config once per value of one parameter.
    Sweep {
        config: PathBuf,
        /// Key to vary, bare (`alpha`) or qualified (`solver.alpha`).
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run estimate-verification suites without a config file.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse()
}

fn finish(report: &fkslab::report::Report, out: &Path) -> Result<i32> {
    report.write(out)?;
    for line in summary_lines(report) {
        println!("{line}");
    }
    let failed = report.failures().count();
    println!(
        "{}: {} checks, {} failed; report in {}",
        report.experiment,
        report.checks.len(),
        failed,
        out.display()
    );
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config, out } => {
            let (_, cfg) = ExperimentConfig::load(&config)?;
            finish(&run_experiment(&cfg)?, &out)
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let raw = RawConfig::from_file(&config)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            let id = ExperimentConfig::from_raw(&raw, &base)?.id;
            let values: Vec<String> = values
                .into_iter()
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            let sweep = run_sweep(&raw, &base, &param, &values, &out)?;
            finish(&sweep.merged(&id), &out)
        }
        Command::Verify {
            suite,
            alpha,
            dim,
            grid,
            seed,
            out,
        } => {
            if !(alpha > 1.0 && alpha <= 2.0) {
                return Err(fkslab::HarnessError::Config(format!("--alpha must lie in (1, 2], got {alpha}")));
            }
            if !(1..=3).contains(&dim) {
                return Err(fkslab::HarnessError::Config(format!("--dim must be 1, 2 or 3, got {dim}")));
            }
            if grid < 16 || grid % 2 != 0 {
                return Err(fkslab::HarnessError::Config(format!("--grid must be even and at least 16, got {grid}")));
            }
            let params = SuiteParams {
                dim,
                alpha,
                points: grid,
                seed,
            };
            finish(&run_suites(suite, &params, &format!("verify-{}", suite.name()))?, &out)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for failed checks
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_OK as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("fkslab: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
