//! Experiment harness behind the `fkslab` binary: config parsing, the
//! verification suites, experiments, sweeps and report output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod presets;
pub mod report;
pub mod studies;
pub mod suites;
pub mod sweep;

pub use error::{HarnessError, Result};

/// Exit status when every check passes.
pub const EXIT_OK: i32 = 0;
/// Exit status for configuration and setup errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status when at least one check fails.
pub const EXIT_CHECK_FAILED: i32 = 2;

/// One line per check, `PASS`/`FAIL` first.
pub fn summary_lines(report: &report::Report) -> Vec<String> {
    report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<44} measured {:.6e}  predicted {:.6e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.measured,
                c.predicted
            )
        })
        .collect()
}
