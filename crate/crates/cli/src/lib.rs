//! Scenario-driven runner for the `mixedopt` simulator: scenario files and
//! presets, the experiments behind each scenario kind, oracle check suites,
//! and CSV/JSON output.

pub mod checks;
pub mod error;
pub mod experiments;
pub mod presets;
pub mod runner;
pub mod scenario;

pub use error::{CliError, CliResult};

/// Caps the global worker pool at `MIXEDOPT_THREADS` when it is set.
pub fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MIXEDOPT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Scenario(format!("MIXEDOPT_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}
