//! Experiment harness for `idc-release`: graph and query generation,
//! mechanism drivers and CSV/JSON reporting.

pub mod args;
pub mod commands;
pub mod measure;
pub mod record;

use thiserror::Error;

pub use args::Cli;
pub use record::{ResultRecord, SCHEMA_VERSION};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BUDGET_EXHAUSTED: i32 = 3;
    pub const TOY_SCALE_CAP: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Release(#[from] idc_release::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use idc_release::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Release(e) => match e {
                E::ToyScaleCap(_) => exit::TOY_SCALE_CAP,
                E::BudgetExhausted { .. } => exit::BUDGET_EXHAUSTED,
                E::Config(_)
                | E::Validation(_)
                | E::DomainMismatch(_)
                | E::DimensionMismatch { .. }
                | E::SizeCap(_)
                | E::Parse { .. }
                | E::QueryLimit { .. } => exit::CONFIG,
                _ => exit::FAILURE,
            },
            _ => exit::FAILURE,
        }
    }
}

/// What a finished run reports beyond its records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStatus {
    /// Some online trial ran out of update budget.
    pub exhausted: bool,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        if self.exhausted {
            exit::BUDGET_EXHAUSTED
        } else {
            exit::OK
        }
    }
}

/// Run a parsed command line; the result maps to the process exit code.
pub fn run(cli: &Cli) -> Result<RunStatus, CliError> {
    use args::Command;
    match &cli.command {
        Command::GenGraph(a) => commands::gen_graph(a),
        Command::GenQueries(a) => commands::gen_queries(a),
        Command::ReleaseOnline(a) => commands::release_online(a),
        Command::ReleaseOffline(a) => commands::release_offline(a),
        Command::RrSynth(a) => commands::rr_synth(a),
        Command::Bench(a) => commands::bench(a),
    }
}

/// Honour `IDC_RELEASE_THREADS` by sizing the global thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("IDC_RELEASE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("IDC_RELEASE_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Config("IDC_RELEASE_THREADS must be at least 1".into()));
        }
        // a second call (e.g. from tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
