//! Configuration, execution and output rendering for the `magkernel` command.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

pub use config::{parse_field_spec, parse_run_config, parse_time_grid, parse_time_list, RunConfig};
pub use run::{execute, Report};

/// Exit status for invalid input.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for a numerical failure.
pub const EXIT_NUMERIC: i32 = 3;
/// Exit status when a verification criterion fails.
pub const EXIT_VERIFY: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(magkernel::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl From<magkernel::Error> for CliError {
    fn from(e: magkernel::Error) -> Self {
        match e {
            magkernel::Error::Domain(m) | magkernel::Error::Config(m) => CliError::Usage(m),
            other => CliError::Numeric(other),
        }
    }
}

/// Configures the global worker pool from `MAGKERNEL_THREADS` (unset or 0: automatic).
pub fn init_threads(var: Option<&str>) -> Result<(), CliError> {
    let n = match var.map(str::trim) {
        None | Some("") => 0,
        Some(s) => s.parse::<usize>().map_err(|_| CliError::Usage(format!("MAGKERNEL_THREADS must be a count, got '{s}'")))?,
    };
    if n > 0 {
        // a pool that is already configured is left as it is
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
