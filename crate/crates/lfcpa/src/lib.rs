//! File formats, reports and the `analyze` driver for `lfcpa-core`.

pub mod branches;
pub mod config;
pub mod corpus;
pub mod report;

use std::path::PathBuf;

use lfcpa_core::interp::{self, Trace, Violation};
use lfcpa_core::solver::{Order, SolveError};
use lfcpa_core::{compile, solve, AnalysisResult, CompileError, Procedure, SolveOptions};

pub use branches::BranchError;
pub use config::{Dump, Format, ModeSel, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Branches { path: PathBuf, source: BranchError },
    #[error("{0}")]
    Compile(#[from] CompileError),
    #[error("in `{procedure}`: {source}")]
    Solve {
        procedure: String,
        source: SolveError,
    },
    #[error("in `{procedure}`: {source}")]
    Trace {
        procedure: String,
        source: interp::Mismatch,
    },
}

impl Error {
    /// 1 for problems with the input, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Branches { .. } | Error::Compile(_) => 1,
            Error::Solve { .. } | Error::Trace { .. } => 2,
        }
    }
}

pub struct TraceReport {
    pub branches: Vec<bool>,
    pub trace: Trace,
    pub violations: Vec<Violation>,
}

/// One procedure with a result per requested mode.
pub struct Analysis {
    pub procedure: Procedure,
    pub results: Vec<AnalysisResult>,
    pub trace: Option<TraceReport>,
}

/// Compiles and analyses `src`. With `--dump=trace` each procedure is also
/// executed and checked against the first requested mode.
pub fn analyze(src: &str, config: &RunConfig, branches: &[bool]) -> Result<Vec<Analysis>, Error> {
    let mut out = Vec::new();
    for procedure in compile(src)? {
        let mut results = Vec::new();
        for &mode in config.mode.modes() {
            let options = SolveOptions {
                mode,
                order: Order::Natural,
                record_snapshots: config.trace_fixpoint,
            };
            let r = solve(&procedure.cfg, &procedure.types, options).map_err(|source| {
                Error::Solve {
                    procedure: procedure.name.clone(),
                    source,
                }
            })?;
            results.push(r);
        }
        let trace = if config.dumps(Dump::Trace) {
            let trace = interp::run(&procedure.cfg, &procedure.types, branches, config.fuel);
            let violations =
                interp::check_soundness(&trace, &results[0]).map_err(|source| Error::Trace {
                    procedure: procedure.name.clone(),
                    source,
                })?;
            Some(TraceReport {
                branches: branches.to_vec(),
                trace,
                violations,
            })
        } else {
            None
        };
        out.push(Analysis {
            procedure,
            results,
            trace,
        });
    }
    Ok(out)
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })
}

/// Runs the whole pipeline and returns the rendered report.
pub fn run(config: &RunConfig) -> Result<String, Error> {
    let src = read(&config.input)?;
    let branches = match &config.branches {
        Some(path) => branches::parse(&read(path)?).map_err(|source| Error::Branches {
            path: path.clone(),
            source,
        })?,
        None => Vec::new(),
    };
    let analyses = analyze(&src, config, &branches)?;
    Ok(match config.format {
        Format::Text => report::text(&analyses, config),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report::json(&analyses, config))
                .expect("JSON values always serialise");
            s.push('\n');
            s
        }
    })
}
