use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Dump {
    Liveness,
    Pointsto,
    Extractors,
    /// Run the interpreter and check its trace against the analysis.
    Trace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ModeSel {
    #[default]
    Lfcpa,
    Baseline,
    Both,
}

impl ModeSel {
    pub fn modes(self) -> &'static [lfcpa_core::Mode] {
        use lfcpa_core::Mode::*;
        match self {
            ModeSel::Lfcpa => &[Lfcpa],
            ModeSel::Baseline => &[Baseline],
            ModeSel::Both => &[Lfcpa, Baseline],
        }
    }
}

/// Analyse the procedures of a mini-C file and print per-node results.
#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(name = "analyze", version)]
pub struct RunConfig {
    /// Source file.
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = ModeSel::Lfcpa)]
    pub mode: ModeSel,

    /// Tables to print.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Dump::Liveness, Dump::Pointsto])]
    pub dump: Vec<Dump>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Branch outcomes for `--dump=trace`.
    #[arg(long, value_name = "FILE")]
    pub branches: Option<PathBuf>,

    /// Interpreter step budget for `--dump=trace`.
    #[arg(long, default_value_t = 1000)]
    pub fuel: usize,

    /// Also print the values after every solver phase.
    #[arg(long)]
    pub trace_fixpoint: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            mode: ModeSel::Lfcpa,
            dump: vec![Dump::Liveness, Dump::Pointsto],
            format: Format::Text,
            branches: None,
            fuel: 1000,
            trace_fixpoint: false,
        }
    }

    pub fn dumps(&self, d: Dump) -> bool {
        self.dump.contains(&d)
    }
}
