//! `reconf`: command-line bench for reconfiguration solvers, the
//! reconfiguration verifier, and clique gap amplification.

mod commands;
mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reconf_core::pcpp::PcppChoice;
use reconf_core::Error;

#[derive(Parser, Debug)]
#[command(name = "reconf", version, long_version = long_version(), about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Cap on explored states for the exhaustive solvers.
    #[arg(long, global = true, default_value_t = reconf_core::solve::DEFAULT_STATE_CAP)]
    pub state_cap: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Maxmin value of a CSP reconfiguration instance.
    SolveCsp(commands::SolveCsp),
    /// Maxmin clique size under token addition and removal.
    SolveClique(commands::SolveClique),
    /// Reachability of 1^n from 0^n under a successor circuit.
    #[command(subcommand)]
    Succinct(commands::Succinct),
    /// Hadamard code utilities.
    #[command(subcommand)]
    Codes(commands::Codes),
    /// Run a pair-language PCPP verifier on a word.
    Pcpp(commands::PcppCmd),
    /// The reconfiguration verifier for a successor circuit.
    #[command(subcommand)]
    Pcrp(commands::Pcrp),
    /// Walk-product gap amplification for clique reconfiguration.
    #[command(subcommand)]
    Amplify(commands::Amplify),
    /// Print the JSON schema of a subcommand's output.
    Schema {
        /// Subcommand name with spaces as dashes (e.g. `pcrp-audit`), or `error`.
        name: String,
    },
}

fn long_version() -> &'static str {
    let s = format!(
        "{} (core {}, {} build, {}-{})",
        env!("CARGO_PKG_VERSION"),
        reconf_core::VERSION,
        if cfg!(debug_assertions) { "debug" } else { "release" },
        std::env::consts::ARCH,
        std::env::consts::OS
    );
    Box::leak(s.into_boxed_str())
}

/// Command result: machine-readable form plus a text rendering.
pub struct Output {
    pub json: serde_json::Value,
    pub text: String,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Core(e) => match e {
                Error::InvalidAssignment(_) => "invalid-assignment",
                Error::InvalidSequence(_) => "invalid-sequence",
                Error::InvalidInstance(_) => "invalid-instance",
                Error::InvalidParameter(_) => "invalid-parameter",
                Error::WidthMismatch { .. } => "width-mismatch",
                Error::Capacity { .. } => "capacity",
                Error::Parse(_) => "parse",
                Error::AuditFailure(_) => "audit-failure",
            },
        }
    }

    /// 2 for bad input, 3 for capacity, 4 for a lemma counterexample.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Capacity { .. }) => 3,
            CliError::Core(Error::AuditFailure(_)) => 4,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(m) => m.clone(),
        }
    }
}

fn emit(global: &GlobalOpts, out: &Output) -> Result<(), CliError> {
    let body = match global.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
        Format::Text => {
            let mut t = out.text.clone();
            if !t.ends_with('\n') {
                t.push('\n');
            }
            t
        }
    };
    match &global.output {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("{}", serde_json::json!({"error": "invalid-parameter", "message": e.to_string()}));
            return ExitCode::from(2);
        }
    }
    match commands::dispatch(&cli).and_then(|out| emit(&cli.global, &out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": e.kind(), "exit_code": e.exit_code(), "message": e.message()}));
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn parse_choice(s: &str) -> Result<PcppChoice, String> {
    s.parse::<PcppChoice>().map_err(|e| e.to_string())
}
