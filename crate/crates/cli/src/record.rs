use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Everything needed to re-run a command and check its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    /// Arguments after the program name; replaying them reproduces the run.
    pub argv: Vec<String>,
    pub params: Value,
    pub seeds: BTreeMap<String, u64>,
    pub prng: String,
    pub version: String,
    pub elapsed_ms: f64,
    /// Wall-clock per pipeline stage.
    pub timings: BTreeMap<String, f64>,
    pub result: Value,
    pub outputs: Vec<String>,
    pub exit_code: i32,
    pub error: Option<String>,
}

pub fn prng_id() -> String {
    format!("{}/{}", hypermatch::rng::PRNG_NAME, hypermatch::rng::PRNG_VERSION)
}

#[derive(Debug)]
pub enum CliError {
    Core(hypermatch::Error),
    Input(String),
    Usage(String),
    SweepConfig { index: Option<usize>, message: String },
}

impl From<hypermatch::Error> for CliError {
    fn from(e: hypermatch::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(hypermatch::Error::BudgetExceeded { .. }) => 2,
            CliError::Core(_) | CliError::Input(_) => 1,
            CliError::Usage(_) => 64,
            CliError::SweepConfig { .. } => 65,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) | CliError::Usage(m) => f.write_str(m),
            CliError::SweepConfig { index: Some(i), message } => write!(f, "sweep entry {i}: {message}"),
            CliError::SweepConfig { index: None, message } => write!(f, "sweep config: {message}"),
        }
    }
}

/// What a command hands back besides its files.
#[derive(Default)]
pub struct Outcome {
    pub result: Value,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<String>,
    pub timings: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn new(result: Value) -> Self {
        Outcome {
            result,
            ..Default::default()
        }
    }

    pub fn seed(mut self, name: &str, seed: u64) -> Self {
        self.seeds.insert(name.to_string(), seed);
        self
    }

    pub fn output(mut self, path: &std::path::Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }
}
