use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use refcommit::lattice::{Predicate, DEFAULT_ENUMERATION_BUDGET};
use refcommit::so3::MisalignmentDistribution;
use refcommit::{DLatticeParams, Error};

#[derive(Debug, Parser)]
#[command(name = "refcommit", version, about = "Bit commitment over misaligned reference frames")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Upper bound on enumerated cases for exact analyses.
    #[arg(long, global = true, env = "REFCOMMIT_ENUM_BUDGET", default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact security analysis of one configuration.
    Analyze(RunArgs),
    /// Monte Carlo sessions through the protocol engine.
    Simulate(RunArgs),
    /// Checks that the twirl compiler reproduces a group channel.
    TwirlCheck(TwirlArgs),
    /// Certifies the codebook separation for a measurement precision.
    Mingap(MingapArgs),
    /// Cartesian sweep over d/L (lattice) or alpha (continuous), as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Lattice,
    FourSymbol,
    Continuous,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Lattice => "lattice",
            Protocol::FourSymbol => "four-symbol",
            Protocol::Continuous => "continuous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    MonteCarlo,
    Both,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
            Mode::Both => "both",
        }
    }

    pub fn exact(self) -> bool {
        self != Mode::MonteCarlo
    }

    pub fn monte_carlo(self) -> bool {
        self != Mode::Exact
    }
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long = "L", default_value_t = 8)]
    pub l: u32,
    /// Bob's measurement precision; defaults to a quarter of the safe value.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value = "lenient", value_parser = parse_predicate)]
    pub predicate: Predicate,
}

fn parse_predicate(s: &str) -> Result<Predicate, String> {
    Predicate::from_str(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "lattice")]
    pub protocol: Protocol,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Interpolation parameter of the continuous-scheme attack. Without it,
    /// `simulate` sweeps 0, 0.1, ..., 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Parallel instances for the lattice flip-one-bit figure.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Defaults to `exact` for analyze and `monte-carlo` for simulate.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Args)]
pub struct TwirlArgs {
    /// `z<N>`, `haar`, or a non-group channel (`mixture`, `segment`) to
    /// exercise the rejection path.
    #[arg(long, default_value = "z4")]
    pub group: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub lattice: LatticeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MingapArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "lattice")]
    pub protocol: Protocol,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 3])]
    pub d: Vec<usize>,
    #[arg(long = "L", value_delimiter = ',', default_values_t = vec![4u32, 8, 16])]
    pub l: Vec<u32>,
    /// Alpha values for the continuous sweep; defaults to 0, 0.1, ..., 1.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Budget(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::Budget(m) => write!(f, "{m} (raise --budget or REFCOMMIT_ENUM_BUDGET)"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => 1,
            CliError::Budget(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl LatticeArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.d == 0 || self.d > 16 {
            return Err(CliError::Invalid(format!("--d must be in 1..=16, got {}", self.d)));
        }
        if self.l < 2 {
            return Err(CliError::Invalid(format!("--L must be at least 2, got {}", self.l)));
        }
        Ok(())
    }

    /// Lattice parameters with the separation condition checked.
    pub fn params(&self, budget: u128) -> Result<DLatticeParams, CliError> {
        self.validate()?;
        let basis = refcommit::DAngleBasis::build_with_budget(self.d, self.l, budget)?;
        let eps = self.eps.unwrap_or(basis.safe_eps() / 4.0);
        Ok(DLatticeParams::with_basis(basis, eps, self.predicate)?)
    }
}

/// Parses `--group`.
pub fn parse_group(spec: &str, lattice: &LatticeArgs) -> Result<MisalignmentDistribution<f64>, CliError> {
    let s = spec.trim().to_ascii_lowercase();
    if let Some(n) = s.strip_prefix('z') {
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::Invalid(format!("bad cyclic group `{spec}`, expected e.g. z4")))?;
        return Ok(MisalignmentDistribution::cyclic(n)?);
    }
    match s.as_str() {
        "haar" => Ok(MisalignmentDistribution::HaarSO3),
        "segment" => Ok(refcommit::simple::continuous_mu()),
        "mixture" => {
            let params = lattice.params(DEFAULT_ENUMERATION_BUDGET)?;
            Ok(refcommit::lattice::lattice_mu(&params))
        }
        _ => Err(CliError::Invalid(format!(
            "unknown group `{spec}`; use z<N>, haar, mixture or segment"
        ))),
    }
}
