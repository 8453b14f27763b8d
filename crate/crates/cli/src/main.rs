//! `nilmodel`: build model sets in nilpotent groups and verify them.

mod artifact;
mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "nilmodel",
    version,
    about = "Approximate lattices in nilpotent Lie groups"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Also write the JSON artifact (or the point data) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Accepted for compatibility; runs are single-threaded and the output
    /// does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Relative tolerance for two-scale covering stability (and coefficient
    /// drift for `verify linearize`).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Print the JSON artifact on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Baker-Campbell-Hausdorff series up to a class.
    Bch {
        #[arg(long)]
        class: usize,
        /// Number of generators (the series of `log(e^x1 ... e^xk)`).
        #[arg(long, default_value_t = 2)]
        generators: usize,
    },
    /// Word certificates for sums and brackets.
    Words {
        #[arg(long)]
        class: usize,
        /// Also emit the iterated sum word on this many letters.
        #[arg(long)]
        iterate: Option<usize>,
    },
    /// Scheme construction.
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// Model set enumeration.
    #[command(subcommand)]
    Modelset(ModelsetCmd),
    /// Pisot sets.
    #[command(subcommand)]
    Pisot(PisotCmd),
    /// Verification suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Split an algebra into indecomposable ideals.
    Decompose(AlgebraArgs),
    /// Extend a map on lattice generators to a Lie algebra homomorphism.
    ExtendHom {
        /// TOML file with `source`, `target`, `generators`, `images`.
        #[arg(long)]
        spec: PathBuf,
    },
    /// CSV of principal and conjugate embeddings of a patch.
    PlotData {
        #[command(flatten)]
        source: PatchSource,
    },
}

#[derive(Subcommand, Debug)]
pub enum SchemeCmd {
    /// Build a scheme and certify lattice closure.
    Build {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModelsetCmd {
    /// Enumerate a model-set patch.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        radius: Option<String>,
        #[arg(long, value_enum, default_value_t = PatchFormat::Jsonl)]
        format: PatchFormat,
    },
}

#[derive(Subcommand, Debug)]
pub enum PisotCmd {
    /// Signed subset sums of powers of `a + b sqrt d`.
    Gen {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long)]
        max_exp: u32,
        #[arg(long, value_enum, default_value_t = PatchFormat::Jsonl)]
        format: PatchFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchFormat {
    Jsonl,
    Csv,
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricArg {
    Group,
    Euclidean,
}

#[derive(Args, Debug, Clone)]
pub struct PatchSource {
    /// Scheme config (TOML). Mutually exclusive with the Pisot options.
    #[arg(long, conflicts_with = "pisot_max_exp")]
    pub config: Option<PathBuf>,
    /// Region radius; overrides the config.
    #[arg(long)]
    pub radius: Option<String>,
    /// Use the Pisot set with this cutoff (the large scale uses cutoff + 2).
    #[arg(long)]
    pub pisot_max_exp: Option<u32>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub pisot_a: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub pisot_b: String,
    #[arg(long, default_value_t = 2)]
    pub pisot_d: u64,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Separation and covering at two scales (R and 2R, or cutoff N and N+2).
    Delone {
        #[command(flatten)]
        source: PatchSource,
        #[arg(long, value_enum, default_value_t = MetricArg::Group)]
        metric: MetricArg,
        #[arg(long, default_value_t = 0.5)]
        grid_step: f64,
    },
    /// Finite F with L L inside F L, at two scales.
    Approx {
        #[command(flatten)]
        source: PatchSource,
        /// Product radius at the small scale (default 3R/20, or g^(N-3) for Pisot).
        #[arg(long)]
        rho: Option<String>,
        /// Include every factorization in the artifact.
        #[arg(long)]
        full: bool,
    },
    /// Discreteness of L^k.
    Powers {
        #[command(flatten)]
        source: PatchSource,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "2")]
        rho: String,
    },
    /// Word identity spot check and Delone checks of log L^n.
    Logimage {
        #[command(flatten)]
        source: PatchSource,
        /// Number of factors (default: n0 from the certificates).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "2")]
        small: String,
        #[arg(long, default_value = "3")]
        large: String,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Linear fit of x -> A x + B sigma(x) on an abelian patch.
    Linearize {
        #[command(flatten)]
        source: PatchSource,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Fit radius R; the patch radius must be at least 2R.
        #[arg(long)]
        fit_radius: f64,
    },
    /// k-fold sums of {0} u +-{k^n + k^-n}.
    Counterexample {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n_max: u32,
    },
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct AlgebraArgs {
    /// Structure-constant file.
    #[arg(long, conflicts_with = "builtin")]
    pub algebra: Option<PathBuf>,
    /// `heisenberg`, `filiform4` or `abelianN`.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Direct sum with further builtin algebras, e.g. `--plus abelian1`.
    #[arg(long)]
    pub plus: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(commands::CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
