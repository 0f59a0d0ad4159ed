//! `esieve`: command-line entry point for the validated sieve computations.
//!
//! Every report is a JSON object carrying the serialized [`report::RunConfig`]
//! and the hash of the literal inputs, so runs are reproducible and drift
//! in the imported constants is detectable. Exit codes: 0 success, 1 failed
//! verification, 2 domain/configuration error, 3 resource/file error,
//! 64 usage error.

mod commands;
mod report;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Format, RunConfig};

/// Validated enclosures for an explicit Selberg sieve with logarithmic weights.
#[derive(Debug, Parser)]
#[command(name = "esieve", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Global {
    /// Output format (CSV only for sweep tables).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for grid sweeps and verification rows.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Prime cutoff P₀ for Euler products and sums.
    #[arg(long, global = true)]
    pub cutoff: Option<u64>,
    /// Checkpoint file for the kernel integral.
    #[arg(long, global = true)]
    pub checkpoint: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enclose a catalog constant (Euler product or prime sum) or a basic constant.
    Constant {
        /// Catalog id (e.g. I_prod, twin_inverse) or basic constant (pi, gamma, theta, ...).
        id: Option<String>,
        /// Evaluate the whole catalog.
        #[arg(long, conflicts_with = "id")]
        all: bool,
    },
    /// Möbius-family or weighted squarefree sum at X.
    Sum {
        /// m, m_check, m_checkcheck, m_tilde, m_tildetilde, or a weight name
        /// (inv_l, inv_phi, a_phi, sqrt_phi_half, inv_phi_sq, l_sq_phi_sq, nu,
        /// inv_phi_half_sq, l_phi_half_sq, theta).
        name: String,
        #[arg(long = "X", alias = "x")]
        x: f64,
        /// Coprimality modulus.
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Power of log(X/ℓ) (weighted sums only).
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Argument for log(arg/ℓ) instead of log(X/ℓ) (weighted sums only).
        #[arg(long)]
        arg: Option<f64>,
    },
    /// Validated supremum of a normalized sum over a range of X.
    Scan {
        /// sq_half, sumvar1log, sumvarp, ss1, sum_half or sum2_half.
        id: String,
        #[arg(long)]
        v: u64,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Certify the supremum against this decimal constant.
        #[arg(long, conflicts_with = "program")]
        target: Option<String>,
        /// Certify against the stored program constant for (id, v).
        #[arg(long)]
        program: bool,
    },
    /// The kernel h_v: pointwise value or the logarithmic integral up to X.
    Hq {
        #[arg(long)]
        v: u64,
        /// Integrate ∫_1^X h_v(s)/s ds.
        #[arg(long = "X", alias = "x", conflicts_with = "s", required_unless_present = "s")]
        x: Option<f64>,
        /// Evaluate h_v(s) and its kernel bound.
        #[arg(long)]
        s: Option<f64>,
        /// Checkpoint every this many divisors (0: only when stopping early).
        #[arg(long, default_value_t = 0)]
        checkpoint_every: u64,
        /// Stop with a resource error after this many divisors (0: unlimited).
        #[arg(long, default_value_t = 0)]
        max_events: u64,
    },
    /// The quadratic form Σ_v(U), single point or log-spaced sweep.
    Sigma {
        #[arg(long)]
        v: u64,
        #[arg(long = "U", alias = "u", required_unless_present = "sweep")]
        u: Option<f64>,
        /// pairwise or decomposition (default: by size).
        #[arg(long)]
        method: Option<String>,
        /// Check the residual |Σ_v − v/φ(v) log U + 𝔰_v| ≤ C_v U^{−1/3}.
        #[arg(long)]
        residual: bool,
        /// Sweep a log-spaced grid instead of a single point.
        #[arg(long, conflicts_with = "u")]
        sweep: bool,
        #[arg(long, default_value_t = 10.0)]
        from: f64,
        #[arg(long, default_value_t = 1e5)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Assemble every lemma constant for (v, regime, c) with provenance.
    Pipeline {
        #[arg(long)]
        v: u64,
        /// analytic or numeric.
        #[arg(long, default_value = "numeric")]
        regime: String,
        #[arg(long)]
        c: Option<f64>,
        /// preamble or text reading of the ψ constant.
        #[arg(long, default_value = "preamble")]
        transcription: String,
        /// Lemma inputs: computed catalog, or the published reference enclosures.
        #[arg(long, value_enum, default_value_t = Source::Computed)]
        source: Source,
    },
    /// The Brun–Titchmarsh coefficient and bound at (Y, q).
    Bt {
        #[arg(long = "Y", alias = "y")]
        y: f64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = pipeline_k2_c())]
        c: f64,
    },
    /// Run a regression suite; exits 1 on any mismatch.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Desk)]
        suite: Suite,
    },
}

fn pipeline_k2_c() -> f64 {
    selberg_explicit::pipeline::K2_C
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Computed,
    Reference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Desk-scale rows, about half a minute.
    Desk,
    /// Desk rows plus the two kernel integrals at 10^8 (several minutes).
    Nightly,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = RunConfig::new(&cli, &argv[1..]);
    match commands::run(&cli, &config) {
        Ok(outcome) => {
            print!("{}", outcome.rendered);
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("esieve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
