mod bundle;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "greenvqs", version, about = "Variational real-time Green's functions for Hubbard models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Flat TOML experiment file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set depth=3`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory, replacing the `output` key.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Qubit Hamiltonian and its exact ground state.
    Hamiltonian(ConfigArgs),
    /// Parameter trajectories for every right-hand Pauli string.
    Evolve(ConfigArgs),
    /// Full Green's-function bundle: series, reference, spectrum, poles, reports.
    Greens(ConfigArgs),
    /// Spectrum and poles of a series already in a bundle.
    Spectrum(SpectrumArgs),
    /// Gate counts for the three benchmark models against the published table.
    Resources(OutArgs),
    /// Symmetry sets, sign table and propositions for the two-site model.
    Symmetry(ConfigArgs),
    /// Error metrics between two bundles.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Bundle directory holding the series.
    input: PathBuf,
    /// Series to transform: lesser, greater or retarded.
    #[arg(long, default_value = "retarded")]
    kind: String,
    /// Window length; defaults to the whole series.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
    /// Relative pole threshold.
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    /// Translate the spectrum by `e0_tilde − e0`; needs both values.
    #[arg(long, requires = "e0_tilde", allow_hyphen_values = true)]
    e0: Option<f64>,
    #[arg(long, requires = "e0", allow_hyphen_values = true)]
    e0_tilde: Option<f64>,
    /// Output directory; defaults to the input bundle.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    #[arg(short, long, default_value = "resources")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    reference: PathBuf,
    candidate: PathBuf,
    /// Also write the report to this file.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Hamiltonian(a) => run::hamiltonian(&a.resolve()),
        Command::Evolve(a) => run::evolve(&a.resolve()),
        Command::Greens(a) => run::greens(&a.resolve()),
        Command::Spectrum(a) => run::spectrum(&run::SpectrumRequest {
            input: a.input,
            kind: a.kind,
            window: a.window,
            damping: a.damping,
            threshold: a.threshold,
            shift: a.e0.zip(a.e0_tilde),
            out: a.out.map(|p| run::output_root().join(p)),
        }),
        Command::Resources(a) => run::resources(&run::output_root().join(a.out)),
        Command::Symmetry(a) => run::symmetry(&a.resolve()),
        Command::Compare(a) => run::compare(&a.reference, &a.candidate, a.out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

impl ConfigArgs {
    fn resolve(&self) -> run::Request {
        run::Request { config: self.config.clone(), overrides: self.overrides.clone(), out: self.out.clone() }
    }
}
