use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mrint_cli::{run, write_outputs, CliError, Command, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "mrint", version, about = "Integrable matter-radiation models: spectra, Bethe roots, dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sector eigenvalues from exact diagonalization, with Bethe energies where available.
    Spectrum(Flags),
    /// Bethe roots, residuals, degeneracy certificates and Λ spot checks.
    Bethe(Flags),
    /// Return probability P(t) and its frequency content.
    Rabi(Flags),
    /// RTT and transfer-matrix commutativity over random spectral parameters.
    Verify(Flags),
    /// Single-excitation energies against detuning.
    Sweep(Flags),
    /// Bethe energies matched against the oracle; exits 3 on mismatch.
    Compare(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// bs | jc | ti | qbs | qjc | qti | raw-mr
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    na: Option<usize>,
    #[arg(long)]
    spin: Option<f64>,
    #[arg(long = "omega-f", allow_hyphen_values = true)]
    omega_f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    cutoff: Option<usize>,
    /// Comma-separated sector list; "" for none.
    #[arg(long)]
    sectors: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    /// Output directory; tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn execute(cmd: Command, f: Flags) -> Result<Option<String>, CliError> {
    let mut cfg = match &f.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        model: f.model,
        na: f.na,
        spin: f.spin,
        omega_f: f.omega_f,
        alpha: f.alpha,
        delta: f.delta,
        cutoff: f.cutoff,
        sectors: f.sectors,
        q: f.q,
        out: f.out,
        seed: f.seed,
    })?;
    let out = run(cmd, &cfg)?;
    for w in &out.record.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.run.out {
        Some(dir) => {
            write_outputs(&out, dir)?;
            for line in &out.summary {
                println!("{line}");
            }
        }
        None => {
            print!("{}", out.tables[0].1);
            for line in &out.summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, flags) = match cli.command {
        Cmd::Spectrum(f) => (Command::Spectrum, f),
        Cmd::Bethe(f) => (Command::Bethe, f),
        Cmd::Rabi(f) => (Command::Rabi, f),
        Cmd::Verify(f) => (Command::Verify, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
        Cmd::Compare(f) => (Command::Compare, f),
    };
    match execute(cmd, flags) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("error: {}", CliError::Numerical(msg));
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
