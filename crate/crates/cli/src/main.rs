//! `latortho`: reproduction tables for lattice orthonormalization.
//!
//! Every subcommand prints one JSON (or flattened CSV) document with the
//! computed report, the list of checks and their tolerances, and a failure
//! list. Exit status is 0 when all checks pass, 3 when any check fails and
//! 2 for invalid parameters.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lattice_ortho::Error;
use serde_json::json;

use commands::*;
use output::{failure_summary, render_csv, render_json, Checks, Outcome};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "latortho", version, about = "Orthonormalized lattice translates: reproduction tables")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Directory for `<subcommand>.<format>` when --output is absent.
    #[arg(long, env = "LATORTHO_OUTPUT_DIR", global = true)]
    output_dir: Option<PathBuf>,
    /// Multiplier applied to every tolerance.
    #[arg(long, default_value_t = 1.0, global = true)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orthonormalize 1-D translates (box or dyadic seed, or an imported overlap sequence).
    Ortho1d(Ortho1dArgs),
    /// Partial sums of Σ|c|² for a box seed whose density vanishes.
    Diverge1d(Diverge1dArgs),
    /// Exact coefficients on the coherent-state lattice.
    Coherent2d(Coherent2dArgs),
    /// Bounds on F and agreement of its three evaluation routes.
    Fcheck(FcheckArgs),
    /// Perturbative coefficients and their diagnostics.
    Perturb2d(Perturb2dArgs),
    /// Growth of the coefficients on refining grids.
    Breakdown(BreakdownArgs),
    /// Eigenrelations, uncertainty and Gram checks in truncated Fock space.
    FockVerify(FockVerifyArgs),
    /// Resolution, orthogonality, witness and profile checks in the kq representation.
    ZakVerify(ZakVerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ortho1d(_) => "ortho1d",
            Command::Diverge1d(_) => "diverge1d",
            Command::Coherent2d(_) => "coherent2d",
            Command::Fcheck(_) => "fcheck",
            Command::Perturb2d(_) => "perturb2d",
            Command::Breakdown(_) => "breakdown",
            Command::FockVerify(_) => "fock-verify",
            Command::ZakVerify(_) => "zak-verify",
        }
    }
}

fn run(cli: &Cli) -> lattice_ortho::Result<Outcome> {
    let s = cli.tolerance_scale;
    match &cli.command {
        Command::Ortho1d(a) => ortho1d(a, s),
        Command::Diverge1d(a) => diverge1d(a, s),
        Command::Coherent2d(a) => coherent2d(a, s),
        Command::Fcheck(a) => fcheck(a, s),
        Command::Perturb2d(a) => perturb2d(a, s),
        Command::Breakdown(a) => breakdown(a, s),
        Command::FockVerify(a) => fock_verify(a, s),
        Command::ZakVerify(a) => zak_verify_cmd(a, s, cli.format == Format::Csv),
    }
}

/// Errors that say the input is mathematically unusable rather than malformed.
fn is_verification_error(e: &Error) -> bool {
    matches!(
        e,
        Error::NotStrictlyPositive { .. } | Error::Indefinite { .. } | Error::CriticalLattice | Error::ThetaDivergent { .. }
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tolerance_scale.is_finite() && cli.tolerance_scale > 0.0) {
        eprintln!("error: --tolerance-scale must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    let doc = match run(&cli) {
        Ok(outcome) => outcome.into_value(),
        Err(e) if is_verification_error(&e) => {
            let mut checks = Checks::new(cli.tolerance_scale);
            checks.flag("input_admissible", false, e.to_string());
            Outcome {
                command: cli.command.name(),
                config: json!(null),
                report: json!({ "error": e.to_string() }),
                checks,
            }
            .into_value()
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let text = match cli.format {
        Format::Json => render_json(&doc),
        Format::Csv => render_csv(&doc),
    };
    let target = cli.output.clone().or_else(|| {
        let ext = if cli.format == Format::Json { "json" } else { "csv" };
        cli.output_dir.as_ref().map(|d| d.join(format!("{}.{ext}", cli.command.name())))
    });
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        }
        None => print!("{text}"),
    }
    if doc["status"] == "pass" {
        ExitCode::SUCCESS
    } else {
        eprint!("{}", failure_summary(&doc));
        ExitCode::from(EXIT_VERIFY)
    }
}
