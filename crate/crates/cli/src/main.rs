use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pf_cli::commands::{self, Artifact, Suite};
use pf_cli::config::{Overrides, RunConfig};
use pf_cli::CliError;

/// Perturbative and truncated-Fock-space numerics for the spin-1/2
/// Pauli-Fierz hydrogen problem.
///
/// Settings come from built-in defaults, then the JSON file given by
/// --config, then individual flags; a flag always wins over the file.
///
/// Exit status: 0 ok, 1 verification failure, 2 configuration error,
/// 3 numerical failure.
#[derive(Parser)]
#[command(name = "pflab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Perturbative coefficients of the binding and self energies.
    Coeffs,
    /// Ground-state energy of the truncated fiber operator over a list of couplings.
    SelfEnergy,
    /// Trial-state binding estimate and its extracted alpha^3 coefficient.
    Binding,
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
    },
    /// Print the resolved configuration as JSON on stdout.
    Config,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Scaling,
    Pullthrough,
}

fn resolve(o: &Overrides) -> Result<RunConfig, CliError> {
    let base = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Ok(base.with_overrides(o))
}

fn run(cli: &Cli) -> Result<Artifact, CliError> {
    let cfg = resolve(&cli.overrides)?;
    match cli.command {
        Command::Coeffs => commands::coeffs(&cfg),
        Command::SelfEnergy => commands::self_energy(&cfg),
        Command::Binding => commands::binding(&cfg),
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Lemmas => Suite::Lemmas,
                SuiteArg::Scaling => Suite::Scaling,
                SuiteArg::Pullthrough => Suite::PullThrough,
            };
            commands::verify(&cfg, suite)
        }
        Command::Config => {
            cfg.validate()?;
            let mut text = serde_json::to_string_pretty(&cfg).expect("config serializes");
            text.push('\n');
            Ok(Artifact {
                text,
                passed: true,
                summary: None,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let artifact = match run(&cli) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("pflab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let path = match cli.command {
        Command::Config => None,
        _ => resolve(&cli.overrides).ok().and_then(|c| c.output.path),
    };
    let written = match &path {
        Some(p) => std::fs::write(p, &artifact.text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(artifact.text.as_bytes())
            .map_err(|e| CliError::Config(format!("stdout: {e}"))),
    };
    if let Err(e) = written {
        eprintln!("pflab: {e}");
        return ExitCode::from(e.exit_code());
    }
    if let Some(s) = &artifact.summary {
        eprint!("{s}");
    }
    if artifact.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
