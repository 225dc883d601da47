//! `jointsim`: analyze commuting matrix families and build or check a joint
//! similarity to contractions.

mod commands;
mod document;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jointsim::famgen::{GenSpec, Recipe};
use jointsim::{CMatrix, Error};

use commands::Outcome;
use document::{ClaimedSimilarity, FamilyDocument, ToleranceOverrides};

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const SCHEMA: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const COMMUTATIVITY: u8 = 4;
    pub const DOMAIN: u8 = 5;
    pub const VERIFICATION: u8 = 6;
}

#[derive(Parser)]
#[command(name = "jointsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    tolerances: ToleranceFlags,

    /// Largest exponent sampled when checking power bounds
    #[arg(long, global = true, default_value_t = 1000)]
    p_max: u32,

    /// Write the JSON document here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ToleranceFlags {
    /// Relative singular-value threshold for rank decisions
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Largest normalized commutator accepted as commuting
    #[arg(long, global = true)]
    tol_commute: Option<f64>,
    /// Eigenvalue grouping radius relative to 1 + ||T||
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    /// Slack allowed above 1 for conjugated norms
    #[arg(long, global = true)]
    tol_contraction: Option<f64>,
    /// Slack for eigenvalue moduli compared against 1
    #[arg(long, global = true)]
    tol_spectrum: Option<f64>,
}

impl From<&ToleranceFlags> for ToleranceOverrides {
    fn from(f: &ToleranceFlags) -> Self {
        ToleranceOverrides {
            tol_rank: f.tol_rank,
            tol_commute: f.tol_commute,
            tol_cluster: f.tol_cluster,
            tol_contraction: f.tol_contraction,
            tol_spectrum: f.tol_spectrum,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Spectral profile of every member, commutativity and uniformity report
    Analyze { input: PathBuf },
    /// Joint invariant-subspace decomposition of a commuting family
    Decompose { input: PathBuf },
    /// Similarity making every member a contraction, with its certificate
    Similarize { input: PathBuf },
    /// Re-check a claimed similarity against a family
    Verify { input: PathBuf, similarity: PathBuf },
    /// Write a seeded synthetic family
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Recipe name, e.g. polynomials_in_one_matrix or counterexample_unbounded:5
    #[arg(long)]
    recipe: Recipe,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix dimension
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Number of members
    #[arg(long)]
    family_size: Option<usize>,
    /// Largest spectral radius of a non-scalar member
    #[arg(long)]
    spectral_radius_cap: Option<f64>,
    /// Largest member norm
    #[arg(long)]
    norm_cap: Option<f64>,
    /// Largest condition number of the hidden conjugator
    #[arg(long)]
    cond_cap: Option<f64>,
    /// Largest planted Jordan block
    #[arg(long)]
    max_block: Option<usize>,
}

impl GenerateArgs {
    fn spec(&self) -> GenSpec {
        let mut spec = GenSpec::new(self.seed, self.n, self.recipe);
        if let Some(v) = self.family_size {
            spec.family_size = v;
        }
        if let Some(v) = self.spectral_radius_cap {
            spec.spectral_radius_cap = v;
        }
        if let Some(v) = self.norm_cap {
            spec.norm_cap = v;
        }
        if let Some(v) = self.cond_cap {
            spec.cond_cap = v;
        }
        if let Some(v) = self.max_block {
            spec.max_block = v;
        }
        spec
    }
}

// ── Failures ──

enum Failure {
    Schema(String),
    Core(Error),
}

impl Failure {
    fn status(&self) -> u8 {
        match self {
            Failure::Schema(_) => exit::SCHEMA,
            Failure::Core(e) => match e {
                Error::InvalidInput(_) => exit::SCHEMA,
                Error::NumericalFailure { .. }
                | Error::IllPosedStructure(_)
                | Error::DegenerateDecomposition { .. } => exit::NUMERICAL,
                Error::CommutativityViolation { .. } => exit::COMMUTATIVITY,
                Error::DomainViolation(_) | Error::Singular { .. } => exit::DOMAIN,
                Error::VerificationFailure { .. } => exit::VERIFICATION,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Schema(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Schema(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))
}

fn load_family(path: &Path, flags: ToleranceOverrides) -> Result<jointsim::FamilySpec, Failure> {
    let doc: FamilyDocument = read_json(path)?;
    Ok(doc.to_family(flags)?)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let flags = ToleranceOverrides::from(&cli.tolerances);
    let outcome = match &cli.command {
        Command::Analyze { input } => commands::analyze(&load_family(input, flags)?, cli.p_max)?,
        Command::Decompose { input } => commands::decompose(&load_family(input, flags)?)?,
        Command::Similarize { input } => commands::similarize(&load_family(input, flags)?)?,
        Command::Verify { input, similarity } => {
            let family = load_family(input, flags)?;
            let claimed: ClaimedSimilarity = read_json(similarity)?;
            let n = family.dim();
            let y: CMatrix = claimed.y.to_matrix(n, n, "Y")?;
            commands::verify(&family, &y)?
        }
        Command::Generate(args) => commands::generate_family(&args.spec(), flags)?,
    };
    Ok(outcome)
}

fn emit(outcome: &Outcome, output: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&outcome.document).expect("JSON values serialize");
    match output {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| Failure::Schema(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            match writeln!(out, "{text}") {
                // a closed reader (e.g. `| head`) is not an error
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(Failure::Schema(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        emit(&outcome, cli.output.as_deref())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            ExitCode::from(outcome.status)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.status())
        }
    }
}
