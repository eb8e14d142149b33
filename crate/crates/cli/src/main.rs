//! Command-line surface for exact transportation-polytope computations:
//! vertices, feasible cones, margin perturbations, generating functions,
//! Ehrhart polynomials, volumes, central fast paths, and oracle-backed
//! self-verification.
//!
//! Output is deterministic for a fixed invocation (including `--seed`).
//! Exit codes: 0 success, 1 malformed input, 2 verification failure,
//! 3 internal invariant violation.

mod render;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use transpoly::central::{self, CentralError};
use transpoly::ehrhart::{self, EhrhartError};
use transpoly::mgf::{self, MgfError};
use transpoly::oracle::OracleError;
use transpoly::perturb::{self, PerturbError};
use transpoly::polytope::{enumerate_vertices, Margins, PolytopeError};
use transpoly::rat;

#[derive(Parser)]
#[command(
    name = "transpoly",
    version,
    about = "Exact vertices, cones, generating functions, Ehrhart polynomials, and volumes of transportation polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Polytope selection shared by most subcommands: a margins file or a
/// central triple, exactly one of the two.
#[derive(Args)]
struct PolytopeInput {
    /// Margins file: {"r": ["p/q", ...], "c": ["p/q", ...]}.
    #[arg(long, value_name = "FILE", conflicts_with = "central")]
    margins: Option<PathBuf>,
    /// Central polytope K N A: kn x n margins (A, ..., A), (K*A, ..., K*A).
    #[arg(long, num_args = 3, value_names = ["K", "N", "A"])]
    central: Option<Vec<u64>>,
}

impl PolytopeInput {
    fn load(&self) -> Result<Margins, CliError> {
        match (&self.margins, &self.central) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Input(format!("invalid margins file: {e}")))
            }
            (None, Some(triple)) => {
                let (k, n, a) = (triple[0] as usize, triple[1] as usize, triple[2]);
                central::central_margins(k, n, a).map_err(CliError::from)
            }
            _ => Err(CliError::Input(
                "provide exactly one of --margins FILE or --central K N A".into(),
            )),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Emit {
    Counts,
    Vertices,
    Mgf,
    Ehrhart,
    Volume,
}

#[derive(Subcommand)]
enum Command {
    /// List all vertices with supports and degeneracy flags.
    Vertices {
        #[command(flatten)]
        input: PolytopeInput,
    },
    /// List the feasible-cone rays at every vertex.
    Cones {
        #[command(flatten)]
        input: PolytopeInput,
    },
    /// Enumerate perturbed vertices, their limits, and the grouping.
    Perturb {
        #[command(flatten)]
        input: PolytopeInput,
        /// Evaluation parameter in (0, 1/(K m)); defaults to 1/(2 K m).
        #[arg(long, value_name = "p/q")]
        t: Option<String>,
    },
    /// Multivariate generating function of the (dilated) polytope.
    Mgf {
        #[command(flatten)]
        input: PolytopeInput,
        /// Dilation factor applied to the polytope.
        #[arg(long, default_value_t = 1)]
        dilation: u64,
    },
    /// Ehrhart polynomial, leading coefficient, and normalized volume.
    Ehrhart {
        #[command(flatten)]
        input: PolytopeInput,
    },
    /// Volume data only.
    Volume {
        #[command(flatten)]
        input: PolytopeInput,
    },
    /// Closed-form data for the central kn x n polytope.
    Central {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: u64,
        /// What to emit.
        #[arg(long, value_enum, default_value_t = Emit::Counts)]
        emit: Emit,
    },
    /// Cross-check the fast paths against brute force; exits 2 on mismatch.
    Verify {
        #[command(flatten)]
        input: PolytopeInput,
        /// Seed for the generating-function evaluation points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failures carrying the process exit code.
#[derive(Debug)]
enum CliError {
    /// Exit 1: unusable input (arguments, files, infeasible parameters).
    Input(String),
    /// Exit 2: an oracle cross-check found a mismatch.
    Verification(String),
    /// Exit 3: an internal invariant did not hold.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Verification(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<PolytopeError> for CliError {
    fn from(e: PolytopeError) -> Self {
        match e {
            PolytopeError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        match e {
            PerturbError::Polytope(p) => p.into(),
            PerturbError::ParameterOutOfRange { .. } | PerturbError::NotCentral(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<MgfError> for CliError {
    fn from(e: MgfError) -> Self {
        match e {
            MgfError::IntegralRequired | MgfError::Degenerate => CliError::Input(e.to_string()),
            MgfError::Perturb(p) => p.into(),
            MgfError::Polytope(p) => p.into(),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<EhrhartError> for CliError {
    fn from(e: EhrhartError) -> Self {
        match e {
            EhrhartError::Mgf(m) => m.into(),
            EhrhartError::Polytope(p) => p.into(),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<CentralError> for CliError {
    fn from(e: CentralError) -> Self {
        match e {
            CentralError::BadParameters { .. } => CliError::Input(e.to_string()),
            CentralError::Polytope(p) => p.into(),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Polytope(p) => p.into(),
            OracleError::InconsistentTable { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Write a report to stdout. A closed pipe (e.g. `transpoly ... | head`)
/// is not an error.
fn emit(output: &str) -> std::io::Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{output}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outcomes; everything else is
            // malformed input.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(output) => match emit(&output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(3)
            }
        },
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let text = cli.format == Format::Text;
    match &cli.command {
        Command::Vertices { input } => {
            let margins = input.load()?;
            let vertices = enumerate_vertices(&margins)?;
            Ok(render::vertices(&margins, &vertices, text))
        }
        Command::Cones { input } => {
            let margins = input.load()?;
            let vertices = enumerate_vertices(&margins)?;
            Ok(render::cones(&margins, &vertices, text))
        }
        Command::Perturb { input, t } => {
            let margins = input.load()?;
            let spec = perturb::make_spec(&margins);
            let t = match t {
                Some(raw) => rat::parse(raw)
                    .map_err(|e| CliError::Input(format!("invalid --t value: {e}")))?,
                None => spec.t0().clone(),
            };
            let grouping = perturb::group_by_limit(&spec)?;
            render::perturbation(&spec, &grouping, &t, text).map_err(CliError::from)
        }
        Command::Mgf { input, dilation } => {
            let margins = input.load()?;
            if *dilation == 0 {
                return Err(CliError::Input("--dilation must be at least 1".into()));
            }
            let expr = mgf::polytope_mgf(&margins)?.dilate(*dilation);
            Ok(render::mgf(&expr, text))
        }
        Command::Ehrhart { input } => {
            let margins = input.load()?;
            let report = ehrhart::ehrhart(&margins)?;
            Ok(render::ehrhart(&report, text))
        }
        Command::Volume { input } => {
            let margins = input.load()?;
            let report = ehrhart::ehrhart(&margins)?;
            Ok(render::volume(&report, text))
        }
        Command::Central { k, n, a, emit } => run_central(*k, *n, *a, *emit, text),
        Command::Verify { input, seed } => {
            let margins = input.load()?;
            let central = input
                .central
                .as_ref()
                .map(|t| (t[0] as usize, t[1] as usize, t[2]));
            let outcomes = verify::run_checks(&margins, central, *seed);
            let failed = outcomes.iter().find(|o| o.failed());
            let rendered = render::verification(*seed, &outcomes, text);
            match failed {
                Some(first) => {
                    // The full report still goes to stdout; the exit code and
                    // the first counterexample on stderr signal the failure.
                    let _ = emit(&rendered);
                    Err(CliError::Verification(first.counterexample()))
                }
                None => Ok(rendered),
            }
        }
    }
}

fn run_central(k: usize, n: usize, a: u64, emit: Emit, text: bool) -> Result<String, CliError> {
    match emit {
        Emit::Counts => {
            let (vertices, max_vertices) = central::central_counts(k, n);
            central::central_margins(k, n, a)?; // validate parameters
            Ok(render::central_counts(&vertices, &max_vertices, text))
        }
        Emit::Vertices => {
            let margins = central::central_margins(k, n, a)?;
            let vertices = central::central_vertices(k, n, a)?
                .into_iter()
                .map(transpoly::polytope::VertexRecord::new)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(render::vertices(&margins, &vertices, text))
        }
        Emit::Mgf => {
            let expr = central::central_mgf(k, n, a)?;
            Ok(render::mgf(&expr, text))
        }
        Emit::Ehrhart => {
            let expr = central::central_mgf(k, n, a)?;
            let report = ehrhart::ehrhart_report_from_mgf(&expr)?;
            Ok(render::ehrhart(&report, text))
        }
        Emit::Volume => {
            let expr = central::central_mgf(k, n, a)?;
            let report = ehrhart::ehrhart_report_from_mgf(&expr)?;
            Ok(render::volume(&report, text))
        }
    }
}
