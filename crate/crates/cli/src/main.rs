//! `pptcanon`: PPT checks, canonical forms and separability certificates for
//! states on C^2 ⊗ C^M ⊗ C^N.
//!
//! Exit codes: 0 success, 1 negative or inconclusive verdict, 2 internal
//! numeric failure, 3 I/O or usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pptcanon::io::{from_json, sha256_hex, to_json, CertificateFile, FamilyFile, Manifest, ManifestEntry, StateFile};
use pptcanon::{
    canonicalize, decompose, gen_state, ppt_report, reconstruct, verify_decomposition, Error, FamilyMode, GenSpec,
    Scramble, ToleranceConfig, TripartiteState, DEFAULT_TRIALS,
};
use serde::de::DeserializeOwned;

const SEED_ENV: &str = "PPTCANON_SEED";

#[derive(Parser)]
#[command(name = "pptcanon", version, about = "Canonical forms and separability certificates for rank-N PPT states")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Relative singular-value threshold for numerical rank
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Eigenvalue floor for PSD tests, scaled by max(1, trace)
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Bound on relative commutators and Hermitian defects
    #[arg(long, global = true)]
    comm_tol: Option<f64>,
    /// Bound on relative reconstruction residuals
    #[arg(long, global = true)]
    recon_tol: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<ToleranceConfig, Failure> {
        let mut tol = ToleranceConfig::default();
        let fields = [
            (&mut tol.rank_tol, self.rank_tol),
            (&mut tol.psd_tol, self.psd_tol),
            (&mut tol.comm_tol, self.comm_tol),
            (&mut tol.recon_tol, self.recon_tol),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        tol.validate().map_err(|e| Failure::usage(e.to_string()))?;
        Ok(tol)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the partial-transpose report of a state
    CheckPpt { state: PathBuf },
    /// Write the canonical family of a state; diagnostics go to stderr
    Canonicalize {
        state: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a separability certificate
    Decompose {
        state: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Random product-vector trials after the basis pairs
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
    /// Print the residual of a certificate against a state
    Verify { state: PathBuf, certificate: PathBuf },
    /// Write a synthetic state
    Generate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Diagonal)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = ScrambleArg::None)]
        scramble: ScrambleArg,
        /// Emit the entangled control state instead
        #[arg(long)]
        control: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Manifest to update with the generated file and its hash
        #[arg(long, requires = "output")]
        manifest: Option<PathBuf>,
    },
    /// Rebuild a state from a canonical family
    Reconstruct {
        family: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Diagonal,
    Conjugated,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScrambleArg {
    None,
    Unitary,
    Invertible,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Self::new(3, msg)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::HypothesisViolated(_)
            | Error::NotCanonical(_)
            | Error::NoProductVector
            | Error::InvariantViolated(_)
            | Error::NotNormal(_)
            | Error::NotCommuting(..)
            | Error::InvalidCertificate(_) => 1,
            Error::DimensionMismatch(_) | Error::Format(_) | Error::InvalidState(_) => 3,
            _ => 2,
        };
        let msg = match e {
            Error::HypothesisViolated(_) | Error::NotCanonical(_) => format!("inconclusive: {e}"),
            _ => e.to_string(),
        };
        Self::new(code, msg)
    }
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Positive,
    Negative,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path, tol: &ToleranceConfig) -> Result<TripartiteState, Failure> {
    let file: StateFile = read_json(path)?;
    file.to_state(tol).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::usage(e.to_string()))
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    to_json(value).map_err(|e| Failure::new(2, e.to_string()))
}

fn run(cli: Cli) -> Result<Verdict, Failure> {
    let tol = cli.tol.resolve()?;
    match cli.cmd {
        Command::CheckPpt { state } => {
            let rho = read_state(&state, &tol)?;
            let report = ppt_report(&rho, &tol)?;
            emit(&json(&report)?, None)?;
            Ok(if report.overall_ppt { Verdict::Positive } else { Verdict::Negative })
        }
        Command::Canonicalize { state, output } => {
            let rho = read_state(&state, &tol)?;
            let (family, diag) = canonicalize(&rho, &tol)?;
            eprint!("{}", json(&diag)?);
            emit(&json(&FamilyFile::from_family(&family))?, output.as_deref())?;
            Ok(Verdict::Positive)
        }
        Command::Decompose { state, output, trials, seed } => {
            let rho = read_state(&state, &tol)?;
            let dec = decompose(&rho, &tol, trials, seed)?;
            let residual = verify_decomposition(&rho, &dec)?;
            let line = format!("residual {residual:.16e}\n");
            emit(&json(&CertificateFile::from_decomposition(&dec))?, output.as_deref())?;
            if output.is_some() {
                print!("{line}");
            } else {
                eprint!("{line}");
            }
            Ok(Verdict::Positive)
        }
        Command::Verify { state, certificate } => {
            let rho = read_state(&state, &tol)?;
            let cert: CertificateFile = read_json(&certificate)?;
            let residual = verify_decomposition(&rho, &cert.to_decomposition())?;
            println!("{residual:.16e}");
            Ok(if residual <= tol.recon_tol { Verdict::Positive } else { Verdict::Negative })
        }
        Command::Generate { m, n, seed, mode, scramble, control, output, manifest } => {
            let mode = match mode {
                ModeArg::Diagonal => FamilyMode::Diagonal,
                ModeArg::Conjugated => FamilyMode::Conjugated,
            };
            let scramble = match scramble {
                ScrambleArg::None => Scramble::None,
                ScrambleArg::Unitary => Scramble::Unitary,
                ScrambleArg::Invertible => Scramble::Invertible,
            };
            let spec = GenSpec::new(m, n, seed).mode(mode).scramble(scramble).control(control);
            let rho = gen_state(&spec)?;
            let text = json(&StateFile::from_state(&rho))?;
            emit(&text, output.as_deref())?;
            if let (Some(path), Some(out)) = (manifest, output) {
                let mut man: Manifest = if path.exists() { read_json(&path)? } else { Manifest::default() };
                man.record(ManifestEntry {
                    spec,
                    file: out.display().to_string(),
                    sha256: sha256_hex(text.as_bytes()),
                });
                emit(&json(&man)?, Some(&path))?;
            }
            Ok(Verdict::Positive)
        }
        Command::Reconstruct { family, output } => {
            let file: FamilyFile = read_json(&family)?;
            let fam = file.to_family().map_err(|e| Failure::usage(format!("{}: {e}", family.display())))?;
            let rho = reconstruct(&fam, &tol)?;
            emit(&json(&StateFile::from_state(&rho))?, output.as_deref())?;
            Ok(Verdict::Positive)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(f) => {
            eprintln!("pptcanon: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
