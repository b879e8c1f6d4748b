mod io;
mod propsuite;
mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eplab_core::classify::classify;
use eplab_core::douglas::douglas_analysis;
use eplab_core::numlin::RankTol;
use eplab_core::opzoo::{gamma_sweep, generate, Family, OperatorSpec};
use eplab_core::perturb::check_perturbation;
use eplab_core::pinv::{penrose_verify, pinv};
use eplab_core::TolerancePolicy;

use io::Format;
use report::{Report, ReportDocument};

const EXIT_VERDICT_FAILED: u8 = 1;
const EXIT_OPERATIONAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] eplab_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(eplab_core::Error::BadTolerance(_)) => EXIT_USAGE,
            _ => EXIT_OPERATIONAL,
        }
    }
}

/// EP / hypo-EP analysis of matrices and finite sections of operators.
#[derive(Parser, Debug)]
#[command(name = "eplab", version)]
struct Cli {
    #[command(flatten)]
    tol: TolFlags,

    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Input matrix format; inferred from the extension (.mtx, .json) when absent.
    #[arg(long, global = true)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TolFlags {
    /// Rank cutoff as a multiple of the largest singular value.
    #[arg(long, global = true, conflicts_with = "tol_rank_abs")]
    tol_rank_rel: Option<f64>,
    /// Absolute rank cutoff on singular values.
    #[arg(long, global = true)]
    tol_rank_abs: Option<f64>,
    /// Residual bound for subspace and identity tests.
    #[arg(long, global = true, env = "EPLAB_TOL_SUBSPACE")]
    tol_subspace: Option<f64>,
    /// Slack below zero allowed for the smallest eigenvalue in PSD tests.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
}

impl TolFlags {
    fn policy(&self) -> Result<TolerancePolicy, CliError> {
        let d = TolerancePolicy::default();
        let rank_tol = match (self.tol_rank_rel, self.tol_rank_abs) {
            (Some(r), _) => RankTol::RelativeToSigmaMax(Some(r)),
            (None, Some(a)) => RankTol::Absolute(a),
            (None, None) => d.rank_tol,
        };
        Ok(TolerancePolicy::new(
            rank_tol,
            self.tol_subspace.unwrap_or(d.subspace_tol),
            self.tol_psd.unwrap_or(d.psd_tol),
        )?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every EP and hypo-EP condition for a square matrix.
    Classify {
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write the pseudoinverse (same format as the input) and report the Penrose residuals.
    Pinv {
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Range inclusion R(A) ⊆ R(B), the factor C = B†A and the majorization test.
    Douglas {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check the perturbation hypotheses and conclusions for A + B.
    Perturb {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a zoo operator from a JSON spec (inline or a file path).
    Zoo {
        spec: String,
        /// Matrix file to write; Matrix Market on stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Reduced minimum modulus and rank across section sizes, as CSV.
    Sweep {
        family: Family,
        /// Comma-separated sizes, e.g. 3,5,7.
        #[arg(value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run the property suites over seeded random matrices.
    Propsuite {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        /// Largest matrix size drawn.
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..=256))]
        max_n: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("eplab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let tol = cli.tol.policy()?;
    match &cli.command {
        Command::Classify { input, out } => {
            let m = io::read_matrix(input, cli.format)?;
            let r = classify(&m.matrix, &tol)?;
            emit_document(
                &ReportDocument::new(&[&m.bytes], tol, Report::Classification(r)),
                out,
            )?;
        }
        Command::Pinv { input, out } => {
            let m = io::read_matrix(input, cli.format)?;
            let a_dag = pinv(&m.matrix, &tol)?;
            let r = penrose_verify(&m.matrix, &a_dag, &tol)?;
            io::write_matrix(out, &a_dag, m.format)?;
            emit_document(
                &ReportDocument::new(&[&m.bytes], tol, Report::Penrose(r)),
                &None,
            )?;
        }
        Command::Douglas { a, b, out } => {
            let (a, b) = (
                io::read_matrix(a, cli.format)?,
                io::read_matrix(b, cli.format)?,
            );
            let r = douglas_analysis(&a.matrix, &b.matrix, &tol, cli.seed)?;
            let doc = ReportDocument::new(&[&a.bytes, &b.bytes], tol, Report::Douglas(r));
            emit_document(&doc, out)?;
        }
        Command::Perturb { a, b, out } => {
            let (a, b) = (
                io::read_matrix(a, cli.format)?,
                io::read_matrix(b, cli.format)?,
            );
            let r = check_perturbation(&a.matrix, &b.matrix, &tol)?;
            if r.contradicts_theorem() {
                eprintln!(
                    "eplab: WARNING hypotheses hold but a conclusion fails; \
                     the tolerance is too tight for A + B or the computation is wrong"
                );
            }
            let doc = ReportDocument::new(&[&a.bytes, &b.bytes], tol, Report::Perturbation(r));
            emit_document(&doc, out)?;
        }
        Command::Zoo { spec, out } => {
            let text = if spec.trim_start().starts_with('{') {
                spec.clone()
            } else {
                std::fs::read_to_string(spec).map_err(|e| CliError::io(Path::new(spec), e))?
            };
            let spec: OperatorSpec = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad operator spec: {e}")))?;
            let (a, traits) = generate(&spec)?;
            match out {
                Some(path) => {
                    let format = Format::sniff(path, cli.format)?;
                    io::write_matrix(path, &a, format)?;
                    let traits = serde_json::to_string_pretty(&traits).expect("plain data");
                    write_stdout(&format!("{traits}\n"))?;
                }
                None => write_stdout(&io::render(&a, cli.format.unwrap_or(Format::MatrixMarket)))?,
            }
        }
        Command::Sweep { family, sizes, out } => {
            let rows = gamma_sweep(*family, sizes, &tol)?;
            let csv = report::sweep_csv(&rows);
            match out {
                Some(path) => std::fs::write(path, csv).map_err(|e| CliError::io(path, e))?,
                None => write_stdout(&csv)?,
            }
        }
        Command::Propsuite { count, max_n } => {
            let summary = propsuite::run(cli.seed, *count as usize, *max_n as usize, &tol);
            write_stdout(&summary.render())?;
            if !summary.disagreements.is_empty() {
                return Ok(ExitCode::from(EXIT_VERDICT_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_document(doc: &ReportDocument, out: &Option<PathBuf>) -> Result<(), CliError> {
    let text = doc.to_json();
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => write_stdout(&text),
    }
}

fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}
