//! Command-line front end.
//!
//! Exit codes: 0 when a decision or report was rendered (including "no" and
//! failed verifications), 2 for malformed input, 3 when the instance cannot
//! be decided (unsupported case, non-split quadratic, enumeration budget),
//! 4 when an internal post-check fails.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::field::Field;
use crate::oracle::{self, OracleError, DEFAULT_BUDGET};
use crate::quadsum::{
    check_necessary_combination, classify_and_reduce, construct, decide_with_params, verify_certificate, QuadError,
};
use crate::wire::{self, JobSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "splitquad",
    version,
    about = "Decide and certify split quadratic matrix sums over Q and GF(p)",
    long_about = "Decide whether a square matrix is A + B with A^2 = aA + bI and B^2 = cB + dI, \
                  and construct an exactly verified pair (A, B) when the instance reduces to the \
                  idempotent plus square-zero case.\n\n\
                  Job files are JSON: {\"field\": \"Q\" | {\"GF\": p}, \"matrix\": [[\"1\",\"0\"],...], \
                  \"params\": {\"a\":\"1\",\"b\":\"0\",\"c\":\"0\",\"d\":\"0\"}}. Params default to (1,0,0,0).\n\n\
                  Exit codes: 0 rendered, 2 malformed input, 3 unsupported or undecidable here, \
                  4 internal post-check failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the job and print the decision with diagnostics.
    Decide(JobArgs),
    /// Build a certificate (A, B), re-verify it from the written file, and emit it.
    Construct(JobArgs),
    /// Check a certificate against the job's matrix.
    Verify(VerifyArgs),
    /// Show the case classification of the job's parameters.
    Classify(JobArgs),
    /// Compare decide with brute-force enumeration over all n x n matrices.
    Oracle(OracleArgs),
    /// Necessary condition for M = alpha P + beta Q with idempotent P, Q.
    Necessary(NecessaryArgs),
}

#[derive(Debug, Args)]
pub struct JobArgs {
    /// Job file (JSON).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Write the JSON result here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Job file holding the matrix M.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Certificate file holding A, B and the parameters.
    #[arg(long)]
    pub cert: PathBuf,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Prime field, e.g. gf2, gf3, GF(5).
    #[arg(long)]
    pub field: String,
    /// Matrix size.
    #[arg(long)]
    pub n: usize,
    /// Maximum number of enumeration steps.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Also export the atlas as JSON lines (one matrix per line with a membership flag).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NecessaryArgs {
    /// Job file holding the matrix M (params are ignored).
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    /// Could not decide; a JSON explanation may still be printed.
    Unsupported(String, Option<Value>),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Malformed(_) => EXIT_MALFORMED,
            Failure::Unsupported(..) => EXIT_UNSUPPORTED,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<wire::WireError> for Failure {
    fn from(e: wire::WireError) -> Failure {
        Failure::Malformed(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn load_job(path: &Path) -> Result<JobSpec, Failure> {
    Ok(wire::parse_job(&read(path)?)?)
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn emit(v: &Value, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = render(v);
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Malformed(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Internal(format!("writing output: {e}"))),
    }
}

fn quad_failure(job: &JobSpec, e: QuadError) -> Failure {
    match e {
        QuadError::UnsupportedCase {
            classification,
            necessary,
        } => Failure::Unsupported(
            format!("unsupported_case {}", classification.case),
            Some(wire::unsupported_to_json(job.field, &job.params, &classification, necessary.as_deref())),
        ),
        e @ QuadError::NotSplit { .. } => Failure::Unsupported(e.to_string(), None),
        e @ (QuadError::BadParams(_) | QuadError::NotSquare(..)) => Failure::Malformed(e.to_string()),
        e => Failure::Internal(e.to_string()),
    }
}

fn cmd_decide(args: &JobArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let job = load_job(&args.input)?;
    let (cls, decision) = decide_with_params(&job.matrix, &job.params).map_err(|e| quad_failure(&job, e))?;
    emit(
        &wire::decision_to_json(job.field, &job.params, &cls, &decision),
        args.output.as_deref(),
        stdout,
    )
}

fn cmd_construct(args: &JobArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let job = load_job(&args.input)?;
    let cert = match construct(&job.matrix, &job.params) {
        Ok(c) => c,
        Err(QuadError::DecisionNo(decision)) => {
            let (cls, _) = classify_and_reduce(&job.matrix, &job.params).map_err(|e| quad_failure(&job, e))?;
            return emit(
                &wire::decision_to_json(job.field, &job.params, &cls, &decision),
                args.output.as_deref(),
                stdout,
            );
        }
        Err(e) => return Err(quad_failure(&job, e)),
    };
    let value = wire::certificate_to_json(job.field, &cert);
    let text = render(&value);
    // re-verify from the serialized form, exactly as a later `verify` would
    let claim = wire::certificate_from_json(&text, None)
        .map_err(|e| Failure::Internal(format!("certificate does not re-parse: {e}")))?;
    let report = verify_certificate(&job.matrix, &claim.a, &claim.b, &claim.params);
    if !report.pass || claim.params != job.params {
        return Err(Failure::Internal(format!("written certificate fails verification: {report:?}")));
    }
    emit(&value, args.output.as_deref(), stdout)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let job = load_job(&args.input)?;
    let claim = wire::certificate_from_json(&read(&args.cert)?, Some(job.field))?;
    if claim.field != job.field {
        return Err(Failure::Malformed(format!(
            "certificate is over {}, job is over {}",
            claim.field, job.field
        )));
    }
    let report = verify_certificate(&job.matrix, &claim.a, &claim.b, &claim.params);
    let mut v = wire::verification_to_json(&report);
    v["params"] = wire::params_to_json(&claim.params);
    emit(&v, args.output.as_deref(), stdout)
}

fn cmd_classify(args: &JobArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let job = load_job(&args.input)?;
    let (cls, _) = classify_and_reduce(&job.matrix, &job.params).map_err(|e| quad_failure(&job, e))?;
    let mut v = wire::classification_to_json(&cls);
    v["params"] = wire::params_to_json(&job.params);
    emit(&v, args.output.as_deref(), stdout)
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::BudgetExceeded { .. } => Failure::Unsupported(e.to_string(), None),
        e => Failure::Malformed(e.to_string()),
    }
}

fn cmd_oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let field = wire::parse_field_name(&args.field)?;
    if field == Field::Rationals {
        return Err(Failure::Malformed("the oracle needs a prime field".into()));
    }
    let atlas = oracle::build_sum_atlas(field, args.n, oracle::AtlasVariant::IdempotentSquareZero, args.budget)
        .map_err(oracle_failure)?;
    let report = oracle::compare_with_atlas(&atlas, args.budget).map_err(oracle_failure)?;
    if let Some(path) = &args.output {
        let file = fs::File::create(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        oracle::export_atlas_jsonl(&atlas, &mut w, args.budget)
            .and_then(|_| Ok(w.flush()?))
            .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    }
    emit(&wire::comparison_to_json(&report), None, stdout)?;
    if report.mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Internal(format!(
            "{} mismatches between decide and the oracle",
            report.mismatches.len()
        )))
    }
}

fn cmd_necessary(args: &NecessaryArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let job = load_job(&args.input)?;
    let alpha = job.field.parse(&args.alpha).map_err(|e| Failure::Malformed(e.to_string()))?;
    let beta = job.field.parse(&args.beta).map_err(|e| Failure::Malformed(e.to_string()))?;
    let report = check_necessary_combination(&job.matrix, &alpha, &beta).map_err(|e| quad_failure(&job, e))?;
    emit(&wire::necessary_to_json(&report), args.output.as_deref(), stdout)
}

/// Run one invocation; returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            return EXIT_MALFORMED;
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Decide(a) => cmd_decide(a, stdout),
        Command::Construct(a) => cmd_construct(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Classify(a) => cmd_classify(a, stdout),
        Command::Oracle(a) => cmd_oracle(a, stdout),
        Command::Necessary(a) => cmd_necessary(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Malformed(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                Failure::Internal(m) => {
                    let _ = writeln!(stderr, "internal error: {m}");
                }
                Failure::Unsupported(m, v) => {
                    let _ = writeln!(stderr, "{m}");
                    if let Some(v) = v {
                        let _ = stdout.write_all(render(&v).as_bytes());
                    }
                }
            }
            code
        }
    }
}
