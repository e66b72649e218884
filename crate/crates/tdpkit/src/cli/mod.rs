//! The job layer behind the `tdpkit` binary: file-based workflows that
//! parse JSON inputs, drive the library, and emit machine-readable reports.
//!
//! Exit-code contract: 0 = checks passed or object produced, 1 = checks ran
//! and failed (the report says which), 2 = input or usage error. Reports are
//! valid JSON on exits 0 and 1, embed the library version and the seed, and
//! are byte-identical across runs with identical jobs. serde_json keeps
//! object keys in a sorted map, so serialization order is stable.

mod corpus;

pub use corpus::{corpus_entries, CorpusEntry, CorpusGrid};

use crate::field::{parse_in_field, Field, FieldElement};
use crate::linalg::{IrreducibilityConfig, Matrix};
use crate::paramarray::{check_conjecture_conditions, extract_parameter_array};
use crate::qracah::{self, FitOutcome, QRacahParameters};
use crate::synthesis::{construct_and_verify, mu_scalar_action, MultiPoly, SynthesisError};
use crate::tdsystem::{
    build_system, default_ordering, standard_orderings, verify_td_pair, TriDiagonalSystem,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Failures that abort a job before any verdict is reached; always exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {msg}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{0}")]
    Input(String),
    #[error("corpus grid has {requested} instances, cap is {cap}")]
    CapExceeded { requested: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JobCommand {
    Check,
    Params,
    QracahFit,
    Generate,
    Construct,
    MuTest,
    Corpus,
}

impl JobCommand {
    fn name(self) -> &'static str {
        match self {
            JobCommand::Check => "check",
            JobCommand::Params => "params",
            JobCommand::QracahFit => "qracah-fit",
            JobCommand::Generate => "generate",
            JobCommand::Construct => "construct",
            JobCommand::MuTest => "mu-test",
            JobCommand::Corpus => "corpus",
        }
    }
}

/// One unit of work. `seed` feeds every probabilistic subroutine, so equal
/// specs produce byte-identical reports; it is never taken from the clock.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: JobCommand,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub field: Option<Field>,
    pub max_instances: Option<usize>,
}

#[derive(Debug)]
pub struct RunOutput {
    /// 0 when all checks passed, 1 when checks ran and failed.
    pub exit_code: i32,
    pub report: Value,
}

/// Parses the --field flag syntax: "rational" or "gf:p".
pub fn parse_field_flag(s: &str) -> Result<Field, String> {
    if s == "rational" {
        return Ok(Field::rational());
    }
    if let Some(p) = s.strip_prefix("gf:") {
        let p: u64 = p
            .parse()
            .map_err(|_| format!("gf:{p} is not a valid prime field descriptor"))?;
        return Field::prime(p).map_err(|e| e.to_string());
    }
    Err(format!(
        "unknown field descriptor {s:?}; expected \"rational\" or \"gf:p\""
    ))
}

pub fn run(job: &JobSpec) -> Result<RunOutput, CliError> {
    log::info!("running {} with seed {}", job.command.name(), job.seed);
    let (passed, payload) = match job.command {
        JobCommand::Check => cmd_check(job)?,
        JobCommand::Params => cmd_params(job)?,
        JobCommand::QracahFit => cmd_qracah_fit(job)?,
        JobCommand::Generate => cmd_generate(job)?,
        JobCommand::Construct => cmd_construct(job)?,
        JobCommand::MuTest => cmd_mu_test(job)?,
        JobCommand::Corpus => cmd_corpus(job)?,
    };
    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": job.seed,
        "command": job.command.name(),
        "passed": passed,
        "report": payload,
    });
    if job.command != JobCommand::Corpus {
        if let Some(path) = &job.output_path {
            write_text(path, &render(&report))?;
        }
    }
    Ok(RunOutput {
        exit_code: if passed { 0 } else { 1 },
        report,
    })
}

/// Canonical textual form of any emitted JSON document.
pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn irr_config(seed: u64) -> IrreducibilityConfig {
    IrreducibilityConfig {
        seed,
        ..IrreducibilityConfig::default()
    }
}

fn input_path(job: &JobSpec) -> Result<&Path, CliError> {
    job.input_path.as_deref().ok_or_else(|| {
        CliError::Input(format!("{} requires an input file", job.command.name()))
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

/// The file's own field wins when both are present and they agree; a bare
/// file falls back to --field.
fn resolve_field(file_field: Option<Field>, job: &JobSpec) -> Result<Field, CliError> {
    match (file_field, &job.field) {
        (Some(f), Some(flag)) if &f != flag => Err(CliError::Input(format!(
            "input file declares field {f:?} but --field requests {flag:?}"
        ))),
        (Some(f), _) => Ok(f),
        (None, Some(flag)) => Ok(flag.clone()),
        (None, None) => Err(CliError::Input(
            "no field specified: add a \"field\" object to the input file or pass --field"
                .to_string(),
        )),
    }
}

fn parse_scalar(s: &str, field: &Field, what: &str) -> Result<FieldElement, CliError> {
    parse_in_field(s, field).map_err(|e| CliError::Input(format!("{what} {s:?}: {e}")))
}

fn parse_scalar_list(
    entries: &[String],
    field: &Field,
    what: &str,
) -> Result<Vec<FieldElement>, CliError> {
    entries
        .iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(s, field, &format!("{what}[{i}]")))
        .collect()
}

fn parse_matrix(rows: &[Vec<String>], field: &Field, name: &str) -> Result<Matrix, CliError> {
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, s) in row.iter().enumerate() {
            out.push(parse_scalar(s, field, &format!("{name}[{i}][{j}]"))?);
        }
        parsed.push(out);
    }
    Matrix::from_rows(field, parsed).map_err(|e| CliError::Input(format!("{name}: {e}")))
}

fn scalar_strings(values: &[FieldElement]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

pub(crate) fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j).to_string()).collect())
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    field: Option<Field>,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "Astar")]
    astar: Vec<Vec<String>>,
}

fn read_pair(job: &JobSpec) -> Result<(Field, Matrix, Matrix), CliError> {
    let file: PairFile = read_json(input_path(job)?)?;
    let field = resolve_field(file.field, job)?;
    let a = parse_matrix(&file.a, &field, "A")?;
    let astar = parse_matrix(&file.astar, &field, "Astar")?;
    Ok((field, a, astar))
}

fn system_summary(s: &TriDiagonalSystem) -> Value {
    json!({
        "dim": s.dim(),
        "d": s.d(),
        "shape": s.rho(),
        "sharp": s.is_sharp(),
        "theta": scalar_strings(s.theta()),
        "theta_star": scalar_strings(s.theta_star()),
    })
}

fn cmd_check(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let (_, a, astar) = read_pair(job)?;
    let report = verify_td_pair(&a, &astar, &irr_config(job.seed))
        .map_err(|e| CliError::Input(e.to_string()))?;
    let passed = report.valid;
    let payload = serde_json::to_value(&report).expect("report serializes");
    Ok((passed, payload))
}

fn cmd_params(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let (_, a, astar) = read_pair(job)?;
    let config = irr_config(job.seed);
    let validation =
        verify_td_pair(&a, &astar, &config).map_err(|e| CliError::Input(e.to_string()))?;
    let validation_json = serde_json::to_value(&validation).expect("report serializes");
    if !validation.valid {
        return Ok((
            false,
            json!({
                "validation": validation_json,
                "error": "not a tridiagonal pair; no parameter array exists",
            }),
        ));
    }
    let orderings =
        standard_orderings(&a, &astar).map_err(|e| CliError::Input(e.to_string()))?;
    let choice = default_ordering(&orderings)
        .ok_or_else(|| CliError::Input("no standard ordering found".to_string()))?;
    let system =
        build_system(&a, &astar, choice).map_err(|e| CliError::Input(e.to_string()))?;
    match extract_parameter_array(&system) {
        Ok(array) => {
            let conditions = check_conjecture_conditions(&array);
            Ok((
                true,
                json!({
                    "validation": validation_json,
                    "system": system_summary(&system),
                    "parameter_array": array.to_json(),
                    "conditions": conditions.to_json(),
                }),
            ))
        }
        Err(e) => Ok((
            false,
            json!({
                "validation": validation_json,
                "system": system_summary(&system),
                "error": e.to_string(),
            }),
        )),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequencesFile {
    field: Option<Field>,
    theta: Vec<String>,
    theta_star: Vec<String>,
}

fn cmd_qracah_fit(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let file: SequencesFile = read_json(input_path(job)?)?;
    let field = resolve_field(file.field, job)?;
    let theta = parse_scalar_list(&file.theta, &field, "theta")?;
    let theta_star = parse_scalar_list(&file.theta_star, &field, "theta_star")?;
    let outcome =
        qracah::fit(&theta, &theta_star).map_err(|e| CliError::Input(e.to_string()))?;
    let (passed, payload) = match outcome {
        FitOutcome::Solutions(solutions) => (
            true,
            json!({
                "outcome": "solutions",
                "count": solutions.len(),
                "solutions": solutions.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            }),
        ),
        FitOutcome::ParametricFamily { d, note } => (
            true,
            json!({ "outcome": "parametric_family", "d": d, "note": note }),
        ),
        FitOutcome::NotQRacah { reason } => (
            false,
            json!({ "outcome": "not_q_racah", "reason": reason }),
        ),
    };
    Ok((passed, payload))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateFile {
    field: Option<Field>,
    d: usize,
    q: String,
    a: String,
    b: String,
    c: String,
    // Starred coefficients default to the unstarred ones.
    a_star: Option<String>,
    b_star: Option<String>,
    c_star: Option<String>,
}

fn cmd_generate(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let file: GenerateFile = read_json(input_path(job)?)?;
    let field = resolve_field(file.field, job)?;
    let q = parse_scalar(&file.q, &field, "q")?;
    let a = parse_scalar(&file.a, &field, "a")?;
    let b = parse_scalar(&file.b, &field, "b")?;
    let c = parse_scalar(&file.c, &field, "c")?;
    let a_star = parse_scalar(file.a_star.as_deref().unwrap_or(&file.a), &field, "a_star")?;
    let b_star = parse_scalar(file.b_star.as_deref().unwrap_or(&file.b), &field, "b_star")?;
    let c_star = parse_scalar(file.c_star.as_deref().unwrap_or(&file.c), &field, "c_star")?;
    let params = QRacahParameters::new(file.d, q, a, b, c, a_star, b_star, c_star)
        .map_err(|e| CliError::Input(e.to_string()))?;
    match qracah::generate_sequences(&params) {
        Ok((theta, theta_star)) => Ok((
            true,
            json!({
                "parameters": params.to_json(),
                "theta": scalar_strings(&theta),
                "theta_star": scalar_strings(&theta_star),
            }),
        )),
        Err(collision) => Ok((
            false,
            json!({
                "parameters": params.to_json(),
                "degenerate_spectrum": {
                    "family": collision.family,
                    "i": collision.i,
                    "j": collision.j,
                },
                "error": collision.to_string(),
            }),
        )),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstructFile {
    field: Option<Field>,
    theta: Vec<String>,
    theta_star: Vec<String>,
    phi: Vec<String>,
}

fn cmd_construct(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let file: ConstructFile = read_json(input_path(job)?)?;
    let field = resolve_field(file.field, job)?;
    let theta = parse_scalar_list(&file.theta, &field, "theta")?;
    let theta_star = parse_scalar_list(&file.theta_star, &field, "theta_star")?;
    let phi = parse_scalar_list(&file.phi, &field, "phi")?;
    match construct_and_verify(&theta, &theta_star, &phi, &irr_config(job.seed)) {
        Ok((system, array)) => {
            let conditions = check_conjecture_conditions(&array);
            Ok((
                true,
                json!({
                    "accepted": true,
                    "system": system_summary(&system),
                    "parameter_array": array.to_json(),
                    "conditions": conditions.to_json(),
                    "A": matrix_rows(system.a()),
                    "Astar": matrix_rows(system.astar()),
                }),
            ))
        }
        Err(SynthesisError::CandidateRejected { condition }) => Ok((
            false,
            json!({ "accepted": false, "rejected_condition": condition }),
        )),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MuFile {
    field: Option<Field>,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "Astar")]
    astar: Vec<Vec<String>>,
    polynomials: Vec<String>,
}

fn cmd_mu_test(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let file: MuFile = read_json(input_path(job)?)?;
    let field = resolve_field(file.field, job)?;
    let a = parse_matrix(&file.a, &field, "A")?;
    let astar = parse_matrix(&file.astar, &field, "Astar")?;
    let config = irr_config(job.seed);
    let validation =
        verify_td_pair(&a, &astar, &config).map_err(|e| CliError::Input(e.to_string()))?;
    let validation_json = serde_json::to_value(&validation).expect("report serializes");
    if !validation.valid {
        return Ok((
            false,
            json!({
                "validation": validation_json,
                "error": "not a tridiagonal pair; scalar actions are undefined",
            }),
        ));
    }
    let orderings =
        standard_orderings(&a, &astar).map_err(|e| CliError::Input(e.to_string()))?;
    let choice = default_ordering(&orderings)
        .ok_or_else(|| CliError::Input("no standard ordering found".to_string()))?;
    let system =
        build_system(&a, &astar, choice).map_err(|e| CliError::Input(e.to_string()))?;
    if !system.is_sharp() {
        return Ok((
            false,
            json!({
                "validation": validation_json,
                "system": system_summary(&system),
                "error": "system is not sharp; the split sequence is undefined",
            }),
        ));
    }

    let mut witnesses = Vec::with_capacity(file.polynomials.len());
    let mut passed = true;
    for src in &file.polynomials {
        let poly = MultiPoly::parse(&field, src)
            .map_err(|e| CliError::Input(format!("polynomial {src:?}: {e}")))?;
        match mu_scalar_action(&system, &poly) {
            Ok(report) => {
                let mut entry = report.to_json();
                entry["input"] = Value::String(src.clone());
                witnesses.push(entry);
            }
            Err(SynthesisError::ActionMismatch { polynomial }) => {
                passed = false;
                witnesses.push(json!({
                    "input": src,
                    "polynomial": polynomial,
                    "scalar_action_verified": false,
                }));
            }
            Err(e) => return Err(CliError::Input(format!("polynomial {src:?}: {e}"))),
        }
    }
    Ok((
        passed,
        json!({
            "system": system_summary(&system),
            "witnesses": witnesses,
        }),
    ))
}

fn cmd_corpus(job: &JobSpec) -> Result<(bool, Value), CliError> {
    let out_dir = job.output_path.as_deref().ok_or_else(|| {
        CliError::Input("corpus requires --out DIRECTORY for the instance files".to_string())
    })?;
    let grid = match &job.input_path {
        Some(path) => read_json::<CorpusGrid>(path)?,
        None => CorpusGrid::default(),
    };
    let manifest = corpus::corpus_build(out_dir, &grid, job.seed, job.max_instances)?;
    let instance_count = manifest["instances"]
        .as_array()
        .map(|a| a.len())
        .unwrap_or(0);
    let valid_count = manifest["instances"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter(|r| r["valid"] == Value::Bool(true))
                .count()
        })
        .unwrap_or(0);
    Ok((
        true,
        json!({
            "manifest_path": out_dir.join("manifest.json").display().to_string(),
            "instance_count": instance_count,
            "valid_count": valid_count,
        }),
    ))
}
