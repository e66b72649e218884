//! Deterministic instance corpus: split-basis candidates built from
//! eigenvalue sequences on a parameter grid, plus the ladder family, over
//! the rationals and GF(13). Instances are keyed, sorted by key, and written
//! as pair files next to a manifest; equal seeds give byte-identical output.

use super::{matrix_rows, parse_field_flag, render, CliError};
use crate::field::{Field, FieldElement};
use crate::linalg::Matrix;
use crate::qracah::{self, FitOutcome, QRacahParameters};
use crate::synthesis::construct_candidate;
use crate::tdsystem::{
    build_system, default_ordering, standard_orderings, verify_td_pair, TriDiagonalSystem,
};
use serde::Deserialize;
use serde_json::{json, Value};
use std::fs;
use std::path::Path;

pub const DEFAULT_CAP: usize = 500;

fn default_dims() -> Vec<usize> {
    vec![1, 2, 3, 4]
}

fn default_fields() -> Vec<String> {
    vec!["rational".to_string(), "gf:13".to_string()]
}

fn default_kinds() -> Vec<String> {
    vec!["split".to_string(), "ladder".to_string()]
}

/// Grid restriction read from the optional corpus input file. A missing
/// list means the full default range; an explicitly empty list means none.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusGrid {
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_fields")]
    pub fields: Vec<String>,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<String>,
    #[serde(default)]
    pub cap: Option<usize>,
}

impl Default for CorpusGrid {
    fn default() -> Self {
        CorpusGrid {
            dims: default_dims(),
            fields: default_fields(),
            kinds: default_kinds(),
            cap: None,
        }
    }
}

/// One corpus instance: manifest record plus, when construction succeeded,
/// the operator pair and (when valid) the verified system.
pub struct CorpusEntry {
    pub key: String,
    pub file: Option<String>,
    pub record: Value,
    pub pair: Option<(Matrix, Matrix)>,
    pub system: Option<TriDiagonalSystem>,
}

fn flag(v: Option<bool>) -> Value {
    v.map(Value::Bool).unwrap_or(Value::Null)
}

fn text(v: Option<String>) -> Value {
    v.map(Value::String).unwrap_or(Value::Null)
}

/// Key-safe rendering of a scalar: the residue before any "mod" marker,
/// with '-' and '/' folded to letters and everything else alphanumeric.
fn sanitize(s: &str) -> String {
    let prefix = match s.find(" mod ") {
        Some(idx) => &s[..idx],
        None => s,
    };
    let mut out = String::with_capacity(prefix.len());
    for ch in prefix.chars() {
        match ch {
            '-' => out.push('m'),
            '/' => out.push('d'),
            c if c.is_ascii_alphanumeric() => out.push(c.to_ascii_lowercase()),
            _ => {}
        }
    }
    out
}

fn field_label(name: &str) -> String {
    name.chars().filter(|c| c.is_ascii_alphanumeric()).collect()
}

struct EntryOutcome {
    constructed: bool,
    valid: bool,
    sharp: Option<bool>,
    qracah_fit_ok: Option<bool>,
    error: Option<String>,
    pair: Option<(Matrix, Matrix)>,
    system: Option<TriDiagonalSystem>,
}

impl EntryOutcome {
    fn failed(error: String) -> Self {
        EntryOutcome {
            constructed: false,
            valid: false,
            sharp: None,
            qracah_fit_ok: None,
            error: Some(error),
            pair: None,
            system: None,
        }
    }
}

/// Verifies one constructed pair and fills in the manifest flags.
fn examine_pair(a: Matrix, astar: Matrix, seed: u64) -> EntryOutcome {
    let config = super::irr_config(seed);
    let report = match verify_td_pair(&a, &astar, &config) {
        Ok(report) => report,
        Err(e) => {
            return EntryOutcome {
                constructed: true,
                valid: false,
                sharp: None,
                qracah_fit_ok: None,
                error: Some(e.to_string()),
                pair: Some((a, astar)),
                system: None,
            }
        }
    };
    if !report.valid {
        return EntryOutcome {
            constructed: true,
            valid: false,
            sharp: None,
            qracah_fit_ok: None,
            error: None,
            pair: Some((a, astar)),
            system: None,
        };
    }
    let built = standard_orderings(&a, &astar)
        .ok()
        .and_then(|orderings| {
            default_ordering(&orderings).map(|choice| build_system(&a, &astar, choice))
        })
        .and_then(|r| r.ok());
    let system = match built {
        Some(s) => s,
        None => {
            return EntryOutcome {
                constructed: true,
                valid: true,
                sharp: None,
                qracah_fit_ok: None,
                error: Some("verified pair did not yield a system".to_string()),
                pair: Some((a, astar)),
                system: None,
            }
        }
    };
    let (fit_ok, fit_err) = match qracah::fit(system.theta(), system.theta_star()) {
        Ok(FitOutcome::Solutions(_)) | Ok(FitOutcome::ParametricFamily { .. }) => {
            (Some(true), None)
        }
        Ok(FitOutcome::NotQRacah { .. }) => (Some(false), None),
        Err(e) => (None, Some(e.to_string())),
    };
    EntryOutcome {
        constructed: true,
        valid: true,
        sharp: Some(system.is_sharp()),
        qracah_fit_ok: fit_ok,
        error: fit_err,
        pair: Some((a, astar)),
        system: Some(system),
    }
}

fn push_entry(
    entries: &mut Vec<CorpusEntry>,
    key: String,
    kind: &str,
    field_name: &str,
    d: usize,
    outcome: EntryOutcome,
) {
    let file = outcome.pair.as_ref().map(|_| format!("{key}.json"));
    let record = json!({
        "key": key,
        "kind": kind,
        "field": field_name,
        "d": d,
        "constructed": outcome.constructed,
        "valid": outcome.valid,
        "sharp": flag(outcome.sharp),
        "qracah_fit_ok": flag(outcome.qracah_fit_ok),
        "error": text(outcome.error),
        "file": text(file.clone()),
    });
    entries.push(CorpusEntry {
        key,
        file,
        record,
        pair: outcome.pair,
        system: outcome.system,
    });
}

/// A s_k = (n-k+1) s_{k-1} + (k+1) s_{k+1} against the diagonal n-2k.
fn ladder_pair(field: &Field, n: usize) -> (Matrix, Matrix) {
    let dim = n + 1;
    let a = Matrix::from_fn(field, dim, dim, |i, j| {
        if i + 1 == j {
            field.from_integer((n - j + 1) as i64)
        } else if i == j + 1 {
            field.from_integer((j + 1) as i64)
        } else {
            field.zero()
        }
    });
    let astar = Matrix::from_fn(field, dim, dim, |i, j| {
        if i == j {
            field.from_integer(n as i64 - 2 * i as i64)
        } else {
            field.zero()
        }
    });
    (a, astar)
}

/// q grid per field: chosen so that generated eigenvalue sequences stay
/// distinct for every d <= 4 (small multiplicative order would fold them).
fn split_q_values(field: &Field) -> Vec<i64> {
    if field == &Field::rational() {
        vec![2, 3]
    } else {
        vec![2, 6]
    }
}

/// phi grids per diameter. At d = 2 the lone valid line is phi_2 - phi_1 =
/// (th_0-th_1)ths_0 - (th_0-th_2)ths_1 + (th_1-th_2)ths_2, so one choice on
/// that line is included alongside off-line rejects; d >= 3 keeps all-ones
/// as negative coverage.
fn split_phi_sets(field: &Field, d: usize, theta: &[FieldElement]) -> Vec<Vec<FieldElement>> {
    let one = field.one();
    let two = field.from_integer(2);
    match d {
        1 => vec![vec![one], vec![two]],
        2 => {
            let r = &(&(&theta[0] - &theta[1]) * &theta[0])
                - &(&(&(&theta[0] - &theta[2]) * &theta[1])
                    - &(&(&theta[1] - &theta[2]) * &theta[2]));
            vec![
                vec![one.clone(), &one + &r],
                vec![two.clone(), &two + &r],
                vec![one, two],
            ]
        }
        _ => vec![vec![one; d]],
    }
}

/// Builds every instance in the grid; deterministic in (grid, seed).
pub fn corpus_entries(grid: &CorpusGrid, seed: u64) -> Result<Vec<CorpusEntry>, CliError> {
    let mut entries = Vec::new();
    for field_name in &grid.fields {
        let field = parse_field_flag(field_name).map_err(CliError::Input)?;
        let flabel = field_label(field_name);
        for &d in &grid.dims {
            if !(1..=4).contains(&d) {
                return Err(CliError::Input(format!(
                    "corpus diameter {d} is outside the supported range 1..=4"
                )));
            }
            for kind in &grid.kinds {
                match kind.as_str() {
                    "ladder" => {
                        let key = format!("ladder_{flabel}_d{d}");
                        let (a, astar) = ladder_pair(&field, d);
                        let outcome = examine_pair(a, astar, seed);
                        push_entry(&mut entries, key, "ladder", field_name, d, outcome);
                    }
                    "split" => {
                        split_entries(&mut entries, &field, field_name, &flabel, d, seed)?;
                    }
                    other => {
                        return Err(CliError::Input(format!(
                            "unknown corpus kind {other:?}; expected \"split\" or \"ladder\""
                        )))
                    }
                }
            }
        }
    }
    entries.sort_by(|x, y| x.key.cmp(&y.key));
    Ok(entries)
}

fn split_entries(
    entries: &mut Vec<CorpusEntry>,
    field: &Field,
    field_name: &str,
    flabel: &str,
    d: usize,
    seed: u64,
) -> Result<(), CliError> {
    let zero = field.zero();
    for q_int in split_q_values(field) {
        for (b_int, c_int) in [(1i64, 2i64), (1, 3)] {
            let stem = format!("split_{flabel}_d{d}_q{q_int}_b{b_int}_c{c_int}");
            let q = field.from_integer(q_int);
            let b = field.from_integer(b_int);
            let c = field.from_integer(c_int);
            let params = match QRacahParameters::new(
                d,
                q,
                zero.clone(),
                b.clone(),
                c.clone(),
                zero.clone(),
                b,
                c,
            ) {
                Ok(p) => p,
                Err(e) => {
                    push_entry(
                        entries,
                        format!("{stem}_params"),
                        "split",
                        field_name,
                        d,
                        EntryOutcome::failed(e.to_string()),
                    );
                    continue;
                }
            };
            let (theta, theta_star) = match qracah::generate_sequences(&params) {
                Ok(seqs) => seqs,
                Err(collision) => {
                    push_entry(
                        entries,
                        format!("{stem}_spectrum"),
                        "split",
                        field_name,
                        d,
                        EntryOutcome::failed(collision.to_string()),
                    );
                    continue;
                }
            };
            for phi in split_phi_sets(field, d, &theta) {
                let tag = phi
                    .iter()
                    .map(|p| sanitize(&p.to_string()))
                    .collect::<Vec<_>>()
                    .join("_");
                let key = format!("{stem}_phi_{tag}");
                let outcome = match construct_candidate(&theta, &theta_star, &phi) {
                    Ok(cand) => examine_pair(cand.a, cand.astar, seed),
                    Err(e) => EntryOutcome::failed(e.to_string()),
                };
                push_entry(entries, key, "split", field_name, d, outcome);
            }
        }
    }
    Ok(())
}

/// Writes the instance files and manifest under `out_dir`.
pub(crate) fn corpus_build(
    out_dir: &Path,
    grid: &CorpusGrid,
    seed: u64,
    cap_flag: Option<usize>,
) -> Result<Value, CliError> {
    let cap = cap_flag.or(grid.cap).unwrap_or(DEFAULT_CAP);
    let entries = corpus_entries(grid, seed)?;
    if entries.len() > cap {
        return Err(CliError::CapExceeded {
            requested: entries.len(),
            cap,
        });
    }
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    for entry in &entries {
        if let (Some(name), Some((a, astar))) = (&entry.file, &entry.pair) {
            let doc = json!({
                "field": a.field(),
                "A": matrix_rows(a),
                "Astar": matrix_rows(astar),
            });
            super::write_text(&out_dir.join(name), &render(&doc))?;
            log::debug!("wrote corpus instance {name}");
        }
    }
    log::info!(
        "corpus: {} instances under {}",
        entries.len(),
        out_dir.display()
    );
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "instance_count": entries.len(),
        "instances": entries.iter().map(|e| e.record.clone()).collect::<Vec<_>>(),
    });
    super::write_text(&out_dir.join("manifest.json"), &render(&manifest))?;
    Ok(manifest)
}
