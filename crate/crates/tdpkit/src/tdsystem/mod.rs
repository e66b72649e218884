//! Tridiagonal pair recognition and system assembly.
//!
//! A pair of diagonalizable operators A, A* qualifies when each acts
//! block-tridiagonally on some ordering of the other's eigenspaces and the
//! two admit no common proper nonzero invariant subspace. The orderings that
//! work are the standard ones; a tridiagonal system fixes one standard
//! ordering per operator and carries the primitive idempotents along.

use crate::field::{Field, FieldElement, FieldError};
use crate::linalg::{
    eigen_decompose, is_irreducible_pair_with, EigenDecomposition, EigenFailure,
    IrreducibilityConfig, LinalgError, Matrix, PairDecision,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("eigenvalue list has a repeated entry")]
    RepeatedEigenvalue,
    #[error("index {index} is out of range for a list of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("idempotent adjacency graph of {operator} is not a simple path")]
    NotAPath { operator: &'static str },
    #[error("system invariant violated: {0}")]
    InvariantViolation(String),
    #[error("conjugating matrix is not invertible")]
    NotInvertible,
}

/// One choice of standard eigenvalue orderings, one sequence per operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingPair {
    pub theta: Vec<FieldElement>,
    pub theta_star: Vec<FieldElement>,
}

/// Verdict for one defining condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
    Skipped { reason: String },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub condition: &'static str,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Outcome of checking the four defining conditions of a tridiagonal pair,
/// with diameter, shape and sharpness when they are determined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_diameter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp: Option<bool>,
    pub valid: bool,
}

impl ValidationReport {
    pub fn condition(&self, name: &str) -> Option<&Verdict> {
        self.conditions
            .iter()
            .find(|c| c.condition == name)
            .map(|c| &c.verdict)
    }
}

pub const CONDITION_DIAGONALIZABLE: &str = "i_diagonalizable";
pub const CONDITION_ORDERING: &str = "ii_standard_ordering_for_A";
pub const CONDITION_DUAL_ORDERING: &str = "iii_standard_ordering_for_Astar";
pub const CONDITION_IRREDUCIBLE: &str = "iv_irreducible";

/// A verified tridiagonal system: the pair, one standard ordering per
/// operator, and the matching primitive idempotent lists.
#[derive(Clone, Debug)]
pub struct TriDiagonalSystem {
    pub(crate) d: usize,
    pub(crate) a: Matrix,
    pub(crate) astar: Matrix,
    pub(crate) theta: Vec<FieldElement>,
    pub(crate) theta_star: Vec<FieldElement>,
    pub(crate) e: Vec<Matrix>,
    pub(crate) e_star: Vec<Matrix>,
    pub(crate) rho: Vec<usize>,
    pub(crate) sharp: bool,
}

impl TriDiagonalSystem {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn astar(&self) -> &Matrix {
        &self.astar
    }

    pub fn theta(&self) -> &[FieldElement] {
        &self.theta
    }

    pub fn theta_star(&self) -> &[FieldElement] {
        &self.theta_star
    }

    pub fn idempotents(&self) -> &[Matrix] {
        &self.e
    }

    pub fn dual_idempotents(&self) -> &[Matrix] {
        &self.e_star
    }

    pub fn rho(&self) -> &[usize] {
        &self.rho
    }

    /// True when the zeroth eigenspaces are lines (rho_0 = 1).
    pub fn is_sharp(&self) -> bool {
        self.sharp
    }

    /// The same system expressed in the basis `p` maps onto: every operator
    /// and idempotent is conjugated, eigenvalues and shape are untouched.
    pub fn conjugate(&self, p: &Matrix) -> Result<TriDiagonalSystem, TdError> {
        if !p.is_square() || p.rows() != self.dim() {
            return Err(LinalgError::SizeMismatch(format!(
                "conjugator is {}x{}, system dimension is {}",
                p.rows(),
                p.cols(),
                self.dim()
            ))
            .into());
        }
        if p.field() != self.field() {
            return Err(FieldError::MixedFields.into());
        }
        let inv = p.inverse().ok_or(TdError::NotInvertible)?;
        let conj = |m: &Matrix| &(p * m) * &inv;
        Ok(TriDiagonalSystem {
            d: self.d,
            a: conj(&self.a),
            astar: conj(&self.astar),
            theta: self.theta.clone(),
            theta_star: self.theta_star.clone(),
            e: self.e.iter().map(&conj).collect(),
            e_star: self.e_star.iter().map(&conj).collect(),
            rho: self.rho.clone(),
            sharp: self.sharp,
        })
    }
}

/// E_i = prod_{j != i} (M - theta_j I) / (theta_i - theta_j): projects onto
/// the i-th eigenspace along the others whenever `eigenvalues` is exactly
/// the spectrum of a diagonalizable M.
pub fn primitive_idempotent(
    m: &Matrix,
    eigenvalues: &[FieldElement],
    i: usize,
) -> Result<Matrix, TdError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare.into());
    }
    if i >= eigenvalues.len() {
        return Err(TdError::IndexOutOfRange {
            index: i,
            len: eigenvalues.len(),
        });
    }
    if eigenvalues.iter().any(|t| t.field() != m.field()) {
        return Err(FieldError::MixedFields.into());
    }
    for (j, t) in eigenvalues.iter().enumerate() {
        if eigenvalues[..j].contains(t) {
            return Err(TdError::RepeatedEigenvalue);
        }
    }
    let mut e = Matrix::identity(m.field(), m.rows());
    for (j, theta_j) in eigenvalues.iter().enumerate() {
        if j == i {
            continue;
        }
        let denom = &eigenvalues[i] - theta_j;
        let inv = denom.invert().map_err(|_| TdError::RepeatedEigenvalue)?;
        e = &e * &m.shift(theta_j).scale(&inv);
    }
    Ok(e)
}

/// All orderings of `decomp`'s eigenvalues on which `other` acts
/// tridiagonally, detected through the idempotent products
/// E_i * other * E_j: an ordering is standard iff those vanish for
/// |i - j| > 1. With one or two eigenspaces every ordering qualifies; from
/// three on, the nonvanishing products must form a simple path, which has
/// exactly two end-to-end traversals.
fn operator_orderings(
    operator: &'static str,
    m: &Matrix,
    decomp: &EigenDecomposition,
    other: &Matrix,
) -> Result<Vec<Vec<FieldElement>>, TdError> {
    let values: Vec<FieldElement> = decomp.eigenvalues();
    let count = values.len();
    if count == 1 {
        return Ok(vec![values]);
    }
    if count == 2 {
        let reversed = vec![values[1].clone(), values[0].clone()];
        return Ok(vec![values, reversed]);
    }
    let idempotents: Result<Vec<Matrix>, TdError> = (0..count)
        .map(|i| primitive_idempotent(m, &values, i))
        .collect();
    let idempotents = idempotents?;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); count];
    for i in 0..count {
        for j in i + 1..count {
            if !(&(&idempotents[i] * other) * &idempotents[j]).is_zero() {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let endpoints: Vec<usize> = (0..count).filter(|&i| adj[i].len() == 1).collect();
    if endpoints.len() != 2 || adj.iter().any(|nb| nb.is_empty() || nb.len() > 2) {
        return Err(TdError::NotAPath { operator });
    }
    let mut order = vec![endpoints[0]];
    let mut prev = usize::MAX;
    while let Some(&next) = adj[*order.last().expect("nonempty")]
        .iter()
        .find(|&&v| v != prev)
    {
        prev = *order.last().expect("nonempty");
        order.push(next);
        if *order.last().expect("nonempty") == endpoints[1] {
            break;
        }
    }
    if order.len() != count {
        return Err(TdError::NotAPath { operator });
    }
    let forward: Vec<FieldElement> = order.iter().map(|&i| values[i].clone()).collect();
    let backward: Vec<FieldElement> = order.iter().rev().map(|&i| values[i].clone()).collect();
    Ok(vec![forward, backward])
}

/// Every pair (standard ordering for A, standard ordering for A*), i.e. the
/// cartesian product of the two per-operator lists. A genuine tridiagonal
/// pair with d >= 1 yields two orderings per operator, four pairs in all.
pub fn standard_orderings(a: &Matrix, astar: &Matrix) -> Result<Vec<OrderingPair>, TdError> {
    validate_shapes(a, astar)?;
    let ea = diagonalizable_or_err("A", a)?;
    let es = diagonalizable_or_err("A*", astar)?;
    let a_orderings = operator_orderings("A", a, &ea, astar)?;
    let astar_orderings = operator_orderings("A*", astar, &es, a)?;
    let mut out = Vec::with_capacity(a_orderings.len() * astar_orderings.len());
    for t in &a_orderings {
        for ts in &astar_orderings {
            out.push(OrderingPair {
                theta: t.clone(),
                theta_star: ts.clone(),
            });
        }
    }
    Ok(out)
}

/// The deterministic default among standard orderings: lexicographically
/// smallest serialization of the eigenvalue sequence, then of the dual one.
pub fn default_ordering(pairs: &[OrderingPair]) -> Option<&OrderingPair> {
    pairs.iter().min_by_key(|p| {
        (
            p.theta.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            p.theta_star
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>(),
        )
    })
}

fn validate_shapes(a: &Matrix, astar: &Matrix) -> Result<(), TdError> {
    if !a.is_square() || !astar.is_square() {
        return Err(LinalgError::NonSquare.into());
    }
    if a.rows() != astar.rows() {
        return Err(LinalgError::SizeMismatch(format!(
            "A is {}x{}, A* is {}x{}",
            a.rows(),
            a.cols(),
            astar.rows(),
            astar.cols()
        ))
        .into());
    }
    if a.field() != astar.field() {
        return Err(FieldError::MixedFields.into());
    }
    Ok(())
}

fn diagonalizable_or_err(
    operator: &'static str,
    m: &Matrix,
) -> Result<EigenDecomposition, TdError> {
    let decomp = eigen_decompose(m)?;
    if !decomp.diagonalizable {
        return Err(LinalgError::NotDiagonalizable { operator }.into());
    }
    Ok(decomp)
}

enum DiagOutcome {
    Diagonalizable(EigenDecomposition),
    Failed(String),
}

fn try_diagonalize(label: &str, m: &Matrix) -> Result<DiagOutcome, TdError> {
    match eigen_decompose(m) {
        Ok(e) if e.diagonalizable => Ok(DiagOutcome::Diagonalizable(e)),
        Ok(_) => Ok(DiagOutcome::Failed(format!(
            "eigenspaces of {} span less than the full space",
            label
        ))),
        Err(LinalgError::EigenvalueSearchFailed(EigenFailure::SpectrumNotInField {
            unsplit_degree,
        })) => Ok(DiagOutcome::Failed(format!(
            "characteristic polynomial of {} has an irreducible factor of degree {} over the field",
            label, unsplit_degree
        ))),
        Err(e) => Err(e.into()),
    }
}

/// Checks the four defining conditions of a tridiagonal pair and assembles
/// the report. Conditions that cannot be evaluated (because an earlier one
/// failed) are marked skipped rather than guessed. An inconclusive
/// irreducibility test surfaces as a hard error only when everything else
/// passed and the verdict genuinely hinges on it.
pub fn verify_td_pair(
    a: &Matrix,
    astar: &Matrix,
    config: &IrreducibilityConfig,
) -> Result<ValidationReport, TdError> {
    validate_shapes(a, astar)?;
    let mut conditions = Vec::with_capacity(4);

    let diag_a = try_diagonalize("A", a)?;
    let diag_astar = try_diagonalize("A*", astar)?;
    let (ea, es) = match (diag_a, diag_astar) {
        (DiagOutcome::Diagonalizable(ea), DiagOutcome::Diagonalizable(es)) => {
            conditions.push(ConditionCheck {
                condition: CONDITION_DIAGONALIZABLE,
                verdict: Verdict::Pass,
            });
            (ea, es)
        }
        (a_out, astar_out) => {
            let witness = [a_out, astar_out]
                .into_iter()
                .filter_map(|o| match o {
                    DiagOutcome::Failed(w) => Some(w),
                    DiagOutcome::Diagonalizable(_) => None,
                })
                .collect::<Vec<_>>()
                .join("; ");
            conditions.push(ConditionCheck {
                condition: CONDITION_DIAGONALIZABLE,
                verdict: Verdict::Fail { witness },
            });
            let reason = "requires both operators diagonalizable".to_string();
            for condition in [
                CONDITION_ORDERING,
                CONDITION_DUAL_ORDERING,
                CONDITION_IRREDUCIBLE,
            ] {
                conditions.push(ConditionCheck {
                    condition,
                    verdict: Verdict::Skipped {
                        reason: reason.clone(),
                    },
                });
            }
            return Ok(ValidationReport {
                conditions,
                diameter: None,
                dual_diameter: None,
                shape: None,
                sharp: None,
                valid: false,
            });
        }
    };

    let diameter = ea.pairs.len() - 1;
    let dual_diameter = es.pairs.len() - 1;

    let a_orderings = match operator_orderings("A", a, &ea, astar) {
        Ok(list) => {
            conditions.push(ConditionCheck {
                condition: CONDITION_ORDERING,
                verdict: Verdict::Pass,
            });
            Some(list)
        }
        Err(TdError::NotAPath { .. }) => {
            conditions.push(ConditionCheck {
                condition: CONDITION_ORDERING,
                verdict: Verdict::Fail {
                    witness: "idempotent adjacency graph of A under A* is not a simple path"
                        .into(),
                },
            });
            None
        }
        Err(e) => return Err(e),
    };
    let astar_ok = match operator_orderings("A*", astar, &es, a) {
        Ok(_) => {
            conditions.push(ConditionCheck {
                condition: CONDITION_DUAL_ORDERING,
                verdict: Verdict::Pass,
            });
            true
        }
        Err(TdError::NotAPath { .. }) => {
            conditions.push(ConditionCheck {
                condition: CONDITION_DUAL_ORDERING,
                verdict: Verdict::Fail {
                    witness: "idempotent adjacency graph of A* under A is not a simple path"
                        .into(),
                },
            });
            false
        }
        Err(e) => return Err(e),
    };

    let orderings_ok = a_orderings.is_some() && astar_ok;
    match is_irreducible_pair_with(a, astar, &ea, &es, config) {
        Ok(PairDecision::Irreducible { .. }) => conditions.push(ConditionCheck {
            condition: CONDITION_IRREDUCIBLE,
            verdict: Verdict::Pass,
        }),
        Ok(PairDecision::Reducible { witness, .. }) => conditions.push(ConditionCheck {
            condition: CONDITION_IRREDUCIBLE,
            verdict: Verdict::Fail {
                witness: format!(
                    "common invariant subspace with basis {:?}",
                    witness.basis_strings()
                ),
            },
        }),
        Err(LinalgError::Inconclusive { attempts }) if !orderings_ok => {
            conditions.push(ConditionCheck {
                condition: CONDITION_IRREDUCIBLE,
                verdict: Verdict::Skipped {
                    reason: format!(
                        "irreducibility test inconclusive after {} pivot candidates; \
                         verdict already settled by the ordering conditions",
                        attempts
                    ),
                },
            });
        }
        Err(e) => return Err(e.into()),
    }

    let valid = conditions.iter().all(|c| c.verdict.passed());
    if valid && diameter != dual_diameter {
        return Err(TdError::InvariantViolation(format!(
            "pair passes all four conditions but the diameter {} differs from the dual diameter {}",
            diameter, dual_diameter
        )));
    }

    let shape = a_orderings.as_ref().map(|list| {
        list[0]
            .iter()
            .map(|t| {
                ea.pair_for(t)
                    .map(|p| p.space.dim())
                    .expect("ordering values come from the decomposition")
            })
            .collect::<Vec<usize>>()
    });
    let sharp = shape.as_ref().map(|s| s[0] == 1);

    Ok(ValidationReport {
        conditions,
        diameter: Some(diameter),
        dual_diameter: Some(dual_diameter),
        shape,
        sharp,
        valid,
    })
}

/// Assembles the invariant-checked system for one standard ordering choice.
/// The caller is expected to have passed `verify_td_pair`; every defining
/// identity is still recomputed here and any breach is reported by name.
pub fn build_system(
    a: &Matrix,
    astar: &Matrix,
    choice: &OrderingPair,
) -> Result<TriDiagonalSystem, TdError> {
    validate_shapes(a, astar)?;
    let theta = choice.theta.clone();
    let theta_star = choice.theta_star.clone();
    if theta.is_empty() || theta_star.is_empty() {
        return Err(TdError::InvariantViolation(
            "empty eigenvalue sequence".into(),
        ));
    }
    if theta.len() != theta_star.len() {
        return Err(TdError::InvariantViolation(format!(
            "diameter {} differs from dual diameter {}",
            theta.len() - 1,
            theta_star.len() - 1
        )));
    }
    let d = theta.len() - 1;
    let n = a.rows();

    let e: Result<Vec<Matrix>, TdError> = (0..=d)
        .map(|i| primitive_idempotent(a, &theta, i))
        .collect();
    let e = e?;
    let e_star: Result<Vec<Matrix>, TdError> = (0..=d)
        .map(|i| primitive_idempotent(astar, &theta_star, i))
        .collect();
    let e_star = e_star?;

    check_idempotent_family("E", a, &theta, &e, astar)?;
    check_idempotent_family("E*", astar, &theta_star, &e_star, a)?;

    let rho: Vec<usize> = e.iter().map(Matrix::rank).collect();
    let rho_star: Vec<usize> = e_star.iter().map(Matrix::rank).collect();
    if rho != rho_star {
        return Err(TdError::InvariantViolation(format!(
            "rank(E_i) = {:?} does not match rank(E*_i) = {:?}",
            rho, rho_star
        )));
    }
    if rho.iter().sum::<usize>() != n {
        return Err(TdError::InvariantViolation(
            "eigenspace dimensions do not sum to the space dimension".into(),
        ));
    }
    for i in 0..=d {
        if rho[i] != rho[d - i] {
            return Err(TdError::InvariantViolation(format!(
                "shape is not symmetric: rho_{} = {} but rho_{} = {}",
                i,
                rho[i],
                d - i,
                rho[d - i]
            )));
        }
    }
    for i in 1..=d / 2 {
        if rho[i - 1] > rho[i] {
            return Err(TdError::InvariantViolation(format!(
                "shape is not unimodal: rho_{} = {} exceeds rho_{} = {}",
                i - 1,
                rho[i - 1],
                i,
                rho[i]
            )));
        }
    }
    let sharp = rho[0] == 1;

    Ok(TriDiagonalSystem {
        d,
        a: a.clone(),
        astar: astar.clone(),
        theta,
        theta_star,
        e,
        e_star,
        rho,
        sharp,
    })
}

/// The defining identities of one idempotent family, plus standardness of
/// the ordering with respect to the other operator.
fn check_idempotent_family(
    label: &str,
    m: &Matrix,
    values: &[FieldElement],
    idempotents: &[Matrix],
    other: &Matrix,
) -> Result<(), TdError> {
    let field = m.field();
    let n = m.rows();
    let d = values.len() - 1;
    let mut sum = Matrix::zero(field, n, n);
    let mut weighted = Matrix::zero(field, n, n);
    for (t, ei) in values.iter().zip(idempotents) {
        sum = &sum + ei;
        weighted = &weighted + &ei.scale(t);
    }
    if sum != Matrix::identity(field, n) {
        return Err(TdError::InvariantViolation(format!(
            "sum of {}_i is not the identity",
            label
        )));
    }
    if &weighted != m {
        return Err(TdError::InvariantViolation(format!(
            "sum of theta_i {}_i does not recover the operator",
            label
        )));
    }
    for i in 0..=d {
        for j in 0..=d {
            let prod = &idempotents[i] * &idempotents[j];
            let expected_zero = i != j;
            if expected_zero && !prod.is_zero() {
                return Err(TdError::InvariantViolation(format!(
                    "{}_{} {}_{} is nonzero",
                    label, i, label, j
                )));
            }
            if !expected_zero && prod != idempotents[i] {
                return Err(TdError::InvariantViolation(format!(
                    "{}_{} is not idempotent",
                    label, i
                )));
            }
        }
    }
    for i in 0..=d {
        for j in 0..=d {
            if i.abs_diff(j) > 1 && !(&(&idempotents[i] * other) * &idempotents[j]).is_zero() {
                return Err(TdError::InvariantViolation(format!(
                    "{}_{} (other operator) {}_{} is nonzero for |i - j| > 1",
                    label, i, label, j
                )));
            }
        }
    }
    Ok(())
}

/// One failed vanishing identity E_i M^k E_j = 0 (k < |i - j|).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleProductFailure {
    pub family: &'static str,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// Checks E_i (A*)^k E_j = 0 and E*_i A^k E*_j = 0 for all k < |i - j|,
/// naming every violation.
pub fn triple_product_vanishing(s: &TriDiagonalSystem) -> Vec<TripleProductFailure> {
    let mut failures = Vec::new();
    let d = s.d;
    let families: [(&'static str, &[Matrix], &Matrix); 2] = [
        ("E A*^k E", &s.e, &s.astar),
        ("E* A^k E*", &s.e_star, &s.a),
    ];
    for (family, idempotents, op) in families {
        let mut powers = Vec::with_capacity(d + 1);
        powers.push(Matrix::identity(s.field(), s.dim()));
        for k in 1..=d {
            powers.push(&powers[k - 1] * op);
        }
        for i in 0..=d {
            for j in 0..=d {
                for k in 0..i.abs_diff(j) {
                    if !(&(&idempotents[i] * &powers[k]) * &idempotents[j]).is_zero() {
                        failures.push(TripleProductFailure { family, i, j, k });
                    }
                }
            }
        }
    }
    failures
}
