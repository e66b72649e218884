//! Shift-product polynomials, split sequences, and the three-part
//! classification condition on parameter arrays.
//!
//! For an eigenvalue sequence theta_0..theta_d the ascending products
//! tau_i = (x - theta_0)...(x - theta_{i-1}) and their descending mirrors
//! eta_i = (x - theta_d)...(x - theta_{d-i+1}) drive everything here: the
//! split sequence zeta reads E*_0 tau_i(A) E*_0 as a scalar multiple of
//! E*_0, and the condition checker evaluates the eta products at theta_0.

use crate::field::{Field, FieldElement, FieldError};
use crate::linalg::{LinalgError, Matrix};
use crate::tdsystem::{TriDiagonalSystem, Verdict};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("index {index} is out of range for a list of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("system is not sharp (rho_0 > 1)")]
    NotSharp,
    #[error("E*_0 tau_{index}(A) E*_0 is not a scalar multiple of E*_0")]
    NotScalarMultiple { index: usize },
    #[error("eigenvalue list has a repeated entry")]
    RepeatedEigenvalue,
    #[error("theta, theta_star and zeta must all have length d + 1 >= 1")]
    LengthMismatch,
    #[error("split sequence must start at 1")]
    ZetaNotOne,
    #[error("verified system violates condition {condition}")]
    OnlyIfViolated { condition: &'static str },
}

/// Which shift product to build from an eigenvalue sequence. The starred
/// kinds behave like their plain counterparts and exist so call sites can
/// say which sequence they are passing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftKind {
    Tau,
    Eta,
    TauStar,
    EtaStar,
}

/// Monic product of linear shifts Π(x - r) over an ordered root list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonicShiftProduct {
    field: Field,
    roots: Vec<FieldElement>,
}

impl MonicShiftProduct {
    pub fn new(field: &Field, roots: Vec<FieldElement>) -> Result<Self, ParamError> {
        if roots.iter().any(|r| r.field() != field) {
            return Err(FieldError::MixedFields.into());
        }
        Ok(MonicShiftProduct {
            field: field.clone(),
            roots,
        })
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[FieldElement] {
        &self.roots
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.field.one();
        for r in &self.roots {
            acc = &acc * &(x - r);
        }
        acc
    }

    pub fn eval_matrix(&self, m: &Matrix) -> Result<Matrix, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NonSquare);
        }
        if m.field() != &self.field {
            return Err(FieldError::MixedFields.into());
        }
        let mut acc = Matrix::identity(&self.field, m.rows());
        for r in &self.roots {
            acc = &acc * &m.shift(r);
        }
        Ok(acc)
    }

    /// Coefficients in descending degree order; leading entry is always 1.
    pub fn coefficients(&self) -> Vec<FieldElement> {
        let mut coeffs = vec![self.field.one()];
        for r in &self.roots {
            coeffs.push(self.field.zero());
            for k in (1..coeffs.len()).rev() {
                let lowered = &coeffs[k] - &(&coeffs[k - 1] * r);
                coeffs[k] = lowered;
            }
        }
        coeffs
    }
}

/// tau_i for ascending kinds, eta_i for descending ones, built from the
/// given eigenvalue sequence of length d + 1.
pub fn tau_eta_build(
    theta: &[FieldElement],
    which: ShiftKind,
    i: usize,
) -> Result<MonicShiftProduct, ParamError> {
    if theta.is_empty() || i > theta.len() - 1 {
        return Err(ParamError::IndexOutOfRange {
            index: i,
            len: theta.len(),
        });
    }
    let d = theta.len() - 1;
    let roots: Vec<FieldElement> = match which {
        ShiftKind::Tau | ShiftKind::TauStar => theta[..i].to_vec(),
        ShiftKind::Eta | ShiftKind::EtaStar => (0..i).map(|k| theta[d - k].clone()).collect(),
    };
    MonicShiftProduct::new(theta[0].field(), roots)
}

/// zeta_0..zeta_d with zeta_i defined through
/// E*_0 tau_i(A) E*_0 = zeta_i E*_0 / ((theta*_0 - theta*_1)...(theta*_0 - theta*_i)).
/// Each product is verified to be an exact scalar multiple of E*_0 before
/// the scalar is trusted.
pub fn split_sequence(s: &TriDiagonalSystem) -> Result<Vec<FieldElement>, ParamError> {
    if !s.is_sharp() {
        return Err(ParamError::NotSharp);
    }
    let field = s.field().clone();
    let d = s.d();
    let e0s = &s.dual_idempotents()[0];
    let theta = s.theta();
    let theta_star = s.theta_star();

    let mut zeta = Vec::with_capacity(d + 1);
    zeta.push(field.one());
    let mut prefix = Matrix::identity(&field, s.dim());
    let mut denom = field.one();
    for i in 1..=d {
        prefix = &prefix * &s.a().shift(&theta[i - 1]);
        let product = &(e0s * &prefix) * e0s;
        let scalar = scalar_multiple_of(&product, e0s)
            .ok_or(ParamError::NotScalarMultiple { index: i })?;
        denom = &denom * &(&theta_star[0] - &theta_star[i]);
        zeta.push(&scalar * &denom);
    }
    Ok(zeta)
}

/// The scalar c with m = c * reference, when one exists. The candidate is
/// read off the first nonzero reference entry and then checked entrywise.
fn scalar_multiple_of(m: &Matrix, reference: &Matrix) -> Option<FieldElement> {
    debug_assert_eq!((m.rows(), m.cols()), (reference.rows(), reference.cols()));
    let mut pivot = None;
    'outer: for i in 0..reference.rows() {
        for j in 0..reference.cols() {
            if !reference.at(i, j).is_zero() {
                pivot = Some((i, j));
                break 'outer;
            }
        }
    }
    let (pi, pj) = pivot?;
    let scalar = m
        .at(pi, pj)
        .checked_div(reference.at(pi, pj))
        .expect("pivot entry is nonzero");
    if *m == reference.scale(&scalar) {
        Some(scalar)
    } else {
        None
    }
}

/// Eigenvalue data and split sequence of one sharp system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterArray {
    d: usize,
    theta: Vec<FieldElement>,
    theta_star: Vec<FieldElement>,
    zeta: Vec<FieldElement>,
}

impl ParameterArray {
    pub fn new(
        theta: Vec<FieldElement>,
        theta_star: Vec<FieldElement>,
        zeta: Vec<FieldElement>,
    ) -> Result<Self, ParamError> {
        if theta.is_empty() || theta.len() != theta_star.len() || theta.len() != zeta.len() {
            return Err(ParamError::LengthMismatch);
        }
        let field = theta[0].field();
        if theta_star
            .iter()
            .chain(&theta)
            .chain(&zeta)
            .any(|x| x.field() != field)
        {
            return Err(FieldError::MixedFields.into());
        }
        for list in [&theta, &theta_star] {
            for (j, t) in list.iter().enumerate() {
                if list[..j].contains(t) {
                    return Err(ParamError::RepeatedEigenvalue);
                }
            }
        }
        if !zeta[0].is_one() {
            return Err(ParamError::ZetaNotOne);
        }
        Ok(ParameterArray {
            d: theta.len() - 1,
            theta,
            theta_star,
            zeta,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &Field {
        self.theta[0].field()
    }

    pub fn theta(&self) -> &[FieldElement] {
        &self.theta
    }

    pub fn theta_star(&self) -> &[FieldElement] {
        &self.theta_star
    }

    pub fn zeta(&self) -> &[FieldElement] {
        &self.zeta
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strings = |list: &[FieldElement]| -> Vec<String> {
            list.iter().map(|x| x.to_string()).collect()
        };
        json!({
            "d": self.d,
            "theta": strings(&self.theta),
            "theta_star": strings(&self.theta_star),
            "zeta": strings(&self.zeta),
        })
    }
}

/// Verdicts for the three classification conditions, with the computed
/// common ratio (conditions permitting) and the weighted zeta sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub distinctness: Verdict,
    pub ratio_independence: Verdict,
    pub nonvanishing: Verdict,
    pub common_ratio: Option<FieldElement>,
    pub weighted_sum: FieldElement,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.distinctness.passed()
            && self.ratio_independence.passed()
            && self.nonvanishing.passed()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "distinctness": self.distinctness,
            "ratio_independence": self.ratio_independence,
            "nonvanishing": self.nonvanishing,
            "common_ratio": self.common_ratio.as_ref().map(|r| r.to_string()),
            "weighted_sum": self.weighted_sum.to_string(),
            "all_pass": self.all_pass(),
        })
    }
}

fn distinctness_verdict(theta: &[FieldElement], theta_star: &[FieldElement]) -> Verdict {
    for (label, list) in [("theta", theta), ("theta_star", theta_star)] {
        for j in 0..list.len() {
            for k in 0..j {
                if list[j] == list[k] {
                    return Verdict::Fail {
                        witness: format!("{}_{} equals {}_{}", label, k, label, j),
                    };
                }
            }
        }
    }
    Verdict::Pass
}

/// Numerator/denominator pairs (theta_{i-2} - theta_{i+1}, theta_{i-1} - theta_i)
/// for 2 <= i <= d - 1.
fn ratio_pairs(theta: &[FieldElement]) -> Vec<(FieldElement, FieldElement)> {
    let d = theta.len() - 1;
    (2..d)
        .map(|i| (&theta[i - 2] - &theta[i + 1], &theta[i - 1] - &theta[i]))
        .collect()
}

/// Checks conditions (i) distinct eigenvalues, (ii) a common shift ratio
/// across both sequences, (iii) zeta_0 = 1, zeta_d != 0 and a nonzero
/// eta-weighted sum. Ratio equality is decided by cross-multiplication so
/// degenerate inputs are reported rather than dividing by zero.
pub fn check_conjecture_conditions(p: &ParameterArray) -> ConditionReport {
    let d = p.d;
    let field = p.field().clone();
    let distinctness = distinctness_verdict(&p.theta, &p.theta_star);

    let mut pairs = ratio_pairs(&p.theta);
    pairs.extend(ratio_pairs(&p.theta_star));
    let mut ratio_independence = Verdict::Pass;
    if let Some((n0, d0)) = pairs.first().cloned() {
        for (idx, (n, dn)) in pairs.iter().enumerate().skip(1) {
            if (&n0 * dn) != (n * &d0) {
                ratio_independence = Verdict::Fail {
                    witness: format!(
                        "ratio at position {} differs from the first one",
                        idx
                    ),
                };
                break;
            }
        }
    }
    let common_ratio = pairs.first().and_then(|(n, dn)| n.checked_div(dn).ok());

    let mut weighted_sum = field.zero();
    let mut nonvanishing = Verdict::Pass;
    match weighted_zeta_sum(&p.theta, &p.theta_star, &p.zeta) {
        Ok(sum) => {
            if !p.zeta[0].is_one() {
                nonvanishing = Verdict::Fail {
                    witness: "zeta_0 is not 1".into(),
                };
            } else if p.zeta[d].is_zero() {
                nonvanishing = Verdict::Fail {
                    witness: format!("zeta_{} is zero", d),
                };
            } else if sum.is_zero() {
                nonvanishing = Verdict::Fail {
                    witness: "weighted zeta sum vanishes".into(),
                };
            }
            weighted_sum = sum;
        }
        Err(e) => {
            nonvanishing = Verdict::Fail {
                witness: format!("sum could not be evaluated: {}", e),
            };
        }
    }

    ConditionReport {
        distinctness,
        ratio_independence,
        nonvanishing,
        common_ratio,
        weighted_sum,
    }
}

/// Sum over i of eta_{d-i}(theta_0) * eta*_{d-i}(theta*_0) * zeta_i.
pub fn weighted_zeta_sum(
    theta: &[FieldElement],
    theta_star: &[FieldElement],
    zeta: &[FieldElement],
) -> Result<FieldElement, ParamError> {
    if theta.is_empty() || theta.len() != theta_star.len() || theta.len() != zeta.len() {
        return Err(ParamError::LengthMismatch);
    }
    let d = theta.len() - 1;
    let field = theta[0].field().clone();
    let mut sum = field.zero();
    for (i, z) in zeta.iter().enumerate() {
        let eta = tau_eta_build(theta, ShiftKind::Eta, d - i)?.eval(&theta[0]);
        let eta_star =
            tau_eta_build(theta_star, ShiftKind::EtaStar, d - i)?.eval(&theta_star[0]);
        sum = &sum + &(&(&eta * &eta_star) * z);
    }
    Ok(sum)
}

/// Bundles the eigenvalue sequences and split sequence of a sharp system,
/// then insists the bundle satisfies all three classification conditions
/// (which a genuine system always does).
pub fn extract_parameter_array(s: &TriDiagonalSystem) -> Result<ParameterArray, ParamError> {
    let zeta = split_sequence(s)?;
    let array = ParameterArray::new(s.theta().to_vec(), s.theta_star().to_vec(), zeta)?;
    let report = check_conjecture_conditions(&array);
    if !report.distinctness.passed() {
        return Err(ParamError::OnlyIfViolated {
            condition: "distinctness",
        });
    }
    if !report.ratio_independence.passed() {
        return Err(ParamError::OnlyIfViolated {
            condition: "ratio_independence",
        });
    }
    if !report.nonvanishing.passed() {
        return Err(ParamError::OnlyIfViolated {
            condition: "nonvanishing",
        });
    }
    Ok(array)
}

#[cfg(test)]
mod tests;
