//! Eigenvalue sequences of the form a + b q^{2i-d} + c q^{d-2i}, and the
//! inverse problem of recovering (q, a, b, c) from a sequence.
//!
//! Sequences of this shape are exactly the solutions of the three-term
//! recurrence theta_{i-2} - theta_{i+1} = beta (theta_{i-1} - theta_i) with
//! beta = q^2 + q^{-2} + 1, provided q^4 != 1. Fitting therefore reads beta
//! off the sequence, solves two quadratics for q (extending the field at
//! most twice), solves a 3x3 linear system for the coefficients, and checks
//! every remaining row exactly.

use crate::field::{Field, FieldElement, FieldError, QuadraticRoots};
use crate::linalg::Matrix;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QRacahError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolated(&'static str),
    #[error("theta and theta_star must be nonempty lists of equal length")]
    LengthMismatch,
}

/// Two equal eigenvalues produced by a parameter choice, by position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{family}_{i} equals {family}_{j}")]
pub struct DegenerateSpectrum {
    pub family: &'static str,
    pub i: usize,
    pub j: usize,
}

/// Base point q and the six affine coefficients of both sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRacahParameters {
    d: usize,
    q: FieldElement,
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    a_star: FieldElement,
    b_star: FieldElement,
    c_star: FieldElement,
}

impl QRacahParameters {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        q: FieldElement,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        a_star: FieldElement,
        b_star: FieldElement,
        c_star: FieldElement,
    ) -> Result<Self, QRacahError> {
        let field = q.field();
        if [&a, &b, &c, &a_star, &b_star, &c_star]
            .iter()
            .any(|x| x.field() != field)
        {
            return Err(FieldError::MixedFields.into());
        }
        if q.is_zero() {
            return Err(QRacahError::ConstraintViolated("q is zero"));
        }
        let q2 = q.pow(2);
        if q2.is_one() {
            return Err(QRacahError::ConstraintViolated("q^2 equals 1"));
        }
        if (&q2 + &field.one()).is_zero() {
            return Err(QRacahError::ConstraintViolated("q^2 equals -1"));
        }
        if (&(&b * &b_star) * &(&c * &c_star)).is_zero() {
            return Err(QRacahError::ConstraintViolated(
                "one of b, c, b_star, c_star is zero",
            ));
        }
        Ok(QRacahParameters {
            d,
            q,
            a,
            b,
            c,
            a_star,
            b_star,
            c_star,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &Field {
        self.q.field()
    }

    pub fn q(&self) -> &FieldElement {
        &self.q
    }

    pub fn coefficients(&self) -> [&FieldElement; 6] {
        [
            &self.a,
            &self.b,
            &self.c,
            &self.a_star,
            &self.b_star,
            &self.c_star,
        ]
    }

    /// q^2 + q^{-2} + 1: the common shift ratio of every sequence this
    /// parameter set generates.
    pub fn beta(&self) -> FieldElement {
        let q2 = self.q.pow(2);
        let q2inv = q2.invert().expect("q is nonzero by construction");
        &(&q2 + &q2inv) + &self.q.field().one()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "d": self.d,
            "q": self.q.to_string(),
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "c": self.c.to_string(),
            "a_star": self.a_star.to_string(),
            "b_star": self.b_star.to_string(),
            "c_star": self.c_star.to_string(),
            "beta": self.beta().to_string(),
        })
    }
}

pub fn beta_of(p: &QRacahParameters) -> FieldElement {
    p.beta()
}

/// Both eigenvalue sequences theta_i = a + b q^{2i-d} + c q^{d-2i} (and the
/// starred mirror), refusing parameter choices whose sequences collide.
pub fn generate_sequences(
    p: &QRacahParameters,
) -> Result<(Vec<FieldElement>, Vec<FieldElement>), DegenerateSpectrum> {
    let theta = sequence_of(p.d, &p.q, &p.a, &p.b, &p.c);
    let theta_star = sequence_of(p.d, &p.q, &p.a_star, &p.b_star, &p.c_star);
    for (family, list) in [("theta", &theta), ("theta_star", &theta_star)] {
        for j in 0..list.len() {
            for i in 0..j {
                if list[i] == list[j] {
                    return Err(DegenerateSpectrum { family, i, j });
                }
            }
        }
    }
    Ok((theta, theta_star))
}

fn sequence_of(
    d: usize,
    q: &FieldElement,
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
) -> Vec<FieldElement> {
    (0..=d)
        .map(|i| {
            let e = 2 * i as i64 - d as i64;
            let rising = q.powi(e).expect("q is nonzero");
            let falling = q.powi(-e).expect("q is nonzero");
            &(a + &(b * &rising)) + &(c * &falling)
        })
        .collect()
}

/// Result of fitting eigenvalue data.
#[derive(Clone, Debug)]
pub enum FitOutcome {
    /// Every parameter tuple consistent with the data, closed under the
    /// q -> -q and q -> 1/q symmetries.
    Solutions(Vec<QRacahParameters>),
    /// d <= 2 leaves the shift ratio unconstrained, so infinitely many q
    /// fit; reported as a family instead of an arbitrary pick.
    ParametricFamily { d: usize, note: String },
    /// The data cannot come from admissible parameters; says why.
    NotQRacah { reason: String },
}

impl FitOutcome {
    pub fn solutions(&self) -> Option<&[QRacahParameters]> {
        match self {
            FitOutcome::Solutions(list) => Some(list),
            _ => None,
        }
    }
}

/// Recovers all admissible (q, a, b, c, a*, b*, c*) generating the given
/// sequences, extending the base field by at most two quadratic steps when
/// q itself lives outside it.
pub fn fit(
    theta: &[FieldElement],
    theta_star: &[FieldElement],
) -> Result<FitOutcome, QRacahError> {
    if theta.is_empty() || theta.len() != theta_star.len() {
        return Err(QRacahError::LengthMismatch);
    }
    let field = theta[0].field().clone();
    if theta
        .iter()
        .chain(theta_star)
        .any(|x| x.field() != &field)
    {
        return Err(FieldError::MixedFields.into());
    }
    for (family, list) in [("theta", theta), ("theta_star", theta_star)] {
        for j in 0..list.len() {
            if list[..j].contains(&list[j]) {
                return Ok(FitOutcome::NotQRacah {
                    reason: format!("{} has a repeated entry", family),
                });
            }
        }
    }
    if field.characteristic() == 2 {
        return Ok(FitOutcome::NotQRacah {
            reason: "no q with q^2 != 1 exists in characteristic 2".into(),
        });
    }
    let d = theta.len() - 1;
    if d <= 2 {
        return Ok(FitOutcome::ParametricFamily {
            d,
            note: "the shift-ratio constraint ranges over 2 <= i <= d-1, which is empty; \
                   every admissible q extends to a consistent parameter tuple"
                .into(),
        });
    }

    // Shift ratios (theta_{i-2} - theta_{i+1}) / (theta_{i-1} - theta_i)
    // must agree across 2 <= i <= d-1 and across both families; equality is
    // checked by cross-multiplication.
    let mut pairs: Vec<(FieldElement, FieldElement)> = Vec::new();
    for list in [theta, theta_star] {
        for i in 2..d {
            pairs.push((&list[i - 2] - &list[i + 1], &list[i - 1] - &list[i]));
        }
    }
    let (n0, d0) = pairs[0].clone();
    for (n, dn) in &pairs[1..] {
        if &n0 * dn != n * &d0 {
            return Ok(FitOutcome::NotQRacah {
                reason: "shift ratio is not constant across positions and families".into(),
            });
        }
    }
    let beta = match n0.checked_div(&d0) {
        Ok(b) => b,
        Err(_) => {
            return Ok(FitOutcome::NotQRacah {
                reason: "consecutive eigenvalues coincide".into(),
            })
        }
    };

    // q^4 - (beta - 1) q^2 + 1 = 0, solved as two quadratic steps.
    let one = field.one();
    let s_coeff = -&(&beta - &one);
    let s_roots: QuadraticRoots = crate::field::solve_quadratic_extending(&one, &s_coeff, &one)?;
    let Some(s0) = s_roots.roots.first().cloned() else {
        return Ok(FitOutcome::NotQRacah {
            reason: "the shift ratio does not split over height-2 extensions".into(),
        });
    };
    let k1 = s0.field().clone();
    let q_roots =
        crate::field::solve_quadratic_extending(&k1.one(), &k1.zero(), &(-&s0))?;
    let Some(q0) = q_roots.roots.first().cloned() else {
        return Ok(FitOutcome::NotQRacah {
            reason: "no square root of the shift base exists in height-2 extensions".into(),
        });
    };

    let target = q0.field().clone();
    let theta_emb: Result<Vec<FieldElement>, FieldError> =
        theta.iter().map(|x| x.embed(&target)).collect();
    let theta_emb = theta_emb?;
    let theta_star_emb: Result<Vec<FieldElement>, FieldError> =
        theta_star.iter().map(|x| x.embed(&target)).collect();
    let theta_star_emb = theta_star_emb?;

    // The four quartic roots {q, -q, 1/q, -1/q} all live in q0's field.
    let q0_inv = q0.invert().expect("roots of a unit-product quadratic");
    let mut candidates = vec![q0.clone(), -&q0, q0_inv.clone(), -&q0_inv];
    candidates.sort_by(FieldElement::canonical_cmp);
    candidates.dedup();

    let mut solutions = Vec::new();
    let mut reasons: Vec<String> = Vec::new();
    for q in candidates {
        if q.is_zero() {
            continue;
        }
        let q2 = q.pow(2);
        if q2.is_one() || (&q2 + &target.one()).is_zero() {
            push_unique(&mut reasons, "a candidate q has q^2 = 1 or q^2 = -1");
            continue;
        }
        let plain = match solve_rows(&theta_emb, &q, d) {
            Ok(x) => x,
            Err(reason) => {
                push_unique(&mut reasons, reason);
                continue;
            }
        };
        let starred = match solve_rows(&theta_star_emb, &q, d) {
            Ok(x) => x,
            Err(reason) => {
                push_unique(&mut reasons, reason);
                continue;
            }
        };
        let [a, b, c] = plain;
        let [a_star, b_star, c_star] = starred;
        match QRacahParameters::new(d, q, a, b, c, a_star, b_star, c_star) {
            Ok(p) => {
                match generate_sequences(&p) {
                    Ok((t, ts)) if t == theta_emb && ts == theta_star_emb => solutions.push(p),
                    _ => push_unique(
                        &mut reasons,
                        "a solved parameter tuple fails to regenerate the input",
                    ),
                }
            }
            Err(QRacahError::ConstraintViolated(c)) => push_unique(&mut reasons, c),
            Err(e) => return Err(e),
        }
    }

    if solutions.is_empty() {
        return Ok(FitOutcome::NotQRacah {
            reason: if reasons.is_empty() {
                "no admissible q exists".into()
            } else {
                reasons.join("; ")
            },
        });
    }
    Ok(FitOutcome::Solutions(solutions))
}

fn push_unique(reasons: &mut Vec<String>, reason: &str) {
    if !reasons.iter().any(|r| r == reason) {
        reasons.push(reason.to_string());
    }
}

/// Solves theta_i = a + b q^{2i-d} + c q^{d-2i} for (a, b, c) from rows
/// {0, 1, d}, then verifies every row.
fn solve_rows(
    theta: &[FieldElement],
    q: &FieldElement,
    d: usize,
) -> Result<[FieldElement; 3], &'static str> {
    let field = q.field().clone();
    let u = |i: usize| -> FieldElement {
        q.powi(2 * i as i64 - d as i64).expect("q is nonzero")
    };
    let rows = [0usize, 1, d];
    let mat = Matrix::from_fn(&field, 3, 3, |r, c| {
        let i = rows[r];
        match c {
            0 => field.one(),
            1 => u(i),
            _ => u(i).invert().expect("powers of a unit"),
        }
    });
    let rhs: Vec<FieldElement> = rows.iter().map(|&i| theta[i].clone()).collect();
    let inv = mat.inverse().ok_or("coefficient solve is singular")?;
    let sol = inv.mul_vec(&rhs);
    for (i, t) in theta.iter().enumerate() {
        let ui = u(i);
        let predicted = &(&sol[0] + &(&sol[1] * &ui)) + &(&sol[2] * &ui.invert().expect("unit"));
        if &predicted != t {
            return Err("a row beyond the solved three disagrees with the fit");
        }
    }
    Ok([sol[0].clone(), sol[1].clone(), sol[2].clone()])
}
