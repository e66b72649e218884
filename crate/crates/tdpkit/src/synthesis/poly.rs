//! Sparse multivariate polynomials over an exact field, with a small
//! parser for expressions like "3*x1^2*x2 - 1/2*x3".
//!
//! Terms are keyed by exponent vectors (x1 at index 0, trailing zeros
//! trimmed), so the representation is canonical and printing is
//! deterministic. Matrix evaluation substitutes a caller-supplied unit for
//! the empty monomial and multiplies factors left to right; callers that
//! need order-independence must check commutativity themselves first.

use super::SynthesisError;
use crate::field::{Field, FieldElement, FieldError};
use crate::linalg::Matrix;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: &Field) -> Self {
        MultiPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(value: FieldElement) -> Self {
        let field = value.field().clone();
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Vec::new(), value);
        }
        MultiPoly { field, terms }
    }

    /// x_index, 1-based.
    pub fn variable(field: &Field, index: usize) -> Self {
        assert!(index >= 1, "variables are numbered from x1");
        let mut exps = vec![0u32; index];
        exps[index - 1] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, field.one());
        MultiPoly {
            field: field.clone(),
            terms,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest variable index occurring with nonzero exponent.
    pub fn max_var(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, SynthesisError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields.into());
        }
        let mut terms = self.terms.clone();
        for (exps, coeff) in &other.terms {
            let entry = match terms.remove(exps) {
                Some(existing) => &existing + coeff,
                None => coeff.clone(),
            };
            if !entry.is_zero() {
                terms.insert(exps.clone(), entry);
            }
        }
        Ok(MultiPoly {
            field: self.field.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, SynthesisError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, SynthesisError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields.into());
        }
        let mut terms: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut exps = vec![0u32; ea.len().max(eb.len())];
                for (k, e) in ea.iter().enumerate() {
                    exps[k] += e;
                }
                for (k, e) in eb.iter().enumerate() {
                    exps[k] += e;
                }
                let add = ca * cb;
                let entry = match terms.remove(&exps) {
                    Some(existing) => &existing + &add,
                    None => add,
                };
                if !entry.is_zero() {
                    terms.insert(exps, entry);
                }
            }
        }
        Ok(MultiPoly {
            field: self.field.clone(),
            terms,
        })
    }

    pub fn pow(&self, exp: u32) -> Result<MultiPoly, SynthesisError> {
        let mut acc = MultiPoly::constant(self.field.one());
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Evaluation at scalars; `values[i]` substitutes x_{i+1}.
    pub fn eval(&self, values: &[FieldElement]) -> Result<FieldElement, SynthesisError> {
        if self.max_var() > values.len() {
            return Err(SynthesisError::VariableOutOfRange {
                var: self.max_var(),
                available: values.len(),
            });
        }
        if values.iter().any(|v| v.field() != &self.field) {
            return Err(FieldError::MixedFields.into());
        }
        let mut sum = self.field.zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (k, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = &term * &values[k].pow(e);
                }
            }
            sum = &sum + &term;
        }
        Ok(sum)
    }

    /// Evaluation at matrices; `mats[i]` substitutes x_{i+1} and `unit`
    /// replaces the empty monomial. Factors multiply left to right in
    /// variable order.
    pub fn eval_matrices(
        &self,
        mats: &[Matrix],
        unit: &Matrix,
    ) -> Result<Matrix, SynthesisError> {
        if self.max_var() > mats.len() {
            return Err(SynthesisError::VariableOutOfRange {
                var: self.max_var(),
                available: mats.len(),
            });
        }
        let n = unit.rows();
        if mats
            .iter()
            .any(|m| m.rows() != n || m.cols() != n || m.field() != unit.field())
        {
            return Err(crate::linalg::LinalgError::SizeMismatch(
                "polynomial evaluation needs same-shape square matrices".into(),
            )
            .into());
        }
        let mut sum = Matrix::zero(unit.field(), n, n);
        for (exps, coeff) in &self.terms {
            let mut term = unit.clone();
            for (k, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = &term * &mats[k];
                }
            }
            sum = &sum + &term.scale(&coeff.embed(unit.field())?);
        }
        Ok(sum)
    }

    /// Parses "+ - * ^" expressions over integer or a/b rational literals
    /// and variables x1, x2, ...; coefficients are mapped into `field`.
    pub fn parse(field: &Field, src: &str) -> Result<MultiPoly, SynthesisError> {
        let mut p = Parser {
            field,
            bytes: src.as_bytes(),
            pos: 0,
        };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(poly)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut pieces: Vec<String> = Vec::new();
            let coeff_str = coeff.to_string();
            if exps.iter().all(|&e| e == 0) || !coeff.is_one() {
                if coeff_str.contains(' ') {
                    pieces.push(format!("({})", coeff_str));
                } else {
                    pieces.push(coeff_str);
                }
            }
            for (k, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => pieces.push(format!("x{}", k + 1)),
                    _ => pieces.push(format!("x{}^{}", k + 1, e)),
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    field: &'a Field,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> SynthesisError {
        SynthesisError::PolyParse {
            at: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly, SynthesisError> {
        let mut negate_first = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate_first = true;
        }
        let mut acc = self.term()?;
        if negate_first {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, SynthesisError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, SynthesisError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unsigned()?;
            if exp > 64 {
                return Err(self.error("exponent larger than 64"));
            }
            return base.pow(exp as u32);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, SynthesisError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected closing parenthesis"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let index = self.unsigned()?;
                if index == 0 {
                    return Err(self.error("variables are numbered from x1"));
                }
                if index > 64 {
                    return Err(self.error("variable index larger than 64"));
                }
                Ok(MultiPoly::variable(self.field, index as usize))
            }
            Some(c) if c.is_ascii_digit() => {
                let raw = self.unsigned()?;
                let num = self.signed_range(raw)?;
                let value = if self.bytes.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let raw_den = self.unsigned()?;
                    let den = self.signed_range(raw_den)?;
                    let den_el = self.field.from_integer(den);
                    if den_el.is_zero() {
                        return Err(self.error("coefficient denominator is zero in this field"));
                    }
                    self.field
                        .from_integer(num)
                        .checked_div(&den_el)
                        .map_err(SynthesisError::from)?
                } else {
                    self.field.from_integer(num)
                };
                Ok(MultiPoly::constant(value))
            }
            Some(_) => Err(self.error("expected a number, variable, or parenthesis")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn signed_range(&self, n: u64) -> Result<i64, SynthesisError> {
        i64::try_from(n).map_err(|_| self.error("literal does not fit in 63 bits"))
    }

    fn unsigned(&mut self) -> Result<u64, SynthesisError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse::<u64>()
            .map_err(|_| self.error("number does not fit in 64 bits"))
    }
}
