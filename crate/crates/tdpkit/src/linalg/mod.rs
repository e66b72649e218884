//! Dense exact matrix algebra: kernels, eigenspaces, subspace spin-up, and
//! a Norton-style irreducibility test for the module generated by two
//! operators, backed by an exhaustive tiny-field oracle.

mod eigen;
mod norton;
mod subspace;

pub use eigen::{char_poly, eigen_decompose, EigenDecomposition, EigenPair};
pub use norton::{
    brute_force_invariant_subspaces, is_irreducible_pair, is_irreducible_pair_with, spin_up,
    DecisionMethod, IrreducibilityConfig, PairDecision,
};
pub(crate) use norton::random_scalar;
pub use subspace::Subspace;

use crate::field::{Field, FieldElement, FieldError};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("entry count {got} does not match {rows} x {cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("operation requires a square matrix")]
    NonSquare,
    #[error("operand shapes do not match: {0}")]
    SizeMismatch(String),
    #[error("the zero vector spans nothing to spin up")]
    ZeroVector,
    #[error("eigenvalue search failed: {0}")]
    EigenvalueSearchFailed(EigenFailure),
    #[error("operator {operator} is not diagonalizable over its field")]
    NotDiagonalizable { operator: &'static str },
    #[error("irreducibility test inconclusive after {attempts} pivot candidates")]
    Inconclusive { attempts: usize },
    #[error("exhaustive subspace enumeration only covers GF(2)/GF(3) up to dimension 4")]
    TooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EigenFailure {
    /// The characteristic polynomial has an irreducible factor of this degree
    /// over the working field, so part of the spectrum lies outside it.
    /// Reported, not guessed: the operator is not diagonalizable here, but
    /// may be over an extension.
    SpectrumNotInField { unsplit_degree: usize },
    /// The search itself could not be completed exactly (oversized prime
    /// field, unfactorable constant term, deep extension leftovers).
    Infeasible { reason: String },
}

impl std::fmt::Display for EigenFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EigenFailure::SpectrumNotInField { unsplit_degree } => write!(
                f,
                "an irreducible factor of degree {} keeps part of the spectrum outside the field",
                unsplit_degree
            ),
            EigenFailure::Infeasible { reason } => write!(f, "{}", reason),
        }
    }
}

/// A dense matrix over one exact field, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn new(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElement>,
    ) -> Result<Matrix, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| e.field() != &field) {
            return Err(FieldError::MixedFields.into());
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix::new(field.clone(), rows, cols, entries).expect("generator respects the field")
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Result<Matrix, LinalgError> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::SizeMismatch("ragged rows".into()));
        }
        Matrix::new(field.clone(), r, c, rows.into_iter().flatten().collect())
    }

    /// Test and construction convenience: integer entries mapped into the field.
    pub fn from_i64_rows(field: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_fn(field, rows.len(), rows[0].len(), |i, j| {
            field.from_integer(rows[i][j])
        })
    }

    pub fn zero(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(field, rows, cols, |_, _| field.zero())
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        Matrix::from_fn(
            field,
            n,
            n,
            |i, j| if i == j { field.one() } else { field.zero() },
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: FieldElement) {
        assert_eq!(value.field(), &self.field, "entry from a different field");
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self.at(j, i).clone()
        })
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        assert_eq!(c.field(), &self.field, "scalar from a different field");
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| c * self.at(i, j))
    }

    /// self - theta * I.
    pub fn shift(&self, theta: &FieldElement) -> Matrix {
        assert!(self.is_square(), "shift of a non-square matrix");
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            if i == j {
                self.at(i, j) - theta
            } else {
                self.at(i, j).clone()
            }
        })
    }

    pub fn pow(&self, exp: u32) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Matrix::identity(&self.field, self.rows);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .fold(self.field.zero(), |acc, (j, x)| &acc + &(self.at(i, j) * x))
            })
            .collect()
    }

    /// Entrywise canonical inclusion into an extension field.
    pub fn embed(&self, target: &Field) -> Result<Matrix, FieldError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(e.embed(target)?);
        }
        Ok(Matrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Reduced row echelon form with the pivot column list.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pivot_row) = (r..m.rows).find(|&i| !m.at(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pivot_row);
            let inv = m.at(r, col).invert().expect("pivot is nonzero");
            for j in col..m.cols {
                m.set(r, j, &inv * m.at(r, j));
            }
            for i in 0..m.rows {
                if i != r && !m.at(i, col).is_zero() {
                    let factor = m.at(i, col).clone();
                    for j in col..m.cols {
                        let val = m.at(i, j) - &(&factor * m.at(r, j));
                        m.set(i, j, val);
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact null space in canonical echelon form.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.at(row, free);
            }
            basis.push(v);
        }
        Subspace::from_vectors(&self.field, self.cols, basis)
            .expect("null space vectors are well-formed")
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::from_fn(&self.field, n, 2 * n, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else if j - n == i {
                self.field.one()
            } else {
                self.field.zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(&self.field, n, n, |i, j| {
            r.at(i, j + n).clone()
        }))
    }
}

fn assert_same_shape(a: &Matrix, b: &Matrix, what: &str) {
    assert_eq!(a.field, b.field, "{}: operands over different fields", what);
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "{}: shape {}x{} vs {}x{}",
        what,
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_same_shape(self, rhs, "matrix addition");
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.at(i, j) + rhs.at(i, j)
        })
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_same_shape(self, rhs, "matrix subtraction");
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.at(i, j) - rhs.at(i, j)
        })
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "matrix product over different fields");
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        Matrix::from_fn(&self.field, self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(self.field.zero(), |acc, k| {
                &acc + &(self.at(i, k) * rhs.at(k, j))
            })
        })
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| -self.at(i, j))
    }
}
