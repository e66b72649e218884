//! Subspaces kept in reduced echelon form, so membership and equality are
//! decided by direct form comparison.

use super::{LinalgError, Matrix};
use crate::field::{Field, FieldElement, FieldError};

/// A subspace of coordinate space, represented by the reduced echelon basis
/// of its row span. Canonical: two subspaces are equal iff the structs are.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    /// Echelon basis rows, pivot columns strictly increasing, pivots 1,
    /// pivot columns cleared in all other rows.
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace {
            field: field.clone(),
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        let mut s = Subspace::zero(field, ambient);
        for i in 0..ambient {
            let mut v = vec![field.zero(); ambient];
            v[i] = field.one();
            s.insert(v);
        }
        s
    }

    pub fn from_vectors(
        field: &Field,
        ambient: usize,
        vectors: impl IntoIterator<Item = Vec<FieldElement>>,
    ) -> Result<Subspace, LinalgError> {
        let mut s = Subspace::zero(field, ambient);
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::SizeMismatch(format!(
                    "vector length {} in ambient dimension {}",
                    v.len(),
                    ambient
                )));
            }
            if v.iter().any(|x| x.field() != field) {
                return Err(FieldError::MixedFields.into());
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    /// Reduces `v` against the current basis, returning the residual.
    fn reduce(&self, mut v: Vec<FieldElement>) -> Vec<FieldElement> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = &*x - &(&c * r);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Echelon-inserts `v`; returns true when the dimension grew.
    pub fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].invert().expect("leading entry is nonzero");
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (x, w) in row.iter_mut().zip(&v) {
                    *x = &*x - &(&c * w);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    /// The annihilator {x : r . x = 0 for every basis row r}, as a subspace
    /// of the same ambient space.
    pub fn perp(&self) -> Subspace {
        if self.rows.is_empty() {
            return Subspace::full(&self.field, self.ambient);
        }
        let m = Matrix::from_rows(&self.field, self.rows.clone())
            .expect("basis rows are rectangular");
        m.kernel()
    }

    /// Basis rows as display strings, for report witnesses.
    pub fn basis_strings(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect()
    }
}
