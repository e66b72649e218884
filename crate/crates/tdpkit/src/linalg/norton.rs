//! Invariant-subspace search for the module generated by two operators.
//!
//! The decision procedure pivots on singular elements of the algebra
//! generated by A and A*. Spinning up a kernel vector of any pivot yields a
//! sound reducibility witness whenever the spin stops short of the full
//! space. Certifying irreducibility needs more: a pivot with a
//! one-dimensional kernel whose vector spins to the full space, and whose
//! transposed kernel vector spins to the full space under the transposed
//! generators. (If some invariant W avoided the kernel vector, the pivot
//! would act injectively on W, forcing W inside the pivot's image; the
//! transposed kernel vector then lies in the annihilator of W and its spin
//! stays proper.)
//!
//! Shifted operators are tried first: eigenspaces are their kernels, and the
//! eigendecompositions are already in hand. Seeded random algebra words are
//! the fallback, then exhaustive subspace enumeration for tiny fields.

use super::{eigen::spectrum_in_field, EigenDecomposition, LinalgError, Matrix, Subspace};
use crate::field::{Field, FieldElement, FieldKind};
use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Knobs for the randomized fallback; the seed is surfaced in reports so
/// runs are reproducible.
#[derive(Clone, Copy, Debug)]
pub struct IrreducibilityConfig {
    pub seed: u64,
    pub max_random_words: usize,
}

impl Default for IrreducibilityConfig {
    fn default() -> Self {
        IrreducibilityConfig {
            seed: 0,
            max_random_words: 64,
        }
    }
}

/// How a pair decision was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionMethod {
    /// One-dimensional spaces have no proper nonzero subspace at all.
    Trivial,
    /// Pivot operator - eigenvalue * I.
    Shift {
        operator: &'static str,
        eigenvalue: String,
    },
    /// Pivot built from the index-th seeded random algebra word.
    RandomWord { index: usize },
    /// Exhaustive subspace enumeration over a tiny field.
    Exhaustive,
}

/// Outcome of the common-invariant-subspace decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairDecision {
    Irreducible {
        method: DecisionMethod,
    },
    Reducible {
        /// A common invariant subspace, proper and nonzero.
        witness: Subspace,
        method: DecisionMethod,
    },
}

impl PairDecision {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, PairDecision::Irreducible { .. })
    }

    pub fn witness(&self) -> Option<&Subspace> {
        match self {
            PairDecision::Reducible { witness, .. } => Some(witness),
            PairDecision::Irreducible { .. } => None,
        }
    }

    pub fn method(&self) -> &DecisionMethod {
        match self {
            PairDecision::Irreducible { method } => method,
            PairDecision::Reducible { method, .. } => method,
        }
    }
}

/// Smallest subspace containing `v` that every generator maps into itself:
/// breadth-first application with echelon inserts, stopping when a full
/// sweep adds nothing (or the whole space is reached).
pub fn spin_up(v: &[FieldElement], generators: &[Matrix]) -> Result<Subspace, LinalgError> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(LinalgError::ZeroVector);
    }
    let field = v[0].field().clone();
    if v.iter().any(|x| x.field() != &field) {
        return Err(crate::field::FieldError::MixedFields.into());
    }
    let n = v.len();
    for g in generators {
        if !g.is_square() {
            return Err(LinalgError::NonSquare);
        }
        if g.rows() != n {
            return Err(LinalgError::SizeMismatch(format!(
                "generator is {}x{} but the vector has length {}",
                g.rows(),
                g.cols(),
                n
            )));
        }
        if g.field() != &field {
            return Err(crate::field::FieldError::MixedFields.into());
        }
    }
    let mut space = Subspace::zero(&field, n);
    space.insert(v.to_vec());
    let mut queue = std::collections::VecDeque::from([v.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for g in generators {
            if space.is_full() {
                return Ok(space);
            }
            let gw = g.mul_vec(&w);
            if space.insert(gw.clone()) {
                queue.push_back(gw);
            }
        }
    }
    Ok(space)
}

/// Decides whether A and A* admit a common invariant subspace other than 0
/// and the whole space; a finding of reducibility carries a witness. Both
/// operators must be diagonalizable over their field, which is checked
/// first.
pub fn is_irreducible_pair(
    a: &Matrix,
    astar: &Matrix,
    config: &IrreducibilityConfig,
) -> Result<PairDecision, LinalgError> {
    validate_pair(a, astar)?;
    let eigen_a = super::eigen_decompose(a)?;
    if !eigen_a.diagonalizable {
        return Err(LinalgError::NotDiagonalizable { operator: "A" });
    }
    let eigen_astar = super::eigen_decompose(astar)?;
    if !eigen_astar.diagonalizable {
        return Err(LinalgError::NotDiagonalizable { operator: "A*" });
    }
    is_irreducible_pair_with(a, astar, &eigen_a, &eigen_astar, config)
}

/// As `is_irreducible_pair`, reusing eigendecompositions the caller already
/// holds (both are assumed diagonalizable).
pub fn is_irreducible_pair_with(
    a: &Matrix,
    astar: &Matrix,
    eigen_a: &EigenDecomposition,
    eigen_astar: &EigenDecomposition,
    config: &IrreducibilityConfig,
) -> Result<PairDecision, LinalgError> {
    validate_pair(a, astar)?;
    let n = a.rows();
    if n == 1 {
        return Ok(PairDecision::Irreducible {
            method: DecisionMethod::Trivial,
        });
    }
    let gens = [a.clone(), astar.clone()];
    let gens_t = [a.transpose(), astar.transpose()];
    let mut attempts = 0;

    // Shifted-operator pivots, smallest nullity first; for a sharp
    // tridiagonal system the first A* shift already has nullity 1.
    let mut shifts: Vec<(usize, usize, usize)> = Vec::new();
    for (i, p) in eigen_astar.pairs.iter().enumerate() {
        shifts.push((p.space.dim(), 0, i));
    }
    for (i, p) in eigen_a.pairs.iter().enumerate() {
        shifts.push((p.space.dim(), 1, i));
    }
    shifts.sort();
    for (_, family, i) in shifts {
        let (op, label, pair) = if family == 0 {
            (astar, "A*", &eigen_astar.pairs[i])
        } else {
            (a, "A", &eigen_a.pairs[i])
        };
        attempts += 1;
        let pivot = op.shift(&pair.value);
        let method = DecisionMethod::Shift {
            operator: label,
            eigenvalue: pair.value.to_string(),
        };
        if let Some(d) = norton_probe(&gens, &gens_t, &pivot, &pair.space, method)? {
            return Ok(d);
        }
    }

    // Seeded random algebra words, shifted by an in-field eigenvalue to make
    // them singular. Words whose spectrum cannot be searched are skipped.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for index in 0..config.max_random_words {
        attempts += 1;
        let word = random_word(a, astar, &mut rng);
        let Ok(spectrum) = spectrum_in_field(&word) else {
            continue;
        };
        for (theta, _) in spectrum {
            let pivot = word.shift(&theta);
            let kernel = pivot.kernel();
            if kernel.is_zero() {
                continue;
            }
            let method = DecisionMethod::RandomWord { index };
            if let Some(d) = norton_probe(&gens, &gens_t, &pivot, &kernel, method)? {
                return Ok(d);
            }
        }
    }

    // Tiny fields: settle by enumeration rather than reporting Inconclusive.
    if brute_force_applicable(a) {
        let invariant = brute_force_invariant_subspaces(a, astar)?;
        let witness = invariant.into_iter().find(|s| !s.is_zero() && !s.is_full());
        return Ok(match witness {
            Some(w) => PairDecision::Reducible {
                witness: w,
                method: DecisionMethod::Exhaustive,
            },
            None => PairDecision::Irreducible {
                method: DecisionMethod::Exhaustive,
            },
        });
    }

    Err(LinalgError::Inconclusive { attempts })
}

/// Tries one singular pivot. Some(decision) when it settles the question,
/// None when every kernel spin is full but the kernel is too big to certify
/// irreducibility.
fn norton_probe(
    gens: &[Matrix; 2],
    gens_t: &[Matrix; 2],
    pivot: &Matrix,
    kernel: &Subspace,
    method: DecisionMethod,
) -> Result<Option<PairDecision>, LinalgError> {
    for k in kernel.basis() {
        let s = spin_up(k, gens.as_slice())?;
        if !s.is_full() {
            return Ok(Some(PairDecision::Reducible { witness: s, method }));
        }
    }
    if kernel.dim() != 1 {
        return Ok(None);
    }
    let kt = pivot.transpose().kernel();
    let st = spin_up(&kt.basis()[0], gens_t.as_slice())?;
    if st.is_full() {
        Ok(Some(PairDecision::Irreducible { method }))
    } else {
        // A space invariant under the transposed generators has an
        // annihilator invariant under the originals.
        Ok(Some(PairDecision::Reducible {
            witness: st.perp(),
            method,
        }))
    }
}

fn validate_pair(a: &Matrix, astar: &Matrix) -> Result<(), LinalgError> {
    if !a.is_square() || !astar.is_square() {
        return Err(LinalgError::NonSquare);
    }
    if a.rows() != astar.rows() {
        return Err(LinalgError::SizeMismatch(format!(
            "{}x{} paired with {}x{}",
            a.rows(),
            a.cols(),
            astar.rows(),
            astar.cols()
        )));
    }
    if a.field() != astar.field() {
        return Err(crate::field::FieldError::MixedFields.into());
    }
    Ok(())
}

/// Product of a few random pencils x A + y A* + z I: lies in the unital
/// algebra generated by the pair, with enough spread to hit usable pivots.
fn random_word(a: &Matrix, astar: &Matrix, rng: &mut ChaCha8Rng) -> Matrix {
    let field = a.field();
    let n = a.rows();
    let factors = rng.gen_range(2..=3);
    let mut m = Matrix::identity(field, n);
    for _ in 0..factors {
        let x = random_scalar(field, rng);
        let y = random_scalar(field, rng);
        let z = random_scalar(field, rng);
        let pencil = &(&a.scale(&x) + &astar.scale(&y)) + &Matrix::identity(field, n).scale(&z);
        m = &m * &pencil;
    }
    m
}

pub(crate) fn random_scalar(field: &Field, rng: &mut ChaCha8Rng) -> FieldElement {
    match field.kind() {
        FieldKind::Rational => field.from_integer(rng.gen_range(-9..=9)),
        FieldKind::Prime(p) => field.from_bigint(&BigInt::from(rng.gen_range(0..*p))),
        FieldKind::QuadraticExt { base, .. } => {
            let u = random_scalar(base, rng);
            let v = random_scalar(base, rng);
            field
                .from_components(u, v)
                .expect("components lie in the base field")
        }
    }
}

fn brute_force_applicable(m: &Matrix) -> bool {
    matches!(m.field().kind(), FieldKind::Prime(2) | FieldKind::Prime(3)) && m.rows() <= 4
}

/// Every common invariant subspace of the pair, found by enumerating all
/// subspaces of the ambient space. Restricted to GF(2)/GF(3) and dimension
/// at most 4, where the subspace count stays in the hundreds; the zero and
/// full spaces are included. Order: by dimension, then lexicographically by
/// echelon shape.
pub fn brute_force_invariant_subspaces(
    a: &Matrix,
    astar: &Matrix,
) -> Result<Vec<Subspace>, LinalgError> {
    validate_pair(a, astar)?;
    let field = a.field().clone();
    let n = a.rows();
    let q = match field.kind() {
        FieldKind::Prime(p @ (2 | 3)) => *p as usize,
        _ => return Err(LinalgError::TooLarge),
    };
    if n > 4 {
        return Err(LinalgError::TooLarge);
    }
    let elems: Vec<FieldElement> = (0..q).map(|r| field.from_integer(r as i64)).collect();
    let mut out = Vec::new();
    for k in 0..=n {
        for pivots in combinations(n, k) {
            // A reduced echelon basis is free exactly at (row i, col j) with
            // j right of the i-th pivot and j not itself a pivot column.
            let mut free: Vec<(usize, usize)> = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for j in p + 1..n {
                    if !pivots.contains(&j) {
                        free.push((i, j));
                    }
                }
            }
            let mut code = vec![0usize; free.len()];
            loop {
                let mut rows = Vec::with_capacity(k);
                for i in 0..k {
                    let mut row = vec![field.zero(); n];
                    row[pivots[i]] = field.one();
                    rows.push(row);
                }
                for (slot, &(i, j)) in free.iter().enumerate() {
                    rows[i][j] = elems[code[slot]].clone();
                }
                let space = Subspace::from_vectors(&field, n, rows)?;
                if is_invariant(&space, a) && is_invariant(&space, astar) {
                    out.push(space);
                }
                // next mixed-radix code in base q
                let mut pos = 0;
                loop {
                    if pos == code.len() {
                        break;
                    }
                    code[pos] += 1;
                    if code[pos] < q {
                        break;
                    }
                    code[pos] = 0;
                    pos += 1;
                }
                if pos == code.len() {
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn is_invariant(space: &Subspace, m: &Matrix) -> bool {
    space.basis().iter().all(|v| space.contains(&m.mul_vec(v)))
}

/// k-subsets of {0..n} in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}
