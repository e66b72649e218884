//! Characteristic polynomials and exact eigendecompositions.
//!
//! The characteristic polynomial is computed division-free (Berkowitz), so it
//! works verbatim over every supported field. Root finding is per-field:
//! rational root candidates over the rationals, residue exhaustion over
//! GF(p), and a restriction/formula ladder over quadratic towers. A search
//! either accounts for the whole spectrum or says exactly why it cannot;
//! nothing is approximated.

use super::{EigenFailure, LinalgError, Matrix, Subspace};
use crate::field::{is_prime_u64, Field, FieldElement, FieldKind};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// One eigenvalue with its algebraic multiplicity and exact eigenspace.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: FieldElement,
    /// Multiplicity as a root of the characteristic polynomial.
    pub algebraic: usize,
    pub space: Subspace,
}

/// The spectrum of a square matrix over its own field, eigenvalues in
/// canonical order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub pairs: Vec<EigenPair>,
    /// True iff the eigenspace dimensions sum to the matrix size.
    pub diagonalizable: bool,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> Vec<FieldElement> {
        self.pairs.iter().map(|p| p.value.clone()).collect()
    }

    pub fn pair_for(&self, value: &FieldElement) -> Option<&EigenPair> {
        self.pairs.iter().find(|p| &p.value == value)
    }
}

/// All eigenvalues lying in the matrix's field, with eigenspaces, plus the
/// diagonalizability verdict. Errors rather than guessing when part of the
/// spectrum falls outside the field (`SpectrumNotInField`) or the exact
/// search cannot be completed (`Infeasible`).
pub fn eigen_decompose(m: &Matrix) -> Result<EigenDecomposition, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare);
    }
    let n = m.rows();
    let coeffs = char_poly(m)?;
    let search = roots_in_field(&coeffs, m.field())?;
    if search.unsplit_degree > 0 {
        return Err(LinalgError::EigenvalueSearchFailed(
            EigenFailure::SpectrumNotInField {
                unsplit_degree: search.unsplit_degree,
            },
        ));
    }
    let mut pairs: Vec<EigenPair> = search
        .roots
        .into_iter()
        .map(|(value, algebraic)| {
            let space = m.shift(&value).kernel();
            EigenPair {
                value,
                algebraic,
                space,
            }
        })
        .collect();
    pairs.sort_by(|a, b| a.value.canonical_cmp(&b.value));
    let geometric: usize = pairs.iter().map(|p| p.space.dim()).sum();
    Ok(EigenDecomposition {
        pairs,
        diagonalizable: geometric == n,
    })
}

/// Eigenvalues of `m` that lie in its field, with algebraic multiplicities,
/// tolerating an unsplit remainder. Pivot search uses this: any in-field
/// eigenvalue yields a singular shift, whether or not the spectrum splits.
pub(crate) fn spectrum_in_field(
    m: &Matrix,
) -> Result<Vec<(FieldElement, usize)>, LinalgError> {
    let coeffs = char_poly(m)?;
    let search = roots_in_field(&coeffs, m.field())?;
    Ok(search.roots)
}

/// Characteristic polynomial det(lambda I - M), coefficients in descending
/// degree order, leading coefficient 1. Division-free (Berkowitz), so valid
/// over any commutative coefficient ring and in particular every field here.
pub fn char_poly(m: &Matrix) -> Result<Vec<FieldElement>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare);
    }
    let field = m.field().clone();
    let n = m.rows();
    // Work up from the trailing 1x1 principal submatrix; each enlargement is
    // a lower-triangular Toeplitz multiply whose column entries are
    // 1, -a, -(R C), -(R M C), ... for the block decomposition
    // [[a, R], [C, M]] of the current submatrix.
    let mut poly = vec![field.one(), -m.at(n - 1, n - 1)];
    for r in (0..n - 1).rev() {
        let size = n - r;
        let mut t = Vec::with_capacity(size + 1);
        t.push(field.one());
        t.push(-m.at(r, r));
        let mut w: Vec<FieldElement> = (r + 1..n).map(|i| m.at(i, r).clone()).collect();
        for k in 2..=size {
            if k > 2 {
                w = (r + 1..n)
                    .map(|i| {
                        (r + 1..n).fold(field.zero(), |acc, j| {
                            &acc + &(m.at(i, j) * &w[j - r - 1])
                        })
                    })
                    .collect();
            }
            let dot = (r + 1..n).fold(field.zero(), |acc, j| {
                &acc + &(m.at(r, j) * &w[j - r - 1])
            });
            t.push(-&dot);
        }
        let mut next = vec![field.zero(); size + 1];
        for (j, pj) in poly.iter().enumerate() {
            for (k, tk) in t.iter().enumerate() {
                if j + k <= size {
                    next[j + k] = &next[j + k] + &(tk * pj);
                }
            }
        }
        poly = next;
    }
    Ok(poly)
}

/// In-field roots of a monic-leading polynomial, with multiplicities, plus
/// the degree of the factor whose roots provably lie outside the field.
struct RootSearch {
    roots: Vec<(FieldElement, usize)>,
    unsplit_degree: usize,
}

fn infeasible(reason: String) -> LinalgError {
    LinalgError::EigenvalueSearchFailed(EigenFailure::Infeasible { reason })
}

fn roots_in_field(coeffs: &[FieldElement], field: &Field) -> Result<RootSearch, LinalgError> {
    match field.kind() {
        FieldKind::Rational => rational_roots(coeffs),
        FieldKind::Prime(p) => prime_field_roots(coeffs, field, *p),
        FieldKind::QuadraticExt { .. } => extension_roots(coeffs, field),
    }
}

/// Horner evaluation of descending coefficients.
fn poly_eval(coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    coeffs
        .iter()
        .fold(x.field().zero(), |acc, c| &(&acc * x) + c)
}

/// Synthetic division by (lambda - root); the caller guarantees `root` is a
/// root, so the remainder vanishes.
fn deflate(coeffs: &[FieldElement], root: &FieldElement) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    let mut acc = coeffs[0].clone();
    out.push(acc.clone());
    for c in &coeffs[1..coeffs.len() - 1] {
        acc = &(&acc * root) + c;
        out.push(acc.clone());
    }
    debug_assert!(
        (&(&acc * root) + &coeffs[coeffs.len() - 1]).is_zero(),
        "deflation by a non-root"
    );
    out
}

/// Divides out `x` as often as it is a root of `work`, returning the
/// multiplicity removed.
fn strip_root(work: &mut Vec<FieldElement>, x: &FieldElement) -> usize {
    let mut mult = 0;
    while work.len() > 1 && poly_eval(work, x).is_zero() {
        *work = deflate(work, x);
        mult += 1;
    }
    mult
}

/// Complete search by testing every listed element, for small finite fields.
fn exhaust_roots(coeffs: &[FieldElement], elems: &[FieldElement]) -> RootSearch {
    let mut work = coeffs.to_vec();
    let mut roots = Vec::new();
    for x in elems {
        if work.len() == 1 {
            break;
        }
        let mult = strip_root(&mut work, x);
        if mult > 0 {
            roots.push((x.clone(), mult));
        }
    }
    RootSearch {
        roots,
        unsplit_degree: work.len() - 1,
    }
}

const PRIME_EXHAUSTION_CAP: usize = 65_536;
const TRIAL_DIVISION_BOUND: u64 = 10_000;
const MAX_ROOT_CANDIDATES: usize = 20_000;
const EXT_ENUMERATION_CAP: usize = 4_096;

fn prime_field_roots(
    coeffs: &[FieldElement],
    field: &Field,
    p: u64,
) -> Result<RootSearch, LinalgError> {
    let elems = field.elements(PRIME_EXHAUSTION_CAP).ok_or_else(|| {
        infeasible(format!(
            "residue exhaustion over GF({}) exceeds the cap of {}",
            p, PRIME_EXHAUSTION_CAP
        ))
    })?;
    Ok(exhaust_roots(coeffs, &elems))
}

/// Rational roots via the rational root theorem: clear denominators, strip
/// powers of lambda, then test every ±(divisor of trailing)/(divisor of
/// leading). Complete whenever both coefficients factor, so a leftover
/// factor is certified to have no rational root.
fn rational_roots(coeffs: &[FieldElement]) -> Result<RootSearch, LinalgError> {
    let field = coeffs[0].field().clone();
    let mut lcm = BigInt::one();
    for c in coeffs {
        lcm = lcm.lcm(c.as_rational().expect("rational payload").denom());
    }
    let lcm_r = BigRational::from_integer(lcm);
    let mut int_work: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c.as_rational().expect("rational payload") * &lcm_r).to_integer())
        .collect();

    let mut work = coeffs.to_vec();
    let mut roots = Vec::new();
    let mut zero_mult = 0;
    while int_work.len() > 1 && int_work.last().expect("nonempty").is_zero() {
        int_work.pop();
        zero_mult += 1;
    }
    if zero_mult > 0 {
        let z = field.zero();
        for _ in 0..zero_mult {
            work = deflate(&work, &z);
        }
        roots.push((z, zero_mult));
    }
    if int_work.len() == 1 {
        return Ok(RootSearch {
            roots,
            unsplit_degree: 0,
        });
    }

    let cannot_factor =
        || infeasible("cannot exactly factor the trailing or leading coefficient".into());
    let trailing = factor_bigint(int_work.last().expect("nonempty")).ok_or_else(cannot_factor)?;
    let leading = factor_bigint(&int_work[0]).ok_or_else(cannot_factor)?;
    let too_many = || {
        infeasible(format!(
            "more than {} rational root candidates",
            MAX_ROOT_CANDIDATES
        ))
    };
    let numerators = divisors(&trailing, MAX_ROOT_CANDIDATES).ok_or_else(too_many)?;
    let denominators = divisors(&leading, MAX_ROOT_CANDIDATES).ok_or_else(too_many)?;
    match numerators.len().checked_mul(denominators.len()) {
        Some(n) if n <= MAX_ROOT_CANDIDATES => {}
        _ => return Err(too_many()),
    }
    let mut candidates = BTreeSet::new();
    for p in &numerators {
        for q in &denominators {
            let r = BigRational::new(p.clone(), q.clone());
            candidates.insert(-&r);
            candidates.insert(r);
        }
    }
    for cand in candidates {
        if work.len() == 1 {
            break;
        }
        let x = field.from_big_ratio(cand.numer(), cand.denom())?;
        let mult = strip_root(&mut work, &x);
        if mult > 0 {
            roots.push((x, mult));
        }
    }
    Ok(RootSearch {
        roots,
        unsplit_degree: work.len() - 1,
    })
}

/// Trial division with a Miller-Rabin finish; None when a large composite
/// cofactor survives and divisor enumeration would be incomplete.
fn factor_bigint(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    assert!(!m.is_zero(), "factoring zero");
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = 2u64;
    let mut cofactor_is_prime = false;
    while d <= TRIAL_DIVISION_BOUND {
        let db = BigInt::from(d);
        if &db * &db > m {
            cofactor_is_prime = true;
            break;
        }
        let mut e = 0u32;
        while (&m % &db).is_zero() {
            m /= &db;
            e += 1;
        }
        if e > 0 {
            factors.push((db, e));
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if m.is_one() {
        return Some(factors);
    }
    if cofactor_is_prime {
        factors.push((m, 1));
        return Some(factors);
    }
    if let Ok(u) = u64::try_from(&m) {
        if is_prime_u64(u) {
            factors.push((m, 1));
            return Some(factors);
        }
    }
    let s = m.sqrt();
    if &s * &s == m {
        if let Ok(su) = u64::try_from(&s) {
            if is_prime_u64(su) {
                factors.push((s, 2));
                return Some(factors);
            }
        }
    }
    None
}

/// All positive divisors from a prime factorization, None past the cap.
fn divisors(factors: &[(BigInt, u32)], cap: usize) -> Option<Vec<BigInt>> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
        let mut pk = BigInt::one();
        for _ in 0..=*e {
            for d in &divs {
                next.push(d * &pk);
            }
            pk *= p;
        }
        if next.len() > cap {
            return None;
        }
        divs = next;
    }
    Some(divs)
}

/// Root search over base(sqrt(delta)). Small finite extensions are
/// exhausted. Otherwise: roots in the base copy are the common base roots of
/// the component polynomials (found recursively), and once the degree drops
/// to two the discriminant decides membership of the rest. A rootless cubic
/// with base coefficients is certified unsplit, since an odd-degree
/// irreducible factor acquires no root in one quadratic step.
fn extension_roots(coeffs: &[FieldElement], field: &Field) -> Result<RootSearch, LinalgError> {
    if let Some(elems) = field.elements(EXT_ENUMERATION_CAP) {
        return Ok(exhaust_roots(coeffs, &elems));
    }
    let FieldKind::QuadraticExt { base, .. } = field.kind() else {
        unreachable!("extension_roots on a non-extension field");
    };
    let mut work = coeffs.to_vec();
    let mut roots = Vec::new();
    loop {
        let deg = work.len() - 1;
        if deg == 0 {
            return Ok(RootSearch {
                roots,
                unsplit_degree: 0,
            });
        }
        if deg == 1 {
            let r = -&work[1].checked_div(&work[0])?;
            roots.push((r, 1));
            return Ok(RootSearch {
                roots,
                unsplit_degree: 0,
            });
        }
        if deg == 2 {
            // In-field quadratic formula; extensions never have char 2.
            let b = work[1].checked_div(&work[0])?;
            let c = work[2].checked_div(&work[0])?;
            let disc = &(&b * &b) - &(&field.from_integer(4) * &c);
            let unsplit = match disc.sqrt() {
                Some(s) => {
                    let half = field.from_integer(2).invert()?;
                    let r1 = &(&(-&b) + &s) * &half;
                    let r2 = &(&(-&b) - &s) * &half;
                    if r1 == r2 {
                        roots.push((r1, 2));
                    } else {
                        roots.push((r1, 1));
                        roots.push((r2, 1));
                    }
                    0
                }
                None => 2,
            };
            return Ok(RootSearch {
                roots,
                unsplit_degree: unsplit,
            });
        }
        // Component split work = g + h*sqrt(delta): a base element is a root
        // of work iff it is a common root of g and h.
        let mut g = Vec::with_capacity(work.len());
        let mut h = Vec::with_capacity(work.len());
        for c in &work {
            let (u, v) = c.components().expect("extension payload");
            g.push(u.clone());
            h.push(v.clone());
        }
        let shared = poly_gcd(&g, &h);
        let mut progressed = false;
        if shared.len() >= 2 {
            let base_search = roots_in_field(&shared, base)?;
            for (r, _) in base_search.roots {
                let r_up = r.embed(field)?;
                let mult = strip_root(&mut work, &r_up);
                if mult > 0 {
                    roots.push((r_up, mult));
                    progressed = true;
                }
            }
        }
        if !progressed {
            if h.iter().all(|x| x.is_zero()) && deg == 3 {
                return Ok(RootSearch {
                    roots,
                    unsplit_degree: 3,
                });
            }
            return Err(infeasible(format!(
                "root search over a quadratic tower stalled at a rootless degree {} factor",
                deg
            )));
        }
    }
}

/// Strips leading zeros; an all-zero polynomial becomes the empty vector.
fn poly_trim(mut p: Vec<FieldElement>) -> Vec<FieldElement> {
    let lead = p.iter().position(|c| !c.is_zero());
    match lead {
        Some(k) => {
            p.drain(..k);
            p
        }
        None => Vec::new(),
    }
}

/// Remainder of a by b, both descending; b nonempty with nonzero lead.
fn poly_rem(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut r = poly_trim(a.to_vec());
    let lead_inv = b[0].invert().expect("nonzero divisor lead");
    while r.len() >= b.len() {
        let c = &r[0] * &lead_inv;
        for j in 0..b.len() {
            r[j] = &r[j] - &(&c * &b[j]);
        }
        r.remove(0);
        r = poly_trim(r);
    }
    r
}

/// Monic gcd by the Euclidean algorithm; empty means gcd of zeros.
fn poly_gcd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(inv) = a.first().and_then(|lead| lead.invert().ok()) {
        for c in a.iter_mut() {
            *c = &*c * &inv;
        }
    }
    a
}
