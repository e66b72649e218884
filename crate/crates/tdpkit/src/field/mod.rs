//! Exact scalar arithmetic over the rationals, prime fields GF(p) and
//! quadratic extension towers K(sqrt(delta)).
//!
//! Every value is carried in canonical form so equality is structural:
//! rationals in lowest terms with positive denominator, residues in [0, p),
//! extension elements as canonical component pairs. Towers are capped at two
//! quadratic steps, which is exactly what recovering q from
//! q^4 - (beta - 1) q^2 + 1 = 0 needs (one step for q^2, one for q).
//! Characteristic 2 is excluded: quadratic solving by discriminant fails
//! there and the q-Racah constraint q^2 != -1 degenerates.

mod parse;

pub use parse::parse_in_field;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands come from different fields")]
    MixedFields,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("delta is a square in the base field, so adjoining its root gives no field")]
    DeltaIsSquare,
    #[error("extension towers are capped at two quadratic steps")]
    ExtensionHeightExceeded,
    #[error("target field is not an extension of the element's field")]
    NotAnExtension,
    #[error("leading coefficient of a quadratic must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("denominator vanishes in characteristic {0}")]
    DenominatorVanishes(u64),
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

/// Which exact field a value lives in.
#[derive(Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// Arbitrary-precision rationals.
    Rational,
    /// Integers modulo an odd prime.
    Prime(u64),
    /// base(sqrt(delta)) for a non-square delta of the base field.
    QuadraticExt { base: Field, delta: FieldElement },
}

/// A shared, immutable field descriptor. Cloning is cheap; equality is
/// structural on the whole tower.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldKind>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Field {}

impl Field {
    /// The field of rational numbers.
    pub fn rational() -> Field {
        static RATIONAL: OnceLock<Field> = OnceLock::new();
        RATIONAL
            .get_or_init(|| Field(Arc::new(FieldKind::Rational)))
            .clone()
    }

    /// GF(p) for an odd prime p.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field(Arc::new(FieldKind::Prime(p))))
    }

    /// GF(2) and GF(3) are the only fields the exhaustive invariant-subspace
    /// oracle accepts; GF(2) is otherwise rejected by `prime`, so the oracle
    /// path constructs it here.
    pub fn gf2() -> Field {
        static GF2: OnceLock<Field> = OnceLock::new();
        GF2.get_or_init(|| Field(Arc::new(FieldKind::Prime(2))))
            .clone()
    }

    /// Adjoin a square root of `delta`, which must be a non-square of `base`.
    pub fn quadratic_ext(base: &Field, delta: FieldElement) -> Result<Field, FieldError> {
        if delta.field() != base {
            return Err(FieldError::MixedFields);
        }
        if base.height() >= 2 {
            return Err(FieldError::ExtensionHeightExceeded);
        }
        if delta.is_square() {
            return Err(FieldError::DeltaIsSquare);
        }
        Ok(Field(Arc::new(FieldKind::QuadraticExt {
            base: base.clone(),
            delta,
        })))
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0
    }

    /// 0 for rational towers, p for GF(p) towers.
    pub fn characteristic(&self) -> u64 {
        match self.kind() {
            FieldKind::Rational => 0,
            FieldKind::Prime(p) => *p,
            FieldKind::QuadraticExt { base, .. } => base.characteristic(),
        }
    }

    /// Number of quadratic steps above the base field.
    pub fn height(&self) -> usize {
        match self.kind() {
            FieldKind::QuadraticExt { base, .. } => base.height() + 1,
            _ => 0,
        }
    }

    /// Number of elements for finite fields, None for rational towers.
    pub fn order(&self) -> Option<u128> {
        match self.kind() {
            FieldKind::Rational => None,
            FieldKind::Prime(p) => Some(*p as u128),
            FieldKind::QuadraticExt { base, .. } => base.order().map(|n| n * n),
        }
    }

    /// True when `self` sits somewhere in the tower over `other` (reflexive).
    pub fn is_extension_of(&self, other: &Field) -> bool {
        if self == other {
            return true;
        }
        match self.kind() {
            FieldKind::QuadraticExt { base, .. } => base.is_extension_of(other),
            _ => false,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_integer(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_integer(1)
    }

    pub fn from_integer(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        let payload = match self.kind() {
            FieldKind::Rational => Payload::Rational(BigRational::from_integer(n.clone())),
            FieldKind::Prime(p) => Payload::Residue(bigint_mod_u64(n, *p)),
            FieldKind::QuadraticExt { base, .. } => {
                Payload::Ext(Box::new((base.from_bigint(n), base.zero())))
            }
        };
        FieldElement {
            field: self.clone(),
            payload,
        }
    }

    /// n/d interpreted in this field; in GF(p) this is n * d^(-1) mod p.
    pub fn from_ratio(&self, n: i64, d: i64) -> Result<FieldElement, FieldError> {
        self.from_big_ratio(&BigInt::from(n), &BigInt::from(d))
    }

    pub fn from_big_ratio(&self, n: &BigInt, d: &BigInt) -> Result<FieldElement, FieldError> {
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match self.kind() {
            FieldKind::Rational => Ok(FieldElement {
                field: self.clone(),
                payload: Payload::Rational(BigRational::new(n.clone(), d.clone())),
            }),
            FieldKind::Prime(p) => {
                let den = bigint_mod_u64(d, *p);
                if den == 0 {
                    return Err(FieldError::DenominatorVanishes(*p));
                }
                let num = bigint_mod_u64(n, *p);
                Ok(FieldElement {
                    field: self.clone(),
                    payload: Payload::Residue(mul_mod(num, inv_mod(den, *p), *p)),
                })
            }
            FieldKind::QuadraticExt { base, .. } => {
                let u = base.from_big_ratio(n, d)?;
                Ok(FieldElement {
                    field: self.clone(),
                    payload: Payload::Ext(Box::new((u, base.zero()))),
                })
            }
        }
    }

    /// Element u + v*sqrt(delta) of this extension field.
    pub fn from_components(
        &self,
        u: FieldElement,
        v: FieldElement,
    ) -> Result<FieldElement, FieldError> {
        match self.kind() {
            FieldKind::QuadraticExt { base, .. } => {
                if u.field() != base || v.field() != base {
                    return Err(FieldError::MixedFields);
                }
                Ok(FieldElement {
                    field: self.clone(),
                    payload: Payload::Ext(Box::new((u, v))),
                })
            }
            _ => Err(FieldError::NotAnExtension),
        }
    }

    /// sqrt(delta) itself, for extension fields.
    pub fn adjoined_root(&self) -> Result<FieldElement, FieldError> {
        match self.kind() {
            FieldKind::QuadraticExt { base, .. } => {
                self.from_components(base.zero(), base.one())
            }
            _ => Err(FieldError::NotAnExtension),
        }
    }

    /// All elements of a finite field, in a canonical order, provided the
    /// order does not exceed `cap`. None for rational towers or large fields.
    pub fn elements(&self, cap: usize) -> Option<Vec<FieldElement>> {
        let order = self.order()?;
        if order > cap as u128 {
            return None;
        }
        match self.kind() {
            FieldKind::Rational => None,
            FieldKind::Prime(p) => Some(
                (0..*p)
                    .map(|r| FieldElement {
                        field: self.clone(),
                        payload: Payload::Residue(r),
                    })
                    .collect(),
            ),
            FieldKind::QuadraticExt { base, .. } => {
                let base_elems = base.elements(cap)?;
                let mut out = Vec::with_capacity(order as usize);
                for u in &base_elems {
                    for v in &base_elems {
                        out.push(FieldElement {
                            field: self.clone(),
                            payload: Payload::Ext(Box::new((u.clone(), v.clone()))),
                        });
                    }
                }
                Some(out)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Payload {
    Rational(BigRational),
    Residue(u64),
    /// Components (u, v) of u + v*sqrt(delta), both in the base field.
    Ext(Box<(FieldElement, FieldElement)>),
}

/// An exact scalar tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    payload: Payload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithmeticOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// The checked entry point for binary arithmetic: rejects mixed descriptors
/// and division by zero instead of panicking.
pub fn field_arithmetic(
    x: &FieldElement,
    y: &FieldElement,
    op: ArithmeticOp,
) -> Result<FieldElement, FieldError> {
    if x.field != y.field {
        return Err(FieldError::MixedFields);
    }
    match op {
        ArithmeticOp::Add => Ok(x + y),
        ArithmeticOp::Sub => Ok(x - y),
        ArithmeticOp::Mul => Ok(x * y),
        ArithmeticOp::Div => x.checked_div(y),
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Rational(r) => r.is_zero(),
            Payload::Residue(r) => *r == 0,
            Payload::Ext(uv) => uv.0.is_zero() && uv.1.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    /// Components (u, v) of an extension element u + v*sqrt(delta).
    pub fn components(&self) -> Option<(&FieldElement, &FieldElement)> {
        match &self.payload {
            Payload::Ext(uv) => Some((&uv.0, &uv.1)),
            _ => None,
        }
    }

    /// The rational payload, for rational-field elements.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.payload {
            Payload::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// The residue payload, for prime-field elements.
    pub fn as_residue(&self) -> Option<u64> {
        match &self.payload {
            Payload::Residue(r) => Some(*r),
            _ => None,
        }
    }

    fn binary(&self, other: &FieldElement, op: ArithmeticOp) -> FieldElement {
        assert_eq!(
            self.field, other.field,
            "field elements from different fields; validate at the boundary"
        );
        let payload = match (&self.payload, &other.payload) {
            (Payload::Rational(a), Payload::Rational(b)) => Payload::Rational(match op {
                ArithmeticOp::Add => a + b,
                ArithmeticOp::Sub => a - b,
                ArithmeticOp::Mul => a * b,
                ArithmeticOp::Div => unreachable!("division goes through checked_div"),
            }),
            (Payload::Residue(a), Payload::Residue(b)) => {
                let p = self.field.characteristic();
                Payload::Residue(match op {
                    ArithmeticOp::Add => add_mod(*a, *b, p),
                    ArithmeticOp::Sub => sub_mod(*a, *b, p),
                    ArithmeticOp::Mul => mul_mod(*a, *b, p),
                    ArithmeticOp::Div => unreachable!("division goes through checked_div"),
                })
            }
            (Payload::Ext(x), Payload::Ext(y)) => {
                let (u1, v1) = (&x.0, &x.1);
                let (u2, v2) = (&y.0, &y.1);
                match op {
                    ArithmeticOp::Add => Payload::Ext(Box::new((u1 + u2, v1 + v2))),
                    ArithmeticOp::Sub => Payload::Ext(Box::new((u1 - u2, v1 - v2))),
                    ArithmeticOp::Mul => {
                        let delta = match self.field.kind() {
                            FieldKind::QuadraticExt { delta, .. } => delta,
                            _ => unreachable!("ext payload in non-extension field"),
                        };
                        let u = &(u1 * u2) + &(&(v1 * v2) * delta);
                        let v = &(u1 * v2) + &(u2 * v1);
                        Payload::Ext(Box::new((u, v)))
                    }
                    ArithmeticOp::Div => unreachable!("division goes through checked_div"),
                }
            }
            _ => unreachable!("payload kind does not match field kind"),
        };
        FieldElement {
            field: self.field.clone(),
            payload,
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arithmetic(self, other, ArithmeticOp::Add)
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arithmetic(self, other, ArithmeticOp::Sub)
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arithmetic(self, other, ArithmeticOp::Mul)
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields);
        }
        Ok(self * &other.invert()?)
    }

    pub fn invert(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let payload = match &self.payload {
            Payload::Rational(r) => Payload::Rational(r.recip()),
            Payload::Residue(r) => Payload::Residue(inv_mod(*r, self.field.characteristic())),
            Payload::Ext(uv) => {
                // (u + v sqrt(d))^(-1) = (u - v sqrt(d)) / (u^2 - d v^2);
                // the norm is nonzero because delta is a non-square.
                let (u, v) = (&uv.0, &uv.1);
                let delta = match self.field.kind() {
                    FieldKind::QuadraticExt { delta, .. } => delta,
                    _ => unreachable!("ext payload in non-extension field"),
                };
                let norm = &(u * u) - &(&(v * v) * delta);
                let norm_inv = norm.invert()?;
                Payload::Ext(Box::new((u * &norm_inv, &(-v) * &norm_inv)))
            }
        };
        Ok(FieldElement {
            field: self.field.clone(),
            payload,
        })
    }

    pub fn pow(&self, exp: u32) -> FieldElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power with negative exponents via inversion.
    pub fn powi(&self, exp: i64) -> Result<FieldElement, FieldError> {
        if exp >= 0 {
            Ok(self.pow(exp as u32))
        } else {
            Ok(self.invert()?.pow((-exp) as u32))
        }
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// A square root in the element's own field, if one exists there.
    pub fn sqrt(&self) -> Option<FieldElement> {
        match &self.payload {
            Payload::Rational(r) => {
                if r.is_negative() {
                    return None;
                }
                let n = exact_bigint_sqrt(r.numer())?;
                let d = exact_bigint_sqrt(r.denom())?;
                Some(FieldElement {
                    field: self.field.clone(),
                    payload: Payload::Rational(BigRational::new(n, d)),
                })
            }
            Payload::Residue(r) => {
                let p = self.field.characteristic();
                let root = sqrt_mod(*r, p)?;
                Some(FieldElement {
                    field: self.field.clone(),
                    payload: Payload::Residue(root),
                })
            }
            Payload::Ext(uv) => {
                let (u, v) = (&uv.0, &uv.1);
                let (base, delta) = match self.field.kind() {
                    FieldKind::QuadraticExt { base, delta } => (base, delta),
                    _ => unreachable!("ext payload in non-extension field"),
                };
                if v.is_zero() {
                    if let Some(s) = u.sqrt() {
                        return self.field.from_components(s, base.zero()).ok();
                    }
                    // u = (t sqrt(d))^2 = t^2 d needs u/d to be a base square.
                    let t = u.checked_div(delta).ok()?.sqrt()?;
                    return self.field.from_components(base.zero(), t).ok();
                }
                // (a + b sqrt(d))^2 = u + v sqrt(d) forces a^2 = (u ± s)/2
                // with s = sqrt(u^2 - d v^2) taken in the base field.
                let norm = &(u * u) - &(&(v * v) * delta);
                let s = norm.sqrt()?;
                let two_inv = base.from_integer(2).invert().expect("char != 2");
                for sign in [s.clone(), -&s] {
                    let w = &(u + &sign) * &two_inv;
                    if w.is_zero() {
                        continue;
                    }
                    if let Some(a) = w.sqrt() {
                        let b = v.checked_div(&(&a * &base.from_integer(2))).ok()?;
                        let cand = self.field.from_components(a, b).ok()?;
                        if &(&cand * &cand) == self {
                            return Some(cand);
                        }
                    }
                }
                None
            }
        }
    }

    /// Canonical inclusion into an extension tower over this element's field.
    pub fn embed(&self, target: &Field) -> Result<FieldElement, FieldError> {
        if &self.field == target {
            return Ok(self.clone());
        }
        match target.kind() {
            FieldKind::QuadraticExt { base, .. } => {
                let u = self.embed(base)?;
                target.from_components(u, base.zero())
            }
            _ => Err(FieldError::NotAnExtension),
        }
    }

    /// Partial inverse of `embed`: succeeds exactly when the element lies in
    /// the canonical copy of `target` inside its field.
    pub fn restrict(&self, target: &Field) -> Option<FieldElement> {
        if &self.field == target {
            return Some(self.clone());
        }
        match &self.payload {
            Payload::Ext(uv) if uv.1.is_zero() => uv.0.restrict(target),
            _ => None,
        }
    }

    /// A deterministic total order on same-field values, used to fix
    /// presentation orders (eigenvalue lists, report rows). Numeric on
    /// rationals and residues, lexicographic on extension components.
    pub fn canonical_cmp(&self, other: &FieldElement) -> std::cmp::Ordering {
        assert_eq!(self.field, other.field, "ordering across fields");
        match (&self.payload, &other.payload) {
            (Payload::Rational(a), Payload::Rational(b)) => a.cmp(b),
            (Payload::Residue(a), Payload::Residue(b)) => a.cmp(b),
            (Payload::Ext(x), Payload::Ext(y)) => x
                .0
                .canonical_cmp(&y.0)
                .then_with(|| x.1.canonical_cmp(&y.1)),
            _ => unreachable!("payload kind does not match field kind"),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl<'a, 'b> $trait<&'b FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                self.binary(rhs, $op)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.binary(&rhs, $op)
            }
        }
    };
}

forward_binop!(Add, add, ArithmeticOp::Add);
forward_binop!(Sub, sub, ArithmeticOp::Sub);
forward_binop!(Mul, mul, ArithmeticOp::Mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        &self.field.zero() - self
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Roots of a quadratic, with multiplicity, plus whether a fresh quadratic
/// extension had to be constructed to hold them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticRoots {
    pub roots: Vec<FieldElement>,
    pub extended: bool,
}

/// All roots of a2 x^2 + a1 x + a0 in the coefficients' field; over rational
/// towers of height < 2 an extension is constructed when the discriminant is
/// a non-square, while over GF(p) the search stays inside the field.
pub fn solve_quadratic(
    a2: &FieldElement,
    a1: &FieldElement,
    a0: &FieldElement,
) -> Result<QuadraticRoots, FieldError> {
    solve_quadratic_inner(a2, a1, a0, /* extend_finite: */ false)
}

/// Variant used for q-recovery: also adjoins the discriminant root over
/// GF(p) towers, so roots in GF(p^2) and GF(p^4) are reachable.
pub fn solve_quadratic_extending(
    a2: &FieldElement,
    a1: &FieldElement,
    a0: &FieldElement,
) -> Result<QuadraticRoots, FieldError> {
    solve_quadratic_inner(a2, a1, a0, /* extend_finite: */ true)
}

fn solve_quadratic_inner(
    a2: &FieldElement,
    a1: &FieldElement,
    a0: &FieldElement,
    extend_finite: bool,
) -> Result<QuadraticRoots, FieldError> {
    let field = a2.field().clone();
    if a1.field() != &field || a0.field() != &field {
        return Err(FieldError::MixedFields);
    }
    if a2.is_zero() {
        return Err(FieldError::ZeroLeadingCoefficient);
    }
    if field.characteristic() == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    let b = a1.checked_div(a2)?;
    let c = a0.checked_div(a2)?;
    let disc = &(&b * &b) - &(&field.from_integer(4) * &c);
    let two_inv = field.from_integer(2).invert().expect("char != 2");
    if let Some(s) = disc.sqrt() {
        let r1 = &(&(-&b) + &s) * &two_inv;
        let r2 = &(&(-&b) - &s) * &two_inv;
        return Ok(QuadraticRoots {
            roots: vec![r1, r2],
            extended: false,
        });
    }
    if field.characteristic() != 0 && !extend_finite {
        return Ok(QuadraticRoots {
            roots: Vec::new(),
            extended: false,
        });
    }
    let ext = Field::quadratic_ext(&field, disc)?;
    let s = ext.adjoined_root()?;
    let b_up = b.embed(&ext)?;
    let half = two_inv.embed(&ext)?;
    let r1 = &(&(-&b_up) + &s) * &half;
    let r2 = &(&(-&b_up) - &s) * &half;
    Ok(QuadraticRoots {
        roots: vec![r1, r2],
        extended: true,
    })
}

fn exact_bigint_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

fn bigint_mod_u64(n: &BigInt, p: u64) -> u64 {
    let m = n.mod_floor(&BigInt::from(p));
    let (_, digits) = m.to_u64_digits();
    match digits.as_slice() {
        [] => 0,
        [d] => *d,
        _ => unreachable!("residue exceeds u64"),
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; a != 0 mod p is the caller's invariant.
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Square root mod a prime via Tonelli-Shanks (p % 4 == 3 shortcut).
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    if p == 2 {
        return Some(a % 2);
    }
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks: p - 1 = q * 2^s with q odd.
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .expect("a quadratic non-residue exists for odd p");
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
            if i == m {
                return None;
            }
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mul_mod(b, b, p);
        }
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Deterministic Miller-Rabin, valid for all u64.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::format_element(self, f)
    }
}

#[cfg(test)]
mod tests;
