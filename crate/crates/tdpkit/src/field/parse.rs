//! The scalar wire format: "n", "n/m", "n mod p", "u + v * sqrt(delta)",
//! with parenthesized components for nested towers. Emission and parsing
//! round-trip exactly.

use super::{Field, FieldElement, FieldError, FieldKind, Payload};
use num_bigint::BigInt;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

pub(super) fn format_element(x: &FieldElement, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match &x.payload {
        Payload::Rational(r) => {
            if r.denom().is_one() {
                write!(f, "{}", r.numer())
            } else {
                write!(f, "{}/{}", r.numer(), r.denom())
            }
        }
        Payload::Residue(r) => write!(f, "{} mod {}", r, x.field.characteristic()),
        Payload::Ext(uv) => {
            let delta = match x.field.kind() {
                FieldKind::QuadraticExt { delta, .. } => delta,
                _ => unreachable!("ext payload in non-extension field"),
            };
            write_component(&uv.0, f)?;
            write!(f, " + ")?;
            write_component(&uv.1, f)?;
            write!(f, " * sqrt({})", delta)
        }
    }
}

fn write_component(x: &FieldElement, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let s = x.to_string();
    if s.contains(' ') {
        write!(f, "({})", s)
    } else {
        write!(f, "{}", s)
    }
}

impl FromStr for FieldElement {
    type Err = FieldError;

    /// Parses a scalar, inferring its field from the syntax: plain integers
    /// and fractions are rational, "mod p" residues are prime-field, sqrt
    /// forms build the extension tower they spell out.
    fn from_str(s: &str) -> Result<FieldElement, FieldError> {
        let mut cur = Cursor { s: s.as_bytes(), pos: 0 };
        let x = cur.parse_element()?;
        cur.skip_ws();
        if cur.pos != cur.s.len() {
            return Err(cur.error("trailing input"));
        }
        Ok(x)
    }
}

/// Parses a scalar and coerces it into `field`: exact-field matches and
/// subfield values embed; plain integers and fractions reduce into prime
/// fields (n/m becomes n * m^(-1) mod p).
pub fn parse_in_field(s: &str, field: &Field) -> Result<FieldElement, FieldError> {
    let x: FieldElement = s.parse()?;
    if x.field() == field {
        return Ok(x);
    }
    if field.is_extension_of(x.field()) {
        return x.embed(field);
    }
    if let Payload::Rational(r) = &x.payload {
        if field.characteristic() != 0 {
            return field.from_big_ratio(r.numer(), r.denom());
        }
    }
    Err(FieldError::MixedFields)
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, msg: &str) -> FieldError {
        FieldError::Parse {
            at: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), FieldError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        let bytes = word.as_bytes();
        if self.s[self.pos..].starts_with(bytes) {
            self.pos += bytes.len();
            true
        } else {
            false
        }
    }

    fn parse_element(&mut self) -> Result<FieldElement, FieldError> {
        let first = self.parse_component()?;
        let mark = self.pos;
        self.skip_ws();
        if !self.eat(b'+') {
            self.pos = mark;
            return Ok(first);
        }
        let second = self.parse_component()?;
        self.skip_ws();
        self.expect(b'*')?;
        self.skip_ws();
        if !self.eat_word("sqrt") {
            return Err(self.error("expected 'sqrt'"));
        }
        self.expect(b'(')?;
        let delta = self.parse_element()?;
        self.skip_ws();
        self.expect(b')')?;
        let base = first.field().clone();
        if second.field() != &base || delta.field() != &base {
            return Err(FieldError::MixedFields);
        }
        let ext = Field::quadratic_ext(&base, delta)?;
        ext.from_components(first, second)
    }

    fn parse_component(&mut self) -> Result<FieldElement, FieldError> {
        self.skip_ws();
        if self.eat(b'(') {
            let x = self.parse_element()?;
            self.skip_ws();
            self.expect(b')')?;
            Ok(x)
        } else {
            self.parse_simple()
        }
    }

    fn parse_simple(&mut self) -> Result<FieldElement, FieldError> {
        self.skip_ws();
        let n = self.parse_int()?;
        let mark = self.pos;
        self.skip_ws();
        if self.eat(b'/') {
            self.skip_ws();
            let d = self.parse_uint()?;
            return Field::rational().from_big_ratio(&n, &d);
        }
        if self.eat_word("mod") {
            self.skip_ws();
            let p = self.parse_uint()?;
            let p: u64 = p
                .try_into()
                .map_err(|_| self.error("modulus does not fit in u64"))?;
            let field = if p == 2 { Field::gf2() } else { Field::prime(p)? };
            return Ok(field.from_bigint(&n));
        }
        self.pos = mark;
        Ok(Field::rational().from_bigint(&n))
    }

    fn parse_int(&mut self) -> Result<BigInt, FieldError> {
        let neg = self.eat(b'-');
        let mag = self.parse_uint()?;
        Ok(if neg { -mag } else { mag })
    }

    fn parse_uint(&mut self) -> Result<BigInt, FieldError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digit string parses"))
    }
}

/// JSON shape of a field descriptor; `delta` is a scalar string in the base.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FieldRepr {
    Rational,
    Prime { p: u64 },
    QuadraticExt { base: Box<FieldRepr>, delta: String },
}

fn to_repr(field: &Field) -> FieldRepr {
    match field.kind() {
        FieldKind::Rational => FieldRepr::Rational,
        FieldKind::Prime(p) => FieldRepr::Prime { p: *p },
        FieldKind::QuadraticExt { base, delta } => FieldRepr::QuadraticExt {
            base: Box::new(to_repr(base)),
            delta: delta.to_string(),
        },
    }
}

fn from_repr(repr: &FieldRepr) -> Result<Field, FieldError> {
    match repr {
        FieldRepr::Rational => Ok(Field::rational()),
        FieldRepr::Prime { p } => {
            if *p == 2 {
                Ok(Field::gf2())
            } else {
                Field::prime(*p)
            }
        }
        FieldRepr::QuadraticExt { base, delta } => {
            let base = from_repr(base)?;
            let delta = parse_in_field(delta, &base)?;
            Field::quadratic_ext(&base, delta)
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_repr(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Field, D::Error> {
        let repr = FieldRepr::deserialize(deserializer)?;
        from_repr(&repr).map_err(D::Error::custom)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
