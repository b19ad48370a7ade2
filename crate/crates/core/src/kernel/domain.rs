//! Coefficient domains and their exact elements.
//!
//! A [`Domain`] is a runtime tag that selects the arithmetic; a [`Scalar`] is
//! a plain value that only makes sense together with the domain it was built
//! for. All operations take the domain as the receiver, so values stay small
//! and hashable.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::poly::raw;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest modulus accepted for prime fields and residue rings.
pub const MODULUS_LIMIT: u64 = 1 << 32;

/// An exact scalar. Which variant is valid is decided by the owning [`Domain`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rat(Rational),
    Int(BigInt),
    Mod(u64),
    /// Coordinates in the power basis `1, a, …, a^{d-1}` of an extension.
    Ext(Vec<Scalar>),
}

/// A simple algebraic extension `base[a]/(modulus)`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct ExtensionField {
    base: Domain,
    /// Monic, constant term first, degree ≥ 2.
    modulus: Vec<Scalar>,
}

impl ExtensionField {
    pub fn base(&self) -> &Domain {
        &self.base
    }

    pub fn modulus(&self) -> &[Scalar] {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Rationals,
    PrimeField(u64),
    Integers,
    Residues(u64),
    Extension(Arc<ExtensionField>),
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

fn bigint_mod(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().expect("reduced residue fits")
}

impl Domain {
    pub fn prime_field(p: u64) -> Result<Domain> {
        if p >= MODULUS_LIMIT {
            return Err(Error::InvalidDomain(format!("prime {p} is above the supported limit 2^32")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidDomain(format!("{p} is not prime")));
        }
        Ok(Domain::PrimeField(p))
    }

    pub fn residues(m: u64) -> Result<Domain> {
        if !(2..MODULUS_LIMIT).contains(&m) {
            return Err(Error::InvalidDomain(format!("residue modulus {m} must lie in [2, 2^32)")));
        }
        Ok(Domain::Residues(m))
    }

    /// `base[a]/(minpoly)`; the polynomial is made monic and must be irreducible.
    pub fn extension(base: Domain, minpoly: Vec<Scalar>) -> Result<Domain> {
        if !matches!(base, Domain::Rationals | Domain::PrimeField(_)) {
            return Err(Error::InvalidDomain(format!("extension base must be Q or GF(p), got {base}")));
        }
        let mut m = minpoly;
        raw::trim(&base, &mut m);
        if m.len() < 3 {
            return Err(Error::InvalidDomain("extension polynomial must have degree ≥ 2".into()));
        }
        let m = raw::monic(&base, &m);
        let poly = super::poly::Poly::new(base.clone(), m.clone());
        let factors = super::factor::poly_factor(&poly)?;
        if factors.len() != 1 || factors[0].1 != 1 {
            return Err(Error::InvalidDomain(format!("{poly} is not irreducible over {base}")));
        }
        Ok(Domain::Extension(Arc::new(ExtensionField { base, modulus: m })))
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Domain::Rationals | Domain::PrimeField(_) | Domain::Extension(_))
    }

    pub fn require_field(&self) -> Result<()> {
        if self.is_field() {
            Ok(())
        } else {
            Err(Error::NonFieldDomain(self.to_string()))
        }
    }

    /// 0 for Q and Z, p for GF(p) and its extensions, m for Z/m.
    pub fn characteristic(&self) -> u64 {
        match self {
            Domain::Rationals | Domain::Integers => 0,
            Domain::PrimeField(p) => *p,
            Domain::Residues(m) => *m,
            Domain::Extension(e) => e.base.characteristic(),
        }
    }

    /// Degree over the prime field (1 unless this is an extension).
    pub fn degree(&self) -> usize {
        match self {
            Domain::Extension(e) => e.degree(),
            _ => 1,
        }
    }

    pub fn prime_subfield(&self) -> Domain {
        match self {
            Domain::Extension(e) => e.base.clone(),
            other => other.clone(),
        }
    }

    pub fn as_extension(&self) -> Option<&ExtensionField> {
        match self {
            Domain::Extension(e) => Some(e),
            _ => None,
        }
    }

    /// Number of elements when finite.
    pub fn size(&self) -> Option<u64> {
        match self {
            Domain::PrimeField(p) | Domain::Residues(p) => Some(*p),
            Domain::Extension(e) => {
                let q = e.base.size()?;
                q.checked_pow(e.degree() as u32)
            }
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Domain::Rationals => Scalar::Rat(Rational::zero()),
            Domain::Integers => Scalar::Int(BigInt::zero()),
            Domain::PrimeField(_) | Domain::Residues(_) => Scalar::Mod(0),
            Domain::Extension(e) => Scalar::Ext(vec![e.base.zero(); e.degree()]),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            Domain::Rationals => Scalar::Rat(Rational::from_integer(n.clone())),
            Domain::Integers => Scalar::Int(n.clone()),
            Domain::PrimeField(p) | Domain::Residues(p) => Scalar::Mod(bigint_mod(n, *p)),
            Domain::Extension(e) => self.embed(e.base.from_bigint(n)),
        }
    }

    /// Image of a rational number; fails when the denominator is not invertible.
    pub fn from_rational(&self, q: &Rational) -> Result<Scalar> {
        let fail = || Error::InvalidLiteral { literal: q.to_string(), domain: self.to_string() };
        match self {
            Domain::Rationals => Ok(Scalar::Rat(q.clone())),
            Domain::Integers => {
                if q.is_integer() {
                    Ok(Scalar::Int(q.to_integer()))
                } else {
                    Err(fail())
                }
            }
            Domain::PrimeField(p) | Domain::Residues(p) => {
                let num = bigint_mod(q.numer(), *p);
                let den = bigint_mod(q.denom(), *p);
                let inv = mod_inverse(den, *p).ok_or_else(fail)?;
                Ok(Scalar::Mod(((num as u128 * inv as u128) % *p as u128) as u64))
            }
            Domain::Extension(e) => Ok(self.embed(e.base.from_rational(q)?)),
        }
    }

    /// Embeds a base-field scalar into an extension (identity otherwise).
    pub fn embed(&self, base_value: Scalar) -> Scalar {
        match self {
            Domain::Extension(e) => {
                let mut coeffs = vec![e.base.zero(); e.degree()];
                coeffs[0] = base_value;
                Scalar::Ext(coeffs)
            }
            _ => base_value,
        }
    }

    /// The generator `a` of an extension.
    pub fn generator(&self) -> Option<Scalar> {
        let e = self.as_extension()?;
        let mut coeffs = vec![e.base.zero(); e.degree()];
        coeffs[1] = e.base.one();
        Some(Scalar::Ext(coeffs))
    }

    /// Builds an extension element from power-basis coordinates (reduced mod the modulus).
    pub fn ext_element(&self, coeffs: Vec<Scalar>) -> Result<Scalar> {
        let e = self.as_extension().ok_or_else(|| Error::InvalidDomain(format!("{self} is not an extension")))?;
        let mut c = coeffs;
        raw::trim(&e.base, &mut c);
        let r = raw::rem(&e.base, &c, &e.modulus);
        Ok(self.pack_ext(e, r))
    }

    fn pack_ext(&self, e: &ExtensionField, mut r: Vec<Scalar>) -> Scalar {
        r.resize(e.degree(), e.base.zero());
        Scalar::Ext(r)
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Int(n) => n.is_zero(),
            Scalar::Mod(v) => *v == 0,
            Scalar::Ext(c) => {
                let base = &self.as_extension().expect("extension scalar").base;
                c.iter().all(|x| base.is_zero(x))
            }
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (_, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x + y),
            (Domain::PrimeField(p) | Domain::Residues(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p),
            (Domain::Extension(e), Scalar::Ext(x), Scalar::Ext(y)) => {
                Scalar::Ext(x.iter().zip(y).map(|(u, v)| e.base.add(u, v)).collect())
            }
            _ => panic!("scalar {a:?} or {b:?} does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (_, Scalar::Rat(x)) => Scalar::Rat(-x),
            (_, Scalar::Int(x)) => Scalar::Int(-x),
            (Domain::PrimeField(p) | Domain::Residues(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            (Domain::Extension(e), Scalar::Ext(x)) => Scalar::Ext(x.iter().map(|u| e.base.neg(u)).collect()),
            _ => panic!("scalar {a:?} does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (_, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x * y),
            (Domain::PrimeField(p) | Domain::Residues(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (Domain::Extension(e), Scalar::Ext(x), Scalar::Ext(y)) => {
                let prod = raw::mul(&e.base, x, y);
                let r = raw::rem(&e.base, &prod, &e.modulus);
                self.pack_ext(e, r)
            }
            _ => panic!("scalar {a:?} or {b:?} does not belong to {self}"),
        }
    }

    /// Multiplicative inverse, when it exists in this domain.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (_, Scalar::Rat(x)) => Some(Scalar::Rat(x.recip())),
            (_, Scalar::Int(x)) => {
                if x.abs().is_one() {
                    Some(Scalar::Int(x.clone()))
                } else {
                    None
                }
            }
            (Domain::PrimeField(p) | Domain::Residues(p), Scalar::Mod(x)) => mod_inverse(*x, *p).map(Scalar::Mod),
            (Domain::Extension(e), Scalar::Ext(x)) => {
                let mut x = x.clone();
                raw::trim(&e.base, &mut x);
                let (g, s, _) = raw::xgcd(&e.base, &x, &e.modulus);
                if g.len() != 1 {
                    return None;
                }
                let r = raw::rem(&e.base, &s, &e.modulus);
                Some(self.pack_ext(e, r))
            }
            _ => panic!("scalar {a:?} does not belong to {self}"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    pub fn pow(&self, a: &Scalar, e: &BigUint) -> Scalar {
        let mut result = self.one();
        for i in (0..e.bits()).rev() {
            result = self.mul(&result, &result);
            if e.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    /// `n · a` for a machine integer `n`.
    pub fn scale_int(&self, a: &Scalar, n: i64) -> Scalar {
        self.mul(&self.from_i64(n), a)
    }

    /// The rational value of a prime-subfield element in characteristic 0.
    pub fn to_rational(&self, a: &Scalar) -> Option<Rational> {
        match a {
            Scalar::Rat(q) => Some(q.clone()),
            Scalar::Int(n) => Some(Rational::from_integer(n.clone())),
            Scalar::Ext(c) => {
                let base = &self.as_extension()?.base;
                if c[1..].iter().all(|x| base.is_zero(x)) {
                    base.to_rational(&c[0])
                } else {
                    None
                }
            }
            Scalar::Mod(_) => None,
        }
    }

    /// Deterministic pseudo-random element with small height.
    pub fn random<R: Rng>(&self, rng: &mut R) -> Scalar {
        match self {
            Domain::Rationals => {
                let n: i64 = rng.gen_range(-6..=6);
                let d: i64 = rng.gen_range(1..=4);
                Scalar::Rat(Rational::new(n.into(), d.into()))
            }
            Domain::Integers => Scalar::Int(rng.gen_range(-6i64..=6).into()),
            Domain::PrimeField(p) | Domain::Residues(p) => Scalar::Mod(rng.gen_range(0..*p)),
            Domain::Extension(e) => Scalar::Ext((0..e.degree()).map(|_| e.base.random(rng)).collect()),
        }
    }

    /// All elements of a finite domain, in a fixed order.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        let size = self.size().ok_or_else(|| Error::EnumerationTooLarge(format!("{self} is infinite")))?;
        if size > 1 << 20 {
            return Err(Error::EnumerationTooLarge(format!("{self} has {size} elements")));
        }
        match self {
            Domain::PrimeField(p) | Domain::Residues(p) => Ok((0..*p).map(Scalar::Mod).collect()),
            Domain::Extension(e) => {
                let base = e.base.elements()?;
                let mut out = vec![Vec::new()];
                for _ in 0..e.degree() {
                    let mut next = Vec::with_capacity(out.len() * base.len());
                    for prefix in &out {
                        for b in &base {
                            let mut v: Vec<Scalar> = prefix.clone();
                            v.push(b.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                Ok(out.into_iter().map(Scalar::Ext).collect())
            }
            _ => unreachable!("infinite domains rejected above"),
        }
    }

    /// Parses an exact literal such as `3/4`, `-2`, `2 mod 5`, or `1/2*a^2 - a + 3`.
    pub fn parse(&self, literal: &str) -> Result<Scalar> {
        let fail = || Error::InvalidLiteral { literal: literal.to_string(), domain: self.to_string() };
        let text = literal.trim();
        if text.is_empty() {
            return Err(fail());
        }
        match self {
            Domain::Extension(e) => parse_ext_literal(self, e, text).ok_or_else(fail),
            Domain::PrimeField(p) | Domain::Residues(p) => {
                let (value, modulus) = match text.split_once("mod") {
                    Some((v, m)) => (v.trim(), Some(m.trim())),
                    None => (text, None),
                };
                if let Some(m) = modulus {
                    let m: u64 = m.parse().map_err(|_| fail())?;
                    if m != *p {
                        return Err(fail());
                    }
                }
                let q = parse_rational(value).ok_or_else(fail)?;
                self.from_rational(&q).map_err(|_| fail())
            }
            _ => {
                let q = parse_rational(text).ok_or_else(fail)?;
                self.from_rational(&q).map_err(|_| fail())
            }
        }
    }

    /// Canonical text rendering, accepted back by [`Domain::parse`].
    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Rat(q) => format_rational(q),
            Scalar::Int(n) => n.to_string(),
            Scalar::Mod(v) => v.to_string(),
            Scalar::Ext(c) => {
                let base = &self.as_extension().expect("extension scalar").base;
                format_poly(base, c, "a")
            }
        }
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn format_poly(base: &Domain, coeffs: &[Scalar], var: &str) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if base.is_zero(c) {
            continue;
        }
        let (negative, magnitude) = match c {
            Scalar::Rat(q) if q.is_negative() => (true, format_rational(&-q)),
            Scalar::Int(n) if n.sign() == Sign::Minus => (true, (-n).to_string()),
            _ => (false, base.format(c)),
        };
        let body = match (k, magnitude.as_str()) {
            (0, m) => m.to_string(),
            (1, "1") => var.to_string(),
            (1, m) => format!("{m}*{var}"),
            (_, "1") => format!("{var}^{k}"),
            (_, m) => format!("{m}*{var}^{k}"),
        };
        if terms.is_empty() {
            terms.push(if negative { format!("-{body}") } else { body });
        } else {
            terms.push(format!("{} {body}", if negative { "-" } else { "+" }));
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" ")
    }
}

pub(crate) fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

fn parse_ext_literal(dom: &Domain, e: &ExtensionField, text: &str) -> Option<Scalar> {
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in text.chars() {
        if (ch == '+' || ch == '-') && !current.trim().is_empty() && !current.trim_end().ends_with('/') {
            terms.push((negative, current.trim().to_string()));
            current.clear();
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && current.trim().is_empty() {
            if ch == '-' {
                negative = !negative;
            }
        } else if !ch.is_whitespace() {
            current.push(ch);
        }
    }
    if current.is_empty() {
        return None;
    }
    terms.push((negative, current));
    let mut coeffs: Vec<Scalar> = Vec::new();
    for (neg, term) in terms {
        let (coef_text, power) = if let Some(pos) = term.find('a') {
            let (c, rest) = term.split_at(pos);
            let c = c.trim_end_matches('*');
            let power = match rest.strip_prefix('a')? {
                "" => 1usize,
                r => r.strip_prefix('^')?.parse().ok()?,
            };
            (if c.is_empty() { "1" } else { c }, power)
        } else {
            (term.as_str(), 0)
        };
        let mut c = e.base.parse(coef_text).ok()?;
        if neg {
            c = e.base.neg(&c);
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, e.base.zero());
        }
        coeffs[power] = e.base.add(&coeffs[power], &c);
    }
    dom.ext_element(coeffs).ok()
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Rationals => write!(f, "Q"),
            Domain::PrimeField(p) => write!(f, "GF({p})"),
            Domain::Integers => write!(f, "Z"),
            Domain::Residues(m) => write!(f, "Z/{m}"),
            Domain::Extension(e) => write!(f, "{}[a]/({})", e.base, format_poly(&e.base, &e.modulus, "a")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Rat(Rational::new(n.into(), d.into()))
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let d = Domain::Rationals;
        assert_eq!(d.add(&q(1, 6), &q(1, 3)), q(1, 2));
        assert_eq!(d.parse("6/-4").unwrap(), q(-3, 2));
        assert_eq!(d.format(&q(-3, 2)), "-3/2");
    }

    #[test]
    fn prime_field_arithmetic() {
        let d = Domain::prime_field(5).unwrap();
        assert_eq!(d.parse("2 mod 5").unwrap(), Scalar::Mod(2));
        assert_eq!(d.parse("1/2").unwrap(), Scalar::Mod(3));
        assert!(d.parse("2 mod 7").is_err());
        assert_eq!(d.inv(&Scalar::Mod(2)), Some(Scalar::Mod(3)));
        assert!(Domain::prime_field(6).is_err());
    }

    #[test]
    fn residues_have_partial_inverses() {
        let d = Domain::residues(6).unwrap();
        assert_eq!(d.inv(&Scalar::Mod(5)), Some(Scalar::Mod(5)));
        assert_eq!(d.inv(&Scalar::Mod(2)), None);
        assert!(!d.is_field());
    }

    #[test]
    fn sqrt_two_extension() {
        let k = Domain::extension(Domain::Rationals, vec![q(-2, 1), q(0, 1), q(1, 1)]).unwrap();
        let a = k.generator().unwrap();
        assert_eq!(k.mul(&a, &a), k.from_i64(2));
        let x = k.parse("1 + a").unwrap();
        let y = k.inv(&x).unwrap();
        assert!(k.is_one(&k.mul(&x, &y)));
        assert_eq!(k.format(&y), "a - 1");
        assert_eq!(k.parse(&k.format(&y)).unwrap(), y);
        assert_eq!(k.parse("-1/2*a^3").unwrap(), k.parse("-a").unwrap());
    }

    #[test]
    fn reducible_extension_rejected() {
        let r = Domain::extension(Domain::Rationals, vec![q(-1, 1), q(0, 1), q(1, 1)]);
        assert!(matches!(r, Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn finite_extension_enumerates() {
        let gf4 =
            Domain::extension(Domain::PrimeField(2), vec![Scalar::Mod(1), Scalar::Mod(1), Scalar::Mod(1)]).unwrap();
        let els = gf4.elements().unwrap();
        assert_eq!(els.len(), 4);
        for x in &els[1..] {
            let inv = gf4.inv(x).unwrap();
            assert!(gf4.is_one(&gf4.mul(x, &inv)));
        }
    }
}
