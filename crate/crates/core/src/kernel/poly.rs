//! Dense univariate polynomials, constant term first.

use std::fmt;

use num_bigint::BigUint;

use super::domain::{format_poly, Domain, Scalar};
use crate::error::{Error, Result};

/// Slice-level polynomial arithmetic shared with the extension-field code.
pub(crate) mod raw {
    use num_bigint::BigUint;

    use super::super::domain::{Domain, Scalar};

    pub fn trim(d: &Domain, v: &mut Vec<Scalar>) {
        while v.last().is_some_and(|c| d.is_zero(c)) {
            v.pop();
        }
    }

    pub fn add(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let n = a.len().max(b.len());
        let zero = d.zero();
        let mut out: Vec<Scalar> =
            (0..n).map(|i| d.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero))).collect();
        trim(d, &mut out);
        out
    }

    pub fn neg(d: &Domain, a: &[Scalar]) -> Vec<Scalar> {
        a.iter().map(|c| d.neg(c)).collect()
    }

    pub fn sub(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        add(d, a, &neg(d, b))
    }

    pub fn scale(d: &Domain, a: &[Scalar], c: &Scalar) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = a.iter().map(|x| d.mul(x, c)).collect();
        trim(d, &mut out);
        out
    }

    pub fn mul(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![d.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if d.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = d.add(&out[i + j], &d.mul(x, y));
            }
        }
        trim(d, &mut out);
        out
    }

    /// Division with remainder; `b` must be nonzero with invertible leading coefficient.
    pub fn divrem(d: &Domain, a: &[Scalar], b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut b = b.to_vec();
        trim(d, &mut b);
        assert!(!b.is_empty(), "polynomial division by zero");
        let lead_inv = d.inv(b.last().unwrap()).expect("leading coefficient must be a unit");
        let mut r = a.to_vec();
        trim(d, &mut r);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![d.zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = d.mul(r.last().unwrap(), &lead_inv);
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] = d.sub(&r[shift + j], &d.mul(&c, bj));
            }
            q[shift] = c;
            r.pop();
            trim(d, &mut r);
        }
        trim(d, &mut q);
        (q, r)
    }

    pub fn rem(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        divrem(d, a, b).1
    }

    pub fn monic(d: &Domain, a: &[Scalar]) -> Vec<Scalar> {
        match a.last() {
            None => Vec::new(),
            Some(lc) => scale(d, a, &d.inv(lc).expect("field coefficients")),
        }
    }

    /// Monic gcd over a field.
    pub fn gcd(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(d, &mut x);
        trim(d, &mut y);
        while !y.is_empty() {
            let r = rem(d, &x, &y);
            x = y;
            y = r;
        }
        monic(d, &x)
    }

    /// `(g, s, t)` with `s·a + t·b = g`, g monic.
    pub fn xgcd(d: &Domain, a: &[Scalar], b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>, Vec<Scalar>) {
        let mut r0 = a.to_vec();
        let mut r1 = b.to_vec();
        trim(d, &mut r0);
        trim(d, &mut r1);
        let (mut s0, mut s1) = (vec![d.one()], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![d.one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(d, &r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = sub(d, &s0, &mul(d, &q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = sub(d, &t0, &mul(d, &q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if let Some(lc) = r0.last() {
            let inv = d.inv(lc).expect("field coefficients");
            (scale(d, &r0, &inv), scale(d, &s0, &inv), scale(d, &t0, &inv))
        } else {
            (r0, s0, t0)
        }
    }

    pub fn deriv(d: &Domain, a: &[Scalar]) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = a.iter().enumerate().skip(1).map(|(k, c)| d.scale_int(c, k as i64)).collect();
        trim(d, &mut out);
        out
    }

    pub fn eval(d: &Domain, a: &[Scalar], x: &Scalar) -> Scalar {
        a.iter().rev().fold(d.zero(), |acc, c| d.add(&d.mul(&acc, x), c))
    }

    pub fn powmod(d: &Domain, a: &[Scalar], e: &BigUint, m: &[Scalar]) -> Vec<Scalar> {
        let mut result = rem(d, &[d.one()], m);
        let base = rem(d, a, m);
        for i in (0..e.bits()).rev() {
            result = rem(d, &mul(d, &result, &result), m);
            if e.bit(i) {
                result = rem(d, &mul(d, &result, &base), m);
            }
        }
        result
    }
}

/// A polynomial over a coefficient domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    domain: Domain,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(domain: Domain, coeffs: Vec<Scalar>) -> Poly {
        let mut coeffs = coeffs;
        raw::trim(&domain, &mut coeffs);
        Poly { domain, coeffs }
    }

    pub fn from_i64(domain: Domain, coeffs: &[i64]) -> Poly {
        let c = coeffs.iter().map(|&n| domain.from_i64(n)).collect();
        Poly::new(domain, c)
    }

    pub fn zero(domain: Domain) -> Poly {
        Poly { domain, coeffs: Vec::new() }
    }

    pub fn constant(domain: Domain, c: Scalar) -> Poly {
        Poly::new(domain, vec![c])
    }

    /// The polynomial `x`.
    pub fn x(domain: Domain) -> Poly {
        let c = vec![domain.zero(), domain.one()];
        Poly { domain, coeffs: c }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    fn same(&self, other: &Poly) {
        assert_eq!(self.domain, other.domain, "polynomials over different domains");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.same(other);
        Poly { domain: self.domain.clone(), coeffs: raw::add(&self.domain, &self.coeffs, &other.coeffs) }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.same(other);
        Poly { domain: self.domain.clone(), coeffs: raw::sub(&self.domain, &self.coeffs, &other.coeffs) }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.same(other);
        Poly { domain: self.domain.clone(), coeffs: raw::mul(&self.domain, &self.coeffs, &other.coeffs) }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly { domain: self.domain.clone(), coeffs: raw::scale(&self.domain, &self.coeffs, c) }
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::constant(self.domain.clone(), self.domain.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn require_field(&self) -> Result<()> {
        self.domain.require_field()
    }

    pub fn div_rem(&self, other: &Poly) -> Result<(Poly, Poly)> {
        self.same(other);
        self.require_field()?;
        if other.is_zero() {
            return Err(Error::Precondition("polynomial division by zero".into()));
        }
        let (q, r) = raw::divrem(&self.domain, &self.coeffs, &other.coeffs);
        Ok((Poly { domain: self.domain.clone(), coeffs: q }, Poly { domain: self.domain.clone(), coeffs: r }))
    }

    pub fn rem(&self, other: &Poly) -> Result<Poly> {
        Ok(self.div_rem(other)?.1)
    }

    /// Exact quotient; errors if `other` does not divide `self`.
    pub fn exact_div(&self, other: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(other)?;
        if !r.is_zero() {
            return Err(Error::Precondition(format!("{other} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.same(other);
        self.require_field()?;
        Ok(Poly { domain: self.domain.clone(), coeffs: raw::gcd(&self.domain, &self.coeffs, &other.coeffs) })
    }

    pub fn xgcd(&self, other: &Poly) -> Result<(Poly, Poly, Poly)> {
        self.same(other);
        self.require_field()?;
        let (g, s, t) = raw::xgcd(&self.domain, &self.coeffs, &other.coeffs);
        let d = &self.domain;
        Ok((Poly::new(d.clone(), g), Poly::new(d.clone(), s), Poly::new(d.clone(), t)))
    }

    pub fn monic(&self) -> Result<Poly> {
        self.require_field()?;
        Ok(Poly { domain: self.domain.clone(), coeffs: raw::monic(&self.domain, &self.coeffs) })
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.domain.is_one(c))
    }

    pub fn derivative(&self) -> Poly {
        Poly { domain: self.domain.clone(), coeffs: raw::deriv(&self.domain, &self.coeffs) }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        raw::eval(&self.domain, &self.coeffs, x)
    }

    /// `self(other)`.
    pub fn compose(&self, other: &Poly) -> Poly {
        self.same(other);
        let mut acc = Poly::zero(self.domain.clone());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Poly::constant(self.domain.clone(), c.clone()));
        }
        acc
    }

    pub fn pow_mod(&self, e: &BigUint, modulus: &Poly) -> Result<Poly> {
        self.require_field()?;
        Ok(Poly { domain: self.domain.clone(), coeffs: raw::powmod(&self.domain, &self.coeffs, e, &modulus.coeffs) })
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.domain.is_one(&self.coeffs[0])
    }

    /// Coefficient strings, constant term first.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| self.domain.format(c)).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.domain {
            // extension coefficients are themselves polynomials in `a`; bracket them
            Domain::Extension(_) => {
                let mut terms = Vec::new();
                for (k, c) in self.coeffs.iter().enumerate().rev() {
                    if self.domain.is_zero(c) {
                        continue;
                    }
                    let c = self.domain.format(c);
                    terms.push(match k {
                        0 => format!("({c})"),
                        1 => format!("({c})*x"),
                        _ => format!("({c})*x^{k}"),
                    });
                }
                if terms.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", terms.join(" + "))
                }
            }
            d => write!(f, "{}", format_poly(d, &self.coeffs, "x")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_with_remainder() {
        let d = Domain::Rationals;
        let a = Poly::from_i64(d.clone(), &[-1, 0, 0, 1]);
        let b = Poly::from_i64(d.clone(), &[-1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, Poly::from_i64(d.clone(), &[1, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.to_string(), "x^3 - 1");
    }

    #[test]
    fn gcd_is_monic() {
        let d = Domain::prime_field(7).unwrap();
        let a = Poly::from_i64(d.clone(), &[2, 3, 1]); // (x+1)(x+2)
        let b = Poly::from_i64(d.clone(), &[3, 4, 1]); // (x+1)(x+3)
        assert_eq!(a.gcd(&b).unwrap(), Poly::from_i64(d, &[1, 1]));
    }

    #[test]
    fn xgcd_bezout() {
        let d = Domain::Rationals;
        let a = Poly::from_i64(d.clone(), &[1, 0, 1]);
        let b = Poly::from_i64(d.clone(), &[0, 1, 1]);
        let (g, s, t) = a.xgcd(&b).unwrap();
        assert!(g.is_one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn compose_and_eval() {
        let d = Domain::Rationals;
        let p = Poly::from_i64(d.clone(), &[-2, 0, 1]);
        let shift = Poly::from_i64(d.clone(), &[1, 1]);
        let c = p.compose(&shift);
        assert_eq!(c, Poly::from_i64(d.clone(), &[-1, 2, 1]));
        assert_eq!(c.eval(&d.from_i64(2)), d.from_i64(7));
    }
}
