//! Enumeration over finite carriers, used for exact widths and brute-force diagnostics.

use std::collections::HashSet;

use num_traits::ToPrimitive;

use crate::abelian::{Carrier, Submodule, Summand};
use crate::error::{Error, Result};
use crate::kernel::{Domain, Scalar, Vector};

/// Number of elements, when finite and below `u128::MAX`.
pub fn carrier_size(c: &Carrier) -> Option<u128> {
    match c {
        Carrier::Vector { field, dim } => (field.size()? as u128).checked_pow(*dim as u32),
        Carrier::Abelian(d) => d.summands().iter().try_fold(1u128, |acc, s| match s {
            Summand::Cyclic(m) => acc.checked_mul(*m as u128),
            _ => None,
        }),
    }
}

pub fn submodule_size(s: &Submodule) -> Option<u128> {
    match s {
        Submodule::Field(v) => (v.domain().size()? as u128).checked_pow(v.dim() as u32),
        Submodule::Lattice { .. } => {
            let (torsion, free) = s.structure();
            if free > 0 {
                return None;
            }
            torsion.iter().try_fold(1u128, |acc, d| acc.checked_mul(d.to_u128()?))
        }
    }
}

/// All elements of a finite carrier in lexicographic coordinate order.
pub fn elements(c: &Carrier, limit: u128) -> Result<Vec<Vector>> {
    let size = carrier_size(c).ok_or_else(|| Error::EnumerationTooLarge(format!("{c} is infinite")))?;
    if size > limit {
        return Err(Error::EnumerationTooLarge(format!("{c} has {size} elements, limit {limit}")));
    }
    let coordinate_values: Vec<Vec<Scalar>> = (0..c.dim())
        .map(|i| match c {
            Carrier::Vector { field, .. } => field.elements(),
            Carrier::Abelian(_) => c.coordinate_domain(i).elements(),
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<Vector> = vec![Vec::new()];
    for values in &coordinate_values {
        let mut next = Vec::with_capacity(out.len() * values.len());
        for prefix in &out {
            for v in values {
                let mut e = prefix.clone();
                e.push(v.clone());
                next.push(e);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Least `s` such that every element of a finite group of order `target_size` is a sum
/// of `s` members of `values` (which must contain zero).
pub fn sumset_width(values: &HashSet<Vector>, carrier: &Carrier, target_size: u128, bound: usize) -> Result<usize> {
    let mut reached: HashSet<Vector> = HashSet::from([carrier.zero()]);
    let mut s = 0;
    while (reached.len() as u128) < target_size {
        s += 1;
        if s > bound {
            return Err(Error::SearchBoundExceeded { bound });
        }
        let mut next = HashSet::with_capacity(reached.len() * 2);
        for a in &reached {
            for b in values {
                next.insert(carrier.add(a, b));
            }
        }
        if next.len() == reached.len() {
            return Err(Error::Precondition("value set does not generate a group of the stated order".into()));
        }
        reached = next;
    }
    Ok(s)
}

/// Encodes an element of a finite prime-field vector space as an integer in `[0, p^n)`.
pub fn encode(p: u64, v: &[Scalar]) -> usize {
    v.iter().rev().fold(0usize, |acc, x| match x {
        Scalar::Mod(m) => acc * p as usize + *m as usize,
        other => panic!("prime-field coordinate expected, got {other:?}"),
    })
}

pub fn decode(p: u64, n: usize, mut code: usize) -> Vector {
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(Scalar::Mod((code % p as usize) as u64));
        code /= p as usize;
    }
    v
}

/// The prime of a prime-field vector carrier.
pub fn prime_of(c: &Carrier) -> Option<u64> {
    match c {
        Carrier::Vector { field: Domain::PrimeField(p), .. } => Some(*p),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_gf3_plane() {
        let c = Carrier::vector(Domain::PrimeField(3), 2);
        let els = elements(&c, 100).unwrap();
        assert_eq!(els.len(), 9);
        for e in &els {
            assert_eq!(decode(3, 2, encode(3, e)), *e);
        }
        assert!(elements(&c, 8).is_err());
    }

    #[test]
    fn width_of_generating_set() {
        let c = Carrier::vector(Domain::PrimeField(2), 2);
        let values: HashSet<Vector> = [
            vec![Scalar::Mod(0), Scalar::Mod(0)],
            vec![Scalar::Mod(1), Scalar::Mod(0)],
            vec![Scalar::Mod(0), Scalar::Mod(1)],
        ]
        .into_iter()
        .collect();
        assert_eq!(sumset_width(&values, &c, 4, 10).unwrap(), 2);
        assert!(matches!(sumset_width(&values, &c, 4, 1), Err(Error::SearchBoundExceeded { bound: 1 })));
    }
}
