//! Factorization of univariate polynomials over Q, finite fields, and simple
//! extensions of Q.
//!
//! Finite fields use squarefree decomposition, distinct-degree splitting and
//! Cantor–Zassenhaus equal-degree splitting with a fixed seed. Over Q the
//! squarefree parts are stripped of rational roots, tested for irreducibility
//! modulo small primes, and otherwise searched with Kronecker's method up to
//! a fixed factor degree. Extensions of Q go through the norm (Trager).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::domain::{Domain, Rational, Scalar};
use super::matrix::Matrix;
use super::poly::Poly;
use crate::error::{Error, Result};

const FACTOR_SEED: u64 = 0x5eed_fac7;
/// Largest factor degree searched by Kronecker's method.
const KRONECKER_MAX_DEGREE: usize = 4;
const KRONECKER_MAX_CANDIDATES: u128 = 2_000_000;
/// Integers larger than this are not trial-factored.
const TRIAL_FACTOR_LIMIT: u64 = 1_000_000_000_000_000;
const SMALL_PRIMES: [u64; 20] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73];

/// Irreducible monic factors with multiplicities; their product is `p` up to a unit.
pub fn poly_factor(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    let deg = p.degree().ok_or_else(|| Error::Precondition("cannot factor the zero polynomial".into()))?;
    if deg == 0 {
        return Err(Error::Precondition("poly_factor requires degree ≥ 1".into()));
    }
    let mut out = match p.domain() {
        Domain::Rationals => factor_rational(p)?,
        Domain::PrimeField(_) => factor_finite(p)?,
        Domain::Extension(e) if e.base().characteristic() > 0 => factor_finite(p)?,
        Domain::Extension(_) => factor_number_field(p)?,
        d => return Err(Error::UnsupportedDomain { op: "poly_factor", domain: d.to_string() }),
    };
    sort_factors(&mut out);
    Ok(out)
}

pub fn is_irreducible(p: &Poly) -> Result<bool> {
    let f = poly_factor(p)?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

fn sort_factors(v: &mut [(Poly, usize)]) {
    v.sort_by(|a, b| (a.0.degree(), a.0.coeffs(), a.1).cmp(&(b.0.degree(), b.0.coeffs(), b.1)));
}

/// Squarefree decomposition over a field: `p = unit · Π fᵢ^i` with the fᵢ squarefree and coprime.
pub fn squarefree_decomposition(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    let d = p.domain().clone();
    d.require_field()?;
    let f = p.monic()?;
    let char = d.characteristic();
    let mut out = Vec::new();
    sff_rec(&f, 1, char, &mut out)?;
    Ok(out)
}

fn sff_rec(f: &Poly, mult: usize, char: u64, out: &mut Vec<(Poly, usize)>) -> Result<()> {
    if f.degree().unwrap_or(0) == 0 {
        return Ok(());
    }
    let fp = f.derivative();
    let mut c = f.gcd(&fp)?;
    let mut w = f.exact_div(&c)?;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c)?;
        let fac = w.exact_div(&y)?;
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac, i * mult));
        }
        w = y;
        c = c.exact_div(&w)?;
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        // characteristic p: c is a p-th power
        assert!(char > 0, "leftover cofactor only arises in positive characteristic");
        let root = pth_root(&c, char)?;
        sff_rec(&root, mult * char as usize, char, out)?;
    }
    Ok(())
}

fn pth_root(c: &Poly, p: u64) -> Result<Poly> {
    let d = c.domain().clone();
    let q = d.size().expect("finite field");
    // a^(1/p) = a^(q/p) in GF(q)
    let e = BigUint::from(q / p);
    let coeffs: Vec<Scalar> = c.coeffs().iter().step_by(p as usize).map(|a| d.pow(a, &e)).collect();
    Ok(Poly::new(d, coeffs))
}

// ---------------------------------------------------------------------------
// finite fields

fn factor_finite(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
    let mut out = Vec::new();
    for (sf, mult) in squarefree_decomposition(p)? {
        for (g, d) in distinct_degree(&sf)? {
            for h in equal_degree(&g, d, &mut rng)? {
                out.push((h, mult));
            }
        }
    }
    Ok(out)
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
pub fn distinct_degree(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let d = f.domain().clone();
    let q = BigUint::from(
        d.size().ok_or_else(|| Error::UnsupportedDomain { op: "distinct_degree", domain: d.to_string() })?,
    );
    let x = Poly::x(d.clone());
    let mut rest = f.monic()?;
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut deg = 1;
    while rest.degree().unwrap_or(0) >= 2 * deg {
        h = h.pow_mod(&q, &rest)?;
        let g = rest.gcd(&h.sub(&x))?;
        if !g.is_one() {
            rest = rest.exact_div(&g)?;
            h = h.rem(&rest)?;
            out.push((g, deg));
        }
        deg += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        let n = rest.degree().unwrap();
        out.push((rest, n));
    }
    Ok(out)
}

fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let n = f.degree().unwrap_or(0);
    if n == d {
        return Ok(vec![f.monic()?]);
    }
    let dom = f.domain().clone();
    let q = dom.size().expect("finite field");
    let char = dom.characteristic();
    let qd = BigUint::from(q).pow(d as u32);
    loop {
        let r = Poly::new(dom.clone(), (0..n).map(|_| dom.random(rng)).collect());
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let t = if char == 2 {
            // absolute trace: r + r^2 + r^4 + … over all k·d conjugates
            let steps = (q.trailing_zeros() as usize) * d;
            let mut acc = r.rem(f)?;
            let mut pow = acc.clone();
            let two = BigUint::from(2u32);
            for _ in 1..steps {
                pow = pow.pow_mod(&two, f)?;
                acc = acc.add(&pow);
            }
            acc
        } else {
            let e = (&qd - 1u32) / 2u32;
            r.pow_mod(&e, f)?.sub(&Poly::constant(dom.clone(), dom.one()))
        };
        let g = f.gcd(&t)?;
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let mut parts = equal_degree(&g, d, rng)?;
            parts.extend(equal_degree(&f.exact_div(&g)?, d, rng)?);
            return Ok(parts);
        }
    }
}

// ---------------------------------------------------------------------------
// rationals

fn factor_rational(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    let mut out = Vec::new();
    for (sf, mult) in squarefree_decomposition(p)? {
        for f in factor_squarefree_rational(&sf)? {
            out.push((f, mult));
        }
    }
    Ok(out)
}

/// Primitive integer polynomial proportional to a rational one.
fn to_primitive_integer(p: &Poly) -> Vec<BigInt> {
    let coeffs: Vec<Rational> = p
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Rat(q) => q.clone(),
            other => panic!("rational polynomial expected, got {other:?}"),
        })
        .collect();
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut ints: Vec<BigInt> = ints.into_iter().map(|c| c / &content).collect();
    if ints.last().is_some_and(|c| c.is_negative()) {
        ints.iter_mut().for_each(|c| *c = -c.clone());
    }
    ints
}

fn from_integer_coeffs(ints: &[BigInt]) -> Poly {
    let d = Domain::Rationals;
    let p = Poly::new(d.clone(), ints.iter().map(|c| d.from_bigint(c)).collect());
    p.monic().expect("rational field")
}

fn factor_squarefree_rational(sf: &Poly) -> Result<Vec<Poly>> {
    let mut factors = Vec::new();
    let mut rest = sf.monic()?;
    // rational roots
    loop {
        let n = rest.degree().unwrap_or(0);
        if n <= 1 {
            break;
        }
        match find_rational_root(&to_primitive_integer(&rest))? {
            Some(r) => {
                let lin = Poly::new(Domain::Rationals, vec![Scalar::Rat(-r), Domain::Rationals.one()]);
                rest = rest.exact_div(&lin)?;
                factors.push(lin);
            }
            None => break,
        }
    }
    if rest.degree().unwrap_or(0) >= 1 {
        factors.extend(split_rootless(&rest)?);
    }
    Ok(factors)
}

/// Factors a squarefree polynomial over Q that has no rational roots.
fn split_rootless(f: &Poly) -> Result<Vec<Poly>> {
    let n = f.degree().unwrap_or(0);
    if n <= 3 {
        return Ok(vec![f.monic()?]);
    }
    let ints = to_primitive_integer(f);
    let allowed = modular_degree_sets(&ints)?;
    let candidates: Vec<usize> = allowed.iter().copied().filter(|&d| d >= 2 && d <= n / 2).collect();
    if candidates.is_empty() {
        return Ok(vec![f.monic()?]);
    }
    for d in candidates {
        if d > KRONECKER_MAX_DEGREE {
            return Err(Error::UnsupportedDegree(format!(
                "possible factor of degree {d} of {f} is beyond the Kronecker search limit {KRONECKER_MAX_DEGREE}"
            )));
        }
        if let Some(g) = kronecker_factor(&ints, d)? {
            let g = from_integer_coeffs(&g);
            let h = f.exact_div(&g)?;
            let mut out = split_rootless(&g)?;
            out.extend(split_rootless(&h)?);
            return Ok(out);
        }
    }
    Ok(vec![f.monic()?])
}

/// Degrees that a rational factor could have, from factorizations modulo small primes.
fn modular_degree_sets(ints: &[BigInt]) -> Result<BTreeSet<usize>> {
    let n = ints.len() - 1;
    let mut allowed: BTreeSet<usize> = (1..n).collect();
    let mut used = 0;
    for &p in SMALL_PRIMES.iter() {
        if used >= 6 || allowed.is_empty() {
            break;
        }
        let lc = ints.last().unwrap();
        if (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let d = Domain::PrimeField(p);
        let fp = Poly::new(d.clone(), ints.iter().map(|c| d.from_bigint(c)).collect());
        if !fp.gcd(&fp.derivative())?.is_one() {
            continue;
        }
        used += 1;
        let degrees: Vec<usize> = factor_finite(&fp)?.iter().map(|(g, _)| g.degree().unwrap()).collect();
        let mut sums: BTreeSet<usize> = BTreeSet::from([0]);
        for dg in degrees {
            let next: Vec<usize> = sums.iter().map(|s| s + dg).collect();
            sums.extend(next);
        }
        allowed.retain(|d| sums.contains(d));
    }
    Ok(allowed)
}

fn small_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    let v = n
        .to_u64()
        .filter(|&v| v <= TRIAL_FACTOR_LIMIT)
        .ok_or_else(|| Error::UnsupportedDegree(format!("integer {n} is too large for trial factorization")))?;
    let mut primes: Vec<(u64, u32)> = Vec::new();
    let mut rest = v;
    let mut d = 2u64;
    while d * d <= rest {
        if rest % d == 0 {
            let mut e = 0;
            while rest % d == 0 {
                rest /= d;
                e += 1;
            }
            primes.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        primes.push((rest, 1));
    }
    let mut divs: Vec<u64> = vec![1];
    for (p, e) in primes {
        let mut next = Vec::new();
        for &x in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(x * pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    Ok(divs.into_iter().map(BigInt::from).collect())
}

fn eval_int(ints: &[BigInt], x: &Rational) -> Rational {
    ints.iter().rev().fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
}

fn find_rational_root(ints: &[BigInt]) -> Result<Option<Rational>> {
    if ints[0].is_zero() {
        return Ok(Some(Rational::zero()));
    }
    let nums = small_divisors(&ints[0])?;
    let dens = small_divisors(ints.last().unwrap())?;
    for den in &dens {
        for num in &nums {
            for sign in [1, -1] {
                let r = Rational::new(num * sign, den.clone());
                if eval_int(ints, &r).is_zero() {
                    return Ok(Some(r));
                }
            }
        }
    }
    Ok(None)
}

/// Kronecker's method: search an integer factor of degree exactly `d`.
fn kronecker_factor(ints: &[BigInt], d: usize) -> Result<Option<Vec<BigInt>>> {
    let mut points: Vec<(i64, BigInt)> = Vec::new();
    let mut x = 0i64;
    while points.len() < d + 1 {
        let v = eval_int(ints, &Rational::from_integer(x.into()));
        debug_assert!(!v.is_zero(), "rootless polynomial");
        points.push((x, v.to_integer()));
        x = if x <= 0 { -x + 1 } else { -x };
    }
    let divisor_sets: Vec<Vec<BigInt>> = points.iter().map(|(_, v)| small_divisors(v)).collect::<Result<_>>()?;
    let total: u128 =
        divisor_sets.iter().enumerate().map(|(i, s)| s.len() as u128 * if i == 0 { 1 } else { 2 }).product();
    if total > KRONECKER_MAX_CANDIDATES {
        return Err(Error::UnsupportedDegree(format!(
            "Kronecker search for a degree-{d} factor needs {total} candidates"
        )));
    }
    let lc = ints.last().unwrap();
    let f = from_integer_coeffs(ints);
    let mut idx = vec![0usize; d + 1];
    let mut signs = vec![1i64; d + 1];
    loop {
        // candidate values at the sample points
        let values: Vec<Rational> =
            (0..=d).map(|k| Rational::from_integer(&divisor_sets[k][idx[k]] * signs[k])).collect();
        if let Some(g) = interpolate(&points.iter().map(|(x, _)| *x).collect::<Vec<_>>(), &values) {
            if g.len() == d + 1 && g.iter().all(|c| c.is_integer()) {
                let gi: Vec<BigInt> = g.iter().map(|c| c.to_integer()).collect();
                if (lc % gi.last().unwrap()).is_zero() {
                    let gp = from_integer_coeffs(&gi);
                    if f.rem(&gp)?.is_zero() {
                        return Ok(Some(gi));
                    }
                }
            }
        }
        // advance the mixed-radix counter (the first sign stays positive)
        let mut k = 0;
        loop {
            if k > d {
                return Ok(None);
            }
            if k > 0 && signs[k] == 1 {
                signs[k] = -1;
                break;
            }
            signs[k] = 1;
            idx[k] += 1;
            if idx[k] < divisor_sets[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Lagrange interpolation through `(xs[i], ys[i])`; returns trimmed coefficients.
fn interpolate(xs: &[i64], ys: &[Rational]) -> Option<Vec<Rational>> {
    let n = xs.len();
    let mut result = vec![Rational::zero(); n];
    for i in 0..n {
        let mut basis = vec![Rational::one()];
        let mut denom = Rational::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let xj = Rational::from_integer(xs[j].into());
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c.clone();
                next[k] -= c * &xj;
            }
            basis = next;
            denom *= Rational::from_integer((xs[i] - xs[j]).into());
        }
        let scale = &ys[i] / denom;
        for (k, c) in basis.iter().enumerate() {
            result[k] += c * &scale;
        }
    }
    while result.last().is_some_and(|c| c.is_zero()) {
        result.pop();
    }
    if result.is_empty() {
        None
    } else {
        Some(result)
    }
}

// ---------------------------------------------------------------------------
// extensions of Q

/// Norm `N_{K/Q}` of a polynomial over `K = Q(a)`, a rational polynomial of degree `deg·[K:Q]`.
pub fn norm_to_base(h: &Poly) -> Result<Poly> {
    let k = h.domain().clone();
    let ext = k.as_extension().ok_or_else(|| Error::UnsupportedDomain { op: "norm", domain: k.to_string() })?;
    let base = ext.base().clone();
    let n = h.degree().unwrap_or(0) * ext.degree();
    let xs: Vec<i64> = (0..=n as i64).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = h.eval(&k.from_i64(x));
        let m = multiplication_matrix(&k, &v);
        let det = m.determinant()?;
        ys.push(base.to_rational(&det).expect("rational base"));
    }
    let coeffs = interpolate(&xs, &ys).unwrap_or_default();
    Ok(Poly::new(base.clone(), coeffs.into_iter().map(Scalar::Rat).collect()))
}

/// Matrix of multiplication by `v` on `K` in the power basis, over the base field.
pub fn multiplication_matrix(k: &Domain, v: &Scalar) -> Matrix {
    let ext = k.as_extension().expect("extension field");
    let base = ext.base().clone();
    let d = ext.degree();
    let mut m = Matrix::zeros(base.clone(), d, d);
    for j in 0..d {
        let mut basis = vec![base.zero(); d];
        basis[j] = base.one();
        let prod = k.mul(v, &Scalar::Ext(basis));
        if let Scalar::Ext(c) = prod {
            for (i, x) in c.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
    }
    m
}

fn factor_number_field(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    let mut out = Vec::new();
    for (sf, mult) in squarefree_decomposition(p)? {
        for f in trager_squarefree(&sf)? {
            out.push((f, mult));
        }
    }
    Ok(out)
}

fn trager_squarefree(h: &Poly) -> Result<Vec<Poly>> {
    let k = h.domain().clone();
    if h.degree().unwrap_or(0) <= 1 {
        return Ok(vec![h.monic()?]);
    }
    let a = k.generator().expect("extension");
    let x = Poly::x(k.clone());
    for s in 0..32i64 {
        // h_s(x) = h(x - s·a)
        let shift = x.sub(&Poly::constant(k.clone(), k.mul(&k.from_i64(s), &a)));
        let hs = h.compose(&shift);
        let norm = norm_to_base(&hs)?;
        if !norm.gcd(&norm.derivative())?.is_one() {
            continue;
        }
        let back = x.add(&Poly::constant(k.clone(), k.mul(&k.from_i64(s), &a)));
        let mut out = Vec::new();
        for (ni, _) in factor_rational(&norm)? {
            let lifted = Poly::new(k.clone(), ni.coeffs().iter().map(|c| k.embed(c.clone())).collect());
            let g = hs.gcd(&lifted)?;
            if g.degree().unwrap_or(0) > 0 {
                out.push(g.compose(&back).monic()?);
            }
        }
        return Ok(out);
    }
    Err(Error::UnsupportedDegree(format!("no squarefree norm found for {h}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(factors: &[(Poly, usize)], d: &Domain) -> Poly {
        factors.iter().fold(Poly::constant(d.clone(), d.one()), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    #[test]
    fn x_squared_minus_one_over_q() {
        let d = Domain::Rationals;
        let p = Poly::from_i64(d.clone(), &[-1, 0, 1]);
        let f = poly_factor(&p).unwrap();
        assert_eq!(f, vec![(Poly::from_i64(d.clone(), &[-1, 1]), 1), (Poly::from_i64(d.clone(), &[1, 1]), 1)]);
        assert_eq!(expand(&f, &d), p);
    }

    #[test]
    fn x_squared_plus_one_over_gf2_is_a_square() {
        let d = Domain::PrimeField(2);
        let p = Poly::from_i64(d.clone(), &[1, 0, 1]);
        let f = poly_factor(&p).unwrap();
        assert_eq!(f, vec![(Poly::from_i64(d.clone(), &[1, 1]), 2)]);
    }

    #[test]
    fn linear_is_irreducible() {
        let p = Poly::from_i64(Domain::Rationals, &[0, 1]);
        assert!(is_irreducible(&p).unwrap());
    }

    #[test]
    fn quartic_splitting_into_quadratics() {
        // (x^2 + 1)(x^2 - 2)
        let d = Domain::Rationals;
        let p = Poly::from_i64(d.clone(), &[1, 0, 1]).mul(&Poly::from_i64(d.clone(), &[-2, 0, 1]));
        let f = poly_factor(&p).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(expand(&f, &d), p);
    }

    #[test]
    fn swinnerton_dyer_like_quartic_irreducible() {
        // x^4 - 10x^2 + 1 is reducible mod every prime yet irreducible over Q
        let p = Poly::from_i64(Domain::Rationals, &[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&p).unwrap());
    }

    #[test]
    fn repeated_factors_over_q() {
        let d = Domain::Rationals;
        let base = Poly::from_i64(d.clone(), &[-2, 0, 1]);
        let p = base.pow(2).mul(&Poly::from_i64(d.clone(), &[3, 2]));
        let f = poly_factor(&p).unwrap();
        assert_eq!(expand(&f, &d), p.monic().unwrap());
        assert!(f.contains(&(base, 2)));
    }

    #[test]
    fn finite_field_factorization_expands_back() {
        for p in [2u64, 3, 5, 7] {
            let d = Domain::PrimeField(p);
            let poly = Poly::from_i64(d.clone(), &[1, 2, 0, 1, 1, 0, 3, 1]);
            let f = poly_factor(&poly).unwrap();
            assert_eq!(expand(&f, &d), poly.monic().unwrap());
            for (g, _) in &f {
                assert!(is_irreducible(g).unwrap());
            }
        }
    }

    #[test]
    fn factoring_over_sqrt_two() {
        let q = Domain::Rationals;
        let k = Domain::extension(q.clone(), vec![q.from_i64(-2), q.zero(), q.one()]).unwrap();
        let p = Poly::from_i64(k.clone(), &[-2, 0, 1]);
        let f = poly_factor(&p).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(expand(&f, &k), p);
        // x^2 + 1 stays irreducible over Q(sqrt 2)
        assert!(is_irreducible(&Poly::from_i64(k, &[1, 0, 1])).unwrap());
    }

    #[test]
    fn integer_domain_rejected() {
        let p = Poly::from_i64(Domain::Integers, &[1, 1]);
        assert!(matches!(poly_factor(&p), Err(Error::UnsupportedDomain { .. })));
    }
}
