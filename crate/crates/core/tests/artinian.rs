use lrs_core::artinian::{
    field_of_representatives, j_series, local_decomposition, polynomial_quotient, radical, CommutativeAlgebra,
    LocalFactor, ResiduePolicy, DEFAULT_SEED,
};
use lrs_core::kernel::{vec_ops, Domain, Poly, Rational, Scalar};
use lrs_core::Error;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn quotient(d: &Domain, coeffs: &[i64]) -> CommutativeAlgebra {
    polynomial_quotient(&Poly::from_i64(d.clone(), coeffs)).unwrap()
}

fn check_idempotents(a: &CommutativeAlgebra, factors: &[LocalFactor]) {
    let d = a.field();
    let sum = factors.iter().fold(a.zero(), |acc, f| a.add(&acc, &f.idempotent));
    assert_eq!(&sum, a.unit());
    for (i, e) in factors.iter().enumerate() {
        assert_eq!(a.mul(&e.idempotent, &e.idempotent), e.idempotent);
        for f in &factors[i + 1..] {
            assert!(vec_ops::is_zero(d, &a.mul(&e.idempotent, &f.idempotent)));
        }
    }
}

/// `(indices, r_k values)` sorted.
fn local_profile(a: &CommutativeAlgebra) -> (Vec<usize>, Vec<usize>) {
    let factors = local_decomposition(a, ResiduePolicy::Describe, DEFAULT_SEED).unwrap();
    check_idempotents(a, &factors);
    let mut idx: Vec<usize> = factors.iter().map(|f| f.nilpotency_index).collect();
    let mut rk: Vec<usize> = factors.iter().map(|f| j_series(f).unwrap().r_k).collect();
    for f in &factors {
        // the maximal ideal is nilpotent of the recorded index
        let powers = f.algebra.ideal_powers(&f.radical).unwrap();
        assert!(powers.len() < f.nilpotency_index || powers[f.nilpotency_index - 1].is_zero());
    }
    idx.sort();
    rk.sort();
    (idx, rk)
}

#[test]
fn local_decompositions_of_small_quotients() {
    let q = Domain::Rationals;
    let f2 = Domain::prime_field(2).unwrap();
    assert_eq!(local_profile(&quotient(&q, &[0, -1, 1])), (vec![1, 1], vec![1, 1]));
    assert_eq!(local_profile(&quotient(&q, &[-1, 0, 1])), (vec![1, 1], vec![1, 1]));
    assert_eq!(local_profile(&quotient(&q, &[0, 0, 0, 1])), (vec![3], vec![3]));
    assert_eq!(local_profile(&quotient(&f2, &[1, 0, 1])), (vec![2], vec![2]));
}

#[test]
fn residue_extensions() {
    // Q[x]/((x² + 1)(x − 1)) = Q(i) × Q
    let q = Domain::Rationals;
    let a = quotient(&q, &[-1, 1, -1, 1]);
    let factors = local_decomposition(&a, ResiduePolicy::Describe, DEFAULT_SEED).unwrap();
    check_idempotents(&a, &factors);
    let mut degrees: Vec<usize> = factors.iter().map(|f| f.residue.degree()).collect();
    degrees.sort();
    assert_eq!(degrees, vec![1, 2]);
    // GF(2)[x]/(x³ + x + 1) is the field with 8 elements
    let f2 = Domain::prime_field(2).unwrap();
    let factors = local_decomposition(&quotient(&f2, &[1, 1, 0, 1]), ResiduePolicy::Describe, DEFAULT_SEED).unwrap();
    assert_eq!(factors.len(), 1);
    assert_eq!(factors[0].residue.degree(), 3);
    assert!(factors[0].residue.is_finite());
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Product of two polynomials over Q reduced modulo a monic one, coefficients low to high.
fn mul_mod(a: &[Rational], b: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut prod = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    let deg = m.len() - 1;
    for k in (deg..prod.len()).rev() {
        let c = prod[k].clone();
        for (i, mi) in m.iter().enumerate() {
            prod[k - deg + i] -= &c * mi;
        }
    }
    prod.truncate(deg);
    prod
}

#[test]
fn hensel_lift_of_sqrt_two() {
    // independent check that s = t(6 − t²)/4 squares to 2 in Q[t]/((t² − 2)²)
    let modulus: Vec<Rational> = [4, 0, -4, 0, 1].iter().map(|&c| rat(c, 1)).collect();
    let s = vec![rat(0, 1), rat(3, 2), rat(0, 1), rat(-1, 4)];
    assert_eq!(mul_mod(&s, &s, &modulus), vec![rat(2, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);

    let q = Domain::Rationals;
    let a = quotient(&q, &[4, 0, -4, 0, 1]);
    let factors = local_decomposition(&a, ResiduePolicy::Describe, DEFAULT_SEED).unwrap();
    assert_eq!(factors.len(), 1);
    let lf = &factors[0];
    assert_eq!(lf.residue.degree(), 2);
    assert_eq!(lf.nilpotency_index, 2);
    let rep = field_of_representatives(lf).unwrap();
    let g = &rep.generator;
    let two = lf.algebra.scale(&q.from_i64(2), lf.algebra.unit());
    assert_eq!(lf.algebra.mul(g, g), two);
    let expected: Vec<Scalar> = s.into_iter().map(Scalar::Rat).collect();
    assert!(expected == *g || expected == vec_ops::neg(&q, g));
    assert!(rep.is_isomorphic_to_residue(lf).unwrap());

    assert!(matches!(
        local_decomposition(&a, ResiduePolicy::RequireBase, DEFAULT_SEED),
        Err(Error::NeedsExtension { .. })
    ));
}

#[test]
fn radical_matches_nilpotents() {
    // over GF(2), x ∈ J iff x is nilpotent; enumerate GF(2)[x]/(x²(x + 1)²)
    let f2 = Domain::prime_field(2).unwrap();
    let a = quotient(&f2, &[0, 0, 1, 0, 1]);
    let j = radical(&a).unwrap();
    let elements = lrs_core::finite::elements(&lrs_core::abelian::Carrier::vector(f2, 4), u128::MAX).unwrap();
    for v in elements {
        assert_eq!(j.contains(&v), a.is_nilpotent(&v), "{v:?}");
    }
}

#[test]
fn residues_rejected() {
    let z4 = Domain::residues(4).unwrap();
    let table = vec![vec![vec![z4.one()]]];
    assert!(matches!(CommutativeAlgebra::new(z4.clone(), table, vec![z4.one()]), Err(Error::NotEquicharacteristic(_))));
}

proptest! {
    #[test]
    fn split_products_of_linear_factors(roots in proptest::collection::vec((-3i64..=3, 1usize..=2), 1..=3)) {
        // ∏ (x − aᵢ)^{kᵢ} over Q with distinct aᵢ
        let mut seen = std::collections::BTreeMap::new();
        for (a, k) in roots {
            seen.entry(a).or_insert(k);
        }
        let q = Domain::Rationals;
        let p = seen.iter().fold(Poly::constant(q.clone(), q.one()), |acc, (&a, &k)| acc.mul(&Poly::from_i64(q.clone(), &[-a, 1]).pow(k)));
        let a = polynomial_quotient(&p).unwrap();
        let factors = local_decomposition(&a, ResiduePolicy::Describe, 17).unwrap();
        check_idempotents(&a, &factors);
        prop_assert_eq!(factors.len(), seen.len());
        let mut idx: Vec<usize> = factors.iter().map(|f| f.nilpotency_index).collect();
        idx.sort();
        let mut expected: Vec<usize> = seen.values().copied().collect();
        expected.sort();
        prop_assert_eq!(idx, expected);
        let total: usize = factors.iter().map(|f| j_series(f).unwrap().r_k).sum();
        prop_assert_eq!(total, a.dim());
    }

    #[test]
    fn idempotents_do_not_depend_on_seed(seed in 0u64..1000) {
        let q = Domain::Rationals;
        let a = quotient(&q, &[0, -1, 0, 1]);
        let base = local_decomposition(&a, ResiduePolicy::Describe, DEFAULT_SEED).unwrap();
        let other = local_decomposition(&a, ResiduePolicy::Describe, seed).unwrap();
        let mut x: Vec<_> = base.iter().map(|f| f.idempotent.clone()).collect();
        let mut y: Vec<_> = other.iter().map(|f| f.idempotent.clone()).collect();
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }
}
