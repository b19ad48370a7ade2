use lrs_core::abelian::{Carrier, Summand};
use lrs_core::artinian::ResiduePolicy;
use lrs_core::bilinear::Width;
use lrs_core::kernel::{vec_ops, Domain, Matrix, Scalar, Vector};
use lrs_core::rings::{
    categoricity_check, central_split_mixed, decompose_bounded, decompose_char0, foundation_addition, model_construct,
    verbal_ideal, RingPresentation, Word,
};
use lrs_core::Error;
use proptest::prelude::*;

fn q(n: i64) -> Scalar {
    Domain::Rationals.from_i64(n)
}

fn heisenberg(d: &Domain) -> RingPresentation {
    let z = vec![d.zero(); 3];
    let up = vec![d.zero(), d.zero(), d.one()];
    let down = vec_ops::neg(d, &up);
    RingPresentation::new(
        Carrier::vector(d.clone(), 3),
        vec![vec![z.clone(), up, z.clone()], vec![down, z.clone(), z.clone()], vec![z.clone(), z.clone(), z]],
    )
    .unwrap()
}

fn zero_line(d: &Domain) -> RingPresentation {
    RingPresentation::zero(Carrier::vector(d.clone(), 1))
}

/// The same ring written in the basis given by the columns of `p`.
fn change_basis(r: &RingPresentation, p: &Matrix) -> RingPresentation {
    let d = p.domain().clone();
    let n = r.dim();
    let inv = p.inverse().unwrap().unwrap();
    let cols = p.columns();
    let tensor = (0..n).map(|i| (0..n).map(|j| inv.apply(&r.mul(&cols[i], &cols[j]))).collect()).collect();
    RingPresentation::new(Carrier::vector(d, n), tensor).unwrap()
}

#[test]
fn two_heisenbergs_and_a_line() {
    let d = Domain::Rationals;
    let r = heisenberg(&d).direct_sum(&heisenberg(&d)).unwrap().direct_sum(&zero_line(&d)).unwrap();
    let rep = decompose_char0(&r, ResiduePolicy::Describe, 3).unwrap();
    assert_eq!(rep.components.len(), 2);
    for c in &rep.components {
        assert_eq!(c.scalar_factor.algebra.dim(), 1);
        assert_eq!(c.residue_field, Domain::Rationals);
        assert_eq!(c.ring.dim(), 3);
    }
    assert_eq!(rep.addition.dim(), 1);
    assert!(rep.addition.is_zero_multiplication());
    assert_eq!(rep.reassemble(r.carrier()).unwrap(), r.multiplication().tensor().to_vec());
    assert!(rep.cross_products_vanish(&r));
}

#[test]
fn integer_example_ring() {
    let c = Carrier::over(&Domain::Integers, 3, Some(vec![Summand::FreeIntLine; 3])).unwrap();
    let i = |n: i64| Scalar::Int(n.into());
    let z = vec![i(0), i(0), i(0)];
    let r = RingPresentation::new(
        c,
        vec![
            vec![z.clone(), vec![i(0), i(0), i(2)], z.clone()],
            vec![vec![i(0), i(0), i(-2)], z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z],
        ],
    )
    .unwrap();
    let ann = r.annihilator().unwrap();
    assert_eq!(ann.generators(), vec![vec![i(0), i(0), i(1)]]);
    let square = r.square_ideal().unwrap();
    assert_eq!(square.generators(), vec![vec![i(0), i(0), i(2)]]);
    assert!(square.generators().iter().all(|g| ann.contains(g)));
    assert!(matches!(foundation_addition(&r), Err(Error::NoSplit(_))));
}

/// `h₃ ⊗ Q(i)` as a six-dimensional rational Lie algebra on `x, ix, y, iy, z, iz`.
fn gaussian_heisenberg() -> RingPresentation {
    let d = Domain::Rationals;
    let n = 6;
    let mut tensor = vec![vec![vec_ops::zero(&d, n); n]; n];
    // (a + bi)x · (c + di)y = (ac − bd) z + (ad + bc) iz
    for (a, b) in [(1i64, 0i64), (0, 1)] {
        for (c, e) in [(1i64, 0i64), (0, 1)] {
            let xi = usize::from(b == 1);
            let yi = 2 + usize::from(e == 1);
            let v = vec![q(0), q(0), q(0), q(0), q(a * c - b * e), q(a * e + b * c)];
            tensor[yi][xi] = vec_ops::neg(&d, &v);
            tensor[xi][yi] = v;
        }
    }
    RingPresentation::new(Carrier::vector(d, n), tensor).unwrap()
}

#[test]
fn gaussian_scalars_are_found() {
    let r = gaussian_heisenberg();
    assert!(r.flags().lie);
    let rep = decompose_char0(&r, ResiduePolicy::Describe, 5).unwrap();
    assert_eq!(rep.components.len(), 1);
    let c = &rep.components[0];
    assert_eq!(c.residue_degree, 2);
    assert_eq!(c.dim_over_residue, 3);
    assert!(rep.reassembles(&r).unwrap());
    let enrichment = c.enrichment.as_ref().unwrap();
    assert!(enrichment.compatible && enrichment.satisfies_minpoly);
    let (over_k, basis) = c.over_residue_field().unwrap();
    assert_eq!(basis.len(), 3);
    assert!(over_k.flags().lie);
    assert_eq!(over_k.square_ideal().unwrap().generators().len(), 1);
    let model = model_construct(&over_k, &c.residue_field).unwrap();
    assert_eq!(model.model.dim(), 3);
    assert!(model.model.flags().lie);
}

#[test]
fn bounded_heisenbergs_over_gf2() {
    let f2 = Domain::prime_field(2).unwrap();
    let r = heisenberg(&f2).direct_sum(&heisenberg(&f2)).unwrap();
    let rep = decompose_bounded(&r, ResiduePolicy::Describe, 1).unwrap();
    assert_eq!(rep.factors.len(), 2);
    assert!(rep.mutually_annihilating);
    assert!(matches!(decompose_bounded(&zero_line(&f2), ResiduePolicy::Describe, 1), Err(Error::DegenerateInput(_))));
}

#[test]
fn mixed_ring_splits_centrally() {
    // Q-line with a square-zero product beside a Z/2 Heisenberg ring
    let c = Carrier::over(
        &Domain::Integers,
        4,
        Some(vec![Summand::RationalLine, Summand::Cyclic(2), Summand::Cyclic(2), Summand::Cyclic(2)]),
    )
    .unwrap();
    let zero = c.zero();
    let mut tensor = vec![vec![zero.clone(); 4]; 4];
    tensor[1][2] = c.unit(3);
    tensor[2][1] = c.unit(3);
    let r = RingPresentation::new(c, tensor).unwrap();
    let split = central_split_mixed(&r).unwrap();
    assert_eq!(split.divisible.dim(), 1);
    assert_eq!(split.bounded.dim(), 3);
    assert!(split.mutually_annihilating);
}

#[test]
fn verbal_ideals_and_width() {
    let d = Domain::Rationals;
    let r = heisenberg(&d);
    let (w, _) = Word::parse("x * y").unwrap();
    let v = verbal_ideal(&r, &w, 8).unwrap();
    assert_eq!(v.ideal, r.square_ideal().unwrap());
    assert_eq!(v.width, Some(Width::Exact(1)));
    let (w, _) = Word::parse("(x * y) * z").unwrap();
    assert!(verbal_ideal(&r, &w, 8).unwrap().ideal.is_zero());
}

#[test]
fn categoricity_verdicts() {
    let d = Domain::Rationals;
    assert!(categoricity_check(&heisenberg(&d), 1).unwrap().satisfied);
    let r = heisenberg(&d).direct_sum(&zero_line(&d)).unwrap();
    assert!(!categoricity_check(&r, 1).unwrap().satisfied);
}

fn invertible(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    // unit lower triangular times unit upper triangular
    (proptest::collection::vec(-2i64..=2, n * n), proptest::collection::vec(-2i64..=2, n * n)).prop_map(
        move |(l, u)| {
            let at = |v: &[i64], i: usize, j: usize| v[i * n + j];
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            (0..n)
                                .map(|k| {
                                    let lv = if i == k {
                                        1
                                    } else if k < i {
                                        at(&l, i, k)
                                    } else {
                                        0
                                    };
                                    let uv = if k == j {
                                        1
                                    } else if k < j {
                                        at(&u, k, j)
                                    } else {
                                        0
                                    };
                                    lv * uv
                                })
                                .sum()
                        })
                        .collect()
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn disguised_sums_decompose(heis in 1usize..=2, lines in 0usize..=1, p in invertible(7)) {
        let d = Domain::Rationals;
        let mut r = heisenberg(&d);
        for _ in 1..heis {
            r = r.direct_sum(&heisenberg(&d)).unwrap();
        }
        for _ in 0..lines {
            r = r.direct_sum(&zero_line(&d)).unwrap();
        }
        let n = r.dim();
        let rows: Vec<Vector> = p[..n].iter().map(|row| row[..n].iter().map(|&x| q(x)).collect()).collect();
        let m = Matrix::from_rows(d.clone(), n, rows);
        prop_assume!(m.rank().unwrap() == n);
        let disguised = change_basis(&r, &m);
        let rep = decompose_char0(&disguised, ResiduePolicy::Describe, 9).unwrap();
        prop_assert_eq!(rep.components.len(), heis);
        prop_assert_eq!(rep.addition.dim(), lines);
        prop_assert!(rep.reassembles(&disguised).unwrap());
        prop_assert!(rep.cross_products_vanish(&disguised));
        let ann = disguised.annihilator().unwrap();
        prop_assert_eq!(ann.generators().len(), heis + lines);
    }
}
