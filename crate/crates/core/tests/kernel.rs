use lrs_core::kernel::snf::{hnf, int_mul, smith};
use lrs_core::kernel::{poly_factor, squarefree_decomposition, vec_ops, Domain, Matrix, Poly, Subspace};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-4i64..=4, c), r))
}

fn to_matrix(d: &Domain, rows: &[Vec<i64>]) -> Matrix {
    let cols = rows[0].len();
    Matrix::from_rows(d.clone(), cols, rows.iter().map(|r| r.iter().map(|&x| d.from_i64(x)).collect()).collect())
}

fn to_int(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[test]
fn smith_small_diagonal() {
    let a = to_int(&[vec![2, 0], vec![0, 3]]);
    let s = smith(&a, 2, 2);
    assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
}

#[test]
fn gf_arithmetic() {
    let f7 = Domain::prime_field(7).unwrap();
    let three = f7.from_i64(3);
    assert_eq!(f7.inv(&three), Some(f7.from_i64(5)));
    assert!(Domain::prime_field(6).is_err());
}

proptest! {
    #[test]
    fn kernel_and_rank(rows in small_matrix(4, 5), p in prop::sample::select(vec![0u64, 2, 3, 5])) {
        let d = if p == 0 { Domain::Rationals } else { Domain::prime_field(p).unwrap() };
        let m = to_matrix(&d, &rows);
        let ker = m.kernel().unwrap();
        for v in &ker {
            prop_assert!(vec_ops::is_zero(&d, &m.apply(v)));
        }
        prop_assert_eq!(m.rank().unwrap() + ker.len(), m.cols());
        prop_assert_eq!(Subspace::span(d.clone(), m.cols(), &ker).unwrap().dim(), ker.len());
    }

    #[test]
    fn solve_is_consistent(rows in small_matrix(4, 4), x in proptest::collection::vec(-3i64..=3, 4)) {
        let d = Domain::Rationals;
        let m = to_matrix(&d, &rows);
        let x: Vec<_> = x[..m.cols()].iter().map(|&v| d.from_i64(v)).collect();
        let b = m.apply(&x);
        let y = m.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.apply(&y), b);
    }

    #[test]
    fn inverse_round_trip(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 3)) {
        let d = Domain::Rationals;
        let m = to_matrix(&d, &rows);
        match m.inverse().unwrap() {
            Some(inv) => prop_assert_eq!(m.mul(&inv), Matrix::identity(d, 3)),
            None => prop_assert!(m.rank().unwrap() < 3),
        }
    }

    #[test]
    fn smith_remultiplies(rows in small_matrix(4, 4)) {
        let (r, c) = (rows.len(), rows[0].len());
        let a = to_int(&rows);
        let s = smith(&a, r, c);
        let uav = int_mul(&int_mul(&s.u, &a, r, c), &s.v, c, c);
        for i in 0..r {
            for j in 0..c {
                let expected = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&uav[i][j], &expected);
            }
        }
        prop_assert_eq!(int_mul(&s.u, &s.u_inv, r, r), lrs_core::kernel::snf::int_identity(r));
        prop_assert_eq!(int_mul(&s.v, &s.v_inv, c, c), lrs_core::kernel::snf::int_identity(c));
        for w in s.diag.windows(2) {
            prop_assert!(w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && (&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn hnf_spans_the_same_lattice(rows in small_matrix(3, 3)) {
        let c = rows[0].len();
        let a = to_int(&rows);
        let h = hnf(&a, c);
        // equal lattices have equal Smith invariants on the stacked generators
        let stack = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| {
            let mut s = x.clone();
            s.extend(y.iter().cloned());
            s
        };
        let inv = |m: &Vec<Vec<BigInt>>| { let s = smith(m, m.len(), c); s.diag.into_iter().filter(|x| !x.is_zero()).collect::<Vec<_>>() };
        if !h.is_empty() {
            prop_assert_eq!(inv(&stack(&a, &h)), inv(&a));
            prop_assert_eq!(inv(&stack(&h, &a)), inv(&h));
        } else {
            prop_assert!(a.iter().flatten().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn xgcd_bezout(a in proptest::collection::vec(-5i64..=5, 1..5), b in proptest::collection::vec(-5i64..=5, 1..5)) {
        let d = Domain::Rationals;
        let (pa, pb) = (Poly::from_i64(d.clone(), &a), Poly::from_i64(d.clone(), &b));
        prop_assume!(!pa.is_zero() || !pb.is_zero());
        let (g, s, t) = pa.xgcd(&pb).unwrap();
        prop_assert_eq!(s.mul(&pa).add(&t.mul(&pb)), g.clone());
        if !pa.is_zero() { prop_assert!(pa.rem(&g).unwrap().is_zero()); }
        if !pb.is_zero() { prop_assert!(pb.rem(&g).unwrap().is_zero()); }
    }

    #[test]
    fn factorization_multiplies_back(a in proptest::collection::vec(-3i64..=3, 2..6), p in prop::sample::select(vec![0u64, 2, 3, 5])) {
        let d = if p == 0 { Domain::Rationals } else { Domain::prime_field(p).unwrap() };
        let f = Poly::from_i64(d.clone(), &a);
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let monic = f.monic().unwrap();
        let product = poly_factor(&f).unwrap().iter().fold(Poly::constant(d.clone(), d.one()), |acc, (g, e)| acc.mul(&g.pow(*e)));
        prop_assert_eq!(product.clone(), monic.clone());
        let sq = squarefree_decomposition(&f).unwrap().iter().fold(Poly::constant(d.clone(), d.one()), |acc, (g, e)| acc.mul(&g.pow(*e)));
        prop_assert_eq!(sq, monic);
    }
}

#[test]
fn factor_over_gf2() {
    let d = Domain::prime_field(2).unwrap();
    // x⁴ + x = x(x + 1)(x² + x + 1)
    let f = Poly::from_i64(d.clone(), &[0, 1, 0, 0, 1]);
    let mut degrees: Vec<usize> = poly_factor(&f).unwrap().iter().map(|(g, _)| g.degree().unwrap()).collect();
    degrees.sort();
    assert_eq!(degrees, vec![1, 1, 2]);
}
