use std::collections::{BTreeMap, BTreeSet};

use lrs_core::abelian::{Carrier, Submodule};
use lrs_core::artinian::ResiduePolicy;
use lrs_core::bilinear::BilinearMap;
use lrs_core::kernel::{Domain, Matrix, Scalar};
use lrs_core::scalars::{decompose_via_scalars, p_of_f, symmetric_endos, z_n_chain};
use lrs_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A bilinear map over GF(p) in plain integer arithmetic.
struct Brute {
    p: u64,
    n: usize,
    m: usize,
    t: Vec<Vec<Vec<u64>>>,
}

type Mat = Vec<Vec<u64>>;

impl Brute {
    fn vectors(&self, len: usize) -> Vec<Vec<u64>> {
        (0..self.p.pow(len as u32))
            .map(|mut c| {
                (0..len)
                    .map(|_| {
                        let d = c % self.p;
                        c /= self.p;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    fn eval(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.m];
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.m {
                    out[k] = (out[k] + x[i] * y[j] * self.t[i][j][k]) % self.p;
                }
            }
        }
        out
    }

    fn apply(&self, a: &Mat, x: &[u64]) -> Vec<u64> {
        a.iter().map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum::<u64>() % self.p).collect()
    }

    fn compose(&self, a: &Mat, b: &Mat) -> Mat {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| (0..self.n).map(|k| a[i][k] * b[k][j]).sum::<u64>() % self.p).collect())
            .collect()
    }

    fn matrices(&self) -> Vec<Mat> {
        self.vectors(self.n * self.n).into_iter().map(|v| v.chunks(self.n).map(|r| r.to_vec()).collect()).collect()
    }

    fn two_sided_kernel_size(&self) -> usize {
        let all = self.vectors(self.n);
        let zero = vec![0; self.m];
        all.iter().filter(|x| all.iter().all(|y| self.eval(x, y) == zero && self.eval(y, x) == zero)).count()
    }

    /// First `n` at which the `n`-fold sumset of `{(f(x, y), f(Ax, y))}` stops being a
    /// function graph, or `None` if it never does.
    fn failure_index(&self, a: &Mat) -> Option<usize> {
        let all = self.vectors(self.n);
        let single: BTreeSet<(Vec<u64>, Vec<u64>)> = all
            .iter()
            .flat_map(|x| all.iter().map(move |y| (x, y)))
            .map(|(x, y)| (self.eval(x, y), self.eval(&self.apply(a, x), y)))
            .collect();
        let add = |u: &[u64], v: &[u64]| -> Vec<u64> { u.iter().zip(v).map(|(a, b)| (a + b) % self.p).collect() };
        let mut graph: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::from([(vec![0; self.m], vec![0; self.m])]);
        for n in 1.. {
            let mut next: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
            for (u, v) in &graph {
                for (s, t) in &single {
                    let (key, value) = (add(u, s), add(v, t));
                    if let Some(w) = next.get(&key) {
                        if *w != value {
                            return Some(n);
                        }
                    }
                    next.insert(key, value);
                }
            }
            if next == graph {
                return None;
            }
            graph = next;
        }
        unreachable!()
    }
}

struct OracleResult {
    p: BTreeSet<Mat>,
    first_stable_term: BTreeSet<Mat>,
}

fn oracle(b: &Brute) -> OracleResult {
    let all = b.matrices();
    let units: Vec<Vec<u64>> = (0..b.n).map(|i| (0..b.n).map(|j| u64::from(i == j)).collect()).collect();
    let sym: Vec<Mat> = all
        .into_iter()
        .filter(|a| units.iter().all(|x| units.iter().all(|y| b.eval(&b.apply(a, x), y) == b.eval(x, &b.apply(a, y)))))
        .collect();
    let z: Vec<Mat> = sym.iter().filter(|a| sym.iter().all(|c| b.compose(a, c) == b.compose(c, a))).cloned().collect();
    let failures: Vec<Option<usize>> = z.iter().map(|a| b.failure_index(a)).collect();
    let z_n = |n: usize| -> BTreeSet<Mat> {
        z.iter().zip(&failures).filter(|(_, f)| f.is_none_or(|k| k > n)).map(|(a, _)| a.clone()).collect()
    };
    let mut n = 1;
    while z_n(n) != z_n(n + 1) {
        n += 1;
    }
    OracleResult {
        p: z.iter().zip(&failures).filter(|(_, f)| f.is_none()).map(|(a, _)| a.clone()).collect(),
        first_stable_term: z_n(n),
    }
}

fn to_map(b: &Brute) -> BilinearMap {
    let d = Domain::prime_field(b.p).unwrap();
    let tensor =
        b.t.iter().map(|row| row.iter().map(|v| v.iter().map(|&c| d.from_i64(c as i64)).collect()).collect()).collect();
    BilinearMap::new(Carrier::vector(d.clone(), b.n), Carrier::vector(d, b.m), tensor).unwrap()
}

fn to_mat(m: &Matrix) -> Mat {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|s| if let Scalar::Mod(v) = s { v } else { panic!("prime field entry") }).collect())
        .collect()
}

fn library_elements(f: &BilinearMap) -> lrs_core::Result<BTreeSet<Mat>> {
    let report = p_of_f(f)?;
    let d = report.p_basis.field().clone();
    let coeffs = lrs_core::finite::elements(&Carrier::vector(d, report.p_basis.dim()), u128::MAX)?;
    Ok(coeffs.iter().map(|c| to_mat(&report.p_basis.combination(c))).collect())
}

fn random_instance(rng: &mut ChaCha8Rng, p: u64) -> Brute {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let t = (0..n).map(|_| (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..p)).collect()).collect()).collect();
    Brute { p, n, m, t }
}

/// Multiplication tables of small commutative algebras, where `P(f)` is larger than the scalars.
fn structured_instances() -> Vec<Brute> {
    let diag = |p: u64, n: usize| Brute {
        p,
        n,
        m: n,
        t: (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| u64::from(i == j && j == k)).collect()).collect()).collect(),
    };
    // GF(4) = GF(2)[w]/(w² + w + 1) on the basis 1, w
    let gf4 = Brute { p: 2, n: 2, m: 2, t: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]] };
    // GF(3)[x]/(x²) on the basis 1, x
    let dual = Brute { p: 3, n: 2, m: 2, t: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]] };
    // GF(3)[x]/(x³)
    let cube = Brute {
        p: 3,
        n: 3,
        m: 3,
        t: (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| u64::from(i + j == k)).collect()).collect()).collect(),
    };
    vec![diag(2, 2), diag(2, 3), diag(3, 2), diag(3, 3), gf4, dual, cube]
}

#[test]
fn p_of_f_matches_brute_force() {
    let mut nontrivial = 0;
    for b in structured_instances() {
        let f = to_map(&b);
        let truth = oracle(&b);
        assert_eq!(truth.first_stable_term, truth.p);
        assert_eq!(library_elements(&f).unwrap(), truth.p, "tensor {:?} over GF({})", b.t, b.p);
        nontrivial += usize::from(truth.p.len() > b.p as usize);
    }
    assert!(nontrivial >= 6);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = [0usize; 2];
    while checked.iter().sum::<usize>() < 24 {
        let p = if checked[0] <= checked[1] { 2 } else { 3 };
        let b = random_instance(&mut rng, p);
        let f = to_map(&b);
        let kernel_size = b.two_sided_kernel_size();
        match f.two_sided_kernel().unwrap() {
            Submodule::Field(s) => assert_eq!((p as usize).pow(s.dim() as u32), kernel_size),
            other => panic!("unexpected {other:?}"),
        }
        if kernel_size > 1 {
            assert!(matches!(p_of_f(&f), Err(Error::DegenerateInput(_))));
            continue;
        }
        let truth = oracle(&b);
        assert_eq!(truth.first_stable_term, truth.p);
        assert_eq!(library_elements(&f).unwrap(), truth.p, "tensor {:?} over GF({p})", b.t);
        let chain = z_n_chain(&f, 12).unwrap();
        let limit: BTreeSet<Mat> = {
            let l = chain.limit();
            let coeffs = lrs_core::finite::elements(&Carrier::vector(l.field().clone(), l.dim()), u128::MAX).unwrap();
            coeffs.iter().map(|c| to_mat(&l.combination(c))).collect()
        };
        assert_eq!(limit, truth.p);
        checked[usize::from(p == 3)] += 1;
    }
}

#[test]
fn symmetric_endos_match_brute_force_over_gf2() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let b = random_instance(&mut rng, 2);
        let f = to_map(&b);
        let units: Vec<Vec<u64>> = (0..b.n).map(|i| (0..b.n).map(|j| u64::from(i == j)).collect()).collect();
        let count = b
            .matrices()
            .iter()
            .filter(|a| {
                units.iter().all(|x| units.iter().all(|y| b.eval(&b.apply(a, x), y) == b.eval(x, &b.apply(a, y))))
            })
            .count();
        let sym = symmetric_endos(&f).unwrap();
        assert_eq!(1usize << sym.dim(), count);
    }
}

fn q(n: i64) -> Scalar {
    Domain::Rationals.from_i64(n)
}

/// `f(x, y) = x₁y₂ − x₂y₁` on `Q²`.
fn alternating() -> BilinearMap {
    let tensor = vec![vec![vec![q(0)], vec![q(1)]], vec![vec![q(-1)], vec![q(0)]]];
    BilinearMap::new(Carrier::vector(Domain::Rationals, 2), Carrier::vector(Domain::Rationals, 1), tensor).unwrap()
}

#[test]
fn alternating_form_scalars() {
    let f = alternating();
    let report = p_of_f(&f).unwrap();
    // a nondegenerate form on Q² onto Q has only the scalars
    assert_eq!(report.p_basis.dim(), 1);
    assert!(report.certifies_bilinearity(&f).unwrap());
    let sum = f.direct_sum(&f).unwrap();
    let report = p_of_f(&sum).unwrap();
    assert_eq!(report.p_basis.dim(), 2);
    assert!(report.certifies_bilinearity(&sum).unwrap());
    let dec = decompose_via_scalars(&sum, ResiduePolicy::Describe, 1).unwrap();
    assert_eq!(dec.components.len(), 2);
    assert_eq!(dec.reassemble(sum.source(), sum.target()).unwrap(), sum.tensor().to_vec());
}

#[test]
fn certificate_over_finite_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = 0;
    while seen < 12 {
        let p = if seen % 2 == 0 { 2 } else { 3 };
        let b = random_instance(&mut rng, p);
        let f = to_map(&b);
        let Ok(report) = p_of_f(&f) else { continue };
        assert!(report.certifies_bilinearity(&f).unwrap());
        let dec = decompose_via_scalars(&f, ResiduePolicy::Describe, 5).unwrap();
        assert_eq!(dec.reassemble(f.source(), f.target()).unwrap(), f.tensor().to_vec());
        seen += 1;
    }
}
