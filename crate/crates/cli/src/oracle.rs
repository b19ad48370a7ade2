//! Brute-force reference computations, independent of the library algorithms they check.

use std::collections::{BTreeMap, BTreeSet};

use lrs_core::abelian::Carrier;
use lrs_core::bilinear::BilinearMap;
use lrs_core::kernel::snf::{int_identity, int_mul, smith};
use lrs_core::kernel::{Domain, Matrix, Rational, Scalar, Vector};
use lrs_core::malcev::{verify_nilpotent_lie, NilpotentLieAlgebra};
use lrs_core::rings::RingPresentation;
use lrs_core::scalars::{p_of_f, z_n_chain};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A bilinear map `GF(p)^n × GF(p)^n → GF(p)^m` in plain integer arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBilinear {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    /// `t[i][j][k]`: coordinate `k` of `f(bᵢ, bⱼ)`.
    pub t: Vec<Vec<Vec<u64>>>,
}

pub type SmallMatrix = Vec<Vec<u64>>;

impl FiniteBilinear {
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

    pub fn eval(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.m];
        for i in 0..self.n {
            for j in 0..self.n {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = (*o + x[i] * y[j] * self.t[i][j][k]) % self.p;
                }
            }
        }
        out
    }

    fn apply(&self, a: &SmallMatrix, x: &[u64]) -> Vec<u64> {
        a.iter().map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum::<u64>() % self.p).collect()
    }

    fn compose(&self, a: &SmallMatrix, b: &SmallMatrix) -> SmallMatrix {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| (0..self.n).map(|k| a[i][k] * b[k][j]).sum::<u64>() % self.p).collect())
            .collect()
    }

    fn matrices(&self) -> Vec<SmallMatrix> {
        self.vectors(self.n * self.n)
            .into_iter()
            .map(|v| v.chunks(self.n.max(1)).map(|r| r.to_vec()).collect())
            .collect()
    }

    /// Number of `x` with `f(x, M) = f(M, x) = 0`.
    pub fn two_sided_kernel_size(&self) -> usize {
        let all = self.vectors(self.n);
        let zero = vec![0; self.m];
        all.iter().filter(|x| all.iter().all(|y| self.eval(x, y) == zero && self.eval(y, x) == zero)).count()
    }

    /// First `n` at which the `n`-fold sumset of `{(f(x, y), f(Ax, y))}` stops being the
    /// graph of a function, or `None` if it never does.
    fn failure_index(&self, a: &SmallMatrix) -> Option<usize> {
        let all = self.vectors(self.n);
        let single: BTreeSet<(Vec<u64>, Vec<u64>)> = all
            .iter()
            .flat_map(|x| all.iter().map(move |y| (x, y)))
            .map(|(x, y)| (self.eval(x, y), self.eval(&self.apply(a, x), y)))
            .collect();
        let add = |u: &[u64], v: &[u64]| -> Vec<u64> { u.iter().zip(v).map(|(a, b)| (a + b) % self.p).collect() };
        let mut graph: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::from([(vec![0; self.m], vec![0; self.m])]);
        let mut n = 1;
        loop {
            let mut next: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
            for (u, v) in &graph {
                for (s, t) in &single {
                    let (key, value) = (add(u, s), add(v, t));
                    if next.get(&key).is_some_and(|w| *w != value) {
                        return Some(n);
                    }
                    next.insert(key, value);
                }
            }
            if next == graph {
                return None;
            }
            graph = next;
            n += 1;
        }
    }

    pub fn to_map(&self) -> BilinearMap {
        let d = Domain::PrimeField(self.p);
        let tensor = self
            .t
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(|&c| d.from_i64(c as i64)).collect()).collect())
            .collect();
        BilinearMap::new(Carrier::vector(d.clone(), self.n), Carrier::vector(d, self.m), tensor)
            .expect("well-formed tensor")
    }
}

/// `P(f)` and the first stable term of the chain `Z₁ ⊇ Z₂ ⊇ ⋯`, by enumeration.
#[derive(Clone, Debug)]
pub struct EnumeratedScalars {
    pub p: BTreeSet<SmallMatrix>,
    pub first_stable_term: BTreeSet<SmallMatrix>,
    pub stable_at: usize,
}

pub fn enumerate_scalars(b: &FiniteBilinear) -> EnumeratedScalars {
    let units: Vec<Vec<u64>> = (0..b.n).map(|i| (0..b.n).map(|j| u64::from(i == j)).collect()).collect();
    let sym: Vec<SmallMatrix> = b
        .matrices()
        .into_iter()
        .filter(|a| units.iter().all(|x| units.iter().all(|y| b.eval(&b.apply(a, x), y) == b.eval(x, &b.apply(a, y)))))
        .collect();
    let z: Vec<SmallMatrix> =
        sym.iter().filter(|a| sym.iter().all(|c| b.compose(a, c) == b.compose(c, a))).cloned().collect();
    let failures: Vec<Option<usize>> = z.iter().map(|a| b.failure_index(a)).collect();
    let z_n = |n: usize| -> BTreeSet<SmallMatrix> {
        z.iter().zip(&failures).filter(|(_, f)| f.is_none_or(|k| k > n)).map(|(a, _)| a.clone()).collect()
    };
    let mut n = 1;
    while z_n(n) != z_n(n + 1) {
        n += 1;
    }
    EnumeratedScalars {
        p: z.iter().zip(&failures).filter(|(_, f)| f.is_none()).map(|(a, _)| a.clone()).collect(),
        first_stable_term: z_n(n),
        stable_at: n,
    }
}

fn to_small(m: &Matrix) -> SmallMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter().map(|s| if let Scalar::Mod(v) = s { v } else { unreachable!("prime field entry") }).collect()
        })
        .collect()
}

fn all_combinations(field: &Domain, dim: usize) -> lrs_core::Result<Vec<Vector>> {
    lrs_core::finite::elements(&Carrier::vector(field.clone(), dim), u128::MAX)
}

/// Every element of the library's `P(f)`.
pub fn library_scalars(f: &BilinearMap) -> lrs_core::Result<BTreeSet<SmallMatrix>> {
    let report = p_of_f(f)?;
    let coeffs = all_combinations(report.p_basis.field(), report.p_basis.dim())?;
    Ok(coeffs.iter().map(|c| to_small(&report.p_basis.combination(c))).collect())
}

/// Every element of the limit of the library's `Z_n` chain.
pub fn library_chain_limit(f: &BilinearMap) -> lrs_core::Result<BTreeSet<SmallMatrix>> {
    let chain = z_n_chain(f, 12)?;
    let l = chain.limit();
    let coeffs = all_combinations(l.field(), l.dim())?;
    Ok(coeffs.iter().map(|c| to_small(&l.combination(c))).collect())
}

/// Outcome of comparing the library against enumeration on one nondegenerate instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarComparison {
    pub matches_p: bool,
    pub matches_chain: bool,
    pub chain_stabilizes_at_p: bool,
}

impl ScalarComparison {
    pub fn passed(&self) -> bool {
        self.matches_p && self.matches_chain && self.chain_stabilizes_at_p
    }
}

pub fn compare_scalars(b: &FiniteBilinear) -> lrs_core::Result<ScalarComparison> {
    let truth = enumerate_scalars(b);
    let f = b.to_map();
    Ok(ScalarComparison {
        matches_p: library_scalars(&f)? == truth.p,
        matches_chain: library_chain_limit(&f)? == truth.p,
        chain_stabilizes_at_p: truth.first_stable_term == truth.p,
    })
}

pub fn random_instance(rng: &mut ChaCha8Rng, p: u64) -> FiniteBilinear {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let t = (0..n).map(|_| (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..p)).collect()).collect()).collect();
    FiniteBilinear { p, n, m, t }
}

/// Random instances with trivial two-sided kernel, as `P(f)` requires.
pub fn nondegenerate_instances(rng: &mut ChaCha8Rng, primes: &[u64], count: usize) -> Vec<FiniteBilinear> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let b = random_instance(rng, primes[i % primes.len()]);
        if b.two_sided_kernel_size() == 1 {
            out.push(b);
            i += 1;
        }
    }
    out
}

/// Multiplication maps of small commutative algebras, where `P(f)` exceeds the scalars.
pub fn structured_instances(primes: &[u64]) -> Vec<FiniteBilinear> {
    let diag = |p: u64, n: usize| FiniteBilinear {
        p,
        n,
        m: n,
        t: (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| u64::from(i == j && j == k)).collect()).collect()).collect(),
    };
    let mut out = Vec::new();
    if primes.contains(&2) {
        // GF(4) = GF(2)[w]/(w² + w + 1) on the basis 1, w
        let gf4 =
            FiniteBilinear { p: 2, n: 2, m: 2, t: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]] };
        out.extend([diag(2, 2), diag(2, 3), gf4]);
    }
    if primes.contains(&3) {
        // GF(3)[x]/(x²) and GF(3)[x]/(x³) on monomial bases
        let truncated = |n: usize| FiniteBilinear {
            p: 3,
            n,
            m: n,
            t: (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| u64::from(i + j == k)).collect()).collect()).collect(),
        };
        out.extend([diag(3, 2), diag(3, 3), truncated(2), truncated(3)]);
    }
    out
}

/// Determinant by cofactor expansion along the first row.
fn determinant(a: &[Vec<BigInt>]) -> BigInt {
    match a.len() {
        0 => BigInt::one(),
        1 => a[0][0].clone(),
        n => (0..n).fold(BigInt::zero(), |acc, j| {
            let minor: Vec<Vec<BigInt>> = a[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &a[0][j] * determinant(&minor);
            if j % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        }),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `gcd` of all `k × k` minors: the `k`-th determinantal divisor.
fn determinantal_divisor(a: &[Vec<BigInt>], k: usize) -> BigInt {
    let (r, c) = (a.len(), a[0].len());
    let mut g = BigInt::zero();
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let minor: Vec<Vec<BigInt>> =
                rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect();
            g = g.gcd(&determinant(&minor));
        }
    }
    g
}

/// Checks a Smith form of `a`: `U·A·V = D`, the inverses, the divisibility chain, and
/// `d₁⋯d_k` against the determinantal divisors computed from minors.
pub fn check_smith(a: &[Vec<i64>]) -> bool {
    let (r, c) = (a.len(), a[0].len());
    let a: Vec<Vec<BigInt>> = a.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let s = smith(&a, r, c);
    let uav = int_mul(&int_mul(&s.u, &a, r, c), &s.v, c, c);
    let diagonal = (0..r).all(|i| {
        (0..c).all(|j| {
            let expected = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
            uav[i][j] == expected
        })
    });
    let inverses = int_mul(&s.u, &s.u_inv, r, r) == int_identity(r) && int_mul(&s.v, &s.v_inv, c, c) == int_identity(c);
    let nonzero: Vec<&BigInt> = s.diag.iter().filter(|d| !d.is_zero()).collect();
    let chain = nonzero.iter().all(|d| d.is_positive())
        && nonzero.windows(2).all(|w| (w[1] % w[0]).is_zero())
        && nonzero.len() == s.rank;
    let mut product = BigInt::one();
    let mut divisors = true;
    for k in 1..=r.min(c) {
        product *= s.diag.get(k - 1).cloned().unwrap_or_default();
        divisors &= product == determinantal_divisor(&a, k);
    }
    diagonal && inverses && chain && divisors
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    (0..r).map(|_| (0..c).map(|_| rng.gen_range(-6..=6)).collect()).collect()
}

/// `h₃` on `x, y, z` with `(x, y) = z`.
pub fn heisenberg() -> NilpotentLieAlgebra {
    let q = Domain::Rationals;
    let z = vec![q.zero(); 3];
    let up = vec![q.zero(), q.zero(), q.one()];
    let down = vec![q.zero(), q.zero(), q.from_i64(-1)];
    let r = RingPresentation::new(
        Carrier::vector(q, 3),
        vec![vec![z.clone(), up, z.clone()], vec![down, z.clone(), z.clone()], vec![z.clone(), z.clone(), z]],
    )
    .expect("h3 table");
    verify_nilpotent_lie(&r).expect("h3 is nilpotent")
}

type Mat3 = [[Rational; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j])))
}

fn mat_add(a: &Mat3, b: &Mat3, c: &Rational) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] + c * &b[i][j]))
}

fn identity3() -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Rational::one() } else { Rational::zero() }))
}

/// `a·x + b·y + c·z ↦ a E₁₂ + b E₂₃ + c E₁₃`.
fn embed(v: &[Rational]) -> Mat3 {
    let mut m: Mat3 = std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()));
    m[0][1] = v[0].clone();
    m[1][2] = v[1].clone();
    m[0][2] = v[2].clone();
    m
}

/// `log(exp X · exp Y)` computed with strictly upper triangular 3×3 matrices.
pub fn heisenberg_product(x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let exp = |n: &Mat3| mat_add(&mat_add(&identity3(), n, &Rational::one()), &mat_mul(n, n), &half);
    let u = mat_mul(&exp(&embed(x)), &exp(&embed(y)));
    let m = mat_add(&u, &identity3(), &-Rational::one());
    let log = mat_add(&m, &mat_mul(&m, &m), &-half);
    vec![log[0][1].clone(), log[1][2].clone(), log[0][2].clone()]
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(rng.gen_range(1..=3)))
}

pub fn random_rationals(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| random_rational(rng)).collect()
}
