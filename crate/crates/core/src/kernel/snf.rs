//! Integer matrices: Smith and Hermite normal forms, integer solving, and kernels.
//!
//! Matrices are `Vec<Vec<BigInt>>` in row-major order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::domain::{Domain, Rational, Scalar};
use super::matrix::Matrix;

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> IntMatrix {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j])).collect())
        .collect()
}

pub fn int_apply(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)).collect()
}

/// `vᵀ A`.
pub fn int_row_apply(v: &[BigInt], a: &IntMatrix, cols: usize) -> Vec<BigInt> {
    (0..cols).map(|j| v.iter().zip(a).fold(BigInt::zero(), |acc, (x, row)| acc + x * &row[j])).collect()
}

fn transpose(a: &IntMatrix, rows: usize, cols: usize) -> IntMatrix {
    (0..cols).map(|j| (0..rows).map(|i| a[i][j].clone()).collect()).collect()
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let q = Domain::Rationals;
    let m = Matrix::from_rows(q.clone(), n, a.iter().map(|r| r.iter().map(|x| q.from_bigint(x)).collect()).collect());
    let inv = m.inverse().expect("rational field").expect("unimodular matrix is invertible");
    inv.to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| match x {
                    Scalar::Rat(v) if v.is_integer() => v.to_integer(),
                    other => panic!("inverse of a unimodular matrix has entry {other:?}"),
                })
                .collect()
        })
        .collect()
}

/// `U · A · V = diag(d)` with `U`, `V` unimodular and `d₁ | d₂ | …`, all `dᵢ ≥ 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

pub fn smith(a: &IntMatrix, rows: usize, cols: usize) -> Smith {
    let mut m: IntMatrix = a.clone();
    let mut u = int_identity(rows);
    let mut v = int_identity(cols);
    let steps = rows.min(cols);
    for t in 0..steps {
        // smallest nonzero entry of the remaining block
        let Some((pi, pj)) = min_entry(&m, t, rows, cols) else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = m[i][t].div_floor(&m[t][t]);
                    row_axpy(&mut m, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    if !m[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].div_floor(&m[t][t]);
                    col_axpy(&mut m, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    if !m[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                let (pi, pj) = min_in_cross(&m, t, rows, cols);
                m.swap(t, pi);
                u.swap(t, pi);
                swap_cols(&mut m, t, pj);
                swap_cols(&mut v, t, pj);
                continue;
            }
            // divisibility of the rest of the block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&m[i][j] % &m[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let one = -BigInt::one();
                    row_axpy(&mut m, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let diag: Vec<BigInt> = (0..steps).map(|i| m[i][i].clone()).collect();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let u_inv = unimodular_inverse(&u);
    let v_inv = unimodular_inverse(&v);
    Smith { diag, u, u_inv, v, v_inv, rank }
}

fn min_entry(m: &IntMatrix, t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..rows {
        for j in t..cols {
            if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(m: &IntMatrix, t: usize, rows: usize, cols: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t..rows {
        if !m[i][t].is_zero() && (m[best.0][best.1].is_zero() || m[i][t].abs() < m[best.0][best.1].abs()) {
            best = (i, t);
        }
    }
    for j in t..cols {
        if !m[t][j].is_zero() && (m[best.0][best.1].is_zero() || m[t][j].abs() < m[best.0][best.1].abs()) {
            best = (t, j);
        }
    }
    best
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// `row[i] -= q · row[t]`.
fn row_axpy(m: &mut IntMatrix, i: usize, t: usize, q: &BigInt) {
    let src = m[t].clone();
    for (x, s) in m[i].iter_mut().zip(&src) {
        *x -= q * s;
    }
}

/// `col[j] -= q · col[t]`.
fn col_axpy(m: &mut IntMatrix, j: usize, t: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[t].clone();
        row[j] -= q * s;
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows` (each of length `cols`):
/// positive pivots, entries above a pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf(rows: &[Vec<BigInt>], cols: usize) -> IntMatrix {
    let mut a: IntMatrix = rows.to_vec();
    let n = a.len();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..n {
                if !a[i][c].is_zero() && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut clean = true;
            for i in r + 1..n {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    row_axpy(&mut a, i, r, &q);
                    if !a[i][c].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a.get(r).is_none_or(|row| row[c].is_zero()) {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                row_axpy(&mut a, i, r, &q);
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Some integer solution of `A x = b`.
pub fn int_solve(a: &IntMatrix, rows: usize, cols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith(a, rows, cols);
    let y = int_apply(&s.u, b);
    let mut z = vec![BigInt::zero(); cols];
    for (i, yi) in y.iter().enumerate() {
        let d = s.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !yi.is_zero() {
                return None;
            }
        } else {
            let (q, r) = yi.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        }
    }
    Some(int_apply(&s.v, &z))
}

/// A basis (in Hermite form) of the integer kernel `{x ∈ Z^cols : A x = 0}`.
pub fn int_kernel(a: &IntMatrix, rows: usize, cols: usize) -> IntMatrix {
    let s = smith(a, rows, cols);
    let vt = transpose(&s.v, cols, cols);
    let gens: Vec<Vec<BigInt>> = (s.rank..cols).map(|j| vt[j].clone()).collect();
    hnf(&gens, cols)
}

/// Is `v` in the row lattice of the Hermite basis `basis`?
pub fn in_lattice(basis: &IntMatrix, v: &[BigInt]) -> bool {
    lattice_coordinates(basis, v).is_some()
}

/// Coordinates of `v` in a Hermite basis, if `v` lies in its lattice.
pub fn lattice_coordinates(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut r = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let p = row.iter().position(|x| !x.is_zero()).expect("Hermite rows are nonzero");
        let (q, rem) = r[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return None;
        }
        for (x, y) in r.iter_mut().zip(row) {
            *x -= &q * y;
        }
        coords.push(q);
    }
    r.iter().all(|x| x.is_zero()).then_some(coords)
}

/// Fraction-free determinant.
pub fn bareiss_determinant(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Common denominator of a rational vector.
pub fn denominator_lcm(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
