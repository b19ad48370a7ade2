//! Exact linear algebra over fields: echelon forms, kernels, solving, and subspaces.

use num_bigint::BigInt;

use super::domain::{Domain, Scalar};
use super::matrix::{vec_ops, Matrix, Vector};
use crate::error::{Error, Result};

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss–Jordan elimination. Also returns the row transform `T` with `T·M = reduced`
/// when `track` is set.
fn eliminate(m: &Matrix, track: bool) -> Result<(Echelon, Option<Matrix>)> {
    let d = m.domain().clone();
    d.require_field()?;
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut t: Option<Vec<Vector>> = track.then(|| Matrix::identity(d.clone(), rows).to_rows());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !d.is_zero(&a[i][c])) else { continue };
        a.swap(r, p);
        if let Some(t) = t.as_mut() {
            t.swap(r, p);
        }
        let inv = d.inv(&a[r][c]).expect("nonzero pivot in a field");
        a[r] = vec_ops::scale(&d, &inv, &a[r]);
        if let Some(t) = t.as_mut() {
            t[r] = vec_ops::scale(&d, &inv, &t[r]);
        }
        for i in 0..rows {
            if i != r && !d.is_zero(&a[i][c]) {
                let f = d.neg(&a[i][c]);
                a[i] = vec_ops::axpy(&d, &a[i], &f, &a[r]);
                if let Some(t) = t.as_mut() {
                    t[i] = vec_ops::axpy(&d, &t[i], &f, &t[r]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let reduced = Matrix::from_rows(d.clone(), cols, a);
    let t = t.map(|t| Matrix::from_rows(d, rows, t));
    Ok((Echelon { reduced, pivots }, t))
}

pub fn rref(m: &Matrix) -> Result<Echelon> {
    Ok(eliminate(m, false)?.0)
}

impl Matrix {
    pub fn rank(&self) -> Result<usize> {
        Ok(rref(self)?.rank())
    }

    /// Basis of `{v : M v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Result<Vec<Vector>> {
        let e = rref(self)?;
        let d = self.domain();
        let n = self.cols();
        let mut basis = Vec::new();
        let free: Vec<usize> = (0..n).filter(|c| !e.pivots.contains(c)).collect();
        for &f in &free {
            let mut v = vec_ops::unit(d, n, f);
            for (i, &p) in e.pivots.iter().enumerate() {
                v[p] = d.neg(e.reduced.get(i, f));
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Basis of `{w : wᵀ M = 0}`.
    pub fn left_kernel(&self) -> Result<Vec<Vector>> {
        self.transpose().kernel()
    }

    /// Some solution of `M x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vector>> {
        if b.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.rows()
            )));
        }
        let d = self.domain().clone();
        let aug = self.hstack(&Matrix::from_columns(d.clone(), self.rows(), &[b.to_vec()]));
        let e = rref(&aug)?;
        if e.pivots.last() == Some(&self.cols()) {
            return Ok(None);
        }
        let mut x = vec_ops::zero(&d, self.cols());
        for (i, &p) in e.pivots.iter().enumerate() {
            x[p] = e.reduced.get(i, self.cols()).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Option<Matrix>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let (e, t) = eliminate(self, true)?;
        if e.rank() < self.rows() {
            return Ok(None);
        }
        Ok(t)
    }

    /// Determinant over a field (elimination) or over Z (fraction-free Bareiss).
    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let d = self.domain().clone();
        match d {
            Domain::Integers => {
                let ints: Vec<Vec<BigInt>> = self
                    .to_rows()
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|x| match x {
                                Scalar::Int(n) => n,
                                other => panic!("integer matrix holds {other:?}"),
                            })
                            .collect()
                    })
                    .collect();
                Ok(Scalar::Int(super::snf::bareiss_determinant(&ints)))
            }
            _ if d.is_field() => {
                let n = self.rows();
                let mut a = self.to_rows();
                let mut det = d.one();
                for c in 0..n {
                    let Some(p) = (c..n).find(|&i| !d.is_zero(&a[i][c])) else { return Ok(d.zero()) };
                    if p != c {
                        a.swap(p, c);
                        det = d.neg(&det);
                    }
                    det = d.mul(&det, &a[c][c]);
                    let inv = d.inv(&a[c][c]).expect("nonzero pivot");
                    for i in c + 1..n {
                        if !d.is_zero(&a[i][c]) {
                            let f = d.neg(&d.mul(&a[i][c], &inv));
                            a[i] = vec_ops::axpy(&d, &a[i], &f, &a[c]);
                        }
                    }
                }
                Ok(det)
            }
            other => Err(Error::UnsupportedDomain { op: "determinant", domain: other.to_string() }),
        }
    }

    /// The column space.
    pub fn image(&self) -> Result<Subspace> {
        Subspace::span(self.domain().clone(), self.rows(), &self.columns())
    }
}

/// A subspace of `K^n`, stored as a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    domain: Domain,
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(domain: Domain, ambient: usize) -> Subspace {
        Subspace { domain, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(domain: Domain, ambient: usize) -> Subspace {
        let basis = (0..ambient).map(|i| vec_ops::unit(&domain, ambient, i)).collect();
        Subspace { domain, ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn span(domain: Domain, ambient: usize, gens: &[Vector]) -> Result<Subspace> {
        domain.require_field()?;
        if gens.iter().any(|g| g.len() != ambient) {
            return Err(Error::DimensionMismatch(format!("generator length differs from ambient dimension {ambient}")));
        }
        if gens.is_empty() {
            return Ok(Subspace::zero(domain, ambient));
        }
        let e = rref(&Matrix::from_rows(domain.clone(), ambient, gens.to_vec()))?;
        let basis = (0..e.rank()).map(|i| e.reduced.row(i).to_vec()).collect();
        Ok(Subspace { domain, ambient, basis, pivots: e.pivots })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// `v` minus its component along the echelon basis; zero iff `v` is in the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let d = &self.domain;
        let mut r = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if !d.is_zero(&r[p]) {
                let f = d.neg(&r[p]);
                r = vec_ops::axpy(d, &r, &f, b);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        vec_ops::is_zero(&self.domain, &self.reduce(v))
    }

    /// Coordinates in [`Subspace::basis`], if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Subspace::span(self.domain.clone(), self.ambient, &gens)
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.domain.clone(), self.ambient));
        }
        let d = &self.domain;
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|b| vec_ops::neg(d, b)));
        let m = Matrix::from_columns(d.clone(), self.ambient, &cols);
        let k = self.dim();
        let gens: Vec<Vector> =
            m.kernel()?.iter().map(|c| vec_ops::combination(d, self.ambient, &c[..k], &self.basis)).collect();
        Subspace::span(d.clone(), self.ambient, &gens)
    }

    /// Columns not used as pivots; the matching unit vectors span a complement.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// A complement spanned by standard unit vectors.
    pub fn standard_complement(&self) -> Vec<Vector> {
        self.free_columns().into_iter().map(|c| vec_ops::unit(&self.domain, self.ambient, c)).collect()
    }

    /// Matrix of the quotient map `K^n → K^n / self`, in coordinates of the free columns.
    pub fn quotient_map(&self) -> Matrix {
        let d = &self.domain;
        let free = self.free_columns();
        let mut q = Matrix::zeros(d.clone(), free.len(), self.ambient);
        for (r, &j) in free.iter().enumerate() {
            q.set(r, j, d.one());
            for (b, &p) in self.basis.iter().zip(&self.pivots) {
                q.set(r, p, d.neg(&b[j]));
            }
        }
        q
    }

    /// Coordinates of the class of `v` in the quotient.
    pub fn quotient_coords(&self, v: &[Scalar]) -> Vector {
        let r = self.reduce(v);
        self.free_columns().into_iter().map(|c| r[c].clone()).collect()
    }

    /// Image under a linear map `M : K^n → K^m`.
    pub fn map(&self, m: &Matrix) -> Result<Subspace> {
        let gens: Vec<Vector> = self.basis.iter().map(|b| m.apply(b)).collect();
        Subspace::span(self.domain.clone(), m.rows(), &gens)
    }

    /// `{v ∈ K^n : M v ∈ self}` for `M : K^n → K^m` with `m` the ambient dimension.
    pub fn preimage(&self, m: &Matrix) -> Result<Subspace> {
        let q = self.quotient_map().mul(m);
        let ker = if q.rows() == 0 { Matrix::zeros(self.domain.clone(), 0, m.cols()).kernel()? } else { q.kernel()? };
        Subspace::span(self.domain.clone(), m.cols(), &ker)
    }

    /// Extends `vectors` (independent modulo nothing) to a basis of `self` using echelon vectors.
    pub fn extend_basis(&self, vectors: &[Vector]) -> Result<Vec<Vector>> {
        let mut current = Subspace::span(self.domain.clone(), self.ambient, vectors)?;
        let mut out = vectors.to_vec();
        for b in &self.basis {
            if !current.contains(b) {
                out.push(b.clone());
                current = current.sum(&Subspace::span(self.domain.clone(), self.ambient, std::slice::from_ref(b))?)?;
            }
        }
        Ok(out)
    }
}

/// Checks a list of vectors for linear independence.
pub fn independent(domain: &Domain, ambient: usize, vectors: &[Vector]) -> Result<bool> {
    Ok(Subspace::span(domain.clone(), ambient, vectors)?.dim() == vectors.len())
}

/// Rank of a set of vectors.
pub fn rank_of(domain: &Domain, ambient: usize, vectors: &[Vector]) -> Result<usize> {
    Ok(Subspace::span(domain.clone(), ambient, vectors)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(Domain::Rationals, rows)
    }

    #[test]
    fn kernel_and_solve() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel().unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(vec_ops::is_zero(m.domain(), &m.apply(v)));
        }
        let d = Domain::Rationals;
        let x = m.solve(&[d.from_i64(1), d.from_i64(2)]).unwrap().unwrap();
        assert_eq!(m.apply(&x), vec![d.from_i64(1), d.from_i64(2)]);
        assert!(m.solve(&[d.from_i64(1), d.from_i64(3)]).unwrap().is_none());
    }

    #[test]
    fn inverse_and_determinant() {
        let m = q(&[&[2, 1], &[7, 4]]);
        let inv = m.inverse().unwrap().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(Domain::Rationals, 2));
        assert_eq!(m.determinant().unwrap(), Domain::Rationals.one());
        let z = Matrix::from_i64(Domain::Integers, &[&[2, 3], &[4, 5]]);
        assert_eq!(z.determinant().unwrap(), Domain::Integers.from_i64(-2));
    }

    #[test]
    fn subspace_operations() {
        let d = Domain::Rationals;
        let v = |xs: &[i64]| xs.iter().map(|&x| d.from_i64(x)).collect::<Vector>();
        let a = Subspace::span(d.clone(), 3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let b = Subspace::span(d.clone(), 3, &[v(&[0, 1, 1]), v(&[1, 1, 0])]).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&v(&[1, 1, 0])));
        assert_eq!(a.sum(&b).unwrap().dim(), 3);
        let qm = a.quotient_map();
        assert_eq!(qm.rows(), 1);
        assert_eq!(qm.apply(&v(&[5, 7, 2])), vec![d.from_i64(2)]);
        let pre = a.preimage(&Matrix::identity(d.clone(), 3)).unwrap();
        assert_eq!(pre, a);
    }
}
