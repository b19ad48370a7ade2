//! Dense matrices over a [`Domain`]. Vectors are plain `Vec<Scalar>` and act as columns.

use std::fmt;

use super::domain::{Domain, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    domain: Domain,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(domain: Domain, rows: usize, cols: usize) -> Matrix {
        let data = vec![domain.zero(); rows * cols];
        Matrix { domain, rows, cols, data }
    }

    pub fn identity(domain: Domain, n: usize) -> Matrix {
        let mut m = Matrix::zeros(domain.clone(), n, n);
        for i in 0..n {
            m.set(i, i, domain.one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(domain: Domain, cols: usize, rows: Vec<Vector>) -> Matrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { domain, rows: n, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(domain: Domain, rows: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(domain, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(domain: Domain, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&x| domain.from_i64(x)).collect()).collect();
        Matrix::from_rows(domain, cols, rows)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.domain.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.domain.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let d = &self.domain;
        let mut out = Matrix::zeros(d.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if d.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = d.add(out.get(i, j), &d.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `M v`.
    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let d = &self.domain;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(d.zero(), |acc, (a, b)| d.add(&acc, &d.mul(a, b))))
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.domain.add(a, b)).collect();
        Matrix { domain: self.domain.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.domain.sub(a, b)).collect();
        Matrix { domain: self.domain.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| self.domain.mul(a, c)).collect();
        Matrix { domain: self.domain.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { domain: self.domain.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i).to_vec();
            r.extend(other.row(i).iter().cloned());
            rows.push(r);
        }
        Matrix::from_rows(self.domain.clone(), self.cols + other.cols, rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_rows(self.domain.clone(), self.cols, idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let rows = (0..self.rows).map(|i| idx.iter().map(|&j| self.get(i, j).clone()).collect()).collect();
        Matrix::from_rows(self.domain.clone(), idx.len(), rows)
    }

    /// Formats each entry with the domain's canonical literal syntax.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| self.domain.format(x)).collect()).collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_strings().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Vector helpers over a domain.
pub mod vec_ops {
    use super::super::domain::{Domain, Scalar};
    use super::Vector;

    pub fn zero(d: &Domain, n: usize) -> Vector {
        vec![d.zero(); n]
    }

    pub fn unit(d: &Domain, n: usize, i: usize) -> Vector {
        let mut v = zero(d, n);
        v[i] = d.one();
        v
    }

    pub fn add(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| d.add(x, y)).collect()
    }

    pub fn sub(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| d.sub(x, y)).collect()
    }

    pub fn neg(d: &Domain, a: &[Scalar]) -> Vector {
        a.iter().map(|x| d.neg(x)).collect()
    }

    pub fn scale(d: &Domain, c: &Scalar, a: &[Scalar]) -> Vector {
        a.iter().map(|x| d.mul(c, x)).collect()
    }

    /// `a + c·b`.
    pub fn axpy(d: &Domain, a: &[Scalar], c: &Scalar, b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| d.add(x, &d.mul(c, y))).collect()
    }

    pub fn is_zero(d: &Domain, a: &[Scalar]) -> bool {
        a.iter().all(|x| d.is_zero(x))
    }

    pub fn dot(d: &Domain, a: &[Scalar], b: &[Scalar]) -> Scalar {
        a.iter().zip(b).fold(d.zero(), |acc, (x, y)| d.add(&acc, &d.mul(x, y)))
    }

    /// `Σ cᵢ vᵢ`.
    pub fn combination(d: &Domain, n: usize, coeffs: &[Scalar], vecs: &[Vector]) -> Vector {
        let mut out = zero(d, n);
        for (c, v) in coeffs.iter().zip(vecs) {
            if !d.is_zero(c) {
                out = axpy(d, &out, c, v);
            }
        }
        out
    }

    pub fn format(d: &Domain, a: &[Scalar]) -> Vec<String> {
        a.iter().map(|x| d.format(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let d = Domain::Rationals;
        let a = Matrix::from_i64(d.clone(), &[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(d.clone(), &[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), Matrix::from_i64(d.clone(), &[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.apply(&[d.one(), d.zero()]), vec![d.from_i64(1), d.from_i64(3)]);
    }
}
