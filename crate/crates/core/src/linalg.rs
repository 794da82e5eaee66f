//! Dense exact linear algebra over any [`FieldCoeff`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Coeff, FieldCoeff};
use crate::Rat;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: Vec<Vec<T>>,
    ncols: usize,
}

impl<T: FieldCoeff> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        Matrix { rows, ncols }
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        let nrows = cols.first().map_or(0, Vec::len);
        let rows = (0..nrows)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        Matrix::from_rows(rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// Determinant by Gaussian elimination. `None` for an empty matrix.
    pub fn det(&self) -> Option<T> {
        assert_eq!(self.nrows(), self.ncols, "determinant of non-square matrix");
        let n = self.nrows();
        let mut a = self.rows.clone();
        let first = a.first()?.first()?.clone();
        let mut det = first.one_like();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero_coeff()) else {
                return Some(first.zero_like());
            };
            if piv != col {
                a.swap(piv, col);
                det = det.neg_ref();
            }
            let pinv = a[col][col].inv_ref().expect("nonzero pivot");
            det = det.mul_ref(&a[col][col]);
            for r in col + 1..n {
                if a[r][col].is_zero_coeff() {
                    continue;
                }
                let f = a[r][col].mul_ref(&pinv);
                for c in col..n {
                    let t = f.mul_ref(&a[col][c]);
                    a[r][c] = a[r][c].sub_ref(&t);
                }
            }
        }
        Some(det)
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.nrows();
        assert_eq!(n, self.ncols);
        assert_eq!(b.len(), n);
        let mut a: Vec<Vec<T>> = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut r = r.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero_coeff())?;
            a.swap(piv, col);
            let pinv = a[col][col].inv_ref()?;
            for c in col..=n {
                a[col][c] = a[col][c].mul_ref(&pinv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero_coeff() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in col..=n {
                    let t = f.mul_ref(&a[col][c]);
                    a[r][c] = a[r][c].sub_ref(&t);
                }
            }
        }
        Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
    }
}

/// Incrementally maintained row-echelon basis of a subspace of `T^n`.
///
/// Used for exact membership tests ("is this coordinate vector in the span
/// of these generators") and for dimension counts.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    dim: usize,
    /// Each row is normalised so that its pivot entry is one.
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: FieldCoeff> EchelonBasis<T> {
    pub fn new(dim: usize) -> Self {
        EchelonBasis {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &[T]) -> Vec<T> {
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            if v[*piv].is_zero_coeff() {
                continue;
            }
            let f = v[*piv].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero_coeff() {
                    *x = x.sub_ref(&f.mul_ref(r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        self.reduce(v).iter().all(Coeff::is_zero_coeff)
    }

    /// Adds `v`; returns `true` when it was independent of the basis.
    pub fn insert(&mut self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|x| !x.is_zero_coeff()) else {
            return false;
        };
        let inv = r[piv].inv_ref().expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = x.mul_ref(&inv);
        }
        for (_, row) in self.rows.iter_mut() {
            if row[piv].is_zero_coeff() {
                continue;
            }
            let f = row[piv].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero_coeff() {
                    *x = x.sub_ref(&f.mul_ref(y));
                }
            }
        }
        self.rows.push((piv, r));
        true
    }
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(piv) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, piv);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Exact determinant of a rational matrix given by columns, computed by
/// clearing denominators column-wise and running [`det_bareiss`].
pub fn det_rat_cols(cols: &[Vec<Rat>]) -> Rat {
    let n = cols.len();
    let mut scale = BigInt::one();
    let mut int_cols = Vec::with_capacity(n);
    for col in cols {
        let l = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        int_cols.push(
            col.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect::<Vec<_>>(),
        );
        scale *= l;
    }
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| int_cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    Rat::new(det_bareiss(rows), scale)
}
