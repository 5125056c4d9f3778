//! Dense vector and matrix containers over `Real`.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::real::{ComplexVal, Real};

/// Column vector of `Real` entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVec(pub Vec<Real>);

/// Vector of complex entries (e.g. polynomial roots before realness filtering).
pub type ComplexVec = Vec<ComplexVal>;

impl RealVec {
    pub fn zeros(prec: u32, n: usize) -> Self {
        RealVec(vec![Real::zero(prec); n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Real) -> Self {
        RealVec((0..n).map(f).collect())
    }

    pub fn from_f64s(prec: u32, vals: &[f64]) -> Self {
        RealVec(vals.iter().map(|&v| Real::from_f64(prec, v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Real> {
        self.0.iter()
    }

    /// Largest precision among entries (entries are expected to share one).
    pub fn prec(&self) -> u32 {
        self.0.iter().map(Real::prec).max().unwrap_or(Real::MIN_PREC)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        RealVec(self.0.iter().map(|x| x.with_prec(prec)).collect())
    }

    pub fn norm_inf(&self) -> Real {
        let mut m = Real::zero(self.prec());
        for x in &self.0 {
            let a = x.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn norm_2(&self) -> Real {
        let mut s = Real::zero(self.prec());
        for x in &self.0 {
            s = &s + &x.square();
        }
        s.sqrt()
    }

    pub fn dot(&self, other: &Self) -> Real {
        assert_eq!(self.len(), other.len());
        let mut s = Real::zero(self.prec().max(other.prec()));
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            s = &s + &(a * b);
        }
        s
    }

    pub fn scale(&self, c: &Real) -> Self {
        RealVec(self.0.iter().map(|x| x * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        RealVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        RealVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Index<usize> for RealVec {
    type Output = Real;
    fn index(&self, i: usize) -> &Real {
        &self.0[i]
    }
}

impl IndexMut<usize> for RealVec {
    fn index_mut(&mut self, i: usize) -> &mut Real {
        &mut self.0[i]
    }
}

impl fmt::Debug for RealVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.0.iter().map(|x| x.to_decimal(8)))
            .finish()
    }
}

impl FromIterator<Real> for RealVec {
    fn from_iter<T: IntoIterator<Item = Real>>(iter: T) -> Self {
        RealVec(iter.into_iter().collect())
    }
}

/// Rectangular row-major matrix of `Real` entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl RealMatrix {
    pub fn zeros(prec: u32, rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![Real::zero(prec); rows * cols],
        }
    }

    pub fn identity(prec: u32, n: usize) -> Self {
        let mut m = Self::zeros(prec, n, n);
        for i in 0..n {
            m[(i, i)] = Real::one(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RealMatrix { rows, cols, data }
    }

    pub fn from_rows_f64(prec: u32, rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Real::from_f64(prec, rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn prec(&self) -> u32 {
        self.data.iter().map(Real::prec).max().unwrap_or(Real::MIN_PREC)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.with_prec(prec)).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> Real {
        let prec = self.prec();
        let mut m = Real::zero(prec);
        for i in 0..self.rows {
            let mut s = Real::zero(prec);
            for j in 0..self.cols {
                s = &s + &self[(i, j)].abs();
            }
            if s > m {
                m = s;
            }
        }
        m
    }

    pub fn matvec(&self, v: &RealVec) -> RealVec {
        assert_eq!(self.cols, v.len());
        let prec = self.prec().max(v.prec());
        RealVec::from_fn(self.rows, |i| {
            let mut s = Real::zero(prec);
            for j in 0..self.cols {
                s = &s + &(&self[(i, j)] * &v[j]);
            }
            s
        })
    }

    pub fn matmul(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.cols, other.rows);
        let prec = self.prec().max(other.prec());
        let mut out = RealMatrix::zeros(prec, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = &self[(i, k)];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = &out[(i, j)] + &(aik * &other[(k, j)]);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> RealMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Real) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn row(&self, i: usize) -> RealVec {
        RealVec::from_fn(self.cols, |j| self[(i, j)].clone())
    }

    pub fn col(&self, j: usize) -> RealVec {
        RealVec::from_fn(self.rows, |i| self[(i, j)].clone())
    }

    /// Delete one row and one column (used by cofactor expansions).
    pub fn minor(&self, drop_row: usize, drop_col: usize) -> RealMatrix {
        Self::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let si = if i < drop_row { i } else { i + 1 };
            let sj = if j < drop_col { j } else { j + 1 };
            self[(si, sj)].clone()
        })
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = Real;
    fn index(&self, (i, j): (usize, usize)) -> &Real {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Real {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RealMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                write!(f, "{} ", self[(i, j)].to_decimal(6))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
