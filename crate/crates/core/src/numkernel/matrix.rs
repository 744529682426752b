use serde::{Deserialize, Serialize};

use super::KernelError;
use crate::Real;

/// Dense row-major matrix.
///
/// The invariant `data.len() == rows * cols` holds for every constructed
/// value, and public operations either keep all entries finite or report
/// [`KernelError::NonFinite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, KernelError> {
        if data.len() != rows * cols {
            return Err(KernelError::dimension(
                "Matrix::from_vec",
                format!("{} values for {rows}x{cols}", rows * cols),
                data.len().to_string(),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, KernelError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(KernelError::dimension(
                    format!("Matrix::from_rows row {i}"),
                    cols.to_string(),
                    row.len().to_string(),
                ));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// New matrix holding the given rows of `self`, in index order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix<T> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Stack `other` below `self`; widths must agree.
    pub fn vstack(&self, other: &Matrix<T>) -> Result<Matrix<T>, KernelError> {
        if self.cols != other.cols {
            return Err(KernelError::dimension(
                "Matrix::vstack",
                self.cols.to_string(),
                other.cols.to_string(),
            ));
        }
        let mut data = Vec::with_capacity((self.rows + other.rows) * self.cols);
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix<T>) -> Result<Matrix<T>, KernelError> {
        if self.cols != other.rows {
            return Err(KernelError::dimension(
                "Matrix::matmul",
                format!("lhs cols == rhs rows ({})", self.cols),
                other.rows.to_string(),
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            let out_row = out.row_mut(i);
            for (k, &a) in lhs_row.iter().enumerate() {
                let rhs_row = other.row(k);
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^T * other` without materializing the transpose.
    pub fn matmul_tn(&self, other: &Matrix<T>) -> Result<Matrix<T>, KernelError> {
        if self.rows != other.rows {
            return Err(KernelError::dimension(
                "Matrix::matmul_tn",
                format!("lhs rows == rhs rows ({})", self.rows),
                other.rows.to_string(),
            ));
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let lhs_row = self.row(k);
            let rhs_row = other.row(k);
            for (i, &a) in lhs_row.iter().enumerate() {
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * other^T` without materializing the transpose.
    pub fn matmul_nt(&self, other: &Matrix<T>) -> Result<Matrix<T>, KernelError> {
        if self.cols != other.cols {
            return Err(KernelError::dimension(
                "Matrix::matmul_nt",
                format!("lhs cols == rhs cols ({})", self.cols),
                other.cols.to_string(),
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            let out_row = out.row_mut(i);
            for (j, o) in out_row.iter_mut().enumerate() {
                let rhs_row = other.row(j);
                let mut acc = T::zero();
                for (&a, &b) in lhs_row.iter().zip(rhs_row) {
                    acc += a * b;
                }
                *o = acc;
            }
        }
        Ok(out)
    }

    /// Add a row vector to every row.
    pub fn add_row_broadcast(&mut self, bias: &[T]) -> Result<(), KernelError> {
        if bias.len() != self.cols {
            return Err(KernelError::dimension(
                "Matrix::add_row_broadcast",
                self.cols.to_string(),
                bias.len().to_string(),
            ));
        }
        for r in 0..self.rows {
            for (v, &b) in self.row_mut(r).iter_mut().zip(bias) {
                *v += b;
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Column-wise sums.
    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for r in 0..self.rows {
            for (s, &v) in sums.iter_mut().zip(self.row(r)) {
                *s += v;
            }
        }
        sums
    }

    /// Column-wise means; errors on an empty matrix.
    pub fn column_means(&self) -> Result<Vec<T>, KernelError> {
        if self.rows == 0 {
            return Err(KernelError::Domain(
                "column_means of an empty matrix".into(),
            ));
        }
        let n = T::from_f64_lossy(self.rows as f64);
        Ok(self.column_sums().into_iter().map(|s| s / n).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_finite(&self, context: &str) -> Result<(), KernelError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(KernelError::NonFinite(context.to_string()))
        }
    }
}

/// Squared Euclidean distance between two equal-length slices.
pub(crate) fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_hand_checked() {
        let a = Matrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = Matrix::from_vec(3, 2, vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.as_slice(), &[58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn matmul_tn_matches_explicit_transpose() {
        let a = Matrix::from_vec(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = Matrix::from_vec(3, 2, vec![1.0, 0.5, -1.0, 2.0, 0.0, 3.0]).unwrap();
        let t = a.matmul_tn(&b).unwrap();
        // a^T is 2x3; a^T * b hand-computed.
        assert_eq!(t.as_slice(), &[-2.0, 21.5, -2.0, 27.0]);
    }

    #[test]
    fn matmul_nt_matches_matmul() {
        let a = Matrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = Matrix::from_vec(2, 3, vec![1.0, 1.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let c = a.matmul_nt(&b).unwrap();
        assert_eq!(c.as_slice(), &[6.0, 2.0, 15.0, 5.0]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = Matrix::<f64>::zeros(2, 3);
        let b = Matrix::<f64>::zeros(2, 2);
        assert!(matches!(
            a.matmul(&b),
            Err(KernelError::Dimension { .. })
        ));
        assert!(Matrix::from_vec(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn select_and_stack() {
        let m = Matrix::from_vec(3, 2, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let s = m.select_rows(&[2, 0]);
        assert_eq!(s.as_slice(), &[4.0, 5.0, 0.0, 1.0]);
        let v = s.vstack(&m.select_rows(&[1])).unwrap();
        assert_eq!(v.rows(), 3);
        assert_eq!(v.row(2), &[2.0, 3.0]);
    }
}
