//! Dense row-major matrices and the handful of kernels the tape needs.
//!
//! Reductions (dot products) use four fixed accumulators so the
//! summation order is pinned and the loop still pipelines; results are
//! bit-identical across runs.

use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape/data mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn scalar(&self) -> T {
        assert_eq!((self.rows, self.cols), (1, 1), "not a scalar");
        self.data[0]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.to_f64c()).collect(),
        }
    }

    pub fn from_f64(m: &Mat<f64>) -> Mat<T> {
        Mat {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&v| T::from_f64c(v)).collect(),
        }
    }
}

/// Dot product with four parallel accumulators (fixed order).
#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let chunks = n / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (T::zero(), T::zero(), T::zero(), T::zero());
    for c in 0..chunks {
        let i = c * 4;
        s0 = s0 + a[i] * b[i];
        s1 = s1 + a[i + 1] * b[i + 1];
        s2 = s2 + a[i + 2] * b[i + 2];
        s3 = s3 + a[i + 3] * b[i + 3];
    }
    let mut tail = T::zero();
    for i in (chunks * 4)..n {
        tail = tail + a[i] * b[i];
    }
    ((s0 + s1) + (s2 + s3)) + tail
}

/// out += a * b
pub fn matmul_acc<T: Real>(a: &Mat<T>, b: &Mat<T>, out: &mut Mat<T>) {
    assert_eq!(a.cols, b.rows, "matmul inner dims");
    assert_eq!((out.rows, out.cols), (a.rows, b.cols), "matmul out dims");
    for i in 0..a.rows {
        let arow = a.row(i);
        let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in arow.iter().enumerate() {
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o = *o + aik * bv;
            }
        }
    }
}

pub fn matmul<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let mut out = Mat::zeros(a.rows, b.cols);
    matmul_acc(a, b, &mut out);
    out
}

/// out += a * b^T (b is N x K, result M x N)
pub fn matmul_nt_acc<T: Real>(a: &Mat<T>, b: &Mat<T>, out: &mut Mat<T>) {
    assert_eq!(a.cols, b.cols, "matmul_nt inner dims");
    assert_eq!((out.rows, out.cols), (a.rows, b.rows), "matmul_nt out dims");
    for i in 0..a.rows {
        let arow = a.row(i);
        let orow = out.row_mut(i);
        for (j, o) in orow.iter_mut().enumerate() {
            *o = *o + dot(arow, b.row(j));
        }
    }
}

pub fn matmul_nt<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let mut out = Mat::zeros(a.rows, b.rows);
    matmul_nt_acc(a, b, &mut out);
    out
}

/// out += a^T * b (a is M x K, b is M x N, result K x N)
pub fn matmul_tn_acc<T: Real>(a: &Mat<T>, b: &Mat<T>, out: &mut Mat<T>) {
    assert_eq!(a.rows, b.rows, "matmul_tn inner dims");
    assert_eq!((out.rows, out.cols), (a.cols, b.cols), "matmul_tn out dims");
    for i in 0..a.rows {
        let arow = a.row(i);
        let brow = b.row(i);
        for (k, &aik) in arow.iter().enumerate() {
            let orow = out.row_mut(k);
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o = *o + aik * bv;
            }
        }
    }
}

pub fn add_assign<T: Real>(out: &mut Mat<T>, rhs: &Mat<T>) {
    debug_assert_eq!((out.rows, out.cols), (rhs.rows, rhs.cols));
    for (o, &r) in out.data.iter_mut().zip(&rhs.data) {
        *o = *o + r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_small_known() {
        let a = Mat::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = Mat::from_vec(3, 2, vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let c = matmul(&a, &b);
        assert_eq!(c.data, vec![58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn matmul_nt_matches_explicit_transpose() {
        let a = Mat::from_fn(3, 4, |i, j| (i * 4 + j) as f64 * 0.3 - 1.0);
        let b = Mat::from_fn(2, 4, |i, j| (i + j) as f64 * 0.7);
        let bt = Mat::from_fn(4, 2, |i, j| b.get(j, i));
        assert_eq!(matmul_nt(&a, &b).data, matmul(&a, &bt).data);
    }

    #[test]
    fn matmul_tn_matches_explicit_transpose() {
        let a = Mat::from_fn(3, 4, |i, j| (i * 4 + j) as f64 * 0.3 - 1.0);
        let at = Mat::from_fn(4, 3, |i, j| a.get(j, i));
        let b = Mat::from_fn(3, 2, |i, j| (i + 2 * j) as f64);
        let mut out = Mat::zeros(4, 2);
        matmul_tn_acc(&a, &b, &mut out);
        assert_eq!(out.data, matmul(&at, &b).data);
    }

    #[test]
    fn dot_is_deterministic_and_correct() {
        let a: Vec<f64> = (0..129).map(|i| (i as f64) * 0.01 - 0.5).collect();
        let b: Vec<f64> = (0..129).map(|i| ((i * 7) % 13) as f64 * 0.1).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9);
        assert_eq!(dot(&a, &b).to_bits(), dot(&a, &b).to_bits());
    }
}
