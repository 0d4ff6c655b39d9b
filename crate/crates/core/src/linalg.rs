//! Dense complex matrix arithmetic shared by every kernel.
//!
//! Matrices are row-major with interleaved complex elements. All operations
//! return fresh matrices; nothing is updated in place.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// 64-bit complex scalar.
pub type Complex = Complex64;

/// Relative pivot threshold used by [`mat_inverse`].
pub const SINGULARITY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("shape mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Shape { op: &'static str, left_rows: usize, left_cols: usize, right_rows: usize, right_cols: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular: no usable pivot in column {column}")]
    Singular { column: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    Empty { rows: usize, cols: usize },
    #[error("data length {len} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("non-finite element at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting empty shapes,
    /// mismatched lengths and non-finite elements.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DataLength { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::DataLength { rows: r, cols: c, len: bad.len() });
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    /// Square diagonal matrix with the given entries.
    pub fn diag(entries: &[Complex]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major element storage.
    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Complex> {
        (i < self.rows && j < self.cols).then(|| self.data[i * self.cols + j])
    }

    fn require_same_shape(&self, other: &Self, op: &'static str) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::Shape {
                op,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|z| format!("{z:.6}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// `c[i][j] = Σ_t a[i][t]·b[t][j]`.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::Shape {
            op: "mat_mul",
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut data = vec![Complex::new(0.0, 0.0); m * n];
    for i in 0..m {
        let out = &mut data[i * n..(i + 1) * n];
        for t in 0..k {
            let lhs = a.data[i * k + t];
            for (c, &rhs) in out.iter_mut().zip(b.row(t)) {
                *c += lhs * rhs;
            }
        }
    }
    Ok(ComplexMatrix { rows: m, cols: n, data })
}

/// Conjugate transpose.
pub fn hermitian_transpose(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols, a.rows, |j, i| a.data[i * a.cols + j].conj())
}

pub fn mat_add(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.require_same_shape(b, "mat_add")?;
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
    Ok(ComplexMatrix { rows: a.rows, cols: a.cols, data })
}

pub fn mat_sub(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.require_same_shape(b, "mat_sub")?;
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
    Ok(ComplexMatrix { rows: a.rows, cols: a.cols, data })
}

pub fn mat_scale(a: &ComplexMatrix, s: Complex) -> ComplexMatrix {
    ComplexMatrix { rows: a.rows, cols: a.cols, data: a.data.iter().map(|z| z * s).collect() }
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a − b‖_F / ‖b‖_F`, falling back to the absolute distance when `b` is zero.
pub fn relative_error(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, LinalgError> {
    let diff = frobenius_norm(&mat_sub(a, b)?);
    let scale = frobenius_norm(b);
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Pivot magnitude below which [`mat_inverse`] reports singularity.
pub fn singularity_threshold(a: &ComplexMatrix) -> f64 {
    SINGULARITY_RTOL * frobenius_norm(a) / a.rows as f64
}

/// Gauss-Jordan inversion with partial pivoting.
///
/// The pivot for column `k` is the entry of largest magnitude among rows
/// `k..n`. If that magnitude falls below [`singularity_threshold`] the matrix
/// is reported singular at column `k`.
pub fn mat_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let n = a.rows;
    let threshold = singularity_threshold(a);
    let mut work = a.data.clone();
    let mut inv = ComplexMatrix::identity(n).data;

    for k in 0..n {
        let (pivot_row, pivot_mag2) =
            (k..n)
                .map(|i| (i, work[i * n + k].norm_sqr()))
                .fold((k, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
        if pivot_mag2.is_nan() || pivot_mag2.sqrt() < threshold || pivot_mag2 == 0.0 {
            return Err(LinalgError::Singular { column: k });
        }
        if pivot_row != k {
            for j in 0..n {
                work.swap(k * n + j, pivot_row * n + j);
                inv.swap(k * n + j, pivot_row * n + j);
            }
        }

        let scale = work[k * n + k].inv();
        for j in 0..n {
            work[k * n + j] *= scale;
            inv[k * n + j] *= scale;
        }

        for i in (0..n).filter(|&i| i != k) {
            let factor = work[i * n + k];
            for j in 0..n {
                let w = work[k * n + j];
                let v = inv[k * n + j];
                work[i * n + j] -= factor * w;
                inv[i * n + j] -= factor * v;
            }
        }
    }

    Ok(ComplexMatrix { rows: n, cols: n, data: inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn seeded(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        // xorshift; keeps these unit tests free of the workload generator
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    fn naive_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            let mut acc = c(0.0, 0.0);
            for t in 0..a.cols() {
                let (x, y) = (a[(i, t)], b[(t, j)]);
                acc.re += x.re * y.re - x.im * y.im;
                acc.im += x.re * y.im + x.im * y.re;
            }
            acc
        })
    }

    #[test]
    fn identity_times_a_is_a() {
        let a = seeded(3, 3, 1);
        assert_eq!(mat_mul(&ComplexMatrix::identity(3), &a).unwrap(), a);
    }

    #[test]
    fn diagonal_product() {
        let a = ComplexMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let b = ComplexMatrix::diag(&[c(5.0, 0.0), c(7.0, 0.0)]);
        let expected = ComplexMatrix::diag(&[c(10.0, 0.0), c(21.0, 0.0)]);
        assert_eq!(mat_mul(&a, &b).unwrap(), expected);
    }

    #[test]
    fn mul_matches_triple_loop() {
        let a = seeded(4, 4, 7);
        let b = seeded(4, 4, 8);
        let got = mat_mul(&a, &b).unwrap();
        let want = naive_mul(&a, &b);
        for (x, y) in got.as_slice().iter().zip(want.as_slice()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn mul_shape_error() {
        let err = mat_mul(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, LinalgError::Shape { op: "mat_mul", .. }));
    }

    #[test]
    fn hermitian_of_real_symmetric_is_itself() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(-3.0, 0.0)]]).unwrap();
        assert_eq!(hermitian_transpose(&a), a);
    }

    #[test]
    fn hermitian_conjugates() {
        let a = ComplexMatrix::from_vec(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(hermitian_transpose(&a)[(0, 0)], c(0.0, -1.0));
    }

    #[test]
    fn hermitian_involution_on_rectangular() {
        let a = seeded(5, 3, 3);
        let h = hermitian_transpose(&a);
        assert_eq!(h.shape(), (3, 5));
        assert_eq!(hermitian_transpose(&h), a);
    }

    #[test]
    fn inverse_of_identity() {
        assert_eq!(mat_inverse(&ComplexMatrix::identity(4)).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn inverse_of_diagonal() {
        let a = ComplexMatrix::diag(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let expected = ComplexMatrix::diag(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert_eq!(mat_inverse(&a).unwrap(), expected);
    }

    #[test]
    fn inverse_multiply_back_16() {
        let a = seeded(16, 16, 11);
        let inv = mat_inverse(&a).unwrap();
        let resid = mat_sub(&mat_mul(&a, &inv).unwrap(), &ComplexMatrix::identity(16)).unwrap();
        assert!(frobenius_norm(&resid) < 1e-9);
    }

    #[test]
    fn inverse_needs_pivoting() {
        // zero in the leading position forces a row exchange
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let inv = mat_inverse(&a).unwrap();
        let expected =
            ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.5, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(inv, expected);
    }

    #[test]
    fn singular_reports_column() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(mat_inverse(&a).unwrap_err(), LinalgError::Singular { column: 1 });
        assert_eq!(mat_inverse(&ComplexMatrix::zeros(2, 2)).unwrap_err(), LinalgError::Singular { column: 0 });
    }

    #[test]
    fn inverse_rejects_rectangular() {
        assert!(matches!(mat_inverse(&ComplexMatrix::zeros(2, 3)), Err(LinalgError::NotSquare { rows: 2, cols: 3 })));
    }

    #[test]
    fn frobenius_cases() {
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        assert_eq!(frobenius_norm(&ComplexMatrix::identity(4)), 2.0);
        let z = ComplexMatrix::from_vec(1, 1, vec![c(3.0, 4.0)]).unwrap();
        assert_eq!(frobenius_norm(&z), 5.0);
    }

    #[test]
    fn add_and_scale() {
        let a = seeded(3, 2, 5);
        assert_eq!(mat_add(&a, &ComplexMatrix::zeros(3, 2)).unwrap(), a);
        assert_eq!(mat_scale(&a, c(1.0, 0.0)), a);
        let i2 = ComplexMatrix::identity(2);
        let got = mat_add(&mat_scale(&i2, c(2.0, 0.0)), &i2).unwrap();
        assert_eq!(got, ComplexMatrix::diag(&[c(3.0, 0.0), c(3.0, 0.0)]));
        assert!(mat_add(&a, &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(ComplexMatrix::from_vec(0, 2, vec![]), Err(LinalgError::Empty { .. })));
        assert!(matches!(ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0); 3]), Err(LinalgError::DataLength { .. })));
        assert_eq!(
            ComplexMatrix::from_vec(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err(),
            LinalgError::NonFinite { row: 0, col: 1 }
        );
    }
}
