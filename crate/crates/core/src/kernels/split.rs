//! Split-plane matrix storage and the vectorized linear-algebra building
//! blocks shared by the kernels.

use crate::linalg::{singularity_threshold, Complex, ComplexMatrix, LinalgError};
use crate::vector_machine::{strip_mine, ArithKind, MemKind, VectorContext};

use super::KernelError;

/// Row-major matrix with separate real and imaginary planes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SplitMatrix {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SplitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, re: vec![0.0; rows * cols], im: vec![0.0; rows * cols] }
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (re, im) = m.as_slice().iter().map(|z| (z.re, z.im)).unzip();
        Self { rows: m.rows(), cols: m.cols(), re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, LinalgError> {
        let data = self.re.iter().zip(&self.im).map(|(&re, &im)| Complex::new(re, im)).collect();
        ComplexMatrix::from_vec(self.rows, self.cols, data)
    }
}

pub(crate) fn charge_arith(ctx: &mut VectorContext, kind: ArithKind, vl: usize, n: usize) -> Result<(), KernelError> {
    for _ in 0..n {
        ctx.vec_arith(kind, vl)?;
    }
    Ok(())
}

pub(crate) fn charge_mem(ctx: &mut VectorContext, kind: MemKind, vl: usize, n: usize) -> Result<(), KernelError> {
    for _ in 0..n {
        ctx.vec_mem(kind, vl)?;
    }
    Ok(())
}

/// `out = s · x` over one strip: 2 mul + 2 macc.
pub(crate) fn cmul_scalar(
    ctx: &mut VectorContext,
    s: Complex,
    x_re: &[f64],
    x_im: &[f64],
    out_re: &mut [f64],
    out_im: &mut [f64],
) -> Result<(), KernelError> {
    let vl = out_re.len();
    charge_arith(ctx, ArithKind::Mul, vl, 2)?;
    charge_arith(ctx, ArithKind::Macc, vl, 2)?;
    for t in 0..vl {
        let (xr, xi) = (x_re[t], x_im[t]);
        out_re[t] = s.re * xr - s.im * xi;
        out_im[t] = s.re * xi + s.im * xr;
    }
    Ok(())
}

/// `acc += s · x` over one strip: 4 macc.
pub(crate) fn cmacc_scalar(
    ctx: &mut VectorContext,
    s: Complex,
    x_re: &[f64],
    x_im: &[f64],
    acc_re: &mut [f64],
    acc_im: &mut [f64],
) -> Result<(), KernelError> {
    let vl = acc_re.len();
    charge_arith(ctx, ArithKind::Macc, vl, 4)?;
    for t in 0..vl {
        let (xr, xi) = (x_re[t], x_im[t]);
        acc_re[t] += s.re * xr - s.im * xi;
        acc_im[t] += s.re * xi + s.im * xr;
    }
    Ok(())
}

/// Row-times-matrix multiply: each output row is built strip by strip with
/// one scalar-times-vector complex accumulate per inner index.
///
/// Per strip of `vl` output columns: `k` × (2 scalar loads, 2 unit loads,
/// 4 arith) then 2 unit stores.
pub(crate) fn mat_mul_split(
    ctx: &mut VectorContext,
    a: &SplitMatrix,
    b: &SplitMatrix,
) -> Result<SplitMatrix, KernelError> {
    if a.cols != b.rows {
        return Err(LinalgError::Shape {
            op: "mat_mul",
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        }
        .into());
    }
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut out = SplitMatrix::zeros(m, n);
    for i in 0..m {
        let (row_re, row_im) = (&mut out.re[i * n..(i + 1) * n], &mut out.im[i * n..(i + 1) * n]);
        strip_mine(ctx, n, |ctx, off, vl| {
            let acc_re = &mut row_re[off..off + vl];
            let acc_im = &mut row_im[off..off + vl];
            for t in 0..k {
                ctx.scalar_op(2);
                charge_mem(ctx, MemKind::LoadUnit, vl, 2)?;
                let s = Complex::new(a.re[i * k + t], a.im[i * k + t]);
                let b_re = &b.re[t * n + off..t * n + off + vl];
                let b_im = &b.im[t * n + off..t * n + off + vl];
                if t == 0 {
                    cmul_scalar(ctx, s, b_re, b_im, acc_re, acc_im)?;
                } else {
                    cmacc_scalar(ctx, s, b_re, b_im, acc_re, acc_im)?;
                }
            }
            charge_mem(ctx, MemKind::StoreUnit, vl, 2)
        })?;
    }
    Ok(out)
}

/// Conjugate transpose: each output row is a strided column gather, an
/// imaginary-plane negate and two unit stores.
pub(crate) fn hermitian_split(ctx: &mut VectorContext, a: &SplitMatrix) -> Result<SplitMatrix, KernelError> {
    let (m, n) = (a.rows, a.cols);
    let mut out = SplitMatrix::zeros(n, m);
    for j in 0..n {
        strip_mine(ctx, m, |ctx, off, vl| {
            charge_mem(ctx, MemKind::LoadStrided, vl, 2)?;
            ctx.vec_arith(ArithKind::Sub, vl)?;
            for t in off..off + vl {
                out.re[j * m + t] = a.re[t * n + j];
                out.im[j * m + t] = -a.im[t * n + j];
            }
            charge_mem(ctx, MemKind::StoreUnit, vl, 2)
        })?;
    }
    Ok(out)
}

/// Gauss-Jordan inversion on the augmented split matrix `[A | I]`.
///
/// Per column: a strided magnitude scan with a max-reduction for the pivot,
/// an optional row swap, pivot-row normalization and one elimination update
/// per remaining row. Row operations are strip-mined over all `2n` columns.
pub(crate) fn inverse_split(ctx: &mut VectorContext, a: &SplitMatrix) -> Result<SplitMatrix, KernelError> {
    if a.rows != a.cols {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols }.into());
    }
    let n = a.rows;
    let w = 2 * n;
    let mut aug = SplitMatrix::zeros(n, w);
    for i in 0..n {
        aug.re[i * w..i * w + n].copy_from_slice(&a.re[i * n..(i + 1) * n]);
        aug.im[i * w..i * w + n].copy_from_slice(&a.im[i * n..(i + 1) * n]);
        aug.re[i * w + n + i] = 1.0;
    }

    // Frobenius norm for the singularity threshold: squared magnitudes summed
    // with a reduction per strip.
    strip_mine(ctx, n * n, |ctx, _, vl| {
        charge_mem(ctx, MemKind::LoadUnit, vl, 2)?;
        ctx.vec_arith(ArithKind::Mul, vl)?;
        ctx.vec_arith(ArithKind::Macc, vl)?;
        ctx.vec_reduce(vl)?;
        Ok::<_, KernelError>(())
    })?;
    ctx.scalar_op(2);
    let threshold = singularity_threshold(&a.to_matrix()?);

    let mut scratch_re = vec![0.0; w];
    let mut scratch_im = vec![0.0; w];
    for k in 0..n {
        let mut pivot_row = k;
        let mut best = -1.0;
        strip_mine(ctx, n - k, |ctx, off, vl| {
            charge_mem(ctx, MemKind::LoadStrided, vl, 2)?;
            ctx.vec_arith(ArithKind::Mul, vl)?;
            ctx.vec_arith(ArithKind::Macc, vl)?;
            ctx.vec_reduce(vl)?;
            ctx.scalar_op(2);
            for i in k + off..k + off + vl {
                let (re, im) = (aug.re[i * w + k], aug.im[i * w + k]);
                let mag2 = re * re + im * im;
                if mag2 > best {
                    best = mag2;
                    pivot_row = i;
                }
            }
            Ok::<_, KernelError>(())
        })?;
        if best.is_nan() || best.sqrt() < threshold || best == 0.0 {
            return Err(LinalgError::Singular { column: k }.into());
        }

        if pivot_row != k {
            strip_mine(ctx, w, |ctx, off, vl| {
                charge_mem(ctx, MemKind::LoadUnit, vl, 4)?;
                for j in off..off + vl {
                    aug.re.swap(k * w + j, pivot_row * w + j);
                    aug.im.swap(k * w + j, pivot_row * w + j);
                }
                charge_mem(ctx, MemKind::StoreUnit, vl, 4)
            })?;
        }

        // complex reciprocal of the pivot
        ctx.scalar_op(6);
        let scale = Complex::new(aug.re[k * w + k], aug.im[k * w + k]).inv();
        scratch_re.copy_from_slice(&aug.re[k * w..(k + 1) * w]);
        scratch_im.copy_from_slice(&aug.im[k * w..(k + 1) * w]);
        strip_mine(ctx, w, |ctx, off, vl| {
            charge_mem(ctx, MemKind::LoadUnit, vl, 2)?;
            cmul_scalar(
                ctx,
                scale,
                &scratch_re[off..off + vl],
                &scratch_im[off..off + vl],
                &mut aug.re[k * w + off..k * w + off + vl],
                &mut aug.im[k * w + off..k * w + off + vl],
            )?;
            charge_mem(ctx, MemKind::StoreUnit, vl, 2)
        })?;

        scratch_re.copy_from_slice(&aug.re[k * w..(k + 1) * w]);
        scratch_im.copy_from_slice(&aug.im[k * w..(k + 1) * w]);
        for i in (0..n).filter(|&i| i != k) {
            ctx.scalar_op(2);
            let neg_factor = -Complex::new(aug.re[i * w + k], aug.im[i * w + k]);
            strip_mine(ctx, w, |ctx, off, vl| {
                charge_mem(ctx, MemKind::LoadUnit, vl, 4)?;
                cmacc_scalar(
                    ctx,
                    neg_factor,
                    &scratch_re[off..off + vl],
                    &scratch_im[off..off + vl],
                    &mut aug.re[i * w + off..i * w + off + vl],
                    &mut aug.im[i * w + off..i * w + off + vl],
                )?;
                charge_mem(ctx, MemKind::StoreUnit, vl, 2)
            })?;
        }
    }

    let mut inv = SplitMatrix::zeros(n, n);
    for i in 0..n {
        inv.re[i * n..(i + 1) * n].copy_from_slice(&aug.re[i * w + n..(i + 1) * w]);
        inv.im[i * n..(i + 1) * n].copy_from_slice(&aug.im[i * w + n..(i + 1) * w]);
    }
    Ok(inv)
}

/// `a + s·b` elementwise with a real scalar `s`.
pub(crate) fn axpy_split(
    ctx: &mut VectorContext,
    a: &SplitMatrix,
    s: f64,
    b: &SplitMatrix,
) -> Result<SplitMatrix, KernelError> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(LinalgError::Shape {
            op: "mat_add",
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        }
        .into());
    }
    let mut out = a.clone();
    strip_mine(ctx, a.re.len(), |ctx, off, vl| {
        charge_mem(ctx, MemKind::LoadUnit, vl, 4)?;
        charge_arith(ctx, ArithKind::Macc, vl, 2)?;
        for t in off..off + vl {
            out.re[t] += s * b.re[t];
            out.im[t] += s * b.im[t];
        }
        charge_mem(ctx, MemKind::StoreUnit, vl, 2)
    })?;
    Ok(out)
}

/// Vectorized [`crate::linalg::mat_mul`].
pub fn mat_mul_vec(
    ctx: &mut VectorContext,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix, KernelError> {
    let out = mat_mul_split(ctx, &SplitMatrix::from_matrix(a), &SplitMatrix::from_matrix(b))?;
    Ok(out.to_matrix()?)
}

/// Vectorized [`crate::linalg::hermitian_transpose`].
pub fn hermitian_transpose_vec(ctx: &mut VectorContext, a: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    Ok(hermitian_split(ctx, &SplitMatrix::from_matrix(a))?.to_matrix()?)
}

/// Vectorized [`crate::linalg::mat_inverse`]; same pivoting and singularity rule.
pub fn mat_inverse_vec(ctx: &mut VectorContext, a: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    Ok(inverse_split(ctx, &SplitMatrix::from_matrix(a))?.to_matrix()?)
}
