//! Pilot-based MIMO channel estimation.
//!
//! The channel is modelled one receive antenna at a time as a row vector:
//! during the pilot phase receive antenna `r` observes
//!
//! ```text
//! y_r = h_r · X + n_r          (1 × Nt row vectors, X is the Nt × Nt pilot block)
//! ```
//!
//! Stacking the rows gives `Y = H·X + N`.
//!
//! **Least squares.** `Ĥ_LS = Y·X⁻¹ = H + N·X⁻¹`.
//!
//! **Linear MMSE.** Look for a linear refinement `ĥ_r = ĥ_LS,r · M` that
//! minimises `E‖h_r − ĥ_LS,r·M‖²`. With `R_H = E[h_rᴴ h_r]` (the transmit-side
//! correlation) and white noise of variance `σ²`, the LS error
//! `e_r = n_r·X⁻¹` has covariance
//!
//! ```text
//! E[e_rᴴ e_r] = σ² (X⁻¹)ᴴ X⁻¹ = σ² (X·Xᴴ)⁻¹
//! ```
//!
//! and is uncorrelated with `h_r`, so `E[ĥ_LS,rᴴ ĥ_LS,r] = R_H + σ²(X·Xᴴ)⁻¹`
//! and `E[ĥ_LS,rᴴ h_r] = R_H`. Setting the gradient to zero (orthogonality
//! principle) gives the normal equations
//!
//! ```text
//! (R_H + σ²(X·Xᴴ)⁻¹) · M = R_H   ⇒   M = (R_H + σ²(X·Xᴴ)⁻¹)⁻¹ · R_H
//! ```
//!
//! and the estimate `Ĥ_MMSE = Ĥ_LS · M`. For `σ² = 0` and full-rank `R_H`
//! the filter is the identity and the estimate collapses to least squares.

use crate::linalg::{
    frobenius_norm, hermitian_transpose, mat_add, mat_inverse, mat_mul, mat_scale, Complex, ComplexMatrix,
};
use crate::vector_machine::VectorContext;

use super::split::{axpy_split, hermitian_split, inverse_split, mat_mul_split, SplitMatrix};
use super::KernelError;

/// Regularization added to `R_H` before its positive-semidefinite check.
const PSD_EPSILON: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

/// Known transmitted pilot symbols `X` (Nt × Nt).
#[derive(Debug, Clone, PartialEq)]
pub struct PilotBlock {
    pub x: ComplexMatrix,
}

impl PilotBlock {
    pub fn new(x: ComplexMatrix) -> Result<Self, KernelError> {
        if !x.is_square() {
            return Err(KernelError::InvalidInput(format!(
                "pilot block must be square, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        Ok(Self { x })
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }
}

/// Received symbols `Y` (Nr × Nt) during pilot transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub y: ComplexMatrix,
}

impl Observation {
    pub fn new(y: ComplexMatrix) -> Self {
        Self { y }
    }

    fn check_against(&self, pilot: &PilotBlock) -> Result<(), KernelError> {
        if self.y.cols() != pilot.dim() {
            return Err(KernelError::InvalidInput(format!(
                "observation has {} columns but pilot block is {}x{}",
                self.y.cols(),
                pilot.dim(),
                pilot.dim()
            )));
        }
        Ok(())
    }
}

/// Transmit-side channel correlation and noise variance consumed by MMSE.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    r_h: ComplexMatrix,
    sigma2: f64,
}

impl ChannelStats {
    /// Validates that `r_h` is Hermitian and positive semidefinite and that
    /// `sigma2` is a finite non-negative variance.
    pub fn new(r_h: ComplexMatrix, sigma2: f64) -> Result<Self, KernelError> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(KernelError::InvalidInput(format!("noise variance must be >= 0, got {sigma2}")));
        }
        if !r_h.is_square() {
            return Err(KernelError::InvalidInput(format!(
                "correlation must be square, got {}x{}",
                r_h.rows(),
                r_h.cols()
            )));
        }
        let n = r_h.rows();
        for i in 0..n {
            for j in i..n {
                if (r_h[(i, j)] - r_h[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(KernelError::InvalidInput(format!("correlation is not Hermitian at ({i}, {j})")));
                }
            }
        }
        if let Some(col) = first_negative_pivot(&r_h) {
            return Err(KernelError::InvalidInput(format!(
                "correlation is not positive semidefinite (negative pivot in column {col})"
            )));
        }
        Ok(Self { r_h, sigma2 })
    }

    /// Exponential correlation `R[i][j] = ρ^|i−j|`, `|ρ| < 1`.
    pub fn exponential(n: usize, rho: f64, sigma2: f64) -> Result<Self, KernelError> {
        if rho.is_nan() || rho.abs() >= 1.0 {
            return Err(KernelError::InvalidInput(format!(
                "correlation coefficient must satisfy |rho| < 1, got {rho}"
            )));
        }
        let r_h = ComplexMatrix::from_fn(n, n, |i, j| Complex::new(rho.powi(i.abs_diff(j) as i32), 0.0));
        Self::new(r_h, sigma2)
    }

    pub fn r_h(&self) -> &ComplexMatrix {
        &self.r_h
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// Symmetric elimination (no row exchanges) on `R + εI`. For a Hermitian
/// matrix the pivots are the diagonal of its LDLᴴ factorization and are all
/// non-negative exactly when the matrix is positive semidefinite.
fn first_negative_pivot(r: &ComplexMatrix) -> Option<usize> {
    let n = r.rows();
    let tol = PSD_EPSILON * frobenius_norm(r).max(1.0);
    let mut a: Vec<Complex> = r.as_slice().to_vec();
    for i in 0..n {
        a[i * n + i] += PSD_EPSILON;
    }
    for k in 0..n {
        let pivot = a[k * n + k].re;
        if pivot < -tol {
            return Some(k);
        }
        if pivot <= tol {
            // a zero pivot is only consistent with PSD if its row is zero too
            if (k + 1..n).any(|j| a[k * n + j].norm() > tol.sqrt()) {
                return Some(k);
            }
            continue;
        }
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            for j in k..n {
                let v = a[k * n + j];
                a[i * n + j] -= factor * v;
            }
        }
    }
    None
}

/// `Ĥ = Y·X⁻¹`.
pub fn lse_estimate_ref(y: &Observation, x: &PilotBlock) -> Result<ComplexMatrix, KernelError> {
    y.check_against(x)?;
    Ok(mat_mul(&y.y, &mat_inverse(&x.x)?)?)
}

/// Vectorized LSE: one vectorized inversion of the pilot block followed by a
/// row-wise multiply.
pub fn lse_estimate_vec(
    ctx: &mut VectorContext,
    y: &Observation,
    x: &PilotBlock,
) -> Result<ComplexMatrix, KernelError> {
    y.check_against(x)?;
    Ok(lse_split(ctx, &SplitMatrix::from_matrix(&y.y), &SplitMatrix::from_matrix(&x.x))?.to_matrix()?)
}

fn lse_split(ctx: &mut VectorContext, y: &SplitMatrix, x: &SplitMatrix) -> Result<SplitMatrix, KernelError> {
    let x_inv = inverse_split(ctx, x)?;
    mat_mul_split(ctx, y, &x_inv)
}

fn check_stats(stats: &ChannelStats, x: &PilotBlock) -> Result<(), KernelError> {
    if stats.r_h.rows() != x.dim() {
        return Err(KernelError::InvalidInput(format!(
            "correlation is {}x{} but pilot block is {}x{}",
            stats.r_h.rows(),
            stats.r_h.cols(),
            x.dim(),
            x.dim()
        )));
    }
    Ok(())
}

/// `Ĥ_LS · (R_H + σ²(X·Xᴴ)⁻¹)⁻¹ · R_H`.
pub fn mmse_estimate_ref(y: &Observation, x: &PilotBlock, stats: &ChannelStats) -> Result<ComplexMatrix, KernelError> {
    check_stats(stats, x)?;
    let h_ls = lse_estimate_ref(y, x)?;
    let xxh = mat_mul(&x.x, &hermitian_transpose(&x.x))?;
    let noise_cov = mat_scale(&mat_inverse(&xxh)?, Complex::new(stats.sigma2, 0.0));
    let regularized = mat_add(&stats.r_h, &noise_cov)?;
    let filter = mat_mul(&mat_inverse(&regularized)?, &stats.r_h)?;
    Ok(mat_mul(&h_ls, &filter)?)
}

/// Vectorized MMSE. Instruction stream: LSE (inverse + multiply), `Xᴴ` by
/// strided gathers, `X·Xᴴ`, its inverse, the `R_H + σ²(·)` update as one
/// strip-mined macc pass, a second inverse, and two more multiplies.
pub fn mmse_estimate_vec(
    ctx: &mut VectorContext,
    y: &Observation,
    x: &PilotBlock,
    stats: &ChannelStats,
) -> Result<ComplexMatrix, KernelError> {
    y.check_against(x)?;
    check_stats(stats, x)?;
    let xs = SplitMatrix::from_matrix(&x.x);
    let r_h = SplitMatrix::from_matrix(&stats.r_h);
    let h_ls = lse_split(ctx, &SplitMatrix::from_matrix(&y.y), &xs)?;
    let xh = hermitian_split(ctx, &xs)?;
    let xxh = mat_mul_split(ctx, &xs, &xh)?;
    let xxh_inv = inverse_split(ctx, &xxh)?;
    let regularized = axpy_split(ctx, &r_h, stats.sigma2, &xxh_inv)?;
    let regularized_inv = inverse_split(ctx, &regularized)?;
    let filter = mat_mul_split(ctx, &regularized_inv, &r_h)?;
    Ok(mat_mul_split(ctx, &h_ls, &filter)?.to_matrix()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{relative_error, LinalgError};
    use crate::vector_machine::VectorConfig;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn sample(rows: usize, cols: usize, salt: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            let x = (i * cols + j) as f64 + salt;
            c((x * 0.913).sin(), (x * 0.411).cos())
        })
    }

    fn pilot(n: usize) -> PilotBlock {
        let x = mat_add(&sample(n, n, 3.3), &mat_scale(&ComplexMatrix::identity(n), c(2.0, 0.0))).unwrap();
        PilotBlock::new(x).unwrap()
    }

    #[test]
    fn identity_pilot_returns_observation() {
        let y = Observation::new(sample(4, 4, 0.0));
        let h = lse_estimate_ref(&y, &PilotBlock::new(ComplexMatrix::identity(4)).unwrap()).unwrap();
        assert_eq!(h, y.y);
    }

    #[test]
    fn scaled_pilot_cancels() {
        let h0 = sample(4, 4, 1.0);
        let two = c(2.0, 0.0);
        let x = PilotBlock::new(mat_scale(&ComplexMatrix::identity(4), two)).unwrap();
        let y = Observation::new(mat_scale(&h0, two));
        assert_eq!(lse_estimate_ref(&y, &x).unwrap(), h0);
    }

    #[test]
    fn singular_pilot_propagates() {
        let x = PilotBlock::new(ComplexMatrix::zeros(3, 3)).unwrap();
        let y = Observation::new(sample(3, 3, 0.0));
        assert_eq!(lse_estimate_ref(&y, &x).unwrap_err(), KernelError::Linalg(LinalgError::Singular { column: 0 }));
    }

    #[test]
    fn observation_shape_checked() {
        let y = Observation::new(sample(4, 3, 0.0));
        assert!(matches!(lse_estimate_ref(&y, &pilot(4)), Err(KernelError::InvalidInput(_))));
        assert!(PilotBlock::new(sample(2, 3, 0.0)).is_err());
    }

    #[test]
    fn mmse_closed_form() {
        let y = Observation::new(sample(3, 3, 0.5));
        let x = PilotBlock::new(ComplexMatrix::identity(3)).unwrap();
        let stats = ChannelStats::new(ComplexMatrix::identity(3), 1.0).unwrap();
        let h = mmse_estimate_ref(&y, &x, &stats).unwrap();
        let want = mat_scale(&y.y, c(0.5, 0.0));
        assert!(relative_error(&h, &want).unwrap() < 1e-15);
    }

    #[test]
    fn mmse_noiseless_is_lse() {
        let x = pilot(8);
        let y = Observation::new(sample(8, 8, 4.0));
        let stats = ChannelStats::exponential(8, 0.7, 0.0).unwrap();
        let mmse = mmse_estimate_ref(&y, &x, &stats).unwrap();
        let lse = lse_estimate_ref(&y, &x).unwrap();
        assert!(relative_error(&mmse, &lse).unwrap() < 1e-10);
    }

    #[test]
    fn mmse_rank_deficient_noiseless_is_singular() {
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0, 0.0));
        let stats = ChannelStats::new(ones, 0.0).unwrap();
        let y = Observation::new(sample(3, 3, 0.0));
        let err = mmse_estimate_ref(&y, &pilot(3), &stats).unwrap_err();
        assert!(matches!(err, KernelError::Linalg(LinalgError::Singular { .. })));
    }

    #[test]
    fn mmse_vec_matches_ref() {
        let x = pilot(16);
        let y = Observation::new(sample(16, 16, 9.0));
        let stats = ChannelStats::exponential(16, 0.7, 0.1).unwrap();
        let mut ctx = VectorContext::new(VectorConfig::new(1024, 4).unwrap()).unwrap();
        let got = mmse_estimate_vec(&mut ctx, &y, &x, &stats).unwrap();
        let want = mmse_estimate_ref(&y, &x, &stats).unwrap();
        assert!(relative_error(&got, &want).unwrap() < 1e-12);
    }

    #[test]
    fn stats_validation() {
        assert!(ChannelStats::new(ComplexMatrix::identity(2), -0.1).is_err());
        assert!(ChannelStats::new(ComplexMatrix::identity(2), f64::NAN).is_err());
        let not_hermitian =
            ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]]).unwrap();
        assert!(ChannelStats::new(not_hermitian, 0.1).is_err());
        let indefinite = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(ChannelStats::new(indefinite, 0.1).is_err());
        // eigenvalues 3 and -1
        let indefinite2 =
            ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(ChannelStats::new(indefinite2, 0.1).is_err());
        let zero_then_coupled =
            ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(ChannelStats::new(zero_then_coupled, 0.1).is_err());
        let semidefinite = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0, 0.0));
        assert!(ChannelStats::new(semidefinite, 0.0).is_ok());
        assert!(ChannelStats::exponential(16, 0.7, 0.1).is_ok());
        assert!(ChannelStats::exponential(4, 1.0, 0.1).is_err());
    }
}
