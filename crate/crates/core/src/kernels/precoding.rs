//! Zero-forcing precoding: `W = Hᴴ(H·Hᴴ)⁻¹`, so that `H·W = I`.

use crate::linalg::{hermitian_transpose, mat_inverse, mat_mul, ComplexMatrix};
use crate::vector_machine::VectorContext;

use super::split::{hermitian_split, inverse_split, mat_mul_split, SplitMatrix};
use super::KernelError;

pub(crate) fn check_users(h: &ComplexMatrix) -> Result<(), KernelError> {
    if h.rows() > h.cols() {
        return Err(KernelError::InvalidInput(format!(
            "zero forcing needs users <= antennas, got {} users and {} antennas",
            h.rows(),
            h.cols()
        )));
    }
    Ok(())
}

/// `h` is `Nu × Nt` (users × antennas); the result is `Nt × Nu`.
pub fn zf_precoder_ref(h: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    check_users(h)?;
    let hh = hermitian_transpose(h);
    let gram = mat_mul(h, &hh)?;
    Ok(mat_mul(&hh, &mat_inverse(&gram)?)?)
}

pub fn zf_precoder_vec(ctx: &mut VectorContext, h: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    check_users(h)?;
    Ok(zf_split(ctx, &SplitMatrix::from_matrix(h))?.to_matrix()?)
}

pub(crate) fn zf_split(ctx: &mut VectorContext, h: &SplitMatrix) -> Result<SplitMatrix, KernelError> {
    let hh = hermitian_split(ctx, h)?;
    let gram = mat_mul_split(ctx, h, &hh)?;
    let gram_inv = inverse_split(ctx, &gram)?;
    mat_mul_split(ctx, &hh, &gram_inv)
}
