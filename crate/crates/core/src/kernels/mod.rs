//! LOW-PHY kernels.
//!
//! Every kernel comes in two variants: `<name>_ref`, a plain scalar
//! implementation used as the numerical reference, and `<name>_vec`, which
//! works on split-plane data (separate real and imaginary arrays) and reports
//! each vector instruction it would issue to a [`VectorContext`]. The two
//! variants agree to rounding error; only the `_vec` path produces cycle
//! counts.
//!
//! Split-plane layout means a complex multiply by a scalar costs two `mul`
//! plus two `macc`, and a complex multiply-accumulate costs four `macc`.
//! Conversion between the interleaved [`ComplexMatrix`] and the split layout
//! happens at the API boundary and is not charged.
//!
//! [`VectorContext`]: crate::vector_machine::VectorContext
//! [`ComplexMatrix`]: crate::linalg::ComplexMatrix

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::vector_machine::MachineError;

pub mod beamforming;
pub mod estimation;
pub mod fft;
pub mod precoding;
mod split;

pub use beamforming::{
    beam_weights_ref, beam_weights_vec, build_steered_channel_ref, build_steered_channel_vec, steering_vector_ref,
    steering_vector_vec, AntennaWeight, BeamWeights, PathComponent, SteeringArrayConfig, UserPaths,
};
pub use estimation::{
    lse_estimate_ref, lse_estimate_vec, mmse_estimate_ref, mmse_estimate_vec, ChannelStats, Observation, PilotBlock,
};
pub use fft::{fft_radix4_ref, fft_radix4_vec, ifft_radix4_ref, ifft_radix4_vec, FftPlan};
pub use precoding::{zf_precoder_ref, zf_precoder_vec};
pub use split::{hermitian_transpose_vec, mat_inverse_vec, mat_mul_vec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// The benchmarked kernels, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelId {
    Lse,
    Mmse,
    Fft,
    Zf,
    Beam,
}

impl KernelId {
    pub const ALL: [KernelId; 5] = [KernelId::Lse, KernelId::Mmse, KernelId::Fft, KernelId::Zf, KernelId::Beam];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Lse => "lse",
            KernelId::Mmse => "mmse",
            KernelId::Fft => "fft",
            KernelId::Zf => "zf",
            KernelId::Beam => "beam",
        }
    }

    /// True for kernels sized by transform length rather than matrix dimension.
    pub fn is_transform(self) -> bool {
        self == KernelId::Fft
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown kernel '{0}' (expected one of lse, mmse, fft, zf, beam)")]
pub struct UnknownKernel(pub String);

impl FromStr for KernelId {
    type Err = UnknownKernel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownKernel(s.to_string()))
    }
}
