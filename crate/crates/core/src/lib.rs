//! LOW-PHY wireless kernels (least-squares and MMSE channel estimation,
//! radix-4 FFT, zero-forcing precoding, steering-vector beamforming) run
//! against an abstract vector processor whose VLEN and lane count are
//! configurable, with deterministic cycle accounting and a sweep harness.

pub mod bench;
pub mod kernels;
pub mod linalg;
pub mod vector_machine;
pub mod verify;
pub mod workload;

pub use kernels::{KernelError, KernelId};
pub use linalg::{Complex, ComplexMatrix, LinalgError};
pub use vector_machine::{CycleLedger, VectorConfig, VectorContext};
