//! Seeded kernel inputs and a uniform way to run either kernel variant.
//!
//! Inputs depend only on `(seed, kernel, size)`: the seed selects a ChaCha
//! key and `(kernel, size)` selects the stream, so every machine
//! configuration of one sweep point sees identical data.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernels::{
    beam_weights_ref, beam_weights_vec, build_steered_channel_ref, build_steered_channel_vec, fft_radix4_ref,
    fft_radix4_vec, lse_estimate_ref, lse_estimate_vec, mmse_estimate_ref, mmse_estimate_vec, zf_precoder_ref,
    zf_precoder_vec, BeamWeights, ChannelStats, FftPlan, KernelError, KernelId, Observation, PathComponent, PilotBlock,
    SteeringArrayConfig, UserPaths,
};
use crate::linalg::{frobenius_norm, mat_add, mat_mul, mat_scale, Complex, ComplexMatrix};
use crate::vector_machine::{CycleLedger, VectorContext};

/// Correlation coefficient of the exponential `R_H` model used for MMSE.
pub const MMSE_RHO: f64 = 0.7;
/// Noise variance used for MMSE workloads.
pub const MMSE_SIGMA2: f64 = 0.1;
/// Diagonal offset that keeps random pilot blocks well conditioned.
pub const PILOT_DIAGONAL_BOOST: f64 = 2.0;
/// Paths per user in beamforming workloads.
pub const BEAM_PATHS_PER_USER: usize = 3;

pub fn rng_for(seed: u64, kernel: KernelId, size: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((kernel as u64) << 48) | size as u64);
    rng
}

/// Complex entry with real and imaginary parts uniform in `[−1, 1]`.
pub fn random_complex(rng: &mut impl Rng) -> Complex {
    Complex::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex> {
    (0..n).map(|_| random_complex(rng)).collect()
}

/// Random pilot block made diagonally dominant by adding `2·I`.
pub fn random_pilot(rng: &mut impl Rng, n: usize) -> PilotBlock {
    let boost = mat_scale(&ComplexMatrix::identity(n), Complex::new(PILOT_DIAGONAL_BOOST, 0.0));
    let x = mat_add(&random_matrix(rng, n, n), &boost).expect("same shape");
    PilotBlock::new(x).expect("square")
}

/// `n` antennas, `max(1, n/4)` users, [`BEAM_PATHS_PER_USER`] paths each with
/// angles uniform over `[−π/2, π/2]`.
pub fn random_array(rng: &mut impl Rng, n: usize) -> SteeringArrayConfig {
    let users = (0..(n / 4).max(1))
        .map(|_| UserPaths {
            paths: (0..BEAM_PATHS_PER_USER)
                .map(|_| PathComponent {
                    angle_rad: rng.random_range(-FRAC_PI_2..=FRAC_PI_2),
                    gain: random_complex(rng),
                })
                .collect(),
        })
        .collect();
    SteeringArrayConfig::new(n, 0.5, users).expect("valid by construction")
}

/// Named sub-ledgers of one vectorized run.
pub type PhaseLedgers = Vec<(&'static str, CycleLedger)>;

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Lse { observation: Observation, pilot: PilotBlock, planted: ComplexMatrix },
    Mmse { observation: Observation, pilot: PilotBlock, stats: ChannelStats },
    Fft { plan: FftPlan, signal: Vec<Complex> },
    Zf { channel: ComplexMatrix },
    Beam { array: SteeringArrayConfig },
}

impl Workload {
    /// `size` is the matrix dimension, the transform length for FFT, or the
    /// antenna count for beamforming.
    pub fn generate(kernel: KernelId, size: usize, seed: u64) -> Result<Self, KernelError> {
        if size == 0 {
            return Err(KernelError::InvalidInput("size must be positive".into()));
        }
        let mut rng = rng_for(seed, kernel, size);
        Ok(match kernel {
            KernelId::Lse => {
                let planted = random_matrix(&mut rng, size, size);
                let pilot = random_pilot(&mut rng, size);
                let observation = Observation::new(mat_mul(&planted, &pilot.x)?);
                Workload::Lse { observation, pilot, planted }
            }
            KernelId::Mmse => {
                let channel = random_matrix(&mut rng, size, size);
                let pilot = random_pilot(&mut rng, size);
                let noise = mat_scale(&random_matrix(&mut rng, size, size), Complex::new(MMSE_SIGMA2.sqrt(), 0.0));
                let observation = Observation::new(mat_add(&mat_mul(&channel, &pilot.x)?, &noise)?);
                let stats = ChannelStats::exponential(size, MMSE_RHO, MMSE_SIGMA2)?;
                Workload::Mmse { observation, pilot, stats }
            }
            KernelId::Fft => {
                let plan = FftPlan::new(size)?;
                Workload::Fft { signal: random_vector(&mut rng, size), plan }
            }
            KernelId::Zf => Workload::Zf { channel: random_matrix(&mut rng, size, size) },
            KernelId::Beam => Workload::Beam { array: random_array(&mut rng, size) },
        })
    }

    pub fn kernel(&self) -> KernelId {
        match self {
            Workload::Lse { .. } => KernelId::Lse,
            Workload::Mmse { .. } => KernelId::Mmse,
            Workload::Fft { .. } => KernelId::Fft,
            Workload::Zf { .. } => KernelId::Zf,
            Workload::Beam { .. } => KernelId::Beam,
        }
    }

    pub fn run_ref(&self) -> Result<KernelOutput, KernelError> {
        Ok(match self {
            Workload::Lse { observation, pilot, .. } => KernelOutput::Matrix(lse_estimate_ref(observation, pilot)?),
            Workload::Mmse { observation, pilot, stats } => {
                KernelOutput::Matrix(mmse_estimate_ref(observation, pilot, stats)?)
            }
            Workload::Fft { plan, signal } => KernelOutput::Vector(fft_radix4_ref(plan, signal)?),
            Workload::Zf { channel } => KernelOutput::Matrix(zf_precoder_ref(channel)?),
            Workload::Beam { array } => KernelOutput::Beam(beam_weights_ref(&build_steered_channel_ref(array)?)?),
        })
    }

    pub fn run_vec(&self, ctx: &mut VectorContext) -> Result<KernelOutput, KernelError> {
        self.run_vec_with_parts(ctx).map(|(out, _)| out)
    }

    /// Like [`Workload::run_vec`], also returning named sub-ledgers for
    /// kernels made of separately interesting phases (beamforming reports
    /// channel construction and weight computation).
    pub fn run_vec_with_parts(&self, ctx: &mut VectorContext) -> Result<(KernelOutput, PhaseLedgers), KernelError> {
        Ok(match self {
            Workload::Lse { observation, pilot, .. } => {
                (KernelOutput::Matrix(lse_estimate_vec(ctx, observation, pilot)?), Vec::new())
            }
            Workload::Mmse { observation, pilot, stats } => {
                (KernelOutput::Matrix(mmse_estimate_vec(ctx, observation, pilot, stats)?), Vec::new())
            }
            Workload::Fft { plan, signal } => (KernelOutput::Vector(fft_radix4_vec(ctx, plan, signal)?), Vec::new()),
            Workload::Zf { channel } => (KernelOutput::Matrix(zf_precoder_vec(ctx, channel)?), Vec::new()),
            Workload::Beam { array } => {
                let start = ctx.snapshot();
                let h = build_steered_channel_vec(ctx, array)?;
                let mid = ctx.snapshot();
                let weights = beam_weights_vec(ctx, &h)?;
                let end = ctx.snapshot();
                let parts = vec![("channel", mid.since(&start)), ("weights", end.since(&mid))];
                (KernelOutput::Beam(weights), parts)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelOutput {
    Matrix(ComplexMatrix),
    Vector(Vec<Complex>),
    Beam(BeamWeights),
}

impl KernelOutput {
    /// Frobenius norm for matrices, ℓ₂ norm for vectors, and the norm of the
    /// reconstructed precoder for beam weights.
    pub fn norm(&self) -> f64 {
        match self {
            KernelOutput::Matrix(m) => frobenius_norm(m),
            KernelOutput::Vector(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            KernelOutput::Beam(b) => b.users.iter().flatten().map(|w| w.amplitude * w.amplitude).sum::<f64>().sqrt(),
        }
    }

    fn flat(&self) -> Vec<Complex> {
        match self {
            KernelOutput::Matrix(m) => m.as_slice().to_vec(),
            KernelOutput::Vector(v) => v.clone(),
            KernelOutput::Beam(b) => b.users.iter().flatten().map(|w| w.to_complex()).collect(),
        }
    }

    /// `‖self − other‖ / ‖other‖`; `None` when the shapes differ.
    pub fn relative_error(&self, other: &KernelOutput) -> Option<f64> {
        let (a, b) = (self.flat(), other.flat());
        if std::mem::discriminant(self) != std::mem::discriminant(other) || a.len() != b.len() {
            return None;
        }
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let scale = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Some(if scale > 0.0 { diff / scale } else { diff })
    }
}
