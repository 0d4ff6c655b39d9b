//! Correctness and agreement checks behind the `verify` command.
//!
//! Every (kernel, size) point runs a fixed list of checks:
//!
//! | kernel | correctness | per-preset agreement | determinism | total |
//! |--------|-------------|----------------------|-------------|-------|
//! | lse    | 1           | 15                   | 1           | 17    |
//! | mmse   | 2           | 15                   | 1           | 18    |
//! | fft    | 3           | 15                   | 1           | 19    |
//! | zf     | 1           | 15                   | 1           | 17    |
//! | beam   | 1           | 15                   | 1           | 17    |
//!
//! The defaults (matrix sizes 16 and 32, FFT sizes 16, 64, 256 and 1024)
//! give 214 checks. A per-preset check passes when the vectorized output is
//! within [`AGREEMENT_TOL`] of the reference and at least one vector
//! instruction was charged.

use rayon::prelude::*;

use crate::kernels::{
    beam_weights_ref, build_steered_channel_ref, fft_radix4_ref, ifft_radix4_ref, ifft_radix4_vec, lse_estimate_ref,
    mmse_estimate_ref, zf_precoder_ref, ChannelStats, FftPlan, KernelError, KernelId, Observation, PilotBlock,
};
use crate::linalg::{
    frobenius_norm, hermitian_transpose, mat_mul, mat_scale, mat_sub, relative_error, Complex, ComplexMatrix,
};
use crate::vector_machine::{preset_configs, VectorContext};
use crate::workload::{KernelOutput, Workload};

pub const CORRECTNESS_TOL: f64 = 1e-9;
pub const AGREEMENT_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const MMSE_LSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub kernels: Vec<KernelId>,
    pub sizes: Vec<usize>,
    pub fft_sizes: Vec<usize>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            kernels: KernelId::ALL.to_vec(),
            sizes: vec![16, 32],
            fft_sizes: vec![16, 64, 256, 1024],
            seed: crate::bench::DEFAULT_SEED,
        }
    }
}

impl VerifyOptions {
    pub fn points(&self) -> Vec<(KernelId, usize)> {
        let mut out = Vec::new();
        for &k in &self.kernels {
            let sizes = if k == KernelId::Fft { &self.fft_sizes } else { &self.sizes };
            out.extend(sizes.iter().map(|&n| (k, n)));
        }
        out
    }

    pub fn expected_checks(&self) -> usize {
        self.points().iter().map(|&(k, _)| checks_per_point(k)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub kernel: KernelId,
    pub size: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} n={} {}: {}", self.kernel, self.size, self.name, self.detail)
    }
}

fn correctness_checks(kernel: KernelId) -> usize {
    match kernel {
        KernelId::Lse | KernelId::Zf | KernelId::Beam => 1,
        KernelId::Mmse => 2,
        KernelId::Fft => 3,
    }
}

pub fn checks_per_point(kernel: KernelId) -> usize {
    correctness_checks(kernel) + preset_configs().len() + 1
}

/// Runs every check for every selected point. Output order follows
/// [`VerifyOptions::points`].
pub fn run_verify(opts: &VerifyOptions) -> Vec<CheckResult> {
    opts.points()
        .par_iter()
        .map(|&(k, n)| verify_point(k, n, opts.seed))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn verify_point(kernel: KernelId, size: usize, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::with_capacity(checks_per_point(kernel));
    let mut push = |name: String, res: Result<(bool, String), KernelError>| {
        let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
        out.push(CheckResult { kernel, size, name, passed, detail });
    };

    let workload = match Workload::generate(kernel, size, seed) {
        Ok(w) => w,
        Err(e) => {
            for i in 0..checks_per_point(kernel) {
                push(format!("check {i}"), Err(e.clone()));
            }
            return out;
        }
    };

    for (name, res) in correctness(&workload) {
        push(name.to_string(), res);
    }

    let reference = workload.run_ref();
    for cfg in preset_configs() {
        let name = format!("vec/ref vlen={} lanes={}", cfg.vlen_bits, cfg.lanes);
        let res = (|| {
            let reference = reference.clone()?;
            let mut ctx = VectorContext::new(cfg)?;
            let got = workload.run_vec(&mut ctx)?;
            let err = got.relative_error(&reference).unwrap_or(f64::INFINITY);
            let insns = ctx.snapshot().vector_instructions;
            Ok((err < AGREEMENT_TOL && insns >= 1, format!("rel err {err:.3e}, {insns} vector instructions")))
        })();
        push(name, res);
    }

    let res = (|| {
        let cfg = preset_configs()[0];
        let mut a = VectorContext::new(cfg)?;
        let mut b = VectorContext::new(cfg)?;
        workload.run_vec(&mut a)?;
        workload.run_vec(&mut b)?;
        let (la, lb) = (a.snapshot(), b.snapshot());
        Ok((la == lb, format!("{} vs {} cycles", la.total_cycles, lb.total_cycles)))
    })();
    push("cycle determinism".to_string(), res);
    out
}

type Check = (&'static str, Result<(bool, String), KernelError>);

fn below(value: f64, tol: f64) -> (bool, String) {
    (value < tol, format!("{value:.3e} (tol {tol:.0e})"))
}

fn correctness(w: &Workload) -> Vec<Check> {
    match w {
        Workload::Lse { observation, pilot, planted } => vec![(
            "planted channel recovery",
            (|| Ok(below(relative_error(&lse_estimate_ref(observation, pilot)?, planted)?, CORRECTNESS_TOL)))(),
        )],
        Workload::Mmse { observation, pilot, stats } => vec![
            (
                "linear-solve oracle",
                (|| {
                    let got = mmse_estimate_ref(observation, pilot, stats)?;
                    let want = mmse_by_solve(observation, pilot, stats)?;
                    Ok(below(relative_error(&got, &want)?, CORRECTNESS_TOL))
                })(),
            ),
            (
                "sigma2=0 equals lse",
                (|| {
                    let noiseless = ChannelStats::new(stats.r_h().clone(), 0.0)?;
                    let got = mmse_estimate_ref(observation, pilot, &noiseless)?;
                    let lse = lse_estimate_ref(observation, pilot)?;
                    Ok(below(relative_error(&got, &lse)?, MMSE_LSE_TOL))
                })(),
            ),
        ],
        Workload::Fft { plan, signal } => vec![
            (
                "naive dft oracle",
                (|| Ok(below(vec_rel_err(&fft_radix4_ref(plan, signal)?, &naive_dft(signal)), CORRECTNESS_TOL)))(),
            ),
            (
                "ifft(fft(x)) = x",
                (|| {
                    let back = ifft_radix4_ref(plan, &fft_radix4_ref(plan, signal)?)?;
                    Ok(below(vec_rel_err(&back, signal), CORRECTNESS_TOL))
                })(),
            ),
            ("inverse vec/ref over presets", ifft_agreement(plan, signal)),
        ],
        Workload::Zf { channel } => {
            vec![("H*W = I", (|| Ok(below(identity_residual(channel, &zf_precoder_ref(channel)?)?, IDENTITY_TOL)))())]
        }
        Workload::Beam { array } => vec![(
            "H*W(amp, phase) = I",
            (|| {
                let h = build_steered_channel_ref(array)?;
                let w = beam_weights_ref(&h)?.to_precoder()?;
                Ok(below(identity_residual(&h, &w)?, IDENTITY_TOL))
            })(),
        )],
    }
}

fn ifft_agreement(plan: &FftPlan, signal: &[Complex]) -> Result<(bool, String), KernelError> {
    let want = ifft_radix4_ref(plan, signal)?;
    let mut worst = 0.0f64;
    for cfg in preset_configs() {
        let got = ifft_radix4_vec(&mut VectorContext::new(cfg)?, plan, signal)?;
        worst = worst.max(vec_rel_err(&got, &want));
    }
    Ok(below(worst, AGREEMENT_TOL))
}

fn identity_residual(h: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64, KernelError> {
    let hw = mat_mul(h, w)?;
    Ok(frobenius_norm(&mat_sub(&hw, &ComplexMatrix::identity(hw.rows()))?))
}

fn vec_rel_err(got: &[Complex], want: &[Complex]) -> f64 {
    let out = KernelOutput::Vector(got.to_vec());
    out.relative_error(&KernelOutput::Vector(want.to_vec())).unwrap_or(f64::INFINITY)
}

/// `X[k] = Σ x[t]·exp(−j2πkt/N)`, with the exponent reduced mod N so large
/// transforms keep full phase accuracy.
pub fn naive_dft(x: &[Complex]) -> Vec<Complex> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| {
                    let phase = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                    v * Complex::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect()
}

/// MMSE through the equivalent form `Y·(Xᴴ·R_H·X + σ²I)⁻¹·Xᴴ·R_H`, solved by
/// Gaussian elimination with back substitution (no explicit inverse).
pub fn mmse_by_solve(y: &Observation, x: &PilotBlock, stats: &ChannelStats) -> Result<ComplexMatrix, KernelError> {
    let xh_r = mat_mul(&hermitian_transpose(&x.x), stats.r_h())?;
    let n = x.dim();
    let a = crate::linalg::mat_add(
        &mat_mul(&xh_r, &x.x)?,
        &mat_scale(&ComplexMatrix::identity(n), Complex::new(stats.sigma2(), 0.0)),
    )?;
    let b = solve(&a, &xh_r)?;
    Ok(mat_mul(&y.y, &b)?)
}

/// Solves `A·B = C` for square `A` by LU-style elimination with partial
/// pivoting on the combined system.
fn solve(a: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    let n = a.rows();
    let m = c.cols();
    let mut lhs: Vec<Vec<Complex>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs: Vec<Vec<Complex>> = (0..n).map(|i| c.row(i).to_vec()).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| lhs[i][col].norm().total_cmp(&lhs[j][col].norm())).unwrap_or(col);
        if lhs[p][col].norm() == 0.0 {
            return Err(KernelError::InvalidInput("singular system".into()));
        }
        lhs.swap(col, p);
        rhs.swap(col, p);
        for r in col + 1..n {
            let f = lhs[r][col] / lhs[col][col];
            let (pivot_l, pivot_r) = (lhs[col].clone(), rhs[col].clone());
            lhs[r].iter_mut().zip(&pivot_l).skip(col).for_each(|(d, s)| *d -= f * s);
            rhs[r].iter_mut().zip(&pivot_r).for_each(|(d, s)| *d -= f * s);
        }
    }
    let mut out = vec![Complex::new(0.0, 0.0); n * m];
    for i in (0..n).rev() {
        for k in 0..m {
            let mut acc = rhs[i][k];
            for j in i + 1..n {
                acc -= lhs[i][j] * out[j * m + k];
            }
            out[i * m + k] = acc / lhs[i][i];
        }
    }
    Ok(ComplexMatrix::from_vec(n, m, out)?)
}
