//! Radix-4 decimation-in-time Cooley-Tukey FFT.
//!
//! The input is first permuted into base-4 digit-reversed order, then
//! `log4(n)` stages of 4-point butterflies are applied. In the stage with
//! quarter-span `q` (1, 4, 16, ...), butterfly `(g, j)` combines elements
//! `g + j + {0, q, 2q, 3q}` after scaling the last three by the twiddles
//! `W^{j·s}`, `W^{2j·s}`, `W^{3j·s}` with `W = exp(−2πi/n)` and
//! `s = n / 4q`.
//!
//! Forward transforms are unnormalized; inverse transforms scale by `1/n`.

use std::f64::consts::PI;

use crate::linalg::Complex;
use crate::vector_machine::{strip_mine, ArithKind, MemKind, VectorContext};

use super::split::charge_mem;
use super::KernelError;

/// Precomputed twiddles and reorder permutation for one transform length.
#[derive(Debug, Clone, PartialEq)]
pub struct FftPlan {
    n: usize,
    stages: u32,
    twiddles: Vec<Complex>,
    digit_reversal: Vec<usize>,
}

impl FftPlan {
    /// `n` must be `4^k` with `k ≥ 1`.
    pub fn new(n: usize) -> Result<Self, KernelError> {
        let stages = radix4_stages(n)
            .ok_or_else(|| KernelError::InvalidInput(format!("FFT length must be a power of 4 (>= 4), got {n}")))?;
        let twiddles = (0..n).map(|k| Complex::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)).collect();
        let digit_reversal = (0..n).map(|i| reverse_base4(i, stages)).collect();
        Ok(Self { n, stages, twiddles, digit_reversal })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stages(&self) -> u32 {
        self.stages
    }

    /// `W_n^k = exp(−2πik/n)` for `k` in `0..n`.
    pub fn twiddles(&self) -> &[Complex] {
        &self.twiddles
    }

    pub fn digit_reversal(&self) -> &[usize] {
        &self.digit_reversal
    }

    fn check_len(&self, len: usize) -> Result<(), KernelError> {
        if len != self.n {
            return Err(KernelError::InvalidInput(format!("input length {len} does not match plan length {}", self.n)));
        }
        Ok(())
    }
}

fn radix4_stages(n: usize) -> Option<u32> {
    if n < 4 || !n.is_power_of_two() || !n.trailing_zeros().is_multiple_of(2) {
        return None;
    }
    Some(n.trailing_zeros() / 2)
}

fn reverse_base4(mut i: usize, digits: u32) -> usize {
    let mut out = 0;
    for _ in 0..digits {
        out = (out << 2) | (i & 3);
        i >>= 2;
    }
    out
}

/// Element indices of butterfly `b` in the stage with quarter-span `q`.
fn butterfly_base(b: usize, q: usize) -> (usize, usize) {
    let j = b % q;
    ((b / q) * 4 * q + j, j)
}

#[inline]
fn butterfly(a0: Complex, a1: Complex, a2: Complex, a3: Complex) -> [Complex; 4] {
    let t0 = a0 + a2;
    let t1 = a0 - a2;
    let t2 = a1 + a3;
    let t3 = a1 - a3;
    [t0 + t2, Complex::new(t1.re + t3.im, t1.im - t3.re), t0 - t2, Complex::new(t1.re - t3.im, t1.im + t3.re)]
}

pub fn fft_radix4_ref(plan: &FftPlan, x: &[Complex]) -> Result<Vec<Complex>, KernelError> {
    plan.check_len(x.len())?;
    let n = plan.n;
    let mut data: Vec<Complex> = plan.digit_reversal.iter().map(|&src| x[src]).collect();
    let mut q = 1;
    while q < n {
        let stride = n / (4 * q);
        for b in 0..n / 4 {
            let (i0, j) = butterfly_base(b, q);
            let w1 = plan.twiddles[j * stride];
            let w2 = plan.twiddles[2 * j * stride];
            let w3 = plan.twiddles[3 * j * stride];
            let out = butterfly(data[i0], data[i0 + q] * w1, data[i0 + 2 * q] * w2, data[i0 + 3 * q] * w3);
            for (m, v) in out.into_iter().enumerate() {
                data[i0 + m * q] = v;
            }
        }
        q *= 4;
    }
    Ok(data)
}

/// Inverse transform via `conj(fft(conj(X))) / n`.
pub fn ifft_radix4_ref(plan: &FftPlan, spectrum: &[Complex]) -> Result<Vec<Complex>, KernelError> {
    plan.check_len(spectrum.len())?;
    let conj: Vec<Complex> = spectrum.iter().map(|z| z.conj()).collect();
    let scale = 1.0 / plan.n as f64;
    Ok(fft_radix4_ref(plan, &conj)?.into_iter().map(|z| z.conj() * scale).collect())
}

/// Forward transform vectorized across the `n/4` butterflies of each stage.
///
/// Instruction mix per strip of `vl` butterflies: 8 loads, 6 twiddle loads
/// and 12 arith for the three complex twiddle products (skipped in the first
/// stage, where all twiddles are 1), 16 add/sub for the butterfly and 8
/// stores. Accesses are unit-stride when a strip lies inside one group's
/// contiguous run, otherwise strided; see [`stage_strip_cap`]. The digit-reversal reorder is an
/// indexed gather charged as strided loads.
pub fn fft_radix4_vec(ctx: &mut VectorContext, plan: &FftPlan, x: &[Complex]) -> Result<Vec<Complex>, KernelError> {
    plan.check_len(x.len())?;
    let (mut re, mut im) = (vec![0.0; plan.n], vec![0.0; plan.n]);
    strip_mine(ctx, plan.n, |ctx, off, vl| {
        ctx.vec_mem(MemKind::LoadUnit, vl)?;
        charge_mem(ctx, MemKind::LoadStrided, vl, 2)?;
        for i in off..off + vl {
            let z = x[plan.digit_reversal[i]];
            re[i] = z.re;
            im[i] = z.im;
        }
        charge_mem(ctx, MemKind::StoreUnit, vl, 2)
    })?;
    fft_stages_split(ctx, plan, &mut re, &mut im)?;
    Ok(re.into_iter().zip(im).map(|(r, i)| Complex::new(r, i)).collect())
}

fn fft_stages_split(
    ctx: &mut VectorContext,
    plan: &FftPlan,
    re: &mut [f64],
    im: &mut [f64],
) -> Result<(), KernelError> {
    let n = plan.n;
    let mut q = 1;
    while q < n {
        let stride = n / (4 * q);
        let first_stage = q == 1;
        let cap = stage_strip_cap(ctx, n, q)?;
        let mut off = 0;
        while off < n / 4 {
            let vl = ctx.set_vl((n / 4 - off).min(cap));
            charge_butterflies(ctx, vl, q, stride)?;
            for b in off..off + vl {
                let (i0, j) = butterfly_base(b, q);
                let load = |m: usize| Complex::new(re[i0 + m * q], im[i0 + m * q]);
                let (a1, a2, a3) = if first_stage {
                    (load(1), load(2), load(3))
                } else {
                    (
                        load(1) * plan.twiddles[j * stride],
                        load(2) * plan.twiddles[2 * j * stride],
                        load(3) * plan.twiddles[3 * j * stride],
                    )
                };
                let out = butterfly(load(0), a1, a2, a3);
                for (m, v) in out.into_iter().enumerate() {
                    re[i0 + m * q] = v.re;
                    im[i0 + m * q] = v.im;
                }
            }
            off += vl;
        }
        q *= 4;
    }
    Ok(())
}

/// Strip width for a stage with quarter-span `q`. When `q < vlmax` a strip
/// can either gather across groups at full width (strided) or stay inside
/// one group's run of `q` butterflies (unit stride); the cheaper one wins,
/// ties going to the wider strip.
fn stage_strip_cap(ctx: &VectorContext, n: usize, q: usize) -> Result<usize, KernelError> {
    let vlmax = ctx.vlmax();
    if q >= vlmax {
        return Ok(vlmax);
    }
    let stride = n / (4 * q);
    let cost = |cap: usize| -> Result<u64, KernelError> {
        let mut dry = ctx.clone();
        let start = dry.snapshot().total_cycles;
        let mut off = 0;
        while off < n / 4 {
            let vl = dry.set_vl((n / 4 - off).min(cap));
            charge_butterflies(&mut dry, vl, q, stride)?;
            off += vl;
        }
        Ok(dry.snapshot().total_cycles - start)
    };
    Ok(if cost(q)? < cost(vlmax)? { q } else { vlmax })
}

fn charge_butterflies(ctx: &mut VectorContext, vl: usize, q: usize, stride: usize) -> Result<(), KernelError> {
    let contiguous = q.is_multiple_of(vl);
    let data_kind = if contiguous { MemKind::LoadUnit } else { MemKind::LoadStrided };
    let tw_kind = if contiguous && stride == 1 { MemKind::LoadUnit } else { MemKind::LoadStrided };
    charge_mem(ctx, data_kind, vl, 8)?;
    if q > 1 {
        charge_mem(ctx, tw_kind, vl, 6)?;
        for _ in 0..3 {
            ctx.vec_arith(ArithKind::Mul, vl)?;
            ctx.vec_arith(ArithKind::Mul, vl)?;
            ctx.vec_arith(ArithKind::Macc, vl)?;
            ctx.vec_arith(ArithKind::Macc, vl)?;
        }
    }
    for _ in 0..8 {
        ctx.vec_arith(ArithKind::Add, vl)?;
        ctx.vec_arith(ArithKind::Sub, vl)?;
    }
    let store_kind = if contiguous { MemKind::StoreUnit } else { MemKind::StoreStrided };
    charge_mem(ctx, store_kind, vl, 8)
}

/// Inverse transform: conjugate (one negate per strip), forward stages,
/// then conjugate and scale by `1/n` (two multiplies per strip).
pub fn ifft_radix4_vec(
    ctx: &mut VectorContext,
    plan: &FftPlan,
    spectrum: &[Complex],
) -> Result<Vec<Complex>, KernelError> {
    plan.check_len(spectrum.len())?;
    let conj: Vec<Complex> = spectrum.iter().map(|z| z.conj()).collect();
    strip_mine(ctx, plan.n, |ctx, _, vl| {
        charge_mem(ctx, MemKind::LoadUnit, vl, 1)?;
        ctx.vec_arith(ArithKind::Sub, vl)?;
        charge_mem(ctx, MemKind::StoreUnit, vl, 1)
    })?;
    let forward = fft_radix4_vec(ctx, plan, &conj)?;
    let scale = 1.0 / plan.n as f64;
    strip_mine(ctx, plan.n, |ctx, _, vl| {
        charge_mem(ctx, MemKind::LoadUnit, vl, 2)?;
        ctx.vec_arith(ArithKind::Mul, vl)?;
        ctx.vec_arith(ArithKind::Mul, vl)?;
        charge_mem(ctx, MemKind::StoreUnit, vl, 2)
    })?;
    Ok(forward.into_iter().map(|z| z.conj() * scale).collect())
}
