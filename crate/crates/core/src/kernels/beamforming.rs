//! Uniform-linear-array steering vectors, steered channel construction and
//! per-antenna beam weights.
//!
//! Angles are measured from array broadside. Element `m` of the steering
//! vector for angle `θ` is `exp(−j·2π·(d/λ)·m·sin θ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::linalg::{Complex, ComplexMatrix};
use crate::vector_machine::{strip_mine, ArithKind, MemKind, VectorContext};

use super::precoding::{check_users, zf_precoder_ref, zf_split};
use super::split::{charge_mem, cmacc_scalar, cmul_scalar, SplitMatrix};
use super::KernelError;

/// One propagation path of a user: departure angle and complex gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub angle_rad: f64,
    pub gain: Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserPaths {
    pub paths: Vec<PathComponent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringArrayConfig {
    pub num_antennas: usize,
    /// Element spacing `d/λ`.
    pub spacing_wavelengths: f64,
    pub users: Vec<UserPaths>,
}

impl SteeringArrayConfig {
    pub fn new(num_antennas: usize, spacing_wavelengths: f64, users: Vec<UserPaths>) -> Result<Self, KernelError> {
        let cfg = Self { num_antennas, spacing_wavelengths, users };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |msg: String| Err(KernelError::InvalidInput(msg));
        if self.num_antennas == 0 {
            return bad("array needs at least one antenna".into());
        }
        if !(self.spacing_wavelengths.is_finite() && self.spacing_wavelengths > 0.0) {
            return bad(format!("element spacing must be > 0, got {}", self.spacing_wavelengths));
        }
        if self.users.is_empty() {
            return bad("at least one user is required".into());
        }
        for (u, user) in self.users.iter().enumerate() {
            if user.paths.is_empty() {
                return bad(format!("user {u} has no paths"));
            }
            for p in &user.paths {
                if !(-FRAC_PI_2..=FRAC_PI_2).contains(&p.angle_rad) {
                    return bad(format!("user {u}: angle {} outside [-pi/2, pi/2]", p.angle_rad));
                }
                if !(p.gain.re.is_finite() && p.gain.im.is_finite()) {
                    return bad(format!("user {u}: non-finite path gain"));
                }
            }
        }
        Ok(())
    }
}

/// Amplitude and phase applied to one antenna element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaWeight {
    pub amplitude: f64,
    /// Principal value in `(−π, π]`.
    pub phase_rad: f64,
}

impl AntennaWeight {
    pub fn from_complex(w: Complex) -> Self {
        Self { amplitude: w.norm(), phase_rad: principal_phase(w.arg()) }
    }

    pub fn to_complex(self) -> Complex {
        Complex::from_polar(self.amplitude, self.phase_rad)
    }
}

fn principal_phase(phase: f64) -> f64 {
    if phase <= -PI {
        phase + 2.0 * PI
    } else {
        phase
    }
}

/// Per-user weights, one entry per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    pub users: Vec<Vec<AntennaWeight>>,
}

impl BeamWeights {
    /// Rebuilds the `M × Nu` precoder the weights were taken from.
    pub fn to_precoder(&self) -> Result<ComplexMatrix, KernelError> {
        let nu = self.users.len();
        let m = self.users.first().map_or(0, Vec::len);
        if nu == 0 || m == 0 || self.users.iter().any(|u| u.len() != m) {
            return Err(KernelError::InvalidInput("ragged or empty beam weights".into()));
        }
        Ok(ComplexMatrix::from_fn(m, nu, |a, u| self.users[u][a].to_complex()))
    }
}

fn path_phase_step(spacing_wavelengths: f64, angle_rad: f64) -> f64 {
    -2.0 * PI * spacing_wavelengths * angle_rad.sin()
}

pub fn steering_vector_ref(m_antennas: usize, spacing_wavelengths: f64, angle_rad: f64) -> Vec<Complex> {
    let step = path_phase_step(spacing_wavelengths, angle_rad);
    (0..m_antennas).map(|m| Complex::from_polar(1.0, step * m as f64)).collect()
}

/// Phase ramp for one path: a per-strip table `exp(jφt)` for `t < vlmax`
/// computed once on the scalar side, and the strip-to-strip rotation
/// `exp(jφ·vlmax)`.
struct PathRamp {
    table_re: Vec<f64>,
    table_im: Vec<f64>,
    strip_rotation: Complex,
}

impl PathRamp {
    /// Charged as a single scalar op: the model has no vector trig unit and
    /// counts trigonometry once per path.
    fn new(ctx: &mut VectorContext, m_antennas: usize, spacing_wavelengths: f64, angle_rad: f64) -> Self {
        ctx.scalar_op(1);
        let step = path_phase_step(spacing_wavelengths, angle_rad);
        let len = m_antennas.min(ctx.vlmax());
        let (table_re, table_im) = (0..len)
            .map(|t| {
                let z = Complex::from_polar(1.0, step * t as f64);
                (z.re, z.im)
            })
            .unzip();
        Self { table_re, table_im, strip_rotation: Complex::from_polar(1.0, step * ctx.vlmax() as f64) }
    }
}

/// Vectorized over antennas. Per strip: 2 table loads, one complex scale by
/// the strip's base rotation (4 arith), 2 stores; advancing the base rotation
/// costs 4 scalar ops per strip after the first.
pub fn steering_vector_vec(
    ctx: &mut VectorContext,
    m_antennas: usize,
    spacing_wavelengths: f64,
    angle_rad: f64,
) -> Result<Vec<Complex>, KernelError> {
    let ramp = PathRamp::new(ctx, m_antennas, spacing_wavelengths, angle_rad);
    let (mut re, mut im) = (vec![0.0; m_antennas], vec![0.0; m_antennas]);
    let mut base = Complex::new(1.0, 0.0);
    strip_mine(ctx, m_antennas, |ctx, off, vl| {
        if off > 0 {
            ctx.scalar_op(4);
            base *= ramp.strip_rotation;
        }
        charge_mem(ctx, MemKind::LoadUnit, vl, 2)?;
        cmul_scalar(
            ctx,
            base,
            &ramp.table_re[..vl],
            &ramp.table_im[..vl],
            &mut re[off..off + vl],
            &mut im[off..off + vl],
        )?;
        charge_mem(ctx, MemKind::StoreUnit, vl, 2)
    })?;
    Ok(re.into_iter().zip(im).map(|(r, i)| Complex::new(r, i)).collect())
}

/// Row `u` is `Σ_p g_{u,p} · a(θ_{u,p})ᵀ`.
pub fn build_steered_channel_ref(cfg: &SteeringArrayConfig) -> Result<ComplexMatrix, KernelError> {
    cfg.validate()?;
    let m = cfg.num_antennas;
    let mut data = Vec::with_capacity(cfg.users.len() * m);
    for user in &cfg.users {
        let mut row = vec![Complex::new(0.0, 0.0); m];
        for path in &user.paths {
            for (h, a) in row.iter_mut().zip(steering_vector_ref(m, cfg.spacing_wavelengths, path.angle_rad)) {
                *h += path.gain * a;
            }
        }
        data.extend(row);
    }
    Ok(ComplexMatrix::from_vec(cfg.users.len(), m, data)?)
}

/// Vectorized over antennas. For each user and strip, every path's steering
/// strip is generated as in [`steering_vector_vec`] and folded into the row
/// accumulator with a complex scalar multiply(-accumulate) by the path gain.
pub fn build_steered_channel_vec(
    ctx: &mut VectorContext,
    cfg: &SteeringArrayConfig,
) -> Result<ComplexMatrix, KernelError> {
    cfg.validate()?;
    Ok(steered_channel_split(ctx, cfg)?.to_matrix()?)
}

fn steered_channel_split(ctx: &mut VectorContext, cfg: &SteeringArrayConfig) -> Result<SplitMatrix, KernelError> {
    let m = cfg.num_antennas;
    let mut out = SplitMatrix::zeros(cfg.users.len(), m);
    let vlmax = ctx.vlmax();
    let (mut a_re, mut a_im) = (vec![0.0; vlmax], vec![0.0; vlmax]);
    for (u, user) in cfg.users.iter().enumerate() {
        let ramps: Vec<PathRamp> =
            user.paths.iter().map(|p| PathRamp::new(ctx, m, cfg.spacing_wavelengths, p.angle_rad)).collect();
        let mut bases = vec![Complex::new(1.0, 0.0); ramps.len()];
        let row_re = &mut out.re[u * m..(u + 1) * m];
        let row_im = &mut out.im[u * m..(u + 1) * m];
        strip_mine(ctx, m, |ctx, off, vl| {
            for (p, (ramp, path)) in ramps.iter().zip(&user.paths).enumerate() {
                if off > 0 {
                    ctx.scalar_op(4);
                    bases[p] *= ramp.strip_rotation;
                }
                charge_mem(ctx, MemKind::LoadUnit, vl, 2)?;
                cmul_scalar(
                    ctx,
                    bases[p],
                    &ramp.table_re[..vl],
                    &ramp.table_im[..vl],
                    &mut a_re[..vl],
                    &mut a_im[..vl],
                )?;
                let (acc_re, acc_im) = (&mut row_re[off..off + vl], &mut row_im[off..off + vl]);
                if p == 0 {
                    cmul_scalar(ctx, path.gain, &a_re[..vl], &a_im[..vl], acc_re, acc_im)?;
                } else {
                    cmacc_scalar(ctx, path.gain, &a_re[..vl], &a_im[..vl], acc_re, acc_im)?;
                }
            }
            charge_mem(ctx, MemKind::StoreUnit, vl, 2)
        })?;
    }
    Ok(out)
}

/// Zero-forcing weights split into per-antenna amplitude and phase.
pub fn beam_weights_ref(h: &ComplexMatrix) -> Result<BeamWeights, KernelError> {
    let w = zf_precoder_ref(h)?;
    let users =
        (0..w.cols()).map(|u| (0..w.rows()).map(|a| AntennaWeight::from_complex(w[(a, u)])).collect()).collect();
    Ok(BeamWeights { users })
}

/// Vectorized ZF followed by a per-user pass over the precoder column:
/// 2 strided loads, `|w|²` (mul + macc), square root (charged as one mul),
/// 2 unit stores. The phase has no vector instruction and is charged as one
/// scalar op per element.
pub fn beam_weights_vec(ctx: &mut VectorContext, h: &ComplexMatrix) -> Result<BeamWeights, KernelError> {
    check_users(h)?;
    let w = zf_split(ctx, &SplitMatrix::from_matrix(h))?;
    weights_from_split(ctx, &w)
}

fn weights_from_split(ctx: &mut VectorContext, w: &SplitMatrix) -> Result<BeamWeights, KernelError> {
    let (m, nu) = (w.rows, w.cols);
    let mut users = Vec::with_capacity(nu);
    for u in 0..nu {
        let mut weights = Vec::with_capacity(m);
        strip_mine(ctx, m, |ctx, off, vl| {
            charge_mem(ctx, MemKind::LoadStrided, vl, 2)?;
            ctx.vec_arith(ArithKind::Mul, vl)?;
            ctx.vec_arith(ArithKind::Macc, vl)?;
            ctx.vec_arith(ArithKind::Mul, vl)?;
            ctx.scalar_op(vl as u64);
            for a in off..off + vl {
                let (re, im) = (w.re[a * nu + u], w.im[a * nu + u]);
                weights.push(AntennaWeight {
                    amplitude: (re * re + im * im).sqrt(),
                    phase_rad: principal_phase(im.atan2(re)),
                });
            }
            charge_mem(ctx, MemKind::StoreUnit, vl, 2)
        })?;
        users.push(weights);
    }
    Ok(BeamWeights { users })
}
