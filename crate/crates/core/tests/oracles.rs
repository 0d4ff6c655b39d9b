//! Kernels against independently written oracles.

use std::f64::consts::{FRAC_PI_2, PI};

use lowphy_core::kernels::*;
use lowphy_core::linalg::*;
use lowphy_core::vector_machine::{preset_configs, VectorConfig, VectorContext};
use lowphy_core::workload::{random_matrix, random_pilot, random_vector, rng_for};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn naive_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = c(0.0, 0.0);
        for t in 0..a.cols() {
            acc += a[(i, t)] * b[(t, j)];
        }
        acc
    })
}

fn dft(x: &[Complex]) -> Vec<Complex> {
    let n = x.len() as f64;
    (0..x.len())
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| v * Complex::from_polar(1.0, -2.0 * PI * (k as f64) * (t as f64) / n))
                .sum()
        })
        .collect()
}

fn rel(a: &[Complex], b: &[Complex]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let s: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (d / s).sqrt()
}

/// Solves `x·A = b` for each row `b` of `rhs` by Gaussian elimination on `Aᵀ`.
fn solve_rows(a: &ComplexMatrix, rhs: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut out = Vec::new();
    for r in 0..rhs.rows() {
        let mut m: Vec<Vec<Complex>> =
            (0..n).map(|i| (0..n).map(|j| a[(j, i)]).chain([rhs[(r, i)]]).collect()).collect();
        for col in 0..n {
            let p = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm())).unwrap();
            m.swap(col, p);
            for row in 0..n {
                if row != col {
                    let f = m[row][col] / m[col][col];
                    let pivot_row = m[col].clone();
                    for (dst, src) in m[row].iter_mut().zip(&pivot_row) {
                        *dst -= f * src;
                    }
                }
            }
        }
        out.extend((0..n).map(|i| m[i][n] / m[i][i]));
    }
    ComplexMatrix::from_vec(rhs.rows(), n, out).unwrap()
}

#[test]
fn mat_mul_matches_triple_loop() {
    for (r, k, cols) in [(1, 1, 1), (3, 5, 2), (16, 16, 16), (7, 33, 9)] {
        let a = random_matrix(&mut rng_for(3, KernelId::Lse, r * k), r, k);
        let b = random_matrix(&mut rng_for(4, KernelId::Lse, k * cols), k, cols);
        let want = naive_mul(&a, &b);
        assert!(relative_error(&mat_mul(&a, &b).unwrap(), &want).unwrap() < 1e-14);
        for cfg in preset_configs() {
            let got = mat_mul_vec(&mut VectorContext::new(cfg).unwrap(), &a, &b).unwrap();
            assert!(relative_error(&got, &want).unwrap() < 1e-14);
        }
    }
}

#[test]
fn inverse_is_two_sided() {
    for n in [1, 2, 5, 16, 32] {
        let a = random_pilot(&mut rng_for(9, KernelId::Zf, n), n).x;
        let inv = mat_inverse(&a).unwrap();
        let id = ComplexMatrix::identity(n);
        assert!(frobenius_norm(&mat_sub(&naive_mul(&a, &inv), &id).unwrap()) < 1e-12);
        assert!(frobenius_norm(&mat_sub(&naive_mul(&inv, &a), &id).unwrap()) < 1e-12);
        let vec_inv = mat_inverse_vec(&mut VectorContext::new(VectorConfig::new(1024, 4).unwrap()).unwrap(), &a);
        assert!(relative_error(&vec_inv.unwrap(), &inv).unwrap() < 1e-12);
    }
}

#[test]
fn singular_input_is_reported() {
    let mut rows = vec![vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(2.0, 0.0), c(4.0, 2.0)]];
    assert!(matches!(mat_inverse(&ComplexMatrix::from_rows(&rows).unwrap()), Err(LinalgError::Singular { .. })));
    rows[1][1] = c(4.0, 2.5);
    assert!(mat_inverse(&ComplexMatrix::from_rows(&rows).unwrap()).is_ok());
}

#[test]
fn fft_matches_direct_dft() {
    for n in [4, 16, 64, 256, 1024] {
        let plan = FftPlan::new(n).unwrap();
        let x = random_vector(&mut rng_for(5, KernelId::Fft, n), n);
        let want = dft(&x);
        assert!(rel(&fft_radix4_ref(&plan, &x).unwrap(), &want) < 1e-12, "n={n}");
        let ctx = &mut VectorContext::new(VectorConfig::new(2048, 8).unwrap()).unwrap();
        assert!(rel(&fft_radix4_vec(ctx, &plan, &x).unwrap(), &want) < 1e-12, "n={n}");
    }
}

#[test]
fn ifft_of_single_tone() {
    let n = 64;
    let plan = FftPlan::new(n).unwrap();
    let mut spectrum = vec![c(0.0, 0.0); n];
    spectrum[3] = c(n as f64, 0.0);
    let tone = ifft_radix4_ref(&plan, &spectrum).unwrap();
    let want: Vec<Complex> = (0..n).map(|t| Complex::from_polar(1.0, 2.0 * PI * 3.0 * t as f64 / n as f64)).collect();
    assert!(rel(&tone, &want) < 1e-13);
}

#[test]
fn lse_recovers_planted_channel() {
    for n in [4, 16, 32] {
        let h = random_matrix(&mut rng_for(1, KernelId::Lse, n), n, n);
        let x = random_pilot(&mut rng_for(2, KernelId::Lse, n), n);
        let y = Observation::new(naive_mul(&h, &x.x));
        assert!(relative_error(&lse_estimate_ref(&y, &x).unwrap(), &h).unwrap() < 1e-12);
    }
}

#[test]
fn mmse_matches_row_wise_solve() {
    for (n, sigma2) in [(4, 0.5), (16, 0.1), (32, 0.01)] {
        let x = random_pilot(&mut rng_for(11, KernelId::Mmse, n), n);
        let y = Observation::new(random_matrix(&mut rng_for(12, KernelId::Mmse, n), n, n));
        let stats = ChannelStats::exponential(n, 0.7, sigma2).unwrap();
        // ĥ = y·(XᴴRX + σ²I)⁻¹·XᴴR, row by row
        let xh = hermitian_transpose(&x.x);
        let xh_r = naive_mul(&xh, stats.r_h());
        let a = mat_add(&naive_mul(&xh_r, &x.x), &ComplexMatrix::diag(&vec![c(sigma2, 0.0); n])).unwrap();
        let z = solve_rows(&hermitian_transpose(&a), &hermitian_transpose(&xh_r));
        // z·Aᴴ = (XᴴR)ᴴ  ⇒  zᴴ = A⁻¹·XᴴR
        let want = naive_mul(&y.y, &hermitian_transpose(&z));
        let got = mmse_estimate_ref(&y, &x, &stats).unwrap();
        assert!(relative_error(&got, &want).unwrap() < 1e-10, "n={n}");
        let ctx = &mut VectorContext::new(VectorConfig::new(512, 2).unwrap()).unwrap();
        assert!(relative_error(&mmse_estimate_vec(ctx, &y, &x, &stats).unwrap(), &want).unwrap() < 1e-10);
    }
}

#[test]
fn zf_cancels_interference() {
    for (users, antennas) in [(1, 4), (4, 16), (16, 16), (8, 32)] {
        let h = random_matrix(&mut rng_for(21, KernelId::Zf, users * antennas), users, antennas);
        let w = zf_precoder_ref(&h).unwrap();
        assert_eq!(w.shape(), (antennas, users));
        let resid = mat_sub(&naive_mul(&h, &w), &ComplexMatrix::identity(users)).unwrap();
        assert!(frobenius_norm(&resid) < 1e-10);
    }
    let tall = random_matrix(&mut rng_for(1, KernelId::Zf, 1), 5, 4);
    assert!(zf_precoder_ref(&tall).is_err());
}

#[test]
fn steering_matches_direct_formula() {
    let ctx = &mut VectorContext::new(VectorConfig::new(512, 4).unwrap()).unwrap();
    for (m, d, theta) in [(1, 0.5, 0.3), (7, 0.5, -0.9), (64, 0.37, 1.2), (33, 1.0, FRAC_PI_2)] {
        let want: Vec<Complex> =
            (0..m).map(|k| Complex::from_polar(1.0, -2.0 * PI * d * k as f64 * f64::sin(theta))).collect();
        assert!(rel(&steering_vector_ref(m, d, theta), &want) < 1e-12);
        assert!(rel(&steering_vector_vec(ctx, m, d, theta).unwrap(), &want) < 1e-12);
    }
}

#[test]
fn steered_channel_is_path_sum() {
    let users = vec![
        UserPaths { paths: vec![PathComponent { angle_rad: 0.2, gain: c(1.0, -0.5) }] },
        UserPaths {
            paths: vec![
                PathComponent { angle_rad: -0.7, gain: c(0.3, 0.4) },
                PathComponent { angle_rad: 1.1, gain: c(-0.8, 0.1) },
            ],
        },
    ];
    let cfg = SteeringArrayConfig::new(12, 0.5, users.clone()).unwrap();
    let want = ComplexMatrix::from_fn(2, 12, |u, m| {
        users[u].paths.iter().map(|p| p.gain * Complex::from_polar(1.0, -PI * m as f64 * p.angle_rad.sin())).sum()
    });
    assert!(relative_error(&build_steered_channel_ref(&cfg).unwrap(), &want).unwrap() < 1e-13);
    let ctx = &mut VectorContext::new(VectorConfig::new(1024, 16).unwrap()).unwrap();
    assert!(relative_error(&build_steered_channel_vec(ctx, &cfg).unwrap(), &want).unwrap() < 1e-13);
}

#[test]
fn broadside_single_user_weights() {
    let m = 8;
    let h = ComplexMatrix::from_vec(1, m, steering_vector_ref(m, 0.5, 0.0)).unwrap();
    for w in &beam_weights_ref(&h).unwrap().users[0] {
        assert!((w.amplitude - 1.0 / m as f64).abs() < 1e-12);
        assert!(w.phase_rad.abs() < 1e-12);
    }
}

#[test]
fn steering_config_validation() {
    let one = || vec![UserPaths { paths: vec![PathComponent { angle_rad: 0.0, gain: c(1.0, 0.0) }] }];
    assert!(SteeringArrayConfig::new(0, 0.5, one()).is_err());
    assert!(SteeringArrayConfig::new(4, 0.0, one()).is_err());
    assert!(SteeringArrayConfig::new(4, 0.5, vec![]).is_err());
    assert!(SteeringArrayConfig::new(4, 0.5, vec![UserPaths { paths: vec![] }]).is_err());
    let wide = vec![UserPaths { paths: vec![PathComponent { angle_rad: 2.0, gain: c(1.0, 0.0) }] }];
    assert!(SteeringArrayConfig::new(4, 0.5, wide).is_err());
}
