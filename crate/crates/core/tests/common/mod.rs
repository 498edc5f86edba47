#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wgqed::{EmitterModel, LossModel, PolarizationVector, Tensor3, WaveguideEnv};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn vector(rng: &mut ChaCha8Rng, scale: f64) -> PolarizationVector {
    PolarizationVector([complex(rng, scale), complex(rng, scale), complex(rng, scale)])
}

/// Random field and unit system.
pub fn env(rng: &mut ChaCha8Rng) -> WaveguideEnv {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    WaveguideEnv {
        e_forward: vector(rng, 1.0),
        periodicity: rng.random_range(0.5..2.0),
        group_velocity: sign * rng.random_range(0.05..0.5),
        omega: rng.random_range(0.5..2.0),
        epsilon0: rng.random_range(0.5..2.0),
        hbar: rng.random_range(0.5..2.0),
    }
}

/// `G = H + iP` with `H` Hermitian and `P` positive semidefinite.
pub fn passive_loss(rng: &mut ChaCha8Rng, scale: f64) -> LossModel {
    let a = DMatrix::from_fn(3, 3, |_, _| complex(rng, scale));
    let p = &a * a.adjoint();
    let h0 = DMatrix::from_fn(3, 3, |_, _| complex(rng, scale));
    let h = (&h0 + h0.adjoint()) * c(0.5, 0.0);
    let g = h + p * c(0.0, 1.0);
    LossModel::from_tensor(Tensor3(std::array::from_fn(|i| std::array::from_fn(|j| g[(i, j)])))).unwrap()
}

pub fn model(rng: &mut ChaCha8Rng, n_ground: usize, n_excited: usize, spread: f64) -> EmitterModel {
    let ground = (0..n_ground).map(|_| rng.random_range(-spread..spread)).collect();
    let excited = (0..n_excited).map(|_| 1.0 + rng.random_range(-spread..spread)).collect();
    let dipoles = (0..n_ground)
        .map(|_| (0..n_excited).map(|_| vector(rng, 1.0)).collect())
        .collect();
    EmitterModel::new(ground, excited, dipoles).unwrap()
}

/// Model whose excited levels all sit at the same energy.
pub fn degenerate_model(rng: &mut ChaCha8Rng, n_ground: usize, n_excited: usize) -> EmitterModel {
    let ground = (0..n_ground).map(|_| rng.random_range(-0.2..0.2)).collect();
    let dipoles = (0..n_ground)
        .map(|_| (0..n_excited).map(|_| vector(rng, 1.0)).collect())
        .collect();
    EmitterModel::new(ground, vec![1.0; n_excited], dipoles).unwrap()
}

/// Haar-like unitary from the QR factorization of a random complex matrix.
pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| complex(rng, 1.0));
    m.qr().q()
}

pub fn unit_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| complex(rng, 1.0)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Two-level scattering in rate form, `t = 1 − s(E_f*·d)(d*·E_f) / (κ/2 + iΔ'/ħ)`
/// with `s = aω/(2|v_g|ε₀ħ)`, built from raw contractions.
pub struct RateOracle {
    pub t: Complex64,
    pub r: Complex64,
    pub kappa_forward: f64,
    pub kappa_backward: f64,
    pub kappa_loss: f64,
}

pub fn rate_oracle(d: &PolarizationVector, env: &WaveguideEnv, g_loss: &Tensor3, detuning: f64) -> RateOracle {
    let dot = |a: &[Complex64; 3], b: &[Complex64; 3]| -> Complex64 { (0..3).map(|i| a[i] * b[i]).sum() };
    let ef = env.e_forward.0;
    let eb: [Complex64; 3] = ef.map(|x| x.conj());
    let dc: [Complex64; 3] = d.0.map(|x| x.conj());
    let emit_f = dot(&ef.map(|x| x.conj()), &d.0);
    let emit_b = dot(&eb.map(|x| x.conj()), &d.0);
    let absorb = dot(&dc, &ef);
    let s = env.periodicity * env.omega / (2.0 * env.group_velocity.abs() * env.epsilon0 * env.hbar);
    let mut sandwich = c(0.0, 0.0);
    for (i, row) in g_loss.0.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            sandwich += dc[i] * g * d.0[j];
        }
    }
    let kappa_loss = 2.0 * sandwich.im / (env.epsilon0 * env.hbar);
    let shift = -sandwich.re / env.epsilon0;
    let kappa_forward = s * emit_f.norm_sqr();
    let kappa_backward = s * emit_b.norm_sqr();
    let kappa = kappa_forward + kappa_backward + kappa_loss;
    let denom = c(kappa / 2.0, (detuning - shift) / env.hbar);
    RateOracle {
        t: c(1.0, 0.0) - s * emit_f * absorb / denom,
        r: -s * emit_b * absorb / denom,
        kappa_forward,
        kappa_backward,
        kappa_loss,
    }
}
