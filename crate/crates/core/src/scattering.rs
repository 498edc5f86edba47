//! Long-time single-photon scattering amplitudes.
//!
//! For an emitter starting in `|g_r⟩` with one photon in the input mode, the
//! amplitude of ending in `|1_m, g_k⟩` is
//!
//! ```text
//! γ_{m,k} = δ_{m,k; in,r} − Σ_xy (E_m*·d_{kx}) R⁻¹_{xy} (d*_{ry}·E_in)
//! ```
//!
//! with the response matrix `R = X̄ᵀ + L̄ᵀ/z + iε₀Δ̄/z`, which equals
//! `N(Γ̄ᵀ − Δ̄)`. Both forms are available through [`ResponseForm`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::emitter::EmitterModel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::parallel::{self, Execution};
use crate::photonic::{CouplingBundle, Direction, LossModel, WaveguideEnv};
use crate::vector::PolarizationVector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coupling eigenvalues below this mark a dark excited state.
pub const DARK_COUPLING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterInput {
    pub direction: Direction,
    pub ground_index: usize,
    /// Input photon angular frequency `ω_f`.
    pub photon_frequency: f64,
}

impl ScatterInput {
    pub fn forward(ground_index: usize, photon_frequency: f64) -> Self {
        Self {
            direction: Direction::Forward,
            ground_index,
            photon_frequency,
        }
    }

    /// `E_int = E_{g_r} + ħω_f`.
    pub fn interaction_energy(&self, model: &EmitterModel, hbar: f64) -> Result<f64> {
        model.check_ground_index(self.ground_index)?;
        Ok(model.ground_energies()[self.ground_index] + hbar * self.photon_frequency)
    }
}

/// How an exactly singular response matrix is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularityMode {
    /// Report [`Error::SingularResponseMatrix`].
    #[default]
    Strict,
    /// Drop excited states that couple to no channel and solve in the
    /// remaining subspace.
    DarkStateProjection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseForm {
    /// `X̄ᵀ + L̄ᵀ/z + iε₀Δ̄/z`.
    #[default]
    Transfer,
    /// `N(Γ̄ᵀ − Δ̄)`.
    Green,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScatterOptions {
    pub singularity: SingularityMode,
    pub form: ResponseForm,
}

impl ScatterOptions {
    pub fn dark_state_projection() -> Self {
        Self {
            singularity: SingularityMode::DarkStateProjection,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    input: ScatterInput,
    /// `[mode][ground]`.
    amplitudes: [Vec<Complex64>; 2],
    p_loss: f64,
    output_frequencies: Vec<f64>,
    condition_number: f64,
    projected_dark_states: usize,
}

impl ScatteringResult {
    pub fn input(&self) -> &ScatterInput {
        &self.input
    }

    /// `γ_{mode,k}`.
    pub fn amplitude(&self, mode: Direction, ground: usize) -> Complex64 {
        self.amplitudes[mode.index()][ground]
    }

    pub fn amplitudes(&self, mode: Direction) -> &[Complex64] {
        &self.amplitudes[mode.index()]
    }

    /// Amplitude to continue in the input direction with the ground state unchanged.
    pub fn transmission(&self) -> Complex64 {
        self.amplitude(self.input.direction, self.input.ground_index)
    }

    /// Amplitude to turn around with the ground state unchanged.
    pub fn reflection(&self) -> Complex64 {
        self.amplitude(self.input.direction.opposite(), self.input.ground_index)
    }

    /// Probability the photon leaves through non-waveguide channels.
    pub fn p_loss(&self) -> f64 {
        self.p_loss
    }

    /// `Σ_{m,k} |γ_{m,k}|²`.
    pub fn waveguide_probability(&self) -> f64 {
        self.amplitudes.iter().flatten().map(|g| g.norm_sqr()).sum()
    }

    /// Output photon frequency for each final ground state,
    /// `ω_k = ω_f + (E_{g_r} − E_{g_k})/ħ`.
    pub fn output_frequencies(&self) -> &[f64] {
        &self.output_frequencies
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.condition_number > linalg::ILL_CONDITIONED
    }

    /// Number of dark excited states removed in projection mode.
    pub fn projected_dark_states(&self) -> usize {
        self.projected_dark_states
    }

    pub fn n_ground(&self) -> usize {
        self.amplitudes[0].len()
    }

    /// Largest elementwise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .zip(other.amplitudes.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn scatter(
    model: &EmitterModel,
    env: &WaveguideEnv,
    loss: &LossModel,
    input: &ScatterInput,
) -> Result<ScatteringResult> {
    scatter_with(model, env, loss, input, ScatterOptions::default())
}

pub fn scatter_with(
    model: &EmitterModel,
    env: &WaveguideEnv,
    loss: &LossModel,
    input: &ScatterInput,
    options: ScatterOptions,
) -> Result<ScatteringResult> {
    env.validate()?;
    if !input.photon_frequency.is_finite() {
        return Err(Error::NonFiniteEntry("photon frequency".into()));
    }
    let e_int = input.interaction_energy(model, env.hbar)?;
    let bundle = CouplingBundle::new(model, env, loss, e_int)?;
    let response = match options.form {
        ResponseForm::Transfer => bundle.response_matrix(),
        ResponseForm::Green => bundle.green_form_matrix(),
    };

    let ne = model.n_excited();
    let ng = model.n_ground();
    let r = input.ground_index;
    let e_in = env.field(input.direction);
    let absorption = DVector::from_fn(ne, |x, _| model.dipole(r, x).conj().dot(&e_in));

    let (solution, condition_number, projected_dark_states) = match linalg::solve(&response, &absorption) {
        Ok((s, cond)) => (s, cond, 0),
        Err(err @ Error::SingularResponseMatrix { .. }) => match options.singularity {
            SingularityMode::Strict => return Err(err),
            SingularityMode::DarkStateProjection => {
                project_out_dark_states(&bundle.coupling_matrix(), &response, &absorption)?
            }
        },
        Err(other) => return Err(other),
    };

    let amplitudes = Direction::BOTH.map(|mode| {
        let e_out = env.field(mode).conj();
        (0..ng)
            .map(|k| {
                let delta = if mode == input.direction && k == r { ONE } else { ZERO };
                let emitted: Complex64 = (0..ne).map(|x| e_out.dot(model.dipole(k, x)) * solution[x]).sum();
                delta - emitted
            })
            .collect::<Vec<_>>()
    });
    let waveguide: f64 = amplitudes.iter().flatten().map(|g| g.norm_sqr()).sum();
    let e_r = model.ground_energies()[r];
    let output_frequencies = model
        .ground_energies()
        .iter()
        .map(|e_k| input.photon_frequency + (e_r - e_k) / env.hbar)
        .collect();

    Ok(ScatteringResult {
        input: *input,
        amplitudes,
        p_loss: 1.0 - waveguide,
        output_frequencies,
        condition_number,
        projected_dark_states,
    })
}

/// Solves in the span of excited states whose coupling eigenvalue exceeds
/// [`DARK_COUPLING`].
fn project_out_dark_states(
    coupling: &DMatrix<Complex64>,
    response: &DMatrix<Complex64>,
    absorption: &DVector<Complex64>,
) -> Result<(DVector<Complex64>, f64, usize)> {
    let (values, vectors) = linalg::hermitian_eigen(coupling);
    let bright: Vec<usize> = (0..values.len()).filter(|&k| values[k] >= DARK_COUPLING).collect();
    let dark = values.len() - bright.len();
    let n = response.nrows();
    if bright.is_empty() {
        return Ok((DVector::zeros(n), 1.0, dark));
    }
    let q = DMatrix::from_fn(n, bright.len(), |i, j| vectors[(i, bright[j])]);
    let reduced = q.adjoint() * response * &q;
    let rhs = q.adjoint() * absorption;
    let (s, cond) = linalg::solve(&reduced, &rhs)?;
    Ok((q * s, cond, dark))
}

/// Per-channel population decay rates of a two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    pub forward: f64,
    pub backward: f64,
    pub loss: f64,
}

impl ChannelRates {
    pub fn total(&self) -> f64 {
        self.forward + self.backward + self.loss
    }

    /// Fraction of emission that enters the waveguide.
    pub fn beta(&self) -> f64 {
        (self.forward + self.backward) / self.total()
    }
}

/// Closed-form two-level result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAmplitudes {
    pub transmission: Complex64,
    pub reflection: Complex64,
    pub p_loss: f64,
    pub rates: ChannelRates,
    /// Real energy shift induced by the loss tensor.
    pub loss_shift: f64,
}

/// Rates of a two-level dipole: `κ_μ = a ω |E_μ*·d|² / (2|v_g| ε₀ ħ)` per
/// waveguide direction and `2 Im(d*·G_loss·d) / (ε₀ ħ)` into loss.
pub fn two_level_rates(d: &PolarizationVector, env: &WaveguideEnv, loss: &LossModel) -> ChannelRates {
    let scale = env.periodicity * env.omega / (2.0 * env.group_velocity.abs() * env.epsilon0 * env.hbar);
    let loss_sandwich = loss.tensor().sandwich(&d.conj(), d);
    ChannelRates {
        forward: scale * env.e_forward.conj().dot(d).norm_sqr(),
        backward: scale * env.e_backward().conj().dot(d).norm_sqr(),
        loss: 2.0 * loss_sandwich.im / (env.epsilon0 * env.hbar),
    }
}

/// Two-level scattering in scalar form, for a forward input photon:
///
/// ```text
/// γ_m = δ_{m,f} − (E_m*·d)(d*·E_f) / ((ε₀/z)(ħκ/2 + i(Δ − δ_loss)))
/// ```
///
/// with `κ` the total decay rate, `δ_loss` the loss-induced shift and
/// `detuning = Δ = E_e − E_g − ħω_f`.
pub fn two_level_closed_form(
    d: &PolarizationVector,
    env: &WaveguideEnv,
    loss: &LossModel,
    detuning: f64,
) -> Result<TwoLevelAmplitudes> {
    env.validate()?;
    if !d.is_finite() || !detuning.is_finite() {
        return Err(Error::NonFiniteEntry("two-level input".into()));
    }
    let rates = two_level_rates(d, env, loss);
    let loss_shift = -loss.tensor().sandwich(&d.conj(), d).re / env.epsilon0;
    let z = env.dos_factor();
    let denominator = Complex64::new(env.hbar * rates.total() / 2.0, detuning - loss_shift) * (env.epsilon0 / z);
    if denominator.norm() == 0.0 {
        return Err(Error::SingularDenominator);
    }
    let ef = env.e_forward;
    let absorption = d.conj().dot(&ef);
    let transmission = ONE - ef.conj().dot(d) * absorption / denominator;
    let reflection = -env.e_backward().conj().dot(d) * absorption / denominator;
    Ok(TwoLevelAmplitudes {
        transmission,
        reflection,
        p_loss: 1.0 - transmission.norm_sqr() - reflection.norm_sqr(),
        rates,
        loss_shift,
    })
}

/// One point of a polarization sweep. Failed points keep their error.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub theta: f64,
    pub result: Result<ScatteringResult>,
}

/// Scatters with `E_f = (cos θ, i sin θ, 0)` for each `θ` in `thetas`,
/// keeping every other environment parameter from `env_template`. Points are
/// returned in ascending `θ`.
pub fn polarization_sweep(
    model: &EmitterModel,
    env_template: &WaveguideEnv,
    loss: &LossModel,
    input: &ScatterInput,
    thetas: &[f64],
    options: ScatterOptions,
    execution: Execution,
) -> Result<Vec<SweepPoint>> {
    if let Some(&bad) = thetas
        .iter()
        .find(|t| !(t.is_finite() && **t >= 0.0 && **t <= std::f64::consts::PI))
    {
        return Err(Error::InvalidParameter(format!("theta {bad} outside [0, π]")));
    }
    model.validate()?;
    let mut sorted = thetas.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(parallel::map(&sorted, execution, |&theta| {
        let env = WaveguideEnv {
            e_forward: PolarizationVector::elliptical(theta),
            ..*env_template
        };
        SweepPoint {
            theta,
            result: scatter_with(model, &env, loss, input, options),
        }
    }))
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![start],
        _ => (0..steps)
            .map(|k| {
                if k == steps - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}
