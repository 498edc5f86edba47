//! Spontaneous emission from the excited manifold.
//!
//! The excited block evolves as
//!
//! ```text
//! dρ_e/dt = (i/ħ)(Γ̄ᵀ ρ_e − ρ_e Γ̄*) − (i/ħ)[H₀, ρ_e]
//! ```
//!
//! and population leaves into ground state `n` with a photon in channel `μ`
//! at rate `Re[−(i/ħ) Σ_xy V̄^μ_{xynn} ρ_xy]`, where `V̄^μ` uses only the
//! `μ` part of the Green's tensor. Only these diagonal, channel-resolved
//! ground probabilities are tracked; ground coherences are not.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::emitter::{EmitterModel, ExcitedSuperposition};
use crate::error::{Error, Result};
use crate::integrator::{self, Tolerances};
use crate::linalg;
use crate::photonic::{Channel, CouplingBundle, LossModel, WaveguideEnv};
use crate::scattering::linspace;

const I: Complex64 = Complex64::new(0.0, 1.0);
const HERMITICITY_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(ExcitedSuperposition),
    /// Excited-manifold density matrix (Hermitian, unit trace).
    Mixed(DMatrix<Complex64>),
}

impl InitialState {
    fn density_matrix(&self) -> DMatrix<Complex64> {
        match self {
            InitialState::Pure(psi) => psi.density_matrix(),
            InitialState::Mixed(rho) => rho.clone(),
        }
    }
}

impl From<ExcitedSuperposition> for InitialState {
    fn from(psi: ExcitedSuperposition) -> Self {
        InitialState::Pure(psi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionOptions {
    /// Defaults to 20 / (smallest nonzero decay rate).
    pub t_max: Option<f64>,
    pub tolerances: Tolerances,
    /// Uniform output grid size from 0 to `t_max`, both included.
    pub output_points: usize,
    /// Explicit output grid; overrides `t_max` and `output_points`.
    pub output_times: Option<Vec<f64>>,
    /// Excited population below which the run counts as fully decayed.
    pub residual_threshold: f64,
}

impl Default for EmissionOptions {
    fn default() -> Self {
        Self {
            t_max: None,
            tolerances: Tolerances::default(),
            output_points: 201,
            output_times: None,
            residual_threshold: 1e-6,
        }
    }
}

/// Emitter state after tracing out the field.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterDensityMatrix {
    pub excited_block: DMatrix<Complex64>,
    /// `[ground n][channel]` probability of having decayed to `n` with the
    /// photon in that channel.
    pub ground_mode_probs: Vec<[f64; 3]>,
}

impl EmitterDensityMatrix {
    pub fn excited_population(&self, x: usize) -> f64 {
        self.excited_block[(x, x)].re
    }

    pub fn excited_trace(&self) -> f64 {
        self.excited_block.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn channel_probability(&self, channel: Channel) -> f64 {
        self.ground_mode_probs.iter().map(|p| p[channel.index()]).sum()
    }

    pub fn ground_population(&self, n: usize) -> f64 {
        self.ground_mode_probs[n].iter().sum()
    }

    pub fn total_trace(&self) -> f64 {
        self.excited_trace() + self.ground_mode_probs.iter().flatten().sum::<f64>()
    }

    /// Max-entry deviation of the excited block from its adjoint.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.excited_block - self.excited_block.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_excited_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigen(&self.excited_block).0.first().copied().unwrap_or(0.0)
    }
}

/// Final photon bookkeeping of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalTotals {
    pub forward: f64,
    pub backward: f64,
    pub loss: f64,
    /// Population still excited at the last time.
    pub residual_excited: f64,
}

#[derive(Debug, Clone)]
pub struct EmissionTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<EmitterDensityMatrix>,
    pub final_totals: DirectionalTotals,
    pub residual_threshold: f64,
}

impl EmissionTrajectory {
    pub fn is_converged(&self) -> bool {
        self.final_totals.residual_excited < self.residual_threshold
    }

    pub fn channel_series(&self, channel: Channel) -> Vec<f64> {
        self.states.iter().map(|s| s.channel_probability(channel)).collect()
    }

    pub fn population_series(&self, x: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.excited_population(x)).collect()
    }
}

/// Precomputed linear generator of the reduced dynamics.
struct Generator {
    ne: usize,
    ng: usize,
    /// `(i/ħ)(Γ̄ᵀ − H_e)`; `dρ_e/dt = A ρ_e + ρ_e A†`.
    a: DMatrix<Complex64>,
    /// `[n][channel]` matrices `K_xy = −(i/ħ) V̄^μ_{xynn}`.
    feed: Vec<[DMatrix<Complex64>; 3]>,
}

impl Generator {
    fn new(model: &EmitterModel, bundle: &CouplingBundle, hbar: f64) -> Self {
        let ne = model.n_excited();
        let ng = model.n_ground();
        let mut shifted = bundle.excited_gamma();
        for (x, e) in model.excited_energies().iter().enumerate() {
            shifted[(x, x)] -= Complex64::new(*e, 0.0);
        }
        let a = shifted * (I / hbar);
        let feed = (0..ng)
            .map(|n| {
                Channel::ALL.map(|ch| {
                    let v = bundle.v_channel(ch);
                    DMatrix::from_fn(ne, ne, |x, y| -I / hbar * v.get(x, y, n, n))
                })
            })
            .collect();
        Self { ne, ng, a, feed }
    }

    fn state_len(&self) -> usize {
        2 * self.ne * self.ne + 3 * self.ng
    }

    fn unpack_excited(&self, y: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.ne, self.ne, |x, z| {
            let k = 2 * (x * self.ne + z);
            Complex64::new(y[k], y[k + 1])
        })
    }

    fn pack(&self, state: &EmitterDensityMatrix) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.state_len());
        for x in 0..self.ne {
            for z in 0..self.ne {
                let c = state.excited_block[(x, z)];
                y.push(c.re);
                y.push(c.im);
            }
        }
        for p in &state.ground_mode_probs {
            y.extend_from_slice(p);
        }
        y
    }

    fn unpack(&self, y: &[f64]) -> EmitterDensityMatrix {
        let base = 2 * self.ne * self.ne;
        EmitterDensityMatrix {
            excited_block: self.unpack_excited(y),
            ground_mode_probs: (0..self.ng)
                .map(|n| std::array::from_fn(|c| y[base + 3 * n + c]))
                .collect(),
        }
    }

    fn channel_rates(&self, rho: &DMatrix<Complex64>) -> Vec<[f64; 3]> {
        self.feed
            .iter()
            .map(|per_channel| {
                per_channel.each_ref().map(|k| {
                    k.iter()
                        .zip(rho.iter())
                        .map(|(kxy, rxy)| kxy * rxy)
                        .sum::<Complex64>()
                        .re
                })
            })
            .collect()
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let rho = self.unpack_excited(y);
        let a_rho = &self.a * &rho;
        let d_rho = &a_rho + a_rho.adjoint();
        for x in 0..self.ne {
            for z in 0..self.ne {
                let k = 2 * (x * self.ne + z);
                dy[k] = d_rho[(x, z)].re;
                dy[k + 1] = d_rho[(x, z)].im;
            }
        }
        let base = 2 * self.ne * self.ne;
        for (n, rates) in self.channel_rates(&rho).iter().enumerate() {
            dy[base + 3 * n..base + 3 * n + 3].copy_from_slice(rates);
        }
    }
}

fn validate_initial(model: &EmitterModel, initial: &InitialState) -> Result<DMatrix<Complex64>> {
    let ne = model.n_excited();
    let rho = initial.density_matrix();
    if rho.nrows() != ne || rho.ncols() != ne {
        return Err(Error::DimensionMismatch(format!(
            "initial state is {}×{} but the emitter has {ne} excited states",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if rho.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFiniteEntry("initial state".into()));
    }
    let trace: f64 = rho.diagonal().iter().map(|c| c.re).sum();
    if (trace - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidParameter(format!("initial state has trace {trace}, expected 1")));
    }
    let herm = (&rho - rho.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if herm > HERMITICITY_TOL {
        return Err(Error::InvalidParameter("initial density matrix is not Hermitian".into()));
    }
    Ok(rho)
}

fn bundle_for(model: &EmitterModel, env: &WaveguideEnv, loss: &LossModel, rho: &DMatrix<Complex64>) -> Result<CouplingBundle> {
    // Δ̄ plays no role in emission; anchor it at the mean initial excited energy.
    let e_int: f64 = model
        .excited_energies()
        .iter()
        .enumerate()
        .map(|(x, e)| e * rho[(x, x)].re)
        .sum();
    CouplingBundle::new(model, env, loss, e_int)
}

/// Default horizon: 20 lifetimes of the slowest decaying excited mode.
pub fn default_t_max(bundle: &CouplingBundle) -> f64 {
    let (rates, _) = linalg::hermitian_eigen(&bundle.decay_rate_operator());
    let fastest = rates.iter().fold(0.0f64, |a, &b| a.max(b));
    let slowest = rates
        .iter()
        .copied()
        .filter(|&r| r > 1e-12 * fastest.max(1.0))
        .fold(f64::INFINITY, f64::min);
    if slowest.is_finite() {
        20.0 / slowest
    } else {
        1.0
    }
}

/// Instantaneous emission rate into each channel, summed over ground states.
pub fn instantaneous_channel_rates(
    model: &EmitterModel,
    env: &WaveguideEnv,
    loss: &LossModel,
    initial: &InitialState,
) -> Result<[f64; 3]> {
    let rho = validate_initial(model, initial)?;
    let bundle = bundle_for(model, env, loss, &rho)?;
    let gen = Generator::new(model, &bundle, env.hbar);
    let per_ground = gen.channel_rates(&rho);
    Ok(std::array::from_fn(|c| per_ground.iter().map(|r| r[c]).sum()))
}

pub fn evolve(
    model: &EmitterModel,
    env: &WaveguideEnv,
    loss: &LossModel,
    initial: &InitialState,
    options: &EmissionOptions,
) -> Result<EmissionTrajectory> {
    env.validate()?;
    let rho0 = validate_initial(model, initial)?;
    let bundle = bundle_for(model, env, loss, &rho0)?;
    let gen = Generator::new(model, &bundle, env.hbar);

    let times = match &options.output_times {
        Some(times) => {
            if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::InvalidParameter("output times must be finite and >= 0".into()));
            }
            let mut grid = times.clone();
            if grid[0] > 0.0 {
                grid.insert(0, 0.0);
            }
            grid
        }
        None => {
            let t_max = options.t_max.unwrap_or_else(|| default_t_max(&bundle));
            if !(t_max.is_finite() && t_max > 0.0) {
                return Err(Error::InvalidParameter(format!("t_max must be > 0, got {t_max}")));
            }
            if options.output_points < 2 {
                return Err(Error::InvalidParameter("need at least 2 output points".into()));
            }
            linspace(0.0, t_max, options.output_points)
        }
    };

    let start = EmitterDensityMatrix {
        excited_block: rho0,
        ground_mode_probs: vec![[0.0; 3]; model.n_ground()],
    };
    let y0 = gen.pack(&start);
    let tol = options.tolerances;
    let drift_limit = (10.0 * tol.rtol).max(1e-12);
    let trace_of = |y: &[f64]| -> f64 {
        let base = 2 * gen.ne * gen.ne;
        let excited: f64 = (0..gen.ne).map(|x| y[2 * (x * gen.ne + x)]).sum();
        excited + y[base..].iter().sum::<f64>()
    };

    let raw = integrator::integrate(
        |_, y, dy| gen.rhs(y, dy),
        &y0,
        &times,
        tol,
        |t, y| {
            let drift = (trace_of(y) - 1.0).abs();
            if !(drift <= drift_limit) {
                return Err(Error::NonPhysicalState {
                    t,
                    reason: format!("trace drift {drift:.3e} exceeds {drift_limit:.1e}"),
                });
            }
            Ok(())
        },
    )?;

    let states: Vec<EmitterDensityMatrix> = raw.iter().map(|y| gen.unpack(y)).collect();
    let last = states.last().expect("grid is nonempty");
    let final_totals = DirectionalTotals {
        forward: last.channel_probability(Channel::Forward),
        backward: last.channel_probability(Channel::Backward),
        loss: last.channel_probability(Channel::Loss),
        residual_excited: last.excited_trace(),
    };
    Ok(EmissionTrajectory {
        times,
        states,
        final_totals,
        residual_threshold: options.residual_threshold,
    })
}

/// `(P_f, P_b, P_loss)` at the end of the trajectory.
pub fn directional_totals(trajectory: &EmissionTrajectory) -> (f64, f64, f64) {
    let t = trajectory.final_totals;
    (t.forward, t.backward, t.loss)
}

/// Total-variation distance between the final outcome distributions
/// (forward, backward, loss, still excited) of two runs.
pub fn outcome_distance(a: &EmissionTrajectory, b: &EmissionTrajectory) -> f64 {
    let pa = a.final_totals;
    let pb = b.final_totals;
    0.5 * ((pa.forward - pb.forward).abs()
        + (pa.backward - pb.backward).abs()
        + (pa.loss - pb.loss).abs()
        + (pa.residual_excited - pb.residual_excited).abs())
}
