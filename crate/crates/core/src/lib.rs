//! Single-photon scattering and spontaneous emission of non-cascaded
//! multi-level emitters coupled to a single-mode waveguide with arbitrary
//! local polarization.
//!
//! Simple units are used by default: `a = ω = ε₀ = ħ = 1`, `v_g = 0.1`.

pub mod emission;
pub mod emitter;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod parallel;
pub mod photonic;
pub mod scattering;
pub mod scenario;
pub mod vector;

pub use emission::{
    directional_totals, evolve, outcome_distance, EmissionOptions, EmissionTrajectory, EmitterDensityMatrix,
    InitialState,
};
pub use emitter::{EmitterModel, ExcitedSuperposition};
pub use error::{Error, Result};
pub use parallel::Execution;
pub use photonic::{Channel, CouplingBundle, Direction, GreensDecomposition, LossModel, WaveguideEnv};
pub use scattering::{
    polarization_sweep, scatter, scatter_with, two_level_closed_form, ScatterInput, ScatterOptions,
    ScatteringResult,
};
pub use vector::{PolarizationVector, Tensor3};
