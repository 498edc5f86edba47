use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::{
    from_vector, ComplexPair, DirectionSpec, EmissionSpec, EmitterSpec, InputSpec, IntegratorSpec, LossSpec,
    OutputSpec, ScenarioConfig, ScenarioKind, SweepParameter, SweepSpec, WaveguideSpec,
};
use super::run::RunError;
use crate::photonic::WaveguideEnv;
use crate::vector::PolarizationVector;

pub const PRESET_NAMES: [&str; 4] = ["paradox-emission", "isotropic-scan", "ixi-scan", "two-level"];

const SCAN_STEPS: usize = 401;

fn pair(re: f64, im: f64) -> ComplexPair {
    ComplexPair(re, im)
}

/// Two exciteds sharing one ground, dipoles `x̂` and `ŷ`.
fn v_system() -> EmitterSpec {
    EmitterSpec {
        ground_energies: vec![0.0],
        excited_energies: vec![1.0, 1.0],
        dipoles: vec![vec![
            from_vector(&PolarizationVector::real(1.0, 0.0, 0.0)),
            from_vector(&PolarizationVector::real(0.0, 1.0, 0.0)),
        ]],
    }
}

fn ixi_system() -> EmitterSpec {
    let x = from_vector(&PolarizationVector::real(1.0, 0.0, 0.0));
    let iy = from_vector(&PolarizationVector::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 0.0),
    ));
    EmitterSpec {
        ground_energies: vec![0.0, 0.0],
        excited_energies: vec![1.0, 1.0],
        dipoles: vec![vec![x, iy], vec![iy, x]],
    }
}

fn theta_sweep() -> SweepSpec {
    SweepSpec {
        parameter: SweepParameter::Theta,
        start: 0.0,
        stop: PI,
        steps: SCAN_STEPS,
    }
}

fn resonant_forward() -> InputSpec {
    InputSpec {
        direction: DirectionSpec::Forward,
        ground_index: 0,
        photon_frequency: 1.0,
    }
}

fn base(kind: ScenarioKind, emitter: EmitterSpec) -> ScenarioConfig {
    ScenarioConfig {
        scenario: kind,
        emitter: Some(emitter),
        waveguide: WaveguideSpec::default(),
        loss: Vec::new(),
        input: None,
        sweep: None,
        emission: None,
        integrator: IntegratorSpec::default(),
        output: OutputSpec::default(),
        dark_state_projection: false,
    }
}

/// Built-in scenario in simple units (`a = ω = ε₀ = ħ = 1`, `v_g = 0.1`).
pub fn preset(name: &str) -> Result<ScenarioConfig, RunError> {
    let kind = ScenarioKind::from_name(name)
        .filter(|k| *k != ScenarioKind::Custom)
        .ok_or_else(|| RunError::UnknownPreset(name.to_string()))?;
    let s5 = 5f64.sqrt();
    let config = match kind {
        ScenarioKind::ParadoxEmission => ScenarioConfig {
            waveguide: WaveguideSpec::from_env(&WaveguideEnv::with_field(PolarizationVector::planar(
                Complex64::new(2.0 / s5, 0.0),
                Complex64::new(0.0, 1.0 / s5),
            ))),
            emission: Some(EmissionSpec {
                initial: vec![pair(0.0, 1.0), pair(2.0, 0.0)],
            }),
            ..base(kind, v_system())
        },
        ScenarioKind::IsotropicScan => ScenarioConfig {
            loss: vec![LossSpec::Isotropic(0.2), LossSpec::Isotropic(0.003)],
            input: Some(resonant_forward()),
            sweep: Some(theta_sweep()),
            ..base(kind, v_system())
        },
        ScenarioKind::IxiScan => ScenarioConfig {
            loss: vec![LossSpec::Isotropic(0.2)],
            input: Some(resonant_forward()),
            sweep: Some(theta_sweep()),
            ..base(kind, ixi_system())
        },
        ScenarioKind::TwoLevel => ScenarioConfig {
            emission: Some(EmissionSpec {
                initial: vec![pair(1.0, 0.0)],
            }),
            ..base(
                kind,
                EmitterSpec {
                    ground_energies: vec![0.0],
                    excited_energies: vec![1.0],
                    dipoles: vec![vec![from_vector(&PolarizationVector::real(1.0, 0.0, 0.0))]],
                },
            )
        },
        ScenarioKind::Custom => unreachable!(),
    };
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ixi_first_dipole_is_x() {
        let c = preset("ixi-scan").unwrap();
        assert_eq!(c.emitter.unwrap().dipoles[0][0], [pair(1.0, 0.0), pair(0.0, 0.0), pair(0.0, 0.0)]);
    }

    #[test]
    fn paradox_is_lossless() {
        assert!(preset("paradox-emission").unwrap().loss.is_empty());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("nonsense"), Err(RunError::UnknownPreset(_))));
        assert!(matches!(preset("custom"), Err(RunError::UnknownPreset(_))));
    }

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            preset(name).unwrap().validate().unwrap();
        }
    }
}
