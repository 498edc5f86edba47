use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::presets::preset;
use super::run::RunError;
use crate::emission::{EmissionOptions, InitialState};
use crate::emitter::EmitterModel;
use crate::integrator::Tolerances;
use crate::photonic::{Direction, LossModel, WaveguideEnv};
use crate::scattering::{linspace, ScatterInput};
use crate::vector::{PolarizationVector, Tensor3};

/// Complex number written as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair(pub f64, pub f64);

impl From<ComplexPair> for Complex64 {
    fn from(c: ComplexPair) -> Self {
        Complex64::new(c.0, c.1)
    }
}

impl From<Complex64> for ComplexPair {
    fn from(c: Complex64) -> Self {
        ComplexPair(c.re, c.im)
    }
}

pub type Vec3 = [ComplexPair; 3];

fn to_vector(v: &Vec3) -> PolarizationVector {
    PolarizationVector(v.map(Complex64::from))
}

pub(crate) fn from_vector(v: &PolarizationVector) -> Vec3 {
    v.0.map(ComplexPair::from)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    ParadoxEmission,
    IsotropicScan,
    IxiScan,
    TwoLevel,
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ParadoxEmission => "paradox-emission",
            ScenarioKind::IsotropicScan => "isotropic-scan",
            ScenarioKind::IxiScan => "ixi-scan",
            ScenarioKind::TwoLevel => "two-level",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ScenarioKind::ParadoxEmission,
            ScenarioKind::IsotropicScan,
            ScenarioKind::IxiScan,
            ScenarioKind::TwoLevel,
            ScenarioKind::Custom,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Emitter levels and transition dipoles, `dipoles[n][m]` for `g_n ↔ e_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSpec {
    pub ground_energies: Vec<f64>,
    pub excited_energies: Vec<f64>,
    pub dipoles: Vec<Vec<Vec3>>,
}

impl EmitterSpec {
    pub fn from_model(model: &EmitterModel) -> Self {
        Self {
            ground_energies: model.ground_energies().to_vec(),
            excited_energies: model.excited_energies().to_vec(),
            dipoles: model
                .dipoles()
                .iter()
                .map(|row| row.iter().map(from_vector).collect())
                .collect(),
        }
    }

    pub fn to_model(&self) -> crate::Result<EmitterModel> {
        EmitterModel::new(
            self.ground_energies.clone(),
            self.excited_energies.clone(),
            self.dipoles
                .iter()
                .map(|row| row.iter().map(to_vector).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSpec {
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "default_vg")]
    pub v_g: f64,
    #[serde(default = "one")]
    pub omega: f64,
    /// Ignored by θ sweeps, which set the field themselves.
    #[serde(rename = "E_f", default = "default_field")]
    pub e_f: Vec3,
    #[serde(default = "one")]
    pub epsilon0: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

fn default_vg() -> f64 {
    0.1
}

fn default_field() -> Vec3 {
    from_vector(&PolarizationVector::real(1.0, 0.0, 0.0))
}

impl Default for WaveguideSpec {
    fn default() -> Self {
        Self::from_env(&WaveguideEnv::default())
    }
}

impl WaveguideSpec {
    pub fn from_env(env: &WaveguideEnv) -> Self {
        Self {
            a: env.periodicity,
            v_g: env.group_velocity,
            omega: env.omega,
            e_f: from_vector(&env.e_forward),
            epsilon0: env.epsilon0,
            hbar: env.hbar,
        }
    }

    pub fn to_env(&self) -> WaveguideEnv {
        WaveguideEnv {
            e_forward: to_vector(&self.e_f),
            periodicity: self.a,
            group_velocity: self.v_g,
            omega: self.omega,
            epsilon0: self.epsilon0,
            hbar: self.hbar,
        }
    }
}

/// One loss level: an isotropic rate or a full tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    Isotropic(f64),
    Tensor([Vec3; 3]),
}

impl LossSpec {
    pub fn to_model(&self) -> crate::Result<LossModel> {
        match self {
            LossSpec::Isotropic(rate) => LossModel::isotropic(*rate),
            LossSpec::Tensor(rows) => LossModel::from_tensor(Tensor3(rows.map(|r| r.map(Complex64::from)))),
        }
    }

    /// Value written in the `loss` column of multi-level tables.
    pub fn label(&self) -> f64 {
        match self {
            LossSpec::Isotropic(rate) => *rate,
            LossSpec::Tensor(_) => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionSpec {
    Forward,
    Backward,
}

impl From<DirectionSpec> for Direction {
    fn from(d: DirectionSpec) -> Self {
        match d {
            DirectionSpec::Forward => Direction::Forward,
            DirectionSpec::Backward => Direction::Backward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub direction: DirectionSpec,
    /// Zero-based.
    pub ground_index: usize,
    pub photon_frequency: f64,
}

impl InputSpec {
    pub fn to_input(&self) -> ScatterInput {
        ScatterInput {
            direction: self.direction.into(),
            ground_index: self.ground_index,
            photon_frequency: self.photon_frequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionSpec {
    /// Excited-state amplitudes, normalized on load.
    pub initial: Vec<ComplexPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_points")]
    pub output_points: usize,
}

fn default_rtol() -> f64 {
    Tolerances::default().rtol
}

fn default_atol() -> f64 {
    Tolerances::default().atol
}

fn default_points() -> usize {
    EmissionOptions::default().output_points
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            t_max: None,
            rtol: default_rtol(),
            atol: default_atol(),
            output_points: default_points(),
        }
    }
}

impl IntegratorSpec {
    pub fn to_options(&self) -> EmissionOptions {
        EmissionOptions {
            t_max: self.t_max,
            tolerances: Tolerances {
                rtol: self.rtol,
                atol: self.atol,
            },
            output_points: self.output_points,
            ..EmissionOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// A fully resolved scenario. Preset documents are merged with their preset
/// before deserialization, so every field is concrete here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emitter: Option<EmitterSpec>,
    #[serde(default)]
    pub waveguide: WaveguideSpec,
    #[serde(default)]
    pub loss: Vec<LossSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission: Option<EmissionSpec>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub dark_state_projection: bool,
}

/// What a validated config asks for.
pub(crate) enum Task {
    Sweep {
        input: ScatterInput,
        thetas: Vec<f64>,
    },
    Emission {
        initial: InitialState,
    },
}

fn config_error(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ScenarioConfig {
    /// Parses a JSON document. A preset `scenario` fills every field the
    /// document leaves out; a `custom` one must describe its own emitter.
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| config_error(format!("invalid JSON: {e}")))?;
        let obj = raw
            .as_object()
            .ok_or_else(|| config_error("config must be a JSON object"))?;
        let name = obj
            .get("scenario")
            .ok_or_else(|| config_error("missing field `scenario`"))?
            .as_str()
            .ok_or_else(|| config_error("field `scenario` must be a string"))?;
        let kind = ScenarioKind::from_name(name).ok_or_else(|| config_error(format!("unknown scenario `{name}`")))?;

        let config: ScenarioConfig = if kind == ScenarioKind::Custom {
            if !obj.contains_key("emitter") {
                return Err(config_error("custom scenario requires field `emitter`"));
            }
            serde_json::from_value(raw).map_err(|e| config_error(format!("invalid config: {e}")))?
        } else {
            let base_config = preset(name)?;
            let mut base = serde_json::to_value(&base_config).expect("config serializes");
            if let Some(given) = obj.get("emitter") {
                let parsed: EmitterSpec = serde_json::from_value(given.clone())
                    .map_err(|e| config_error(format!("invalid field `emitter`: {e}")))?;
                if Some(&parsed) != base_config.emitter.as_ref() {
                    return Err(config_error(format!(
                        "field `emitter` conflicts with preset `{name}`; use scenario \"custom\" for other emitters"
                    )));
                }
            }
            merge(&mut base, raw);
            serde_json::from_value(base).map_err(|e| config_error(format!("invalid config: {e}")))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Resolves a preset name or a path to a JSON document.
    pub fn load(target: &str) -> Result<Self, RunError> {
        match ScenarioKind::from_name(target) {
            Some(ScenarioKind::Custom) | None => Self::from_path(Path::new(target)),
            Some(_) => preset(target),
        }
    }

    /// Canonical pretty-printed JSON. Parsing it gives back `self`.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), RunError> {
        self.task().map(|_| ())
    }

    pub(crate) fn emitter_model(&self) -> Result<EmitterModel, RunError> {
        let spec = self
            .emitter
            .as_ref()
            .ok_or_else(|| config_error("missing field `emitter`"))?;
        spec.to_model().map_err(|e| config_error(format!("field `emitter`: {e}")))
    }

    pub(crate) fn env(&self) -> Result<WaveguideEnv, RunError> {
        let env = self.waveguide.to_env();
        env.validate().map_err(|e| config_error(format!("field `waveguide`: {e}")))?;
        Ok(env)
    }

    pub(crate) fn loss_models(&self) -> Result<Vec<LossModel>, RunError> {
        if self.loss.is_empty() {
            return Ok(vec![LossModel::none()]);
        }
        self.loss
            .iter()
            .enumerate()
            .map(|(i, l)| l.to_model().map_err(|e| config_error(format!("field `loss[{i}]`: {e}"))))
            .collect()
    }

    pub(crate) fn task(&self) -> Result<Task, RunError> {
        let model = self.emitter_model()?;
        self.env()?;
        self.loss_models()?;
        let ints = &self.integrator;
        if !(ints.rtol > 0.0 && ints.atol > 0.0 && ints.rtol.is_finite() && ints.atol.is_finite()) {
            return Err(config_error("field `integrator`: rtol and atol must be finite and > 0"));
        }
        match (&self.sweep, &self.emission) {
            (Some(sweep), None) => {
                let input = self
                    .input
                    .ok_or_else(|| config_error("sweep scenarios require field `input`"))?;
                if input.ground_index >= model.n_ground() {
                    return Err(config_error(format!(
                        "field `input.ground_index`: {} out of range for {} ground states",
                        input.ground_index,
                        model.n_ground()
                    )));
                }
                if !input.photon_frequency.is_finite() {
                    return Err(config_error("field `input.photon_frequency` must be finite"));
                }
                if sweep.steps < 2 {
                    return Err(config_error(format!("field `sweep.steps` must be >= 2, got {}", sweep.steps)));
                }
                let range = 0.0..=std::f64::consts::PI;
                if !(range.contains(&sweep.start) && range.contains(&sweep.stop) && sweep.start <= sweep.stop) {
                    return Err(config_error("field `sweep`: need 0 <= start <= stop <= π"));
                }
                Ok(Task::Sweep {
                    input: input.to_input(),
                    thetas: sweep.points(),
                })
            }
            (None, Some(emission)) => {
                if emission.initial.len() != model.n_excited() {
                    return Err(config_error(format!(
                        "field `emission.initial`: {} amplitudes for {} excited states",
                        emission.initial.len(),
                        model.n_excited()
                    )));
                }
                let amplitudes: Vec<Complex64> = emission.initial.iter().map(|&c| c.into()).collect();
                let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(config_error("field `emission.initial` must be finite with nonzero norm"));
                }
                if let Some(t) = ints.t_max {
                    if !(t.is_finite() && t > 0.0) {
                        return Err(config_error("field `integrator.t_max` must be finite and > 0"));
                    }
                }
                if ints.output_points < 2 {
                    return Err(config_error("field `integrator.output_points` must be >= 2"));
                }
                let n = amplitudes.len();
                let rho = DMatrix::from_fn(n, n, |x, y| amplitudes[x] * amplitudes[y].conj() / norm);
                Ok(Task::Emission {
                    initial: InitialState::Mixed(rho),
                })
            }
            (Some(_), Some(_)) => Err(config_error("give exactly one of `sweep` and `emission`")),
            (None, None) => Err(config_error("one of `sweep` or `emission` is required")),
        }
    }
}
