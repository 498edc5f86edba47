//! Scenario configs, built-in presets and the `run` driver behind the CLI.

mod config;
mod output;
mod presets;
mod run;

pub use config::{
    ComplexPair, DirectionSpec, EmissionSpec, EmitterSpec, InputSpec, IntegratorSpec, LossSpec, OutputFormat,
    OutputSpec, ScenarioConfig, ScenarioKind, SweepParameter, SweepSpec, Vec3, WaveguideSpec,
};
pub use output::Table;
pub use presets::{preset, PRESET_NAMES};
pub use run::{execute, run, Overrides, RunError, RunOutput};
