use std::io::Write;

use thiserror::Error;

use super::config::{LossSpec, OutputFormat, ScenarioConfig, Task};
use super::output::Table;
use crate::emission::{evolve, InitialState};
use crate::emitter::EmitterModel;
use crate::parallel::Execution;
use crate::photonic::{Channel, Direction, LossModel, WaveguideEnv};
use crate::scattering::{polarization_sweep, ScatterInput, ScatterOptions, SingularityMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown preset `{0}` (known: paradox-emission, isotropic-scan, ixi-scan, two-level)")]
    UnknownPreset(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::UnknownPreset(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }

    fn from_lib(err: crate::Error, context: &str) -> Self {
        let msg = format!("{context}: {err}");
        if err.is_numerical() {
            RunError::Numerical(msg)
        } else {
            RunError::Config(msg)
        }
    }
}

/// Command-line adjustments applied on top of a loaded config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Replaces every loss level with one isotropic rate.
    pub loss: Option<f64>,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
    pub dark_state_projection: bool,
    /// Sweep points, or output times for emission scenarios.
    pub steps: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ScenarioConfig) -> Result<(), RunError> {
        if let Some(rate) = self.loss {
            config.loss = vec![LossSpec::Isotropic(rate)];
        }
        if let Some(out) = &self.out {
            config.output.path = Some(out.clone());
        }
        if let Some(format) = self.format {
            config.output.format = format;
        }
        if self.dark_state_projection {
            config.dark_state_projection = true;
        }
        if let Some(steps) = self.steps {
            match &mut config.sweep {
                Some(sweep) => sweep.steps = steps,
                None => config.integrator.output_points = steps,
            }
        }
        config.validate()
    }
}

/// Table plus the per-point failures that left `NaN` rows in it.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

fn sweep_columns(n_ground: usize) -> Vec<String> {
    let mut cols = vec!["theta".to_string()];
    if n_ground == 1 {
        cols.extend(["re_t", "im_t", "re_r", "im_r"].map(String::from));
    } else {
        for dir in ["f", "b"] {
            for k in 1..=n_ground {
                cols.push(format!("re_{dir}_g{k}"));
                cols.push(format!("im_{dir}_g{k}"));
            }
        }
    }
    cols.push("p_loss".into());
    cols
}

fn emission_columns(n_excited: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n_excited).map(|x| format!("pop_e{x}")));
    cols.extend(["p_forward", "p_backward", "p_loss", "trace"].map(String::from));
    cols
}

#[allow(clippy::too_many_arguments)]
fn sweep_rows(
    model: &EmitterModel,
    env: &WaveguideEnv,
    loss: &LossModel,
    input: &ScatterInput,
    thetas: &[f64],
    options: ScatterOptions,
    execution: Execution,
    out: &mut RunOutput,
    label: &str,
) -> Result<Vec<Vec<f64>>, RunError> {
    let width = sweep_columns(model.n_ground()).len();
    let points = polarization_sweep(model, env, loss, input, thetas, options, execution)
        .map_err(|e| RunError::from_lib(e, label))?;
    let mut rows = Vec::with_capacity(points.len());
    for point in points {
        let mut row = vec![point.theta];
        match point.result {
            Ok(res) => {
                for dir in Direction::BOTH {
                    for a in res.amplitudes(dir) {
                        row.push(a.re);
                        row.push(a.im);
                    }
                }
                row.push(res.p_loss());
                if res.projected_dark_states() > 0 {
                    out.warnings.push(format!(
                        "{label}theta = {}: projected out {} dark state(s)",
                        point.theta,
                        res.projected_dark_states()
                    ));
                } else if res.is_ill_conditioned() {
                    out.warnings.push(format!(
                        "{label}theta = {}: ill-conditioned response matrix (condition {:.3e})",
                        point.theta,
                        res.condition_number()
                    ));
                }
            }
            Err(err) => {
                out.failures.push(format!("{label}theta = {}: {err}", point.theta));
                row.resize(width, f64::NAN);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Runs a validated config. Sweep points run with `execution`; the output
/// does not depend on it.
pub fn execute(config: &ScenarioConfig, execution: Execution) -> Result<RunOutput, RunError> {
    let task = config.task()?;
    let model = config.emitter_model()?;
    let env = config.env()?;
    let losses = config.loss_models()?;
    let multi = losses.len() > 1;

    let mut columns = match &task {
        Task::Sweep { .. } => sweep_columns(model.n_ground()),
        Task::Emission { .. } => emission_columns(model.n_excited()),
    };
    if multi {
        columns.insert(0, "loss".into());
    }
    let mut out = RunOutput {
        table: Table {
            scenario: config.scenario.name().to_string(),
            columns,
            rows: Vec::new(),
        },
        failures: Vec::new(),
        warnings: Vec::new(),
    };

    for (loss, spec) in losses.iter().zip(config.loss.iter().map(Some).chain(std::iter::repeat(None))) {
        let level = spec.map_or(0.0, LossSpec::label);
        let label = if multi { format!("loss = {level}: ") } else { String::new() };
        let mut rows = match &task {
            Task::Sweep { input, thetas } => {
                let options = ScatterOptions {
                    singularity: if config.dark_state_projection {
                        SingularityMode::DarkStateProjection
                    } else {
                        SingularityMode::Strict
                    },
                    ..ScatterOptions::default()
                };
                sweep_rows(&model, &env, loss, input, thetas, options, execution, &mut out, &label)?
            }
            Task::Emission { initial } => emission_rows(&model, &env, loss, initial, config, &mut out, &label)?,
        };
        if multi {
            for row in &mut rows {
                row.insert(0, level);
            }
        }
        out.table.rows.extend(rows);
    }
    Ok(out)
}

fn emission_rows(
    model: &EmitterModel,
    env: &WaveguideEnv,
    loss: &LossModel,
    initial: &InitialState,
    config: &ScenarioConfig,
    out: &mut RunOutput,
    label: &str,
) -> Result<Vec<Vec<f64>>, RunError> {
    let traj = evolve(model, env, loss, initial, &config.integrator.to_options())
        .map_err(|e| RunError::from_lib(e, &format!("{}emission", label)))?;
    if !traj.is_converged() {
        out.warnings.push(format!(
            "{label}excited population {:.3e} remains at t = {}",
            traj.final_totals.residual_excited,
            traj.times.last().copied().unwrap_or(0.0)
        ));
    }
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            let mut row = vec![t];
            row.extend((0..model.n_excited()).map(|x| s.excited_population(x)));
            row.extend(Channel::ALL.map(|c| s.channel_probability(c)));
            row.push(s.total_trace());
            row
        })
        .collect())
}

fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    }
}

/// Loads `target` (a preset name or config path), applies `overrides`,
/// runs it and writes the table. Diagnostics go to `stderr`. Returns the
/// process exit code.
pub fn run(target: &str, overrides: &Overrides, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match run_inner(target, overrides, stdout, stderr) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}

fn run_inner(
    target: &str,
    overrides: &Overrides,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, RunError> {
    let mut config = ScenarioConfig::load(target)?;
    overrides.apply(&mut config)?;
    let result = execute(&config, Execution::Auto)?;
    for w in &result.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let text = render(&result.table, config.output.format);
    match &config.output.path {
        Some(path) => std::fs::write(path, text).map_err(|e| RunError::Config(format!("cannot write {path}: {e}")))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| RunError::Config(format!("cannot write output: {e}")))?,
    }
    if result.failures.is_empty() {
        return Ok(0);
    }
    for f in &result.failures {
        let _ = writeln!(stderr, "error: {f}");
    }
    Err(RunError::Numerical(format!("{} point(s) failed", result.failures.len())))
}
