//! Experiment runner for the `lvs-core` location verification simulator:
//! the configuration format, a parallel trial executor, named scenarios and
//! their CSV and manifest outputs.

pub mod config;
pub mod output;
pub mod runner;
pub mod scenarios;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context as _;

use config::ConfigLayers;
use output::{write_outputs, RunManifest};
use runner::Runner;

/// Everything a `run` invocation needs, after argument parsing.
#[derive(Debug, Clone, Default)]
pub struct RunRequest {
    pub scenario: String,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub threads: Option<usize>,
    pub rho_factor: Option<f64>,
    pub out_dir: PathBuf,
}

/// Paths of the files a successful run wrote.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Merges defaults, the config file, overrides and flags, in that order.
pub fn resolve_layers(req: &RunRequest) -> anyhow::Result<ConfigLayers> {
    let info = scenarios::find(&req.scenario)
        .with_context(|| format!("unknown scenario `{}`; run `lvs list-scenarios`", req.scenario))?;
    let mut layers = scenarios::default_layers(info);
    if let Some(path) = &req.config_path {
        layers.overlay(ConfigLayers::from_file(path)?);
    }
    for o in &req.overrides {
        layers.set(o)?;
    }
    if let Some(seed) = req.seed {
        let seed = i64::try_from(seed).context("--seed must fit in a signed 64-bit TOML integer")?;
        layers.set_value("sim", "seed", toml::Value::Integer(seed))?;
    }
    if let Some(trials) = req.trials {
        layers.set_value("sim", "trials", toml::Value::Integer(trials as i64))?;
    }
    Ok(layers)
}

pub fn run(req: &RunRequest) -> anyhow::Result<RunArtifacts> {
    let start = Instant::now();
    let layers = resolve_layers(req)?;
    let settings = scenarios::settings_for(&req.scenario, &layers)?;
    if req.threads == Some(0) {
        anyhow::bail!("invalid value for `--threads`: must be at least 1");
    }
    let runner = Runner::new(req.threads)?;
    let out = scenarios::run(&req.scenario, &settings, &runner, req.rho_factor)?;
    let manifest = RunManifest {
        scenario: req.scenario.clone(),
        version: output::version_string(),
        seed: settings.experiment.seed,
        trials: out.trials,
        threads: runner.threads(),
        config: serde_json::to_value(layers.table())?,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
        summary: out.summary,
        notes: out.notes,
    };
    let (csv, manifest) = write_outputs(Path::new(&req.out_dir), &req.scenario, &out.table, manifest)
        .with_context(|| format!("writing outputs to {}", req.out_dir.display()))?;
    Ok(RunArtifacts { csv, manifest })
}
