//! Sectioned TOML configuration with dotted-key overrides.
//!
//! Layers merge in order: scenario defaults, the config file, `--set`
//! overrides, then dedicated CLI flags. Every key lives in one of the
//! sections `geometry`, `channel`, `priors`, `threat`, `rule` and `sim`.

use std::path::Path;

use lvs_core::adversary::rho_star;
use lvs_core::simulator::{default_threshold_grid, ExperimentConfig, GeometrySpec, ThreatSpec};
use lvs_core::{
    ChannelParams, IntegrationSpec, NetworkGeometry, ObjectiveKind, Point2D, PriorParams, StatisticKind, ThreatModel,
};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

pub const SECTIONS: [&str; 6] = ["geometry", "channel", "priors", "threat", "rule", "sim"];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {reason}")]
    Read { path: String, reason: String },
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("override `{0}` must have the form section.key=value")]
    MalformedOverride(String),
    #[error("unknown config section `{0}`")]
    UnknownSection(String),
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_owned(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub count: Option<usize>,
    pub side_m: Option<f64>,
    /// Explicit `[x, y]` base-station coordinates; overrides `count`.
    pub stations: Option<Vec<[f64; 2]>>,
    pub claimed: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(rename = "sigma_dB")]
    pub sigma_db: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(rename = "ref_power_dB")]
    pub ref_power_db: Option<f64>,
    pub ref_distance_m: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorsSection {
    pub p0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreatSection {
    /// `ffa`, `circle` or `annulus`.
    pub model: Option<String>,
    pub radius_m: Option<f64>,
    pub inner_m: Option<f64>,
    pub outer_m: Option<f64>,
    /// Ring radius over the largest claim-to-station distance.
    pub rho: Option<f64>,
    /// `rho` in units of ρ*.
    pub rho_factor: Option<f64>,
    pub outer_over_inner: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSection {
    pub kinds: Option<Vec<String>>,
    /// `nmi`, `pe` or `bayes`.
    pub objective: Option<String>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub samples_per_bs: Option<usize>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_points: Option<usize>,
    /// `polar` or `monte_carlo`.
    pub integration: Option<String>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub mc_nodes: Option<usize>,
    pub geometry_repeats: Option<usize>,
    pub roc_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub priors: PriorsSection,
    #[serde(default)]
    pub threat: ThreatSection,
    #[serde(default)]
    pub rule: RuleSection,
    #[serde(default)]
    pub sim: SimSection,
}

/// Merged configuration tree, kept as TOML so it can be echoed verbatim.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayers {
    table: Table,
}

fn merge(into: &mut Table, from: Table) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(Value::Table(a)), Value::Table(b)) => merge(a, b),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

fn check_sections(table: &Table) -> Result<()> {
    for (k, v) in table {
        if !SECTIONS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownSection(k.clone()));
        }
        if !v.is_table() {
            return Err(ConfigError::Schema(format!("`{k}` must be a section")));
        }
    }
    Ok(())
}

/// Parses the right-hand side of an override as a TOML value, falling back
/// to a bare string.
fn parse_value(text: &str) -> Value {
    match format!("v = {text}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key was just parsed"),
        Err(_) => Value::String(text.to_owned()),
    }
}

impl ConfigLayers {
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        check_sections(&table)?;
        Ok(Self { table })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    /// Layers `other` on top of `self`.
    pub fn overlay(&mut self, other: ConfigLayers) {
        merge(&mut self.table, other.table);
    }

    /// Applies one `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedOverride(assignment.to_owned()))?;
        let (section, field) = key
            .trim()
            .split_once('.')
            .ok_or_else(|| ConfigError::MalformedOverride(assignment.to_owned()))?;
        if field.is_empty() || field.contains('.') {
            return Err(ConfigError::MalformedOverride(assignment.to_owned()));
        }
        self.set_value(section, field, parse_value(value.trim()))
    }

    pub fn set_value(&mut self, section: &str, field: &str, value: Value) -> Result<()> {
        if !SECTIONS.contains(&section) {
            return Err(ConfigError::UnknownSection(section.to_owned()));
        }
        let entry = self
            .table
            .entry(section.to_owned())
            .or_insert_with(|| Value::Table(Table::new()));
        entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::Schema(format!("`{section}` must be a section")))?
            .insert(field.to_owned(), value);
        Ok(())
    }

    pub fn contains(&self, section: &str, field: &str) -> bool {
        self.table
            .get(section)
            .and_then(Value::as_table)
            .is_some_and(|t| t.contains_key(field))
    }

    pub fn require(&self, keys: &[&str]) -> Result<()> {
        for key in keys {
            let (section, field) = key.split_once('.').expect("required keys are dotted");
            if !self.contains(section, field) {
                return Err(ConfigError::MissingKey((*key).to_owned()));
            }
        }
        Ok(())
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn parse(&self) -> Result<ConfigFile> {
        Value::Table(self.table.clone())
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Schema(e.message().to_owned()))
    }
}

/// Values every scenario starts from.
pub const BASE_DEFAULTS: &str = r#"
[geometry]
count = 10
side_m = 200.0
claimed = [0.0, 0.0]

[channel]
gamma = 3.0
ref_power_dB = 0.0
ref_distance_m = 1.0

[priors]
p0 = 0.9

[threat]
model = "ffa"

[rule]
kinds = ["lrt_exact"]
objective = "nmi"

[sim]
trials = 10000
seed = 42
samples_per_bs = 1
grid_min = -25.0
grid_max = 25.0
grid_points = 201
integration = "polar"
radial_nodes = 128
angular_nodes = 256
mc_nodes = 20000
geometry_repeats = 1
roc_points = 101
"#;

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite, got {v}")))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be at least {min}, got {v}")))
    }
}

fn get<T: Copy>(key: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| ConfigError::MissingKey(key.to_owned()))
}

/// Fully validated settings for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    pub objective: ObjectiveKind,
    pub roc_points: usize,
}

impl ConfigFile {
    pub fn channel(&self) -> Result<ChannelParams> {
        let c = &self.channel;
        let sigma = positive("channel.sigma_dB", get("channel.sigma_dB", c.sigma_db)?)?;
        let gamma = positive("channel.gamma", get("channel.gamma", c.gamma)?)?;
        let p0 = finite("channel.ref_power_dB", c.ref_power_db.unwrap_or(0.0))?;
        let d0 = positive("channel.ref_distance_m", c.ref_distance_m.unwrap_or(1.0))?;
        ChannelParams::with_reference(p0, d0, gamma, sigma).map_err(|e| invalid("channel", e.to_string()))
    }

    pub fn priors(&self) -> Result<PriorParams> {
        let p0 = get("priors.p0", self.priors.p0)?;
        PriorParams::new(p0).map_err(|_| invalid("priors.p0", format!("must lie strictly between 0 and 1, got {p0}")))
    }

    pub fn geometry(&self) -> Result<GeometrySpec> {
        let g = &self.geometry;
        let claimed = g.claimed.unwrap_or([0.0, 0.0]);
        if !claimed.iter().all(|v| v.is_finite()) {
            return Err(invalid("geometry.claimed", "coordinates must be finite"));
        }
        if let Some(stations) = &g.stations {
            let range = lvs_core::simulator::STATION_RANGE;
            if !range.contains(&stations.len()) {
                return Err(invalid(
                    "geometry.stations",
                    format!("needs between {} and {} stations, got {}", range.start(), range.end(), stations.len()),
                ));
            }
            let pts = stations.iter().map(|[u, v]| Point2D::new(*u, *v)).collect();
            let geom = NetworkGeometry::new(pts, Point2D::new(claimed[0], claimed[1]))
                .map_err(|e| invalid("geometry.stations", e.to_string()))?;
            return Ok(GeometrySpec::Explicit(geom));
        }
        if claimed != [0.0, 0.0] {
            return Err(invalid("geometry.claimed", "random geometries are centered on the origin"));
        }
        let count = get("geometry.count", g.count)?;
        let range = lvs_core::simulator::STATION_RANGE;
        if !range.contains(&count) {
            return Err(invalid(
                "geometry.count",
                format!("must be between {} and {}, got {count}", range.start(), range.end()),
            ));
        }
        let side_m = positive("geometry.side_m", get("geometry.side_m", g.side_m)?)?;
        Ok(GeometrySpec::RandomSquare { count, side_m })
    }

    /// Threat model; `rho_factor` is converted with ρ* of `channel`.
    pub fn threat(&self, channel: &ChannelParams) -> Result<ThreatSpec> {
        let t = &self.threat;
        let model = t.model.as_deref().ok_or_else(|| ConfigError::MissingKey("threat.model".into()))?;
        let rho = || -> Result<Option<f64>> {
            match (t.rho, t.rho_factor) {
                (Some(_), Some(_)) => Err(invalid("threat.rho", "set either rho or rho_factor, not both")),
                (Some(r), None) => Ok(Some(positive("threat.rho", r)?)),
                (None, Some(f)) => Ok(Some(positive("threat.rho_factor", f)? * rho_star(channel))),
                (None, None) => Ok(None),
            }
        };
        match model {
            "ffa" => Ok(ThreatSpec::Model(ThreatModel::Ffa)),
            "circle" => match (t.radius_m, rho()?) {
                (Some(_), Some(_)) => Err(invalid("threat.radius_m", "set either radius_m or rho, not both")),
                (Some(r), None) => Ok(ThreatSpec::Model(ThreatModel::CircleUda {
                    radius_m: positive("threat.radius_m", r)?,
                })),
                (None, Some(rho)) => Ok(ThreatSpec::CircleRho { rho }),
                (None, None) => Err(ConfigError::MissingKey("threat.radius_m".into())),
            },
            "annulus" => match (t.inner_m, t.outer_m, rho()?) {
                (Some(r1), Some(r2), None) => {
                    let r1 = positive("threat.inner_m", r1)?;
                    let r2 = positive("threat.outer_m", r2)?;
                    if r2 < r1 {
                        return Err(invalid("threat.outer_m", "must not be smaller than threat.inner_m"));
                    }
                    Ok(ThreatSpec::Model(ThreatModel::AnnulusMd {
                        inner_m: r1,
                        outer_m: r2,
                    }))
                }
                (None, None, Some(rho)) => {
                    let ratio = get("threat.outer_over_inner", t.outer_over_inner)?;
                    if !(ratio >= 1.0 && ratio.is_finite()) {
                        return Err(invalid("threat.outer_over_inner", format!("must be at least 1, got {ratio}")));
                    }
                    Ok(ThreatSpec::AnnulusRho {
                        rho,
                        outer_over_inner: ratio,
                    })
                }
                (None, _, None) => Err(ConfigError::MissingKey("threat.inner_m".into())),
                (Some(_), None, None) => Err(ConfigError::MissingKey("threat.outer_m".into())),
                _ => Err(invalid("threat.rho", "set either inner_m/outer_m or rho, not both")),
            },
            other => Err(invalid(
                "threat.model",
                format!("unknown model `{other}`; expected ffa, circle or annulus"),
            )),
        }
    }

    pub fn rules(&self) -> Result<Vec<StatisticKind>> {
        let names = self
            .rule
            .kinds
            .as_ref()
            .ok_or_else(|| ConfigError::MissingKey("rule.kinds".into()))?;
        if names.is_empty() {
            return Err(invalid("rule.kinds", "at least one rule is required"));
        }
        let mut kinds = Vec::with_capacity(names.len());
        for name in names {
            let kind = StatisticKind::from_name(name).ok_or_else(|| {
                let known: Vec<&str> = StatisticKind::ALL.iter().map(|k| k.name()).collect();
                invalid("rule.kinds", format!("unknown rule `{name}`; expected one of {}", known.join(", ")))
            })?;
            if kinds.contains(&kind) {
                return Err(invalid("rule.kinds", format!("rule `{name}` listed twice")));
            }
            kinds.push(kind);
        }
        Ok(kinds)
    }

    pub fn objective(&self) -> Result<ObjectiveKind> {
        let objective = match self.rule.objective.as_deref().unwrap_or("nmi") {
            "nmi" => ObjectiveKind::Nmi,
            "pe" => ObjectiveKind::MisclassificationPe,
            "bayes" => ObjectiveKind::BayesCost {
                c0: get("rule.c0", self.rule.c0)?,
                c1: get("rule.c1", self.rule.c1)?,
            },
            other => {
                return Err(invalid(
                    "rule.objective",
                    format!("unknown objective `{other}`; expected nmi, pe or bayes"),
                ))
            }
        };
        objective.validate().map_err(|e| invalid("rule.c0", e.to_string()))?;
        Ok(objective)
    }

    pub fn threshold_grid(&self) -> Result<Vec<f64>> {
        let s = &self.sim;
        let (lo, hi, n) = match (s.grid_min, s.grid_max, s.grid_points) {
            (None, None, None) => return Ok(default_threshold_grid()),
            (lo, hi, n) => (
                finite("sim.grid_min", get("sim.grid_min", lo)?)?,
                finite("sim.grid_max", get("sim.grid_max", hi)?)?,
                at_least("sim.grid_points", get("sim.grid_points", n)?, 2)?,
            ),
        };
        if hi <= lo {
            return Err(invalid("sim.grid_max", "must exceed sim.grid_min"));
        }
        Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }

    pub fn integration(&self, seed: u64) -> Result<IntegrationSpec> {
        let s = &self.sim;
        let min = lvs_core::likelihood::MIN_NODES;
        match s.integration.as_deref().unwrap_or("polar") {
            "polar" => Ok(IntegrationSpec::polar(
                at_least("sim.radial_nodes", s.radial_nodes.unwrap_or(128), 1)?,
                at_least("sim.angular_nodes", s.angular_nodes.unwrap_or(256), min)?,
            )),
            "monte_carlo" => Ok(IntegrationSpec::monte_carlo(
                at_least("sim.mc_nodes", s.mc_nodes.unwrap_or(20_000), min)?,
                lvs_core::simulator::derive_seed(seed, lvs_core::simulator::StreamTag::Quadrature, 0),
            )),
            other => Err(invalid(
                "sim.integration",
                format!("unknown method `{other}`; expected polar or monte_carlo"),
            )),
        }
    }

    pub fn settings(&self) -> Result<Settings> {
        let channel = self.channel()?;
        let geometry = self.geometry()?;
        let threat = self.threat(&channel)?;
        let rules = self.rules()?;
        let s = &self.sim;
        let seed = get("sim.seed", s.seed)?;
        let mut experiment = ExperimentConfig::new(geometry, channel, threat, rules);
        experiment.priors = self.priors()?;
        experiment.seed = seed;
        experiment.trials = at_least(
            "sim.trials",
            get("sim.trials", s.trials)?,
            lvs_core::simulator::MIN_TRIALS,
        )?;
        experiment.cols = at_least("sim.samples_per_bs", s.samples_per_bs.unwrap_or(1), 1)?;
        experiment.geometry_repeats = at_least("sim.geometry_repeats", s.geometry_repeats.unwrap_or(1), 1)?;
        experiment.threshold_grid = self.threshold_grid()?;
        experiment.integration = self.integration(seed)?;
        experiment
            .validate()
            .map_err(|e| ConfigError::Schema(e.to_string()))?;
        Ok(Settings {
            experiment,
            objective: self.objective()?,
            roc_points: at_least("sim.roc_points", s.roc_points.unwrap_or(101), 2)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ConfigLayers {
        let mut c = ConfigLayers::from_toml(BASE_DEFAULTS).unwrap();
        c.set("channel.sigma_dB=5").unwrap();
        c
    }

    #[test]
    fn defaults_resolve() {
        let s = base().parse().unwrap().settings().unwrap();
        let e = &s.experiment;
        assert_eq!(e.trials, 10_000);
        assert_eq!(e.seed, 42);
        assert_eq!(e.channel.shadowing_sigma_db, 5.0);
        assert_eq!(e.threshold_grid, default_threshold_grid());
        assert_eq!(e.rules, vec![StatisticKind::LrtExact]);
        assert_eq!(s.objective, ObjectiveKind::Nmi);
    }

    #[test]
    fn overrides_parse_typed_values() {
        let mut c = base();
        c.set("sim.trials = 2000").unwrap();
        c.set("rule.kinds=[\"lrt_ffa\", \"ffa_linear\"]").unwrap();
        c.set("threat.model=circle").unwrap();
        c.set("threat.rho_factor=0.5").unwrap();
        let s = c.parse().unwrap().settings().unwrap();
        assert_eq!(s.experiment.trials, 2000);
        assert_eq!(s.experiment.rules, vec![StatisticKind::LrtFfa, StatisticKind::FfaLinear]);
        match s.experiment.threat {
            ThreatSpec::CircleRho { rho } => assert!((rho - 0.5 * 5.2753).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn later_layers_win() {
        let mut c = base();
        c.overlay(ConfigLayers::from_toml("[sim]\ntrials = 3000\n").unwrap());
        c.set("sim.trials=4000").unwrap();
        assert_eq!(c.parse().unwrap().sim.trials, Some(4000));
        assert_eq!(c.parse().unwrap().sim.seed, Some(42));
    }

    #[test]
    fn missing_sigma_is_named() {
        let c = ConfigLayers::from_toml(BASE_DEFAULTS).unwrap();
        let err = c.parse().unwrap().settings().unwrap_err();
        assert_eq!(err, ConfigError::MissingKey("channel.sigma_dB".into()));
        assert!(err.to_string().contains("channel.sigma_dB"));
    }

    #[test]
    fn range_errors_name_the_key() {
        for (set, key) in [
            ("channel.sigma_dB=-1", "channel.sigma_dB"),
            ("channel.gamma=0", "channel.gamma"),
            ("priors.p0=1.5", "priors.p0"),
            ("geometry.count=3", "geometry.count"),
            ("geometry.count=65", "geometry.count"),
            ("sim.trials=10", "sim.trials"),
            ("sim.grid_points=1", "sim.grid_points"),
            ("rule.kinds=[\"bogus\"]", "rule.kinds"),
            ("threat.model=square", "threat.model"),
        ] {
            let mut c = base();
            c.set(set).unwrap();
            let err = c.parse().unwrap().settings().unwrap_err();
            assert!(err.to_string().contains(key), "{set}: {err}");
        }
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        let mut c = base();
        assert_eq!(c.set("bogus.x=1"), Err(ConfigError::UnknownSection("bogus".into())));
        assert!(c.set("no_dot=1").is_err());
        assert!(c.set("channel.sigma").is_err());
        c.set("channel.sigma=5").unwrap();
        let err = c.parse().unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
        assert!(ConfigLayers::from_toml("[extra]\na = 1\n").is_err());
    }

    #[test]
    fn explicit_stations() {
        let mut c = base();
        c.set("geometry.stations=[[100.0, 0.0], [0.0, 100.0], [-100.0, 0.0], [0.0, -120.0]]")
            .unwrap();
        let s = c.parse().unwrap().settings().unwrap();
        assert_eq!(s.experiment.geometry.station_count(), 4);
    }

    #[test]
    fn annulus_forms() {
        let mut c = base();
        c.set("threat.model=annulus").unwrap();
        c.set("rule.kinds=[\"lrt_exact\", \"lrt_laplace\"]").unwrap();
        let err = c.parse().unwrap().settings().unwrap_err();
        assert_eq!(err, ConfigError::MissingKey("threat.inner_m".into()));
        c.set("threat.inner_m=100").unwrap();
        c.set("threat.outer_m=50").unwrap();
        assert!(c.parse().unwrap().settings().unwrap_err().to_string().contains("threat.outer_m"));
        c.set("threat.outer_m=500").unwrap();
        assert!(c.parse().unwrap().settings().is_ok());
    }
}
