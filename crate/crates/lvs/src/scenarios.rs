//! Named experiments, one per figure of the evaluation plus `custom`.
//!
//! Each scenario has a `compute_*` function returning typed results and a
//! renderer producing the CSV table and a JSON summary for the manifest.

use anyhow::{bail, Context as _};
use lvs_core::adversary::rho_star;
use lvs_core::infotheory::{ffa_optimal_threshold, ffa_rates, CurveRow};
use lvs_core::simulator::{
    Experiment, ExperimentConfig, GeometrySpec, LaplaceCounts, PairedSweep, RocCurve, SweepRow, ThreatSpec,
    COLLINEARITY_TOLERANCE_M,
};
use lvs_core::{ChannelParams, NetworkGeometry, ObjectiveKind, PriorParams, StatisticKind, ThreatModel};
use serde_json::{json, Value};

use crate::config::{ConfigLayers, Settings};
use crate::output::Table;
use crate::runner::Runner;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// TOML layered over the base defaults.
    pub defaults: &'static str,
}

pub const SCENARIOS: [ScenarioInfo; 8] = [
    ScenarioInfo {
        name: "fig3",
        description: "FFA rates and NMI vs threshold, analytic and simulated",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"ffa\"\n[rule]\nkinds = [\"ffa_linear\"]\n",
    },
    ScenarioInfo {
        name: "fig4",
        description: "max NMI vs sigma_dB in {2,4,6,8,10} for K in {4,6,8,10}",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"ffa\"\n[rule]\nkinds = [\"ffa_linear\"]\n",
    },
    ScenarioInfo {
        name: "fig5",
        description: "circle threat: exact vs FFA rule NMI for rho/rho* in {0.2,0.5,1}",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"circle\"\nrho_factor = 1.0\n[rule]\nkinds = [\"lrt_exact\", \"lrt_ffa\"]\n",
    },
    ScenarioInfo {
        name: "fig6",
        description: "annulus threat at rho = 0.2 rho*: exact vs FFA rule for R2/R1 in {1,2,5,10}",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"annulus\"\nrho_factor = 0.2\nouter_over_inner = 1.0\n[rule]\nkinds = [\"lrt_exact\", \"lrt_ffa\"]\n",
    },
    ScenarioInfo {
        name: "fig7",
        description: "annulus 100-500 m: Laplace vs numerical marginal ROC for K in {4,8}",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"annulus\"\ninner_m = 100.0\nouter_m = 500.0\n[rule]\nkinds = [\"lrt_exact\", \"lrt_laplace\"]\n[sim]\ntrials = 2000\n",
    },
    ScenarioInfo {
        name: "fig8",
        description: "NMI and P_e vs threshold for P0 in {0.5,0.9}",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"ffa\"\n[rule]\nkinds = [\"ffa_linear\"]\n",
    },
    ScenarioInfo {
        name: "fig9-p1",
        description: "NMI- and P_e-optimal thresholds vs P1 = 1 - P0",
        defaults: "[channel]\nsigma_dB = 5.0\n[threat]\nmodel = \"ffa\"\n[rule]\nkinds = [\"ffa_linear\"]\n",
    },
    ScenarioInfo {
        name: "custom",
        description: "rate sweep for the configured rules; channel.sigma_dB is required",
        defaults: "",
    },
];

pub fn find(name: &str) -> Option<&'static ScenarioInfo> {
    SCENARIOS.iter().find(|s| s.name == name)
}

/// Fixed-width listing of every scenario.
pub fn listing() -> String {
    let mut out = String::new();
    for s in &SCENARIOS {
        out.push_str(&format!("{:<8}  {}\n", s.name, s.description));
    }
    out
}

/// Base defaults overlaid with the scenario's own defaults.
pub fn default_layers(info: &ScenarioInfo) -> ConfigLayers {
    let mut layers = ConfigLayers::from_toml(crate::config::BASE_DEFAULTS).expect("base defaults parse");
    layers.overlay(ConfigLayers::from_toml(info.defaults).expect("scenario defaults parse"));
    layers
}

pub const FIG4_SIGMAS: [f64; 5] = [2.0, 4.0, 6.0, 8.0, 10.0];
pub const FIG4_COUNTS: [usize; 4] = [4, 6, 8, 10];
pub const FIG5_RHO_FACTORS: [f64; 3] = [0.2, 0.5, 1.0];
pub const FIG6_RATIOS: [f64; 4] = [1.0, 2.0, 5.0, 10.0];
pub const FIG7_COUNTS: [usize; 2] = [4, 8];
pub const FIG7_DEFAULT_TRIALS: usize = 2000;
pub const FIG8_P0: [f64; 2] = [0.5, 0.9];
/// `α` range over which the two ROC curves of fig7 are compared.
pub const ROC_ALPHA_RANGE: (f64, f64) = (0.05, 0.5);

pub fn fig9_p1_values() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 100.0).collect()
}

/// The first `k` stations of the configured geometry, so that station
/// sweeps compare nested layouts.
pub fn nested_geometry(config: &ExperimentConfig, k: usize) -> anyhow::Result<NetworkGeometry> {
    let full = config.geometry.realize(config.seed, 0)?;
    if k > full.len() {
        bail!("needs at least {k} base stations but the geometry has {}", full.len());
    }
    let g = NetworkGeometry::new(full.base_stations()[..k].to_vec(), full.claimed())?;
    if g.collinearity_deviation() < COLLINEARITY_TOLERANCE_M {
        bail!("the first {k} base stations are nearly collinear; choose another seed");
    }
    Ok(g)
}

pub fn grid_step(grid: &[f64]) -> f64 {
    grid[1] - grid[0]
}

/// Threshold distance in grid steps.
pub fn steps_apart(a: f64, b: f64, step: f64) -> f64 {
    ((a - b) / step).abs()
}

// ---------------------------------------------------------------- fig3

pub struct Fig3 {
    pub analytic: Vec<CurveRow>,
    pub simulated: Vec<SweepRow>,
    /// Refined analytic NMI optimum.
    pub analytic_optimum: CurveRow,
    pub trials: usize,
}

pub fn compute_fig3(config: &ExperimentConfig, runner: &Runner) -> anyhow::Result<Fig3> {
    let mut config = config.clone();
    config.rules = vec![StatisticKind::FfaLinear];
    config.geometry_repeats = 1;
    let run = runner.simulate(&config)?;
    let detector = run.repeats[0].experiment.ffa_detector();
    let analytic = analytic_curve(detector, config.cols, &config.priors, &config.threshold_grid)?;
    let optimum = ffa_optimal_threshold(
        detector,
        config.cols,
        &config.priors,
        &config.threshold_grid,
        ObjectiveKind::Nmi,
    )?;
    Ok(Fig3 {
        analytic,
        simulated: run.sweep(StatisticKind::FfaLinear)?.rows,
        analytic_optimum: optimum.optimal_row(),
        trials: config.trials,
    })
}

fn analytic_curve(
    detector: &lvs_core::likelihood::FfaDetector,
    cols: usize,
    priors: &PriorParams,
    grid: &[f64],
) -> anyhow::Result<Vec<CurveRow>> {
    grid.iter()
        .map(|&t| {
            let r = ffa_rates(detector.gamma_from_log_t(t, cols), detector, cols)?;
            Ok(CurveRow {
                log_threshold: t,
                alpha: r.alpha,
                beta: r.beta,
                nmi: lvs_core::infotheory::nmi(priors, &r),
                pe: lvs_core::infotheory::misclassification(priors, &r),
            })
        })
        .collect()
}

impl Fig3 {
    /// Grid points where both simulated rates lie within `z` binomial
    /// standard errors (taken at the analytic rate) of the closed form.
    pub fn agreement(&self, z: f64) -> usize {
        let n = self.trials;
        self.analytic
            .iter()
            .zip(&self.simulated)
            .filter(|(a, s)| {
                let ok = |p: f64, est: f64| (est - p).abs() <= z * lvs_core::simulator::binomial_se(p, n);
                ok(a.alpha, s.alpha) && ok(a.beta, s.beta)
            })
            .count()
    }

    fn render(&self) -> (Table, Value) {
        let mut t = Table::new(&[
            "ln_T",
            "alpha_analytic",
            "beta_analytic",
            "alpha_sim",
            "beta_sim",
            "nmi_analytic",
            "nmi_sim",
        ]);
        for (a, s) in self.analytic.iter().zip(&self.simulated) {
            t.push(vec![
                a.log_threshold.into(),
                a.alpha.into(),
                a.beta.into(),
                s.alpha.into(),
                s.beta.into(),
                a.nmi.into(),
                s.nmi.into(),
            ]);
        }
        let o = self.analytic_optimum;
        let summary = json!({
            "nmi_optimum_analytic": {"ln_T": o.log_threshold, "alpha": o.alpha, "beta": o.beta, "nmi": o.nmi},
            "points_within_3se": self.agreement(3.0),
            "grid_points": self.analytic.len(),
        });
        (t, summary)
    }
}

// ---------------------------------------------------------------- fig4

pub struct Fig4Cell {
    pub count: usize,
    pub sigma_db: f64,
    pub analytic: CurveRow,
    pub simulated: SweepRow,
}

pub fn compute_fig4(config: &ExperimentConfig, runner: &Runner) -> anyhow::Result<Vec<Fig4Cell>> {
    let mut cells = Vec::new();
    for &count in &FIG4_COUNTS {
        let geom = nested_geometry(config, count)?;
        for &sigma_db in &FIG4_SIGMAS {
            let mut c = config.clone();
            c.geometry = GeometrySpec::Explicit(geom.clone());
            c.channel = ChannelParams { shadowing_sigma_db: sigma_db, ..config.channel };
            c.threat = ThreatSpec::Model(ThreatModel::Ffa);
            c.rules = vec![StatisticKind::FfaLinear];
            c.geometry_repeats = 1;
            let run = runner.simulate(&c)?;
            let detector = run.repeats[0].experiment.ffa_detector();
            let analytic = ffa_optimal_threshold(detector, c.cols, &c.priors, &c.threshold_grid, ObjectiveKind::Nmi)?;
            cells.push(Fig4Cell {
                count,
                sigma_db,
                analytic: analytic.optimal_row(),
                simulated: run.sweep(StatisticKind::FfaLinear)?.max_nmi_row(),
            });
        }
    }
    Ok(cells)
}

fn render_fig4(cells: &[Fig4Cell]) -> (Table, Value) {
    let mut t = Table::new(&[
        "K",
        "sigma_dB",
        "ln_T_opt_analytic",
        "alpha_opt_analytic",
        "nmi_max_analytic",
        "ln_T_opt_sim",
        "nmi_max_sim",
        "nmi_max_sim_se",
    ]);
    for c in cells {
        t.push(vec![
            c.count.into(),
            c.sigma_db.into(),
            c.analytic.log_threshold.into(),
            c.analytic.alpha.into(),
            c.analytic.nmi.into(),
            c.simulated.log_threshold.into(),
            c.simulated.nmi.into(),
            c.simulated.nmi_se.into(),
        ]);
    }
    (t, json!({"counts": FIG4_COUNTS, "sigmas_dB": FIG4_SIGMAS}))
}

// ---------------------------------------------------------- fig5, fig6

/// One setting of a paired exact-vs-FFA comparison.
pub struct PairedPoint {
    /// `ρ/ρ*` for fig5, `R₂/R₁` for fig6.
    pub parameter: f64,
    pub model: ThreatModel,
    pub sweep: PairedSweep,
}

impl PairedPoint {
    pub fn exact_optimum(&self) -> SweepRow {
        self.sweep.exact.max_nmi_row()
    }

    pub fn ffa_optimum(&self) -> SweepRow {
        self.sweep.ffa.max_nmi_row()
    }

    pub fn gap_steps(&self) -> f64 {
        let step = grid_step(&self.sweep.exact.grid());
        steps_apart(self.exact_optimum().log_threshold, self.ffa_optimum().log_threshold, step)
    }

    fn summary(&self) -> Value {
        let (e, f) = (self.exact_optimum(), self.ffa_optimum());
        let (r1, r2) = self.model.radii().unwrap_or((f64::INFINITY, f64::INFINITY));
        json!({
            "parameter": self.parameter,
            "inner_m": r1,
            "outer_m": r2,
            "exact_ln_T_opt": e.log_threshold,
            "exact_nmi_max": e.nmi,
            "exact_nmi_max_se": e.nmi_se,
            "ffa_ln_T_opt": f.log_threshold,
            "ffa_nmi_max": f.nmi,
            "ffa_nmi_max_se": f.nmi_se,
            "gap_steps": self.gap_steps(),
            "statistic_correlation": self.sweep.correlation,
        })
    }
}

pub fn compute_paired(config: &ExperimentConfig, runner: &Runner, threat: ThreatSpec, parameter: f64) -> anyhow::Result<PairedPoint> {
    let mut c = config.clone();
    c.threat = threat;
    c.rules = vec![StatisticKind::LrtExact, StatisticKind::LrtFfa];
    let model = threat.resolve(&c.geometry.realize(c.seed, 0)?)?;
    Ok(PairedPoint {
        parameter,
        model,
        sweep: runner.paired(&c)?,
    })
}

pub fn compute_fig5(config: &ExperimentConfig, runner: &Runner, factors: &[f64]) -> anyhow::Result<Vec<PairedPoint>> {
    let star = rho_star(&config.channel);
    factors
        .iter()
        .map(|&f| compute_paired(config, runner, ThreatSpec::CircleRho { rho: f * star }, f))
        .collect()
}

pub fn compute_fig6(config: &ExperimentConfig, runner: &Runner, factor: f64) -> anyhow::Result<Vec<PairedPoint>> {
    let rho = factor * rho_star(&config.channel);
    FIG6_RATIOS
        .iter()
        .map(|&ratio| {
            compute_paired(
                config,
                runner,
                ThreatSpec::AnnulusRho {
                    rho,
                    outer_over_inner: ratio,
                },
                ratio,
            )
        })
        .collect()
}

fn render_paired(points: &[PairedPoint], fig6: bool) -> (Table, Value) {
    let mut header = if fig6 {
        vec!["outer_over_inner", "inner_m", "outer_m"]
    } else {
        vec!["rho_factor", "radius_m"]
    };
    header.extend([
        "ln_T",
        "alpha_exact",
        "beta_exact",
        "nmi_exact",
        "nmi_exact_se",
        "alpha_ffa",
        "beta_ffa",
        "nmi_ffa",
        "nmi_ffa_se",
    ]);
    let mut t = Table::new(&header);
    for p in points {
        let (r1, r2) = p.model.radii().expect("paired scenarios use spatial threat models");
        let lead: Vec<f64> = if fig6 { vec![p.parameter, r1, r2] } else { vec![p.parameter, r1] };
        for (e, f) in p.sweep.exact.rows.iter().zip(&p.sweep.ffa.rows) {
            let mut row: Vec<crate::output::Cell> = lead.iter().map(|&v| v.into()).collect();
            row.extend([
                e.log_threshold.into(),
                e.alpha.into(),
                e.beta.into(),
                e.nmi.into(),
                e.nmi_se.into(),
                f.alpha.into(),
                f.beta.into(),
                f.nmi.into(),
                f.nmi_se.into(),
            ]);
            t.push(row);
        }
    }
    let summary = Value::Array(points.iter().map(PairedPoint::summary).collect());
    (t, summary)
}

// ---------------------------------------------------------------- fig7

pub struct RocComparison {
    pub count: usize,
    pub exact: RocCurve,
    pub laplace: RocCurve,
    pub laplace_counts: LaplaceCounts,
}

impl RocComparison {
    /// Largest `|β_laplace − β_exact|` at matched `α` over [`ROC_ALPHA_RANGE`],
    /// on a 0.005 grid of `α`.
    pub fn max_gap(&self) -> f64 {
        let (lo, hi) = ROC_ALPHA_RANGE;
        let n = ((hi - lo) / 0.005).round() as usize;
        (0..=n)
            .map(|i| {
                let a = lo + (hi - lo) * i as f64 / n as f64;
                (self.laplace.beta_at(a) - self.exact.beta_at(a)).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn compute_fig7(config: &ExperimentConfig, runner: &Runner, resolution: usize) -> anyhow::Result<Vec<RocComparison>> {
    FIG7_COUNTS
        .iter()
        .map(|&count| {
            let mut c = config.clone();
            c.geometry = GeometrySpec::Explicit(nested_geometry(config, count)?);
            c.rules = vec![StatisticKind::LrtExact, StatisticKind::LrtLaplace];
            let run = runner.simulate(&c)?;
            Ok(RocComparison {
                count,
                exact: run.roc(StatisticKind::LrtExact, resolution)?,
                laplace: run.roc(StatisticKind::LrtLaplace, resolution)?,
                laplace_counts: run.laplace_counts(),
            })
        })
        .collect()
}

fn render_fig7(rocs: &[RocComparison]) -> (Table, Value) {
    let mut t = Table::new(&["K", "rule", "threshold", "alpha", "beta"]);
    let mut summary = Vec::new();
    for r in rocs {
        for (name, curve) in [("lrt_exact", &r.exact), ("lrt_laplace", &r.laplace)] {
            for p in &curve.points {
                t.push(vec![r.count.into(), name.into(), p.threshold.into(), p.alpha.into(), p.beta.into()]);
            }
        }
        let c = r.laplace_counts;
        summary.push(json!({
            "K": r.count,
            "max_beta_gap": r.max_gap(),
            "alpha_range": [ROC_ALPHA_RANGE.0, ROC_ALPHA_RANGE.1],
            "laplace_approximated": c.approximated,
            "laplace_boundary_fallback": c.boundary_fallback,
            "laplace_indefinite_fallback": c.indefinite_fallback,
        }));
    }
    (t, Value::Array(summary))
}

// ---------------------------------------------------------- fig8, fig9

pub struct ObjectiveOptima {
    pub priors: PriorParams,
    pub nmi: CurveRow,
    pub pe: CurveRow,
}

/// Analytic NMI and `P_e` optima of the far-field detector on repeat 0 of
/// `config`, for each prior of legitimacy in `p0`.
pub fn compute_optima(config: &ExperimentConfig, p0: &[f64]) -> anyhow::Result<Vec<ObjectiveOptima>> {
    let mut c = config.clone();
    c.threat = ThreatSpec::Model(ThreatModel::Ffa);
    c.rules = vec![StatisticKind::FfaLinear];
    let exp = Experiment::prepare(&c, 0)?;
    let detector = exp.ffa_detector();
    p0.iter()
        .map(|&p| {
            let priors = PriorParams::new(p)?;
            let opt = |o| ffa_optimal_threshold(detector, c.cols, &priors, &c.threshold_grid, o);
            Ok(ObjectiveOptima {
                priors,
                nmi: opt(ObjectiveKind::Nmi)?.optimal_row(),
                pe: opt(ObjectiveKind::MisclassificationPe)?.optimal_row(),
            })
        })
        .collect()
}

fn render_fig8(config: &ExperimentConfig) -> anyhow::Result<(Table, Value)> {
    let mut c = config.clone();
    c.threat = ThreatSpec::Model(ThreatModel::Ffa);
    c.rules = vec![StatisticKind::FfaLinear];
    let exp = Experiment::prepare(&c, 0)?;
    let mut t = Table::new(&["p0", "ln_T", "alpha", "beta", "nmi", "pe"]);
    for &p in &FIG8_P0 {
        let priors = PriorParams::new(p)?;
        for r in analytic_curve(exp.ffa_detector(), c.cols, &priors, &c.threshold_grid)? {
            t.push(vec![p.into(), r.log_threshold.into(), r.alpha.into(), r.beta.into(), r.nmi.into(), r.pe.into()]);
        }
    }
    let summary = compute_optima(config, &FIG8_P0)?
        .iter()
        .map(|o| {
            json!({
                "p0": o.priors.legitimate(),
                "nmi_ln_T_opt": o.nmi.log_threshold,
                "pe_ln_T_opt": o.pe.log_threshold,
                "nmi_max": o.nmi.nmi,
                "pe_min": o.pe.pe,
            })
        })
        .collect();
    Ok((t, Value::Array(summary)))
}

fn render_fig9(config: &ExperimentConfig) -> anyhow::Result<(Table, Value)> {
    let p1 = fig9_p1_values();
    let p0: Vec<f64> = p1.iter().map(|p| 1.0 - p).collect();
    let optima = compute_optima(config, &p0)?;
    let mut t = Table::new(&["p1", "ln_T_nmi", "ln_T_pe", "ln_p0_over_p1", "nmi_max", "pe_min"]);
    for o in &optima {
        let (p0, p1) = (o.priors.legitimate(), o.priors.malicious());
        t.push(vec![
            p1.into(),
            o.nmi.log_threshold.into(),
            o.pe.log_threshold.into(),
            (p0 / p1).ln().into(),
            o.nmi.nmi.into(),
            o.pe.pe.into(),
        ]);
    }
    Ok((t, json!({"p1_values": p1.len()})))
}

// -------------------------------------------------------------- custom

fn render_custom(settings: &Settings, runner: &Runner) -> anyhow::Result<(Table, Value)> {
    let config = &settings.experiment;
    let run = runner.simulate(config)?;
    let mut t = Table::new(&["rule", "ln_T", "alpha", "alpha_se", "beta", "beta_se", "nmi", "nmi_se", "pe"]);
    let mut summary = Vec::new();
    for &kind in &config.rules {
        let sweep = run.sweep(kind)?;
        for r in &sweep.rows {
            t.push(vec![
                kind.name().into(),
                r.log_threshold.into(),
                r.alpha.into(),
                r.alpha_se.into(),
                r.beta.into(),
                r.beta_se.into(),
                r.nmi.into(),
                r.nmi_se.into(),
                r.pe.into(),
            ]);
        }
        let best = sweep.optimize(&config.priors, settings.objective)?;
        let mut entry = json!({
            "rule": kind.name(),
            "ln_T_opt": best.optimal_log_threshold,
            "objective": best.objective_value,
            "alpha": best.optimal_rates.alpha,
            "beta": best.optimal_rates.beta,
        });
        if kind == StatisticKind::LrtLaplace {
            entry["laplace_fallback_fraction"] = json!(sweep.laplace.fallback_fraction());
        }
        summary.push(entry);
    }
    Ok((t, json!({"config_hash": format!("{:016x}", config.config_hash()), "rules": summary})))
}

// ------------------------------------------------------------- dispatch

pub struct ScenarioOutput {
    pub table: Table,
    pub summary: Value,
    /// Trials per hypothesis; 0 when the scenario is purely analytic.
    pub trials: usize,
    pub notes: Vec<String>,
}

/// Runs scenario `name`. `rho_factor` replaces the ρ/ρ* values of fig5 and
/// fig6.
pub fn run(name: &str, settings: &Settings, runner: &Runner, rho_factor: Option<f64>) -> anyhow::Result<ScenarioOutput> {
    let config = &settings.experiment;
    if rho_factor.is_some() && !matches!(name, "fig5" | "fig6") {
        bail!("--rho-factor only applies to fig5 and fig6");
    }
    if let Some(f) = rho_factor {
        if !(f > 0.0 && f.is_finite()) {
            bail!("invalid value for `--rho-factor`: must be positive, got {f}");
        }
    }
    let mut notes = Vec::new();
    let mut trials = config.trials;
    let (table, summary) = match name {
        "fig3" => compute_fig3(config, runner)?.render(),
        "fig4" => render_fig4(&compute_fig4(config, runner)?),
        "fig5" => {
            let factors = rho_factor.map_or(FIG5_RHO_FACTORS.to_vec(), |f| vec![f]);
            render_paired(&compute_fig5(config, runner, &factors)?, false)
        }
        "fig6" => {
            let factor = rho_factor.unwrap_or(0.2);
            render_paired(&compute_fig6(config, runner, factor)?, true)
        }
        "fig7" => {
            notes.push(format!(
                "fig7 defaults to {FIG7_DEFAULT_TRIALS} trials per hypothesis to bound quadrature and Laplace cost; {} used",
                config.trials
            ));
            render_fig7(&compute_fig7(config, runner, settings.roc_points)?)
        }
        "fig8" => {
            trials = 0;
            render_fig8(config)?
        }
        "fig9-p1" => {
            trials = 0;
            render_fig9(config)?
        }
        "custom" => render_custom(settings, runner)?,
        other => bail!("unknown scenario `{other}`; run `lvs list-scenarios`"),
    };
    Ok(ScenarioOutput {
        table,
        summary,
        trials,
        notes,
    })
}

/// Resolves layers into settings, naming the scenario on failure.
pub fn settings_for(name: &str, layers: &ConfigLayers) -> anyhow::Result<Settings> {
    let settings = layers.parse()?.settings().with_context(|| format!("configuring scenario `{name}`"))?;
    Ok(settings)
}
