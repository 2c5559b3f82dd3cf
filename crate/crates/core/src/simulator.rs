//! Seeded Monte Carlo estimation of false positive and detection rates.
//!
//! Every trial owns an independent ChaCha8 stream. The key is derived from
//! `(master seed, purpose tag, geometry repeat)` by SplitMix64 and the trial
//! index selects the ChaCha stream, so a trial's randomness does not depend on
//! which other trials run or in what order. Legitimate trial `i` and malicious
//! trial `i` use different tags; every statistic of one trial is computed on
//! the same measurement, which gives common random numbers across rules.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::adversary::{sample_true_position, ThreatModel, TruePosition};
use crate::error::{Error, Result};
use crate::infotheory::{
    misclassification, nmi, optimize_threshold, CurveSource, ObjectiveKind, RatePair, ThresholdResult,
};
use crate::likelihood::{
    gaussian_log_lik, laplace_or_marginal, FfaDetector, IntegrationSpec, LaplaceStatus, MarginalTable,
    StatisticKind,
};
use crate::math;
use crate::model::{
    claimed_means, sample_far_field, sample_malicious, sample_with_means, ChannelParams, MeasurementMatrix,
    NetworkGeometry, Point2D, PriorParams,
};

/// Default Monte Carlo realizations per hypothesis.
pub const DEFAULT_TRIALS: usize = 10_000;
/// Fewest trials accepted for rate estimation.
pub const MIN_TRIALS: usize = 1_000;
/// Supported base-station counts.
pub const STATION_RANGE: core::ops::RangeInclusive<usize> = 4..=64;
/// Random geometries closer than this to a straight line are redrawn, meters.
pub const COLLINEARITY_TOLERANCE_M: f64 = 1.0;

/// 201 points of `ln T_Λ` over `[−25, 25]`.
pub fn default_threshold_grid() -> Vec<f64> {
    math::linspace(-25.0, 25.0, 201)
}

/// Purpose of a derived random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Geometry = 1,
    Legitimate = 2,
    Malicious = 3,
    Quadrature = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit key for `(seed, tag, repeat)`.
pub fn derive_seed(seed: u64, tag: StreamTag, repeat: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ tag as u64) ^ repeat)
}

/// ChaCha8 stream `index` under the key for `(seed, tag, repeat)`.
pub fn stream_rng(seed: u64, tag: StreamTag, repeat: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tag, repeat));
    rng.set_stream(index);
    rng
}

/// Base-station layout of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    Explicit(NetworkGeometry),
    /// `count` stations uniform over a square of side `side_m` centered on a
    /// claim at the origin.
    RandomSquare { count: usize, side_m: f64 },
}

impl GeometrySpec {
    pub fn station_count(&self) -> usize {
        match self {
            Self::Explicit(g) => g.len(),
            Self::RandomSquare { count, .. } => *count,
        }
    }

    /// Geometry number `repeat` for the seed.
    pub fn realize(&self, seed: u64, repeat: u64) -> Result<NetworkGeometry> {
        match self {
            Self::Explicit(g) => Ok(g.clone()),
            Self::RandomSquare { count, side_m } => {
                let mut rng = stream_rng(seed, StreamTag::Geometry, repeat, 0);
                Ok(random_square_geometry(*count, *side_m, &mut rng))
            }
        }
    }
}

/// Draws stations uniformly in the square until the layout is usable.
///
/// Stations are drawn in order, so the first `k` stations of an accepted
/// layout are exactly what a `k`-station draw from the same stream would
/// produce whenever neither needed a redraw.
pub fn random_square_geometry<R: Rng + ?Sized>(count: usize, side_m: f64, rng: &mut R) -> NetworkGeometry {
    let half = 0.5 * side_m;
    loop {
        let stations: Vec<Point2D> = (0..count)
            .map(|_| Point2D::new(rng.random_range(-half..half), rng.random_range(-half..half)))
            .collect();
        if let Ok(g) = NetworkGeometry::new(stations, Point2D::ORIGIN) {
            if g.collinearity_deviation() >= COLLINEARITY_TOLERANCE_M {
                return g;
            }
        }
    }
}

/// Threat model, possibly sized relative to the realized geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThreatSpec {
    Model(ThreatModel),
    /// Circle of radius `rho · r`.
    CircleRho { rho: f64 },
    /// Annulus with `R₁ = rho · r` and `R₂ = outer_over_inner · R₁`.
    AnnulusRho { rho: f64, outer_over_inner: f64 },
}

impl ThreatSpec {
    pub fn resolve(&self, geom: &NetworkGeometry) -> Result<ThreatModel> {
        let model = match *self {
            Self::Model(m) => m,
            Self::CircleRho { rho } => ThreatModel::circle_from_rho(rho, geom),
            Self::AnnulusRho { rho, outer_over_inner } => ThreatModel::annulus_from_rho(rho, outer_over_inner, geom),
        };
        model.validate(geom)?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: GeometrySpec,
    pub channel: ChannelParams,
    pub priors: PriorParams,
    pub threat: ThreatSpec,
    /// Statistics evaluated on every trial; all see the same measurements.
    pub rules: Vec<StatisticKind>,
    /// Samples per base station, L.
    pub cols: usize,
    /// Trials per hypothesis and geometry.
    pub trials: usize,
    pub seed: u64,
    /// `ln T_Λ` values; used as raw thresholds for statistics that are not
    /// likelihood ratios.
    pub threshold_grid: Vec<f64>,
    pub integration: IntegrationSpec,
    /// Independent geometries pooled into one estimate.
    pub geometry_repeats: usize,
}

impl ExperimentConfig {
    /// Far-field experiment with `count` random stations and the given shadowing.
    pub fn new(geometry: GeometrySpec, channel: ChannelParams, threat: ThreatSpec, rules: Vec<StatisticKind>) -> Self {
        Self {
            geometry,
            channel,
            priors: PriorParams::new(0.9).expect("valid default prior"),
            threat,
            rules,
            cols: 1,
            trials: DEFAULT_TRIALS,
            seed: 42,
            threshold_grid: default_threshold_grid(),
            integration: IntegrationSpec::default(),
            geometry_repeats: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if !STATION_RANGE.contains(&self.geometry.station_count()) {
            return Err(Error::InvalidParameter {
                name: "geometry.count",
                reason: "base-station count must be between 4 and 64",
            });
        }
        if let GeometrySpec::RandomSquare { side_m, .. } = self.geometry {
            if !(side_m > 0.0) || !side_m.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "geometry.side_m",
                    reason: "must be positive",
                });
            }
        }
        if self.rules.is_empty() {
            return Err(Error::InvalidParameter {
                name: "rule.kinds",
                reason: "at least one statistic is required",
            });
        }
        if self.cols == 0 {
            return Err(Error::InvalidParameter {
                name: "sim.samples_per_bs",
                reason: "must be at least 1",
            });
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidParameter {
                name: "sim.trials",
                reason: "at least 1000 trials per hypothesis are required",
            });
        }
        if self.geometry_repeats == 0 {
            return Err(Error::InvalidParameter {
                name: "sim.geometry_repeats",
                reason: "must be at least 1",
            });
        }
        let g = &self.threshold_grid;
        if g.is_empty() || g.iter().any(|x| !x.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "sim.threshold_grid",
                reason: "must be finite and strictly increasing",
            });
        }
        Ok(())
    }

    /// FNV-1a hash of the configuration's debug rendering.
    pub fn config_hash(&self) -> u64 {
        let text = format!("{self:?}");
        text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Legitimate,
    Malicious,
}

impl Hypothesis {
    fn tag(self) -> StreamTag {
        match self {
            Self::Legitimate => StreamTag::Legitimate,
            Self::Malicious => StreamTag::Malicious,
        }
    }
}

/// Statistics of one trial, in the order of the configured rules.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub statistics: Vec<f64>,
    pub laplace: Option<LaplaceStatus>,
}

/// How the Laplace rule was evaluated across trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LaplaceCounts {
    pub approximated: u64,
    pub boundary_fallback: u64,
    pub indefinite_fallback: u64,
}

impl LaplaceCounts {
    fn record(&mut self, status: LaplaceStatus) {
        match status {
            LaplaceStatus::Approximated => self.approximated += 1,
            LaplaceStatus::BoundaryFallback => self.boundary_fallback += 1,
            LaplaceStatus::IndefiniteFallback => self.indefinite_fallback += 1,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.approximated += other.approximated;
        self.boundary_fallback += other.boundary_fallback;
        self.indefinite_fallback += other.indefinite_fallback;
    }

    pub fn total(&self) -> u64 {
        self.approximated + self.boundary_fallback + self.indefinite_fallback
    }

    /// Fraction of Laplace evaluations that fell back to the numerical marginal.
    pub fn fallback_fraction(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            (self.boundary_fallback + self.indefinite_fallback) as f64 / t as f64
        }
    }
}

/// One realized geometry with everything precomputed for trials.
#[derive(Debug, Clone)]
pub struct Experiment {
    geometry: NetworkGeometry,
    channel: ChannelParams,
    model: ThreatModel,
    rules: Vec<StatisticKind>,
    cols: usize,
    seed: u64,
    repeat: u64,
    h0_means: Vec<f64>,
    ffa: FfaDetector,
    nearest: usize,
    table: Option<MarginalTable>,
}

impl Experiment {
    pub fn prepare(config: &ExperimentConfig, repeat: u64) -> Result<Self> {
        config.validate()?;
        let geometry = config.geometry.realize(config.seed, repeat)?;
        let model = config.threat.resolve(&geometry)?;
        let ffa = FfaDetector::new(&geometry, &config.channel);
        let mut needs_table = false;
        for rule in &config.rules {
            match rule {
                StatisticKind::LrtLaplace if model == ThreatModel::Ffa => {
                    return Err(Error::RuleModelMismatch {
                        rule: rule.name(),
                        model: model.name(),
                    });
                }
                StatisticKind::LrtExact | StatisticKind::LrtLaplace if model != ThreatModel::Ffa => needs_table = true,
                StatisticKind::LrtExact | StatisticKind::LrtFfa | StatisticKind::FfaLinear => ffa.ensure_usable()?,
                _ => {}
            }
        }
        let table = if needs_table {
            Some(MarginalTable::build(&geometry, &config.channel, &model, &config.integration)?)
        } else {
            None
        };
        Ok(Self {
            h0_means: claimed_means(&geometry, &config.channel),
            nearest: geometry.nearest_to_claimed(),
            geometry,
            channel: config.channel,
            model,
            rules: config.rules.clone(),
            cols: config.cols,
            seed: config.seed,
            repeat,
            ffa,
            table,
        })
    }

    pub fn geometry(&self) -> &NetworkGeometry {
        &self.geometry
    }

    pub fn model(&self) -> &ThreatModel {
        &self.model
    }

    pub fn rules(&self) -> &[StatisticKind] {
        &self.rules
    }

    pub fn ffa_detector(&self) -> &FfaDetector {
        &self.ffa
    }

    /// Threshold on `kind`'s own scale for a grid value of `ln T_Λ`.
    pub fn native_threshold(&self, kind: StatisticKind, log_t: f64) -> f64 {
        match kind {
            StatisticKind::FfaLinear => self.ffa.gamma_from_log_t(log_t, self.cols),
            _ => log_t,
        }
    }

    /// Statistic mapped to the `ln Λ` scale where one exists, so values from
    /// different geometries are comparable.
    pub fn canonical(&self, kind: StatisticKind, statistic: f64) -> f64 {
        match kind {
            StatisticKind::FfaLinear => self.ffa.log_t_from_gamma(statistic, self.cols),
            _ => statistic,
        }
    }

    /// The measurement of trial `index`, drawn from `rng`.
    fn measurement(&self, hypothesis: Hypothesis, rng: &mut ChaCha8Rng) -> Result<MeasurementMatrix> {
        match hypothesis {
            Hypothesis::Legitimate => sample_with_means(&self.h0_means, self.channel.shadowing_sigma_db, self.cols, rng),
            Hypothesis::Malicious => match sample_true_position(&self.model, self.geometry.claimed(), rng) {
                TruePosition::AtInfinity => sample_far_field(&self.geometry, &self.channel, self.cols, rng),
                TruePosition::At(p) => sample_malicious(&self.geometry, &self.channel, p, self.cols, rng),
            },
        }
    }

    /// All configured statistics for one trial.
    pub fn trial(&self, hypothesis: Hypothesis, index: u64) -> Result<TrialOutcome> {
        let mut rng = stream_rng(self.seed, hypothesis.tag(), self.repeat, index);
        let m = self.measurement(hypothesis, &mut rng)?;
        self.statistics(&m, &mut rng)
    }

    /// Statistics of `m`; `rng` only feeds the random-guess baseline.
    pub fn statistics<R: Rng + ?Sized>(&self, m: &MeasurementMatrix, rng: &mut R) -> Result<TrialOutcome> {
        let mut h0: Option<f64> = None;
        let mut log_h0 = |m: &MeasurementMatrix| -> Result<f64> {
            if let Some(v) = h0 {
                return Ok(v);
            }
            let v = gaussian_log_lik(m, &self.h0_means, self.channel.shadowing_sigma_db)?.0;
            h0 = Some(v);
            Ok(v)
        };
        let mut laplace = None;
        let mut statistics = Vec::with_capacity(self.rules.len());
        for &rule in &self.rules {
            let s = match rule {
                StatisticKind::LrtFfa => self.ffa.log_ratio(m)?,
                StatisticKind::FfaLinear => self.ffa.statistic(m)?,
                StatisticKind::LrtExact => match &self.table {
                    None => self.ffa.log_ratio(m)?,
                    Some(table) => table.log_marginal(m)? - log_h0(m)?,
                },
                StatisticKind::LrtLaplace => {
                    let table = self.table.as_ref().ok_or(Error::MarginalNeedsSpatialPrior)?;
                    let (lik, status) = laplace_or_marginal(m, &self.geometry, &self.channel, table)?;
                    laplace = Some(status);
                    lik.0 - log_h0(m)?
                }
                StatisticKind::NearestResidual => {
                    let row = m.row(self.nearest);
                    let avg = row.iter().sum::<f64>() / row.len() as f64;
                    (avg - self.h0_means[self.nearest]).abs()
                }
                StatisticKind::RandomGuess => rng.sample(StandardNormal),
            };
            if s.is_nan() {
                return Err(Error::NonFiniteMeasurement);
            }
            statistics.push(s);
        }
        Ok(TrialOutcome { statistics, laplace })
    }

    /// Collects per-trial outcomes, indexed by trial, into sorted samples.
    pub fn assemble(&self, legitimate: &[TrialOutcome], malicious: &[TrialOutcome]) -> RepeatData {
        let split = |outcomes: &[TrialOutcome]| -> Vec<Vec<f64>> {
            (0..self.rules.len())
                .map(|k| {
                    let mut v: Vec<f64> = outcomes.iter().map(|o| o.statistics[k]).collect();
                    v.sort_by(f64::total_cmp);
                    v
                })
                .collect()
        };
        let mut laplace = LaplaceCounts::default();
        for status in legitimate.iter().chain(malicious).filter_map(|o| o.laplace) {
            laplace.record(status);
        }
        RepeatData {
            experiment: self.clone(),
            legitimate: split(legitimate),
            malicious: split(malicious),
            laplace,
        }
    }

    /// Runs `trials` trials per hypothesis in index order.
    pub fn run(&self, trials: usize) -> Result<RepeatData> {
        let legitimate = sequential_trials(self, Hypothesis::Legitimate, trials)?;
        let malicious = sequential_trials(self, Hypothesis::Malicious, trials)?;
        Ok(self.assemble(&legitimate, &malicious))
    }
}

/// Sorted statistic samples of one geometry.
#[derive(Debug, Clone)]
pub struct RepeatData {
    pub experiment: Experiment,
    /// Per rule, ascending.
    pub legitimate: Vec<Vec<f64>>,
    /// Per rule, ascending.
    pub malicious: Vec<Vec<f64>>,
    pub laplace: LaplaceCounts,
}

/// Number of samples `≥ t` in an ascending slice.
fn count_at_least(sorted: &[f64], t: f64) -> usize {
    sorted.len() - sorted.partition_point(|&x| x < t)
}

/// All statistics of a run.
#[derive(Debug, Clone)]
pub struct RunData {
    pub seed: u64,
    pub config_hash: u64,
    pub priors: PriorParams,
    pub threshold_grid: Vec<f64>,
    pub rules: Vec<StatisticKind>,
    pub repeats: Vec<RepeatData>,
}

impl RunData {
    pub fn new(config: &ExperimentConfig, repeats: Vec<RepeatData>) -> Self {
        Self {
            seed: config.seed,
            config_hash: config.config_hash(),
            priors: config.priors,
            threshold_grid: config.threshold_grid.clone(),
            rules: config.rules.clone(),
            repeats,
        }
    }

    fn rule_index(&self, kind: StatisticKind) -> Result<usize> {
        self.rules.iter().position(|&k| k == kind).ok_or(Error::InvalidParameter {
            name: "rule",
            reason: "statistic was not part of the run",
        })
    }

    pub fn laplace_counts(&self) -> LaplaceCounts {
        let mut total = LaplaceCounts::default();
        for r in &self.repeats {
            total.merge(&r.laplace);
        }
        total
    }

    /// Rate estimates for `kind` over the configured grid.
    pub fn sweep(&self, kind: StatisticKind) -> Result<SweepResult> {
        self.sweep_on(kind, &self.threshold_grid)
    }

    /// Rate estimates for `kind` on an arbitrary ascending `ln T_Λ` grid.
    pub fn sweep_on(&self, kind: StatisticKind, grid: &[f64]) -> Result<SweepResult> {
        let k = self.rule_index(kind)?;
        let mut ge0 = vec![0usize; grid.len()];
        let mut ge1 = vec![0usize; grid.len()];
        let (mut n0, mut n1) = (0usize, 0usize);
        for rep in &self.repeats {
            n0 += rep.legitimate[k].len();
            n1 += rep.malicious[k].len();
            for (j, &log_t) in grid.iter().enumerate() {
                let t = rep.experiment.native_threshold(kind, log_t);
                ge0[j] += count_at_least(&rep.legitimate[k], t);
                ge1[j] += count_at_least(&rep.malicious[k], t);
            }
        }
        let rows = grid
            .iter()
            .zip(ge0.iter().zip(&ge1))
            .map(|(&log_t, (&c0, &c1))| SweepRow::from_counts(log_t, c0, n0, c1, n1, &self.priors))
            .collect();
        let mut laplace = LaplaceCounts::default();
        if kind == StatisticKind::LrtLaplace {
            laplace = self.laplace_counts();
        }
        Ok(SweepResult {
            kind,
            rows,
            trials_legitimate: n0,
            trials_malicious: n1,
            seed: self.seed,
            config_hash: self.config_hash,
            laplace,
        })
    }

    /// Pooled statistics of `kind` on the `ln Λ` scale where one exists.
    pub fn canonical_samples(&self, kind: StatisticKind) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.rule_index(kind)?;
        let mut h0 = Vec::new();
        let mut h1 = Vec::new();
        for rep in &self.repeats {
            h0.extend(rep.legitimate[k].iter().map(|&s| rep.experiment.canonical(kind, s)));
            h1.extend(rep.malicious[k].iter().map(|&s| rep.experiment.canonical(kind, s)));
        }
        h0.sort_by(f64::total_cmp);
        h1.sort_by(f64::total_cmp);
        Ok((h0, h1))
    }

    /// Empirical ROC with thresholds at `resolution` quantiles of the pooled
    /// statistics.
    pub fn roc(&self, kind: StatisticKind, resolution: usize) -> Result<RocCurve> {
        let (h0, h1) = self.canonical_samples(kind)?;
        Ok(RocCurve::from_samples(&h0, &h1, resolution))
    }
}

/// Evaluates trials `0..n` of one hypothesis, in index order.
pub type TrialExecutor<'a> = dyn Fn(&Experiment, Hypothesis, usize) -> Result<Vec<TrialOutcome>> + 'a;

/// Evaluates trials one after another on the calling thread.
pub fn sequential_trials(exp: &Experiment, hypothesis: Hypothesis, n: usize) -> Result<Vec<TrialOutcome>> {
    (0..n as u64).map(|i| exp.trial(hypothesis, i)).collect()
}

/// Runs every geometry repeat sequentially.
pub fn simulate(config: &ExperimentConfig) -> Result<RunData> {
    simulate_with(config, &sequential_trials)
}

/// Runs every geometry repeat, delegating trial evaluation to `execute`.
///
/// Results depend only on the trial indices, so any executor that returns
/// outcomes in index order reproduces [`simulate`] exactly.
pub fn simulate_with(config: &ExperimentConfig, execute: &TrialExecutor<'_>) -> Result<RunData> {
    config.validate()?;
    let repeats = (0..config.geometry_repeats as u64)
        .map(|r| {
            let exp = Experiment::prepare(config, r)?;
            let legitimate = execute(&exp, Hypothesis::Legitimate, config.trials)?;
            let malicious = execute(&exp, Hypothesis::Malicious, config.trials)?;
            Ok(exp.assemble(&legitimate, &malicious))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunData::new(config, repeats))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub log_threshold: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_se: f64,
    pub beta_se: f64,
    pub nmi: f64,
    /// Delta-method standard error of the NMI estimate.
    pub nmi_se: f64,
    pub pe: f64,
}

/// `√(p(1−p)/n)`.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    math::sqrt(p * (1.0 - p) / n as f64)
}

/// First-order standard error of `NMI(α̂, β̂)` for independent estimates.
pub fn nmi_standard_error(priors: &PriorParams, rates: RatePair, alpha_se: f64, beta_se: f64) -> f64 {
    let partial = |f: &dyn Fn(f64) -> f64, x: f64| {
        let h = 1e-6;
        let (lo, hi) = ((x - h).max(0.0), (x + h).min(1.0));
        (f(hi) - f(lo)) / (hi - lo)
    };
    let d_alpha = partial(&|a| nmi(priors, &RatePair { alpha: a, ..rates }), rates.alpha);
    let d_beta = partial(&|b| nmi(priors, &RatePair { beta: b, ..rates }), rates.beta);
    math::sqrt(d_alpha * d_alpha * alpha_se * alpha_se + d_beta * d_beta * beta_se * beta_se)
}

impl SweepRow {
    fn from_counts(log_threshold: f64, c0: usize, n0: usize, c1: usize, n1: usize, priors: &PriorParams) -> Self {
        let rates = RatePair {
            alpha: c0 as f64 / n0 as f64,
            beta: c1 as f64 / n1 as f64,
        };
        let alpha_se = binomial_se(rates.alpha, n0);
        let beta_se = binomial_se(rates.beta, n1);
        Self {
            log_threshold,
            alpha: rates.alpha,
            beta: rates.beta,
            alpha_se,
            beta_se,
            nmi: nmi(priors, &rates),
            nmi_se: nmi_standard_error(priors, rates, alpha_se, beta_se),
            pe: misclassification(priors, &rates),
        }
    }

    pub fn rates(&self) -> RatePair {
        RatePair {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Monte Carlo rate curve of one statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: StatisticKind,
    /// Ascending in threshold.
    pub rows: Vec<SweepRow>,
    pub trials_legitimate: usize,
    pub trials_malicious: usize,
    pub seed: u64,
    pub config_hash: u64,
    pub laplace: LaplaceCounts,
}

impl SweepResult {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.log_threshold).collect()
    }

    /// Grid optimum of `objective`; Monte Carlo curves are not refined.
    pub fn optimize(&self, priors: &PriorParams, objective: ObjectiveKind) -> Result<ThresholdResult> {
        let grid = self.grid();
        let rates: Vec<RatePair> = self.rows.iter().map(SweepRow::rates).collect();
        optimize_threshold(&CurveSource::Tabulated { grid: &grid, rates: &rates }, priors, objective)
    }

    /// Row with the largest NMI; the lowest threshold wins ties.
    pub fn max_nmi_row(&self) -> SweepRow {
        let mut best = self.rows[0];
        for r in &self.rows[1..] {
            if r.nmi > best.nmi {
                best = *r;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Empirical ROC, ascending in `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// `h0`, `h1` ascending.
    pub fn from_samples(h0: &[f64], h1: &[f64], resolution: usize) -> Self {
        let mut pooled: Vec<f64> = h0.iter().chain(h1).copied().collect();
        pooled.sort_by(f64::total_cmp);
        let n = pooled.len();
        let mut points: Vec<RocPoint> = (0..resolution.max(2))
            .map(|j| {
                let q = j as f64 / (resolution.max(2) - 1) as f64;
                let idx = ((q * (n - 1) as f64) + 0.5) as usize;
                let t = pooled[idx.min(n - 1)];
                RocPoint {
                    threshold: t,
                    alpha: count_at_least(h0, t) as f64 / h0.len() as f64,
                    beta: count_at_least(h1, t) as f64 / h1.len() as f64,
                }
            })
            .collect();
        points.push(RocPoint {
            threshold: f64::INFINITY,
            alpha: 0.0,
            beta: 0.0,
        });
        points.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.beta.total_cmp(&b.beta)));
        points.dedup();
        Self { points }
    }

    /// Detection rate at false positive rate `alpha`, linearly interpolated.
    pub fn beta_at(&self, alpha: f64) -> f64 {
        let p = &self.points;
        let i = p.partition_point(|q| q.alpha < alpha);
        if i == 0 {
            return p[0].beta;
        }
        if i == p.len() {
            return p[p.len() - 1].beta;
        }
        let (a, b) = (p[i - 1], p[i]);
        if b.alpha == a.alpha {
            return b.beta;
        }
        a.beta + (b.beta - a.beta) * (alpha - a.alpha) / (b.alpha - a.alpha)
    }
}

/// Exact-rule and far-field-rule sweeps on common random numbers.
#[derive(Debug, Clone)]
pub struct PairedSweep {
    pub exact: SweepResult,
    pub ffa: SweepResult,
    /// Pearson correlation of the two statistics over malicious trials.
    pub correlation: f64,
}

/// Pearson correlation of two paired samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / math::sqrt(saa * sbb)
}

/// Evaluates the exact and far-field likelihood-ratio rules on identical
/// trials of the first geometry.
pub fn nmi_sweep_comparison(config: &ExperimentConfig) -> Result<PairedSweep> {
    nmi_sweep_comparison_with(config, &sequential_trials)
}

/// As [`nmi_sweep_comparison`] with a caller-supplied trial executor.
pub fn nmi_sweep_comparison_with(config: &ExperimentConfig, execute: &TrialExecutor<'_>) -> Result<PairedSweep> {
    let mut config = config.clone();
    config.rules = vec![StatisticKind::LrtExact, StatisticKind::LrtFfa];
    config.geometry_repeats = 1;
    config.validate()?;
    let exp = Experiment::prepare(&config, 0)?;
    let legitimate = execute(&exp, Hypothesis::Legitimate, config.trials)?;
    let malicious = execute(&exp, Hypothesis::Malicious, config.trials)?;
    let a: Vec<f64> = malicious.iter().map(|o| o.statistics[0]).collect();
    let b: Vec<f64> = malicious.iter().map(|o| o.statistics[1]).collect();
    let run = RunData::new(&config, vec![exp.assemble(&legitimate, &malicious)]);
    Ok(PairedSweep {
        exact: run.sweep(StatisticKind::LrtExact)?,
        ffa: run.sweep(StatisticKind::LrtFfa)?,
        correlation: correlation(&a, &b),
    })
}

/// Rate sweeps for every configured rule.
pub fn estimate_rates(config: &ExperimentConfig) -> Result<Vec<SweepResult>> {
    let run = simulate(config)?;
    config.rules.iter().map(|&k| run.sweep(k)).collect()
}

/// ROC of the first configured rule.
pub fn roc_curve(config: &ExperimentConfig, resolution: usize) -> Result<RocCurve> {
    simulate(config)?.roc(config.rules[0], resolution)
}
