//! Information measures of the verification channel and threshold search.
//!
//! The decision channel maps the true hypothesis `X ∈ {0, 1}` to the output
//! `Y ∈ {verified, not verified}` with `P(Y=1|X=0) = α` and
//! `P(Y=1|X=1) = β`. Entropies are in bits.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::likelihood::FfaDetector;
use crate::math;
use crate::model::{ChannelParams, NetworkGeometry, PriorParams};

/// Standard normal tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * math::erfc(x / core::f64::consts::SQRT_2)
}

/// `−p log₂ p`, with `0 log 0 = 0`.
fn neg_plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * math::log2(p)
    }
}

/// `H(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    neg_plogp(p) + neg_plogp(1.0 - p)
}

/// False positive rate `α` and detection rate `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub alpha: f64,
    pub beta: f64,
}

impl RatePair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must lie in [0, 1]",
            });
        }
        if !unit(beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self { alpha, beta })
    }
}

/// `H(X|Y)`.
pub fn conditional_entropy(priors: &PriorParams, rates: &RatePair) -> f64 {
    let (p0, p1) = (priors.legitimate(), priors.malicious());
    let (a, b) = (rates.alpha, rates.beta);
    // H(X|Y) = H(X,Y) − H(Y).
    let joint = neg_plogp(p0 * (1.0 - a)) + neg_plogp(p0 * a) + neg_plogp(p1 * (1.0 - b)) + neg_plogp(p1 * b);
    let y1 = p0 * a + p1 * b;
    let h = joint - binary_entropy(y1);
    h.clamp(0.0, binary_entropy(p0))
}

/// `I(X;Y) = H(X) − H(X|Y)`.
pub fn mutual_information(priors: &PriorParams, rates: &RatePair) -> f64 {
    (binary_entropy(priors.legitimate()) - conditional_entropy(priors, rates)).max(0.0)
}

/// `I(X;Y) / H(X)`, in `[0, 1]`.
pub fn nmi(priors: &PriorParams, rates: &RatePair) -> f64 {
    (mutual_information(priors, rates) / binary_entropy(priors.legitimate())).min(1.0)
}

/// `P_e = P₀α + P₁(1 − β)`.
pub fn misclassification(priors: &PriorParams, rates: &RatePair) -> f64 {
    priors.legitimate() * rates.alpha + priors.malicious() * (1.0 - rates.beta)
}

/// `C = P₀αC₀ + P₁(1 − β)C₁`.
pub fn bayes_cost(priors: &PriorParams, rates: &RatePair, c0: f64, c1: f64) -> f64 {
    priors.legitimate() * rates.alpha * c0 + priors.malicious() * (1.0 - rates.beta) * c1
}

/// What the threshold search optimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    /// Maximize normalized mutual information.
    Nmi,
    /// Minimize `P_e`.
    MisclassificationPe,
    /// Minimize the weighted error cost.
    BayesCost { c0: f64, c1: f64 },
}

impl ObjectiveKind {
    pub fn validate(&self) -> Result<()> {
        if let Self::BayesCost { c0, c1 } = *self {
            if !(c0 > 0.0 && c1 > 0.0) || !c0.is_finite() || !c1.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "cost",
                    reason: "Bayes costs must be positive and finite",
                });
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, priors: &PriorParams, rates: &RatePair) -> f64 {
        match *self {
            Self::Nmi => nmi(priors, rates),
            Self::MisclassificationPe => misclassification(priors, rates),
            Self::BayesCost { c0, c1 } => bayes_cost(priors, rates, c0, c1),
        }
    }

    /// True for objectives to maximize.
    pub fn maximizes(&self) -> bool {
        matches!(self, Self::Nmi)
    }

    /// Objective mapped so that larger is always better.
    fn score(&self, priors: &PriorParams, rates: &RatePair) -> f64 {
        let v = self.evaluate(priors, rates);
        if self.maximizes() {
            v
        } else {
            -v
        }
    }
}

/// Closed-form `α(Γ)` of the linear far-field detector with `cols` samples per station.
pub fn ffa_alpha(gamma: f64, geom: &NetworkGeometry, params: &ChannelParams, cols: usize) -> Result<f64> {
    Ok(ffa_rates(gamma, &FfaDetector::new(geom, params), cols)?.alpha)
}

/// Closed-form `β(Γ)` of the linear far-field detector against a far-field attacker.
pub fn ffa_beta(gamma: f64, geom: &NetworkGeometry, params: &ChannelParams, cols: usize) -> Result<f64> {
    Ok(ffa_rates(gamma, &FfaDetector::new(geom, params), cols)?.beta)
}

/// Both closed-form rates at `Γ`, reusing a prepared detector.
pub fn ffa_rates(gamma: f64, detector: &FfaDetector, cols: usize) -> Result<RatePair> {
    detector.ensure_usable()?;
    let sd = math::sqrt(detector.statistic_variance(cols));
    Ok(RatePair {
        alpha: q_function((gamma - detector.h0_mean(cols)) / sd),
        beta: q_function((gamma - detector.h1_mean(cols)) / sd),
    })
}

/// Closed-form rate curve of the linear far-field detector optimized for
/// `objective`, with `grid` in `ln T_Λ`.
pub fn ffa_optimal_threshold(
    detector: &FfaDetector,
    cols: usize,
    priors: &PriorParams,
    grid: &[f64],
    objective: ObjectiveKind,
) -> Result<ThresholdResult> {
    detector.ensure_usable()?;
    let rates = |log_t: f64| {
        ffa_rates(detector.gamma_from_log_t(log_t, cols), detector, cols).expect("detector checked usable")
    };
    optimize_threshold(&CurveSource::Analytic { grid, rates: &rates }, priors, objective)
}

/// One row of a rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub log_threshold: f64,
    pub alpha: f64,
    pub beta: f64,
    pub nmi: f64,
    pub pe: f64,
}

impl CurveRow {
    pub fn rates(&self) -> RatePair {
        RatePair {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Where `(α, β)` as a function of `ln T_Λ` comes from.
pub enum CurveSource<'a> {
    /// Noise-free rates that can be evaluated anywhere; refined off-grid.
    Analytic {
        grid: &'a [f64],
        rates: &'a dyn Fn(f64) -> RatePair,
    },
    /// Rates known only at the grid points, e.g. Monte Carlo estimates.
    Tabulated { grid: &'a [f64], rates: &'a [RatePair] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub optimal_log_threshold: f64,
    pub objective_value: f64,
    pub optimal_rates: RatePair,
    /// Ordered by threshold; contains the optimum.
    pub curve: Vec<CurveRow>,
}

impl ThresholdResult {
    /// Curve row at the optimum.
    pub fn optimal_row(&self) -> CurveRow {
        *self
            .curve
            .iter()
            .find(|r| r.log_threshold == self.optimal_log_threshold)
            .expect("optimum is a curve row")
    }
}

fn row(log_threshold: f64, rates: RatePair, priors: &PriorParams) -> CurveRow {
    CurveRow {
        log_threshold,
        alpha: rates.alpha,
        beta: rates.beta,
        nmi: nmi(priors, &rates),
        pe: misclassification(priors, &rates),
    }
}

/// Index of the best score; the lowest threshold wins ties.
fn argbest(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

/// Grid search for the best threshold, refined by golden section on the
/// winning bracket when the curve is analytic.
pub fn optimize_threshold(
    source: &CurveSource<'_>,
    priors: &PriorParams,
    objective: ObjectiveKind,
) -> Result<ThresholdResult> {
    objective.validate()?;
    let grid = match source {
        CurveSource::Analytic { grid, .. } => *grid,
        CurveSource::Tabulated { grid, rates } => {
            if rates.len() != grid.len() {
                return Err(Error::DegenerateCurve);
            }
            *grid
        }
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateCurve);
    }
    let rates: Vec<RatePair> = match source {
        CurveSource::Analytic { rates, .. } => grid.iter().map(|&t| rates(t)).collect(),
        CurveSource::Tabulated { rates, .. } => rates.to_vec(),
    };
    let mut curve: Vec<CurveRow> = grid.iter().zip(&rates).map(|(&t, &r)| row(t, r, priors)).collect();
    let scores: Vec<f64> = rates.iter().map(|r| objective.score(priors, r)).collect();
    let i = argbest(&scores).ok_or(Error::DegenerateCurve)?;
    let (mut best_t, mut best_rates) = (grid[i], rates[i]);

    if let CurveSource::Analytic { rates: f, .. } = source {
        if grid.len() > 1 {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(grid.len() - 1)];
            let tol = 1e-9 * (1.0 + (hi - lo).abs());
            let (t, s) = math::golden_section_max(|t| objective.score(priors, &f(t)), lo, hi, tol);
            if s > scores[i] {
                best_t = t;
                best_rates = f(t);
                let at = curve.partition_point(|r| r.log_threshold < t);
                if curve.get(at).is_none_or(|r| r.log_threshold != t) {
                    curve.insert(at, row(t, best_rates, priors));
                }
            }
        }
    }
    Ok(ThresholdResult {
        optimal_log_threshold: best_t,
        objective_value: objective.evaluate(priors, &best_rates),
        optimal_rates: best_rates,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::ffa_gamma_from_log_t;
    use crate::math::linspace;
    use crate::model::{sample_far_field, sample_legitimate, Point2D};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn priors(p0: f64) -> PriorParams {
        PriorParams::new(p0).unwrap()
    }

    /// `H(X|Y) = −Σ P(x,y) log₂ P(x|y)` from an explicit joint table.
    fn joint_table_conditional_entropy(p0: f64, alpha: f64, beta: f64) -> f64 {
        let joint = [[p0 * (1.0 - alpha), p0 * alpha], [(1.0 - p0) * (1.0 - beta), (1.0 - p0) * beta]];
        let mut h = 0.0;
        for y in 0..2 {
            let py = joint[0][y] + joint[1][y];
            for x_row in &joint {
                let pxy = x_row[y];
                if pxy > 0.0 {
                    h -= pxy * (pxy / py).log2();
                }
            }
        }
        h
    }

    #[test]
    fn q_function_values() {
        assert_eq!(q_function(0.0), 0.5);
        for x in [0.5, 1.0, 2.0] {
            assert!((q_function(-x) + q_function(x) - 1.0).abs() < 1e-15);
        }
        // Midpoint rule on the Gaussian tail out to x + 12.
        let x = 1.6449;
        let n = 200_000;
        let h = 12.0 / n as f64;
        let tail: f64 = (0..n)
            .map(|k| {
                let t = x + (k as f64 + 0.5) * h;
                (-0.5 * t * t).exp()
            })
            .sum::<f64>()
            * h
            / (2.0 * core::f64::consts::PI).sqrt();
        assert!((q_function(x) - tail).abs() < 1e-9);
        assert!((q_function(x) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        let direct = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert!((binary_entropy(0.9) - direct).abs() < 1e-15);
        assert!((binary_entropy(0.9) - 0.4690).abs() < 1e-4);
    }

    #[test]
    fn conditional_entropy_examples() {
        let p = priors(0.9);
        assert_eq!(conditional_entropy(&p, &RatePair::new(0.0, 1.0).unwrap()), 0.0);
        for a in [0.0, 0.1, 0.5, 1.0] {
            let h = conditional_entropy(&p, &RatePair::new(a, a).unwrap());
            assert!((h - binary_entropy(0.9)).abs() < 1e-12);
        }
        let r = RatePair::new(0.04, 0.90).unwrap();
        let oracle = joint_table_conditional_entropy(0.9, 0.04, 0.90);
        assert!((conditional_entropy(&p, &r) - oracle).abs() < 1e-12);
        let mi_oracle = binary_entropy(0.9) - oracle;
        assert!((mutual_information(&p, &r) - mi_oracle).abs() < 1e-12);
        assert!((nmi(&p, &r) - mi_oracle / binary_entropy(0.9)).abs() < 1e-12);
    }

    #[test]
    fn nmi_and_pe_boundaries() {
        let p = priors(0.9);
        assert_eq!(nmi(&p, &RatePair::new(0.3, 0.3).unwrap()), 0.0);
        assert!((nmi(&p, &RatePair::new(0.0, 1.0).unwrap()) - 1.0).abs() < 1e-15);
        assert_eq!(misclassification(&p, &RatePair::new(0.0, 1.0).unwrap()), 0.0);
        assert!((misclassification(&p, &RatePair::new(1.0, 0.0).unwrap()) - 1.0).abs() < 1e-15);
        let pe = misclassification(&p, &RatePair::new(0.04, 0.90).unwrap());
        assert!((pe - (0.9 * 0.04 + 0.1 * 0.1)).abs() < 1e-15);
        assert!((pe - 0.046).abs() < 1e-12);
        let c = bayes_cost(&p, &RatePair::new(0.04, 0.90).unwrap(), 2.0, 3.0);
        assert!((c - (0.9 * 0.04 * 2.0 + 0.1 * 0.1 * 3.0)).abs() < 1e-15);
        assert!(RatePair::new(1.1, 0.5).is_err());
        assert!(ObjectiveKind::BayesCost { c0: 0.0, c1: 1.0 }.validate().is_err());
    }

    #[test]
    fn mutual_information_increases_with_detection_rate() {
        for p0 in linspace(0.01, 0.99, 25) {
            let p = priors(p0);
            for alpha in linspace(0.0, 0.95, 20) {
                let betas = linspace(alpha, 1.0, 60);
                let mut last = mutual_information(&p, &RatePair::new(alpha, betas[0]).unwrap());
                for &beta in &betas[1..] {
                    let mi = mutual_information(&p, &RatePair::new(alpha, beta).unwrap());
                    assert!(mi > last, "p0={p0} alpha={alpha} beta={beta}");
                    last = mi;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn information_measures_stay_in_range(p0 in 0.001f64..0.999, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let p = priors(p0);
            let r = RatePair::new(a, b).unwrap();
            let h = conditional_entropy(&p, &r);
            prop_assert!(h >= 0.0 && h <= binary_entropy(p0));
            prop_assert!((h - joint_table_conditional_entropy(p0, a, b)).abs() < 1e-12);
            let n = nmi(&p, &r);
            prop_assert!((0.0..=1.0).contains(&n));
        }
    }

    fn ten_station_geometry(seed: u64) -> NetworkGeometry {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bs = (0..10)
            .map(|_| Point2D::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0)))
            .collect();
        NetworkGeometry::new(bs, Point2D::ORIGIN).unwrap()
    }

    #[test]
    fn ffa_rate_examples() {
        let g = ten_station_geometry(3);
        let p = ChannelParams::new(3.0, 5.0).unwrap();
        let det = FfaDetector::new(&g, &p);
        assert!((ffa_alpha(det.h0_mean(1), &g, &p, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((ffa_beta(0.0, &g, &p, 1).unwrap() - 0.5).abs() < 1e-9);
        let mut last = RatePair::new(1.0, 1.0).unwrap();
        for gamma in linspace(-5000.0, 5000.0, 200) {
            let r = ffa_rates(gamma, &det, 1).unwrap();
            assert!(r.beta >= r.alpha);
            assert!(r.alpha <= last.alpha && r.beta <= last.beta);
            last = r;
        }
        let square = crate::likelihood::tests::square();
        assert_eq!(ffa_alpha(0.0, &square, &p, 1), Err(Error::DegenerateStatistic));
    }

    #[test]
    fn ffa_rates_match_simulation() {
        let g = ten_station_geometry(4);
        let p = ChannelParams::new(3.0, 5.0).unwrap();
        let det = FfaDetector::new(&g, &p);
        let trials = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut f0: Vec<f64> = (0..trials)
            .map(|_| det.statistic(&sample_legitimate(&g, &p, 1, &mut rng).unwrap()).unwrap())
            .collect();
        let mut f1: Vec<f64> = (0..trials)
            .map(|_| det.statistic(&sample_far_field(&g, &p, 1, &mut rng).unwrap()).unwrap())
            .collect();
        f0.sort_by(f64::total_cmp);
        f1.sort_by(f64::total_cmp);
        let sd = det.statistic_variance(1).sqrt();
        let grid = linspace(det.h0_mean(1) - 2.0 * sd, 2.0 * sd, 50);
        let mut inside = 0;
        for &gamma in &grid {
            let exact = ffa_rates(gamma, &det, 1).unwrap();
            let frac = |v: &[f64]| (v.len() - v.partition_point(|&x| x < gamma)) as f64 / trials as f64;
            let ok = |est: f64, p: f64| (est - p).abs() <= 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
            if ok(frac(&f0), exact.alpha) && ok(frac(&f1), exact.beta) {
                inside += 1;
            }
        }
        assert!(inside >= 48, "{inside}");
    }

    #[test]
    fn balanced_priors_optimize_at_unit_ratio() {
        let g = ten_station_geometry(5);
        let p = ChannelParams::new(3.0, 5.0).unwrap();
        let det = FfaDetector::new(&g, &p);
        let rates = |t: f64| ffa_rates(ffa_gamma_from_log_t(t, &g, &p, 1), &det, 1).unwrap();
        let grid = linspace(-25.0, 25.0, 201);
        let source = CurveSource::Analytic { grid: &grid, rates: &rates };
        let half = priors(0.5);
        let by_nmi = optimize_threshold(&source, &half, ObjectiveKind::Nmi).unwrap();
        let by_pe = optimize_threshold(&source, &half, ObjectiveKind::MisclassificationPe).unwrap();
        assert!(by_nmi.optimal_log_threshold.abs() < 0.25, "{}", by_nmi.optimal_log_threshold);
        assert!(by_pe.optimal_log_threshold.abs() < 1e-6, "{}", by_pe.optimal_log_threshold);
        assert_eq!(by_nmi.optimal_row().nmi, by_nmi.objective_value);
        assert!(by_nmi.curve.windows(2).all(|w| w[0].log_threshold < w[1].log_threshold));
    }

    #[test]
    fn perfect_separation_yields_unit_nmi() {
        let grid = linspace(-2.0, 2.0, 9);
        let rates: Vec<RatePair> = grid
            .iter()
            .map(|&t| {
                if t < -1.0 {
                    RatePair::new(1.0, 1.0).unwrap()
                } else if t <= 1.0 {
                    RatePair::new(0.0, 1.0).unwrap()
                } else {
                    RatePair::new(0.0, 0.0).unwrap()
                }
            })
            .collect();
        let res = optimize_threshold(
            &CurveSource::Tabulated {
                grid: &grid,
                rates: &rates,
            },
            &priors(0.9),
            ObjectiveKind::Nmi,
        )
        .unwrap();
        assert!((res.objective_value - 1.0).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&res.optimal_log_threshold));
    }

    #[test]
    fn degenerate_curves() {
        let p = priors(0.9);
        let empty = CurveSource::Tabulated { grid: &[], rates: &[] };
        assert_eq!(optimize_threshold(&empty, &p, ObjectiveKind::Nmi), Err(Error::DegenerateCurve));
        let grid = [0.0, 1.0];
        let flat = [RatePair::new(0.2, 0.2).unwrap(); 2];
        let res = optimize_threshold(
            &CurveSource::Tabulated {
                grid: &grid,
                rates: &flat,
            },
            &p,
            ObjectiveKind::Nmi,
        )
        .unwrap();
        assert_eq!(res.objective_value, 0.0);
        let unsorted = [1.0, 0.0];
        let bad = CurveSource::Tabulated {
            grid: &unsorted,
            rates: &flat,
        };
        assert_eq!(optimize_threshold(&bad, &p, ObjectiveKind::Nmi), Err(Error::DegenerateCurve));
    }
}
