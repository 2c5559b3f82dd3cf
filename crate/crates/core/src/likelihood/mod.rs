//! Likelihoods under both hypotheses and the statistics built from them.
//!
//! Everything is kept in the log domain. Ratio thresholds are carried as
//! `ln T_Λ`; a measurement is rejected (not verified) when its statistic is
//! greater than or equal to the threshold.

mod laplace;
mod marginal;

pub use laplace::{
    laplace_log_integral_1d, laplace_log_integral_2d, laplace_map_estimate, laplace_or_marginal, log_lik_h1_laplace,
    LaplaceEstimate, LaplaceStatus, MapEstimate, HESSIAN_STEP_M,
};
pub use marginal::{log_lik_h1_marginal, IntegrationMethod, IntegrationSpec, MarginalTable, MIN_NODES};

use alloc::vec::Vec;

use crate::adversary::{attacker_means, far_field_means};
use crate::error::{Error, Result};
use crate::math::{self, LN_2PI};
use crate::model::{claimed_means, mean, ChannelParams, MeasurementMatrix, NetworkGeometry, Point2D};

/// Natural-log density of a measurement matrix.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogLikelihood(pub f64);

impl LogLikelihood {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `Σᵢ Σ_ℓ ln N(m_iℓ; meansᵢ, σ²)`.
pub fn gaussian_log_lik(m: &MeasurementMatrix, means: &[f64], sigma_db: f64) -> Result<LogLikelihood> {
    m.check_rows(means.len())?;
    let var = sigma_db * sigma_db;
    let mut ss = 0.0;
    for (i, mu) in means.iter().enumerate() {
        for x in m.row(i) {
            let r = x - mu;
            ss += r * r;
        }
    }
    let n = m.values().len() as f64;
    Ok(LogLikelihood(-0.5 * n * (LN_2PI + math::ln(var)) - ss / (2.0 * var)))
}

/// `ln p(m | H0)`: legitimate user at the claimed position.
pub fn log_lik_h0(m: &MeasurementMatrix, geom: &NetworkGeometry, params: &ChannelParams) -> Result<LogLikelihood> {
    gaussian_log_lik(m, &claimed_means(geom, params), params.shadowing_sigma_db)
}

/// `ln p(m | θ, H1)` for an attacker at `true_pos` using the optimal boost.
pub fn log_lik_h1_given_theta(
    m: &MeasurementMatrix,
    geom: &NetworkGeometry,
    params: &ChannelParams,
    true_pos: Point2D,
) -> Result<LogLikelihood> {
    gaussian_log_lik(m, &attacker_means(geom, params, true_pos)?, params.shadowing_sigma_db)
}

/// `ln p(m | H1)` under the far-field approximation.
pub fn log_lik_h1_ffa(m: &MeasurementMatrix, geom: &NetworkGeometry, params: &ChannelParams) -> Result<LogLikelihood> {
    gaussian_log_lik(m, &far_field_means(geom, params), params.shadowing_sigma_db)
}

/// Which statistic a decision rule thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticKind {
    /// `ln Λ` with the exact alternative likelihood of the threat model
    /// (numerical marginal for circle/annulus, closed form for far field).
    LrtExact,
    /// `ln Λ` with the far-field alternative, whatever the threat model.
    LrtFfa,
    /// `ln Λ` with the Laplace-approximated marginal.
    LrtLaplace,
    /// The linear far-field statistic `F(m)`, thresholded by `Γ`.
    FfaLinear,
    /// `|m̄ₙ − μₙᶜ|` at the base station nearest the claim. Not a likelihood
    /// ratio; kept as a baseline detector.
    NearestResidual,
    /// A standard normal draw independent of the data; the chance line.
    RandomGuess,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 6] = [
        Self::LrtExact,
        Self::LrtFfa,
        Self::LrtLaplace,
        Self::FfaLinear,
        Self::NearestResidual,
        Self::RandomGuess,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::LrtExact => "lrt_exact",
            Self::LrtFfa => "lrt_ffa",
            Self::LrtLaplace => "lrt_laplace",
            Self::FfaLinear => "ffa_linear",
            Self::NearestResidual => "nearest_residual",
            Self::RandomGuess => "random_guess",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether the statistic is `ln Λ`, so that a grid of `ln T_Λ` applies
    /// directly.
    pub fn is_log_ratio(&self) -> bool {
        matches!(self, Self::LrtExact | Self::LrtFfa | Self::LrtLaplace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Verified,
    NotVerified,
}

/// Rejects iff `statistic ≥ threshold`.
pub fn decide(statistic: f64, threshold: f64) -> Decision {
    if statistic >= threshold {
        Decision::NotVerified
    } else {
        Decision::Verified
    }
}

/// A statistic kind paired with its threshold (`ln T_Λ`, or `Γ` for the
/// linear far-field statistic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRule {
    pub kind: StatisticKind,
    pub threshold: f64,
}

impl DecisionRule {
    pub fn new(kind: StatisticKind, threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::InvalidParameter {
                name: "threshold",
                reason: "must be finite",
            });
        }
        Ok(Self { kind, threshold })
    }

    pub fn decide(&self, statistic: f64) -> Decision {
        decide(statistic, self.threshold)
    }
}

/// The far-field detector in linear form.
///
/// With weights `wᵢ = μ̄ᶜ − μᵢᶜ` the log-likelihood ratio reduces to
/// `ln Λ = (F(m) + L·½Σ(μᵢᶜ² − μ̄ᶜ²)) / σ²` where `F(m) = Σᵢ wᵢ Σ_ℓ m_iℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FfaDetector {
    claimed_means: Vec<f64>,
    mean_of_claimed: f64,
    weights: Vec<f64>,
    /// `Σ (μᵢᶜ − μ̄ᶜ)²`.
    spread: f64,
    /// `½ Σ (μᵢᶜ² − μ̄ᶜ²)`.
    offset: f64,
    variance: f64,
}

impl FfaDetector {
    pub fn new(geom: &NetworkGeometry, params: &ChannelParams) -> Self {
        let claimed_means = claimed_means(geom, params);
        let mean_of_claimed = mean(&claimed_means);
        let weights: Vec<f64> = claimed_means.iter().map(|m| mean_of_claimed - m).collect();
        let spread = weights.iter().map(|w| w * w).sum();
        let offset = 0.5
            * claimed_means
                .iter()
                .map(|m| m * m - mean_of_claimed * mean_of_claimed)
                .sum::<f64>();
        Self {
            claimed_means,
            mean_of_claimed,
            weights,
            spread,
            offset,
            variance: params.variance(),
        }
    }

    pub fn claimed_means(&self) -> &[f64] {
        &self.claimed_means
    }

    pub fn mean_of_claimed(&self) -> f64 {
        self.mean_of_claimed
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ (μᵢᶜ − μ̄ᶜ)²`; zero when every base station is equidistant.
    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// True when the statistic carries no information.
    pub fn is_degenerate(&self) -> bool {
        let scale = 1.0 + self.claimed_means.iter().map(|m| m * m).sum::<f64>();
        self.spread <= 1e-24 * scale
    }

    pub fn ensure_usable(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateStatistic)
        } else {
            Ok(())
        }
    }

    /// `F(m) = Σᵢ mᵢ (μ̄ᶜ − μᵢᶜ)`, summed over columns.
    pub fn statistic(&self, m: &MeasurementMatrix) -> Result<f64> {
        m.check_rows(self.weights.len())?;
        Ok(self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * m.row(i).iter().sum::<f64>())
            .sum())
    }

    /// `Γ = σ² ln T_Λ − L·½Σ(μᵢᶜ² − μ̄ᶜ²)`.
    pub fn gamma_from_log_t(&self, log_t: f64, cols: usize) -> f64 {
        self.variance * log_t - cols as f64 * self.offset
    }

    pub fn log_t_from_gamma(&self, gamma: f64, cols: usize) -> f64 {
        (gamma + cols as f64 * self.offset) / self.variance
    }

    /// `ln Λ(m)` via the linear statistic.
    pub fn log_ratio(&self, m: &MeasurementMatrix) -> Result<f64> {
        Ok(self.log_t_from_gamma(self.statistic(m)?, m.cols()))
    }

    /// Mean of `F` under H0: `L Σ μᵢᶜ (μ̄ᶜ − μᵢᶜ)`.
    pub fn h0_mean(&self, cols: usize) -> f64 {
        cols as f64 * self.claimed_means.iter().zip(&self.weights).map(|(m, w)| m * w).sum::<f64>()
    }

    /// Mean of `F` under the far-field H1: `L Σ μ̄ᶜ (μ̄ᶜ − μᵢᶜ)`, zero up to rounding.
    pub fn h1_mean(&self, cols: usize) -> f64 {
        cols as f64 * self.mean_of_claimed * self.weights.iter().sum::<f64>()
    }

    /// Variance of `F` under either hypothesis: `L Σ (μ̄ᶜ − μᵢᶜ)² σ²`.
    pub fn statistic_variance(&self, cols: usize) -> f64 {
        cols as f64 * self.spread * self.variance
    }
}

/// `F(m)` for the given geometry.
pub fn ffa_statistic(m: &MeasurementMatrix, geom: &NetworkGeometry, params: &ChannelParams) -> Result<f64> {
    FfaDetector::new(geom, params).statistic(m)
}

/// Maps a ratio threshold `ln T_Λ` onto the linear-statistic threshold `Γ`.
pub fn ffa_gamma_from_log_t(log_t: f64, geom: &NetworkGeometry, params: &ChannelParams, cols: usize) -> f64 {
    FfaDetector::new(geom, params).gamma_from_log_t(log_t, cols)
}

/// Inverse of [`ffa_gamma_from_log_t`].
pub fn ffa_log_t_from_gamma(gamma: f64, geom: &NetworkGeometry, params: &ChannelParams, cols: usize) -> f64 {
    FfaDetector::new(geom, params).log_t_from_gamma(gamma, cols)
}

/// Numerator of the likelihood ratio.
#[derive(Debug, Clone, Copy)]
pub enum Alternative<'a> {
    FarField,
    /// Attacker position known; diagnostic only.
    KnownPosition(Point2D),
    Marginal(&'a MarginalTable),
    /// Laplace approximation, with the table used when it has to fall back.
    Laplace(&'a MarginalTable),
}

/// `ln Λ(m) = ln p(m|H1) − ln p(m|H0)`.
pub fn log_likelihood_ratio(
    m: &MeasurementMatrix,
    geom: &NetworkGeometry,
    params: &ChannelParams,
    alternative: Alternative<'_>,
) -> Result<f64> {
    let h0 = log_lik_h0(m, geom, params)?.0;
    let h1 = match alternative {
        Alternative::FarField => log_lik_h1_ffa(m, geom, params)?.0,
        Alternative::KnownPosition(p) => log_lik_h1_given_theta(m, geom, params, p)?.0,
        Alternative::Marginal(table) => table.log_marginal(m)?,
        Alternative::Laplace(table) => laplace::laplace_or_marginal(m, geom, params, table)?.0.0,
    };
    Ok(h1 - h0)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn square() -> NetworkGeometry {
        NetworkGeometry::new(
            alloc::vec![
                Point2D::new(100.0, 0.0),
                Point2D::new(-100.0, 0.0),
                Point2D::new(0.0, 100.0),
                Point2D::new(0.0, -100.0),
            ],
            Point2D::ORIGIN,
        )
        .unwrap()
    }

    pub(crate) fn irregular() -> NetworkGeometry {
        NetworkGeometry::new(
            alloc::vec![
                Point2D::new(62.0, 14.0),
                Point2D::new(-35.0, 80.0),
                Point2D::new(-90.0, -40.0),
                Point2D::new(20.0, -70.0),
                Point2D::new(5.0, 30.0),
            ],
            Point2D::ORIGIN,
        )
        .unwrap()
    }

    fn channel() -> ChannelParams {
        ChannelParams::new(3.0, 5.0).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MeasurementMatrix {
        let values = (0..rows * cols).map(|_| rng.random_range(-90.0..-20.0)).collect();
        MeasurementMatrix::new(rows, cols, values).unwrap()
    }

    /// Product of densities, then the log.
    fn naive_log_lik(m: &MeasurementMatrix, means: &[f64], sigma: f64) -> f64 {
        let mut log_total = 0.0;
        for (i, mu) in means.iter().enumerate() {
            for x in m.row(i) {
                let z = (x - mu) / sigma;
                let density = libm::exp(-0.5 * z * z) / (libm::sqrt(2.0 * core::f64::consts::PI) * sigma);
                log_total += libm::log(density);
            }
        }
        log_total
    }

    #[test]
    fn h0_zero_residual_and_unit_offset() {
        let g = irregular();
        let p = channel();
        let mu = claimed_means(&g, &p);
        let m = MeasurementMatrix::from_means(&mu, 2).unwrap();
        let expected = 5.0 * 2.0 * libm::log(1.0 / (libm::sqrt(2.0 * core::f64::consts::PI) * 5.0));
        assert!((log_lik_h0(&m, &g, &p).unwrap().0 - expected).abs() < 1e-10);

        let mut values = m.values().to_vec();
        values[3] += 5.0;
        let shifted = MeasurementMatrix::new(5, 2, values).unwrap();
        let drop = log_lik_h0(&m, &g, &p).unwrap().0 - log_lik_h0(&shifted, &g, &p).unwrap().0;
        assert!((drop - 0.5).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_match_density_product_oracle() {
        let g = irregular();
        let p = channel();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 5, 3);
            let theta = Point2D::new(rng.random_range(-400.0..400.0), rng.random_range(200.0..400.0));
            let h0 = naive_log_lik(&m, &claimed_means(&g, &p), 5.0);
            let h1t = naive_log_lik(&m, &attacker_means(&g, &p, theta).unwrap(), 5.0);
            let h1f = naive_log_lik(&m, &far_field_means(&g, &p), 5.0);
            assert!((log_lik_h0(&m, &g, &p).unwrap().0 - h0).abs() < 1e-10);
            assert!((log_lik_h1_given_theta(&m, &g, &p, theta).unwrap().0 - h1t).abs() < 1e-10);
            assert!((log_lik_h1_ffa(&m, &g, &p).unwrap().0 - h1f).abs() < 1e-10);
        }
    }

    #[test]
    fn h1_given_theta_at_claimed_equals_h0() {
        let g = irregular();
        let p = channel();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(&mut rng, 5, 1);
        let a = log_lik_h1_given_theta(&m, &g, &p, Point2D::ORIGIN).unwrap().0;
        let b = log_lik_h0(&m, &g, &p).unwrap().0;
        assert!((a - b).abs() < 1e-10);

        let theta = Point2D::new(150.0, 260.0);
        let at_means = MeasurementMatrix::from_means(&attacker_means(&g, &p, theta).unwrap(), 1).unwrap();
        let expected = 5.0 * libm::log(1.0 / (libm::sqrt(2.0 * core::f64::consts::PI) * 5.0));
        assert!((log_lik_h1_given_theta(&at_means, &g, &p, theta).unwrap().0 - expected).abs() < 1e-10);
    }

    #[test]
    fn ffa_likelihood_examples() {
        let g = irregular();
        let p = channel();
        let m = MeasurementMatrix::from_means(&far_field_means(&g, &p), 3).unwrap();
        let expected = 15.0 * libm::log(1.0 / (libm::sqrt(2.0 * core::f64::consts::PI) * 5.0));
        assert!((log_lik_h1_ffa(&m, &g, &p).unwrap().0 - expected).abs() < 1e-10);

        let sym = square();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 4, 2);
            let a = log_lik_h1_ffa(&m, &sym, &p).unwrap().0;
            let b = log_lik_h0(&m, &sym, &p).unwrap().0;
            assert!((a - b).abs() < 1e-9);
            let lr = log_likelihood_ratio(&m, &sym, &p, Alternative::FarField).unwrap();
            assert!(lr.abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = MeasurementMatrix::new(3, 1, alloc::vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(log_lik_h0(&m, &irregular(), &channel()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ffa_statistic_examples() {
        let p = channel();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sym = square();
        let m = random_matrix(&mut rng, 4, 1);
        assert!(ffa_statistic(&m, &sym, &p).unwrap().abs() < 1e-9);

        let g = irregular();
        let det = FfaDetector::new(&g, &p);
        let mu = claimed_means(&g, &p);
        let mu_bar = mean(&mu);
        let legit = MeasurementMatrix::from_means(&mu, 1).unwrap();
        let expected: f64 = -mu.iter().map(|m| (m - mu_bar) * (m - mu_bar)).sum::<f64>();
        assert!((det.statistic(&legit).unwrap() - expected).abs() < 1e-9);
        let ffa = MeasurementMatrix::from_means(&far_field_means(&g, &p), 1).unwrap();
        assert!(det.statistic(&ffa).unwrap().abs() < 1e-9);
    }

    #[test]
    fn ffa_log_ratio_identity() {
        let g = irregular();
        let p = channel();
        let det = FfaDetector::new(&g, &p);
        let mu = claimed_means(&g, &p);
        let mu_bar = mean(&mu);
        let half_sum: f64 = 0.5 * mu.iter().map(|m| m * m - mu_bar * mu_bar).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 5, 1);
            let lr = log_likelihood_ratio(&m, &g, &p, Alternative::FarField).unwrap();
            let via_f = (det.statistic(&m).unwrap() + half_sum) / 25.0;
            assert!((lr - via_f).abs() < 1e-9, "{lr} vs {via_f}");
        }
    }

    #[test]
    fn ffa_statistic_moments() {
        let g = irregular();
        let p = channel();
        let det = FfaDetector::new(&g, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 100_000;
        let cols = 2;
        let sd = det.statistic_variance(cols).sqrt();
        for (h1, expected) in [(false, det.h0_mean(cols)), (true, det.h1_mean(cols))] {
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let m = if h1 {
                    crate::model::sample_far_field(&g, &p, cols, &mut rng).unwrap()
                } else {
                    crate::model::sample_legitimate(&g, &p, cols, &mut rng).unwrap()
                };
                let f = det.statistic(&m).unwrap();
                s += f;
                s2 += f * f;
            }
            let mean_f = s / n as f64;
            let var_f = s2 / n as f64 - mean_f * mean_f;
            assert!((mean_f - expected).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean_f} vs {expected}");
            // Standard error of a normal sample variance is var·√(2/n).
            let var_se = sd * sd * (2.0 / n as f64).sqrt();
            assert!((var_f - sd * sd).abs() < 3.0 * var_se, "{var_f} vs {}", sd * sd);
        }
    }

    #[test]
    fn gamma_mapping() {
        let g = irregular();
        let p = channel();
        let det = FfaDetector::new(&g, &p);
        let mu = claimed_means(&g, &p);
        let mu_bar = mean(&mu);
        let at_one = -0.5 * mu.iter().map(|m| m * m - mu_bar * mu_bar).sum::<f64>();
        assert!((ffa_gamma_from_log_t(0.0, &g, &p, 1) - at_one).abs() < 1e-12);
        for &lt in &[-20.0, -1.5, 0.0, 0.3, 7.0, 25.0] {
            let gamma = det.gamma_from_log_t(lt, 1);
            let back = det.log_t_from_gamma(gamma, 1);
            assert!((back - lt).abs() < 1e-12);
            assert!(det.gamma_from_log_t(lt + 0.1, 1) > gamma);
        }
    }

    #[test]
    fn linear_and_ratio_decisions_agree() {
        let g = irregular();
        let p = channel();
        let det = FfaDetector::new(&g, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mu = claimed_means(&g, &p);
        for i in 0..100_000 {
            let means = if i % 2 == 0 { mu.clone() } else { far_field_means(&g, &p) };
            let m = crate::model::sample_with_means(&means, 5.0, 1, &mut rng).unwrap();
            let log_t: f64 = rng.random_range(-10.0..10.0);
            let lr = log_lik_h1_ffa(&m, &g, &p).unwrap().0 - log_lik_h0(&m, &g, &p).unwrap().0;
            let f = det.statistic(&m).unwrap();
            let gamma = det.gamma_from_log_t(log_t, 1);
            // Skip draws within rounding distance of the boundary.
            if (lr - log_t).abs() < 1e-9 {
                continue;
            }
            assert_eq!(decide(lr, log_t), decide(f, gamma));
            assert_eq!(decide(libm::exp(lr), libm::exp(log_t)), decide(lr, log_t));
        }
    }

    #[test]
    fn decide_examples() {
        assert_eq!(decide(1.0, 1.0), Decision::NotVerified);
        assert_eq!(decide(f64::NEG_INFINITY, 0.0), Decision::Verified);
        assert_eq!(decide(f64::INFINITY, 0.0), Decision::NotVerified);
        assert!(DecisionRule::new(StatisticKind::LrtFfa, f64::NAN).is_err());
        let r = DecisionRule::new(StatisticKind::LrtExact, 0.5).unwrap();
        assert_eq!(r.decide(0.49), Decision::Verified);
    }

    #[test]
    fn known_position_ratio_is_difference_of_log_liks() {
        let g = irregular();
        let p = channel();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let m = random_matrix(&mut rng, 5, 2);
        let theta = Point2D::new(-300.0, 120.0);
        let lr = log_likelihood_ratio(&m, &g, &p, Alternative::KnownPosition(theta)).unwrap();
        let direct = log_lik_h1_given_theta(&m, &g, &p, theta).unwrap().0 - log_lik_h0(&m, &g, &p).unwrap().0;
        assert!((lr - direct).abs() < 1e-12);
    }

    #[test]
    fn statistic_names_round_trip() {
        for k in StatisticKind::ALL {
            assert_eq!(StatisticKind::from_name(k.name()), Some(k));
        }
        assert_eq!(StatisticKind::from_name("nope"), None);
    }

    proptest::proptest! {
        /// Reference power and distance only shift every mean by one constant,
        /// so a likelihood ratio is unchanged once the data shift with them.
        #[test]
        fn ratios_ignore_reference_power_and_distance(
            ref_power in -60.0f64..60.0,
            ref_distance in 0.1f64..50.0,
            seed in 0u64..1000,
            u in -400.0f64..400.0,
            v in 150.0f64..400.0,
        ) {
            let g = irregular();
            let base = channel();
            let moved = ChannelParams::with_reference(ref_power, ref_distance, 3.0, 5.0).unwrap();
            let shift = ref_power + 30.0 * libm::log10(ref_distance);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, 5, 2);
            let shifted = MeasurementMatrix::new(5, 2, m.values().iter().map(|x| x + shift).collect()).unwrap();
            for alt in [Alternative::FarField, Alternative::KnownPosition(Point2D::new(u, v))] {
                let a = log_likelihood_ratio(&m, &g, &base, alt).unwrap();
                let b = log_likelihood_ratio(&shifted, &g, &moved, alt).unwrap();
                proptest::prop_assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn no_underflow_for_large_problems() {
        let g = irregular();
        let p = ChannelParams::new(3.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let m = random_matrix(&mut rng, 5, 2000);
        let lr = log_likelihood_ratio(&m, &g, &p, Alternative::FarField).unwrap();
        assert!(lr.is_finite());
    }
}
