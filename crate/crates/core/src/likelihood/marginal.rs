//! Marginal likelihood `p(m|H1) = ∫ p(m|θ,H1) p(θ|H1) dθ` for the circle and
//! annulus threat models.
//!
//! The integral is replaced by a weighted sum over attacker positions. The
//! per-node mean vectors do not depend on the measurements, so they are built
//! once into a [`MarginalTable`] and reused for every trial.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LogLikelihood;
use crate::adversary::{attacker_means, sample_true_position, ThreatModel, TruePosition};
use crate::error::{Error, Result};
use crate::math::{self, LN_2PI};
use crate::model::{ChannelParams, MeasurementMatrix, NetworkGeometry, Point2D};

/// Smallest accepted number of integration nodes.
pub const MIN_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegrationMethod {
    /// Average of the likelihood over `nodes` prior draws.
    MonteCarloPrior { nodes: usize, seed: u64 },
    /// Gauss-Legendre in squared radius times an equispaced angular rule.
    /// A circle uses the angular rule alone.
    PolarQuadrature { radial: usize, angular: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntegrationSpec {
    pub method: IntegrationMethod,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self::polar(128, 256)
    }
}

impl IntegrationSpec {
    pub fn polar(radial: usize, angular: usize) -> Self {
        Self {
            method: IntegrationMethod::PolarQuadrature { radial, angular },
        }
    }

    pub fn monte_carlo(nodes: usize, seed: u64) -> Self {
        Self {
            method: IntegrationMethod::MonteCarloPrior { nodes, seed },
        }
    }

    /// Nodes actually used for `model`.
    pub fn node_count(&self, model: &ThreatModel) -> usize {
        match self.method {
            IntegrationMethod::MonteCarloPrior { nodes, .. } => nodes,
            IntegrationMethod::PolarQuadrature { radial, angular } => match model.radii() {
                Some((r1, r2)) if r1 == r2 => angular,
                _ => radial * angular,
            },
        }
    }
}

/// Integration nodes with their prior weights and attacker mean vectors.
#[derive(Debug, Clone)]
pub struct MarginalTable {
    model: ThreatModel,
    base_stations: usize,
    sigma_db: f64,
    /// Subtracted from means and measurements to keep sums well conditioned.
    center: f64,
    positions: Vec<Point2D>,
    log_weights: Vec<f64>,
    /// Node-major, `base_stations` entries per node, centered.
    means: Vec<f64>,
    /// `Σᵢ (meanᵢ − center)²` per node.
    mean_sq: Vec<f64>,
}

impl MarginalTable {
    pub fn build(
        geom: &NetworkGeometry,
        params: &ChannelParams,
        model: &ThreatModel,
        spec: &IntegrationSpec,
    ) -> Result<Self> {
        model.validate(geom)?;
        let (r1, r2) = model.radii().ok_or(Error::MarginalNeedsSpatialPrior)?;
        let count = spec.node_count(model);
        if count < MIN_NODES {
            return Err(Error::TooFewNodes {
                min: MIN_NODES,
                got: count,
            });
        }

        let claimed = geom.claimed();
        let mut positions = Vec::with_capacity(count);
        let mut log_weights = Vec::with_capacity(count);
        match spec.method {
            IntegrationMethod::MonteCarloPrior { nodes, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let lw = -math::ln(nodes as f64);
                for _ in 0..nodes {
                    if let TruePosition::At(p) = sample_true_position(model, claimed, &mut rng) {
                        positions.push(p);
                        log_weights.push(lw);
                    }
                }
            }
            IntegrationMethod::PolarQuadrature { radial, angular } => {
                // Offset by half a step so nodes avoid the coordinate axes.
                let angles: Vec<f64> = (0..angular)
                    .map(|j| 2.0 * PI * (j as f64 + 0.5) / angular as f64)
                    .collect();
                let ang_lw = -math::ln(angular as f64);
                let radial_rule: Vec<(f64, f64)> = if r1 == r2 {
                    alloc::vec![(r1, 0.0)]
                } else {
                    // Uniform areal density is uniform in s = r².
                    let (x, w) = math::gauss_legendre(radial);
                    let (s1, s2) = (r1 * r1, r2 * r2);
                    x.iter()
                        .zip(&w)
                        .map(|(&x, &w)| {
                            let s = 0.5 * (s1 + s2) + 0.5 * (s2 - s1) * x;
                            (math::sqrt(s), math::ln(0.5 * w))
                        })
                        .collect()
                };
                for &(radius, rad_lw) in &radial_rule {
                    for &a in &angles {
                        positions.push(Point2D::from_polar(claimed, radius, a));
                        log_weights.push(rad_lw + ang_lw);
                    }
                }
            }
        }

        let k = geom.len();
        let center = crate::model::mean(&crate::model::claimed_means(geom, params));
        let mut means = Vec::with_capacity(positions.len() * k);
        let mut mean_sq = Vec::with_capacity(positions.len());
        for p in &positions {
            let mu = attacker_means(geom, params, *p)?;
            let mut sq = 0.0;
            for m in mu {
                let c = m - center;
                means.push(c);
                sq += c * c;
            }
            mean_sq.push(sq);
        }

        Ok(Self {
            model: *model,
            base_stations: k,
            sigma_db: params.shadowing_sigma_db,
            center,
            positions,
            log_weights,
            means,
            mean_sq,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn model(&self) -> &ThreatModel {
        &self.model
    }

    pub fn positions(&self) -> &[Point2D] {
        &self.positions
    }

    /// `ln p(m|H1)`, by log-sum-exp over the nodes.
    pub fn log_marginal(&self, m: &MeasurementMatrix) -> Result<f64> {
        let mut scratch = Vec::with_capacity(self.len());
        self.log_marginal_with(m, &mut scratch)
    }

    /// As [`Self::log_marginal`], reusing `scratch` for the per-node terms.
    pub fn log_marginal_with(&self, m: &MeasurementMatrix, scratch: &mut Vec<f64>) -> Result<f64> {
        m.check_rows(self.base_stations)?;
        let k = self.base_stations;
        let cols = m.cols() as f64;
        let var = self.sigma_db * self.sigma_db;

        let sums: Vec<f64> = (0..k).map(|i| m.row(i).iter().map(|x| x - self.center).sum()).collect();
        let sum_sq: f64 = m.values().iter().map(|x| (x - self.center) * (x - self.center)).sum();
        let norm = -0.5 * m.values().len() as f64 * (LN_2PI + math::ln(var));

        scratch.clear();
        for (node, mu) in self.means.chunks_exact(k).enumerate() {
            let cross: f64 = mu.iter().zip(&sums).map(|(a, s)| a * s).sum();
            let ss = (sum_sq - 2.0 * cross + cols * self.mean_sq[node]).max(0.0);
            scratch.push(self.log_weights[node] - ss / (2.0 * var));
        }
        Ok(norm + math::log_sum_exp(scratch))
    }
}

/// `ln p(m|H1)` for a circle or annulus threat model.
pub fn log_lik_h1_marginal(
    m: &MeasurementMatrix,
    geom: &NetworkGeometry,
    params: &ChannelParams,
    model: &ThreatModel,
    spec: &IntegrationSpec,
) -> Result<LogLikelihood> {
    let table = MarginalTable::build(geom, params, model, spec)?;
    Ok(LogLikelihood(table.log_marginal(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::log_lik_h1_given_theta;
    use crate::likelihood::tests::{irregular, square};
    use crate::model::{sample_malicious, sample_with_means};
    use rand::Rng;

    fn channel() -> ChannelParams {
        ChannelParams::new(3.0, 5.0).unwrap()
    }

    #[test]
    fn far_field_model_is_rejected() {
        let m = MeasurementMatrix::new(4, 1, alloc::vec![0.0; 4]).unwrap();
        assert_eq!(
            log_lik_h1_marginal(&m, &square(), &channel(), &ThreatModel::Ffa, &IntegrationSpec::default()),
            Err(Error::MarginalNeedsSpatialPrior)
        );
    }

    #[test]
    fn too_few_nodes_is_rejected() {
        let m = MeasurementMatrix::new(4, 1, alloc::vec![0.0; 4]).unwrap();
        let model = ThreatModel::AnnulusMd { inner_m: 200.0, outer_m: 400.0 };
        assert_eq!(
            log_lik_h1_marginal(&m, &square(), &channel(), &model, &IntegrationSpec::polar(8, 16)),
            Err(Error::TooFewNodes { min: 256, got: 128 })
        );
        assert!(log_lik_h1_marginal(&m, &square(), &channel(), &model, &IntegrationSpec::monte_carlo(100, 1)).is_err());
    }

    #[test]
    fn matches_brute_force_node_sum() {
        let g = irregular();
        let p = channel();
        let model = ThreatModel::AnnulusMd { inner_m: 150.0, outer_m: 400.0 };
        let spec = IntegrationSpec::polar(16, 32);
        let table = MarginalTable::build(&g, &p, &model, &spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = sample_malicious(&g, &p, Point2D::new(-200.0, 250.0), 2, &mut rng).unwrap();
        let terms: Vec<f64> = table
            .positions()
            .iter()
            .zip(&table.log_weights)
            .map(|(pos, lw)| lw + log_lik_h1_given_theta(&m, &g, &p, *pos).unwrap().0)
            .collect();
        let brute = math::log_sum_exp(&terms);
        assert!((table.log_marginal(&m).unwrap() - brute).abs() < 1e-9);
    }

    #[test]
    fn circle_symmetric_geometry_reduces_to_pointwise() {
        // Angular weights are uniform, so on a rotationally invariant integrand
        // the marginal equals the likelihood at any on-circle point. The square
        // is only 4-fold symmetric; use a dense ring instead.
        let bs: Vec<Point2D> = (0..64)
            .map(|j| Point2D::from_polar(Point2D::ORIGIN, 50.0, 2.0 * PI * j as f64 / 64.0))
            .collect();
        let g = NetworkGeometry::new(bs, Point2D::ORIGIN).unwrap();
        let p = channel();
        let model = ThreatModel::CircleUda { radius_m: 300.0 };
        let m = MeasurementMatrix::from_means(&alloc::vec![-120.0; 64], 1).unwrap();
        let marginal = log_lik_h1_marginal(&m, &g, &p, &model, &IntegrationSpec::polar(1, 256)).unwrap().0;
        let point = log_lik_h1_given_theta(&m, &g, &p, Point2D::new(0.0, 300.0)).unwrap().0;
        assert!((marginal - point).abs() < 1e-6, "{marginal} vs {point}");
    }

    #[test]
    fn degenerate_annulus_equals_circle() {
        let g = irregular();
        let p = channel();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = sample_malicious(&g, &p, Point2D::new(250.0, 10.0), 1, &mut rng).unwrap();
        let spec = IntegrationSpec::polar(128, 256);
        let circle = log_lik_h1_marginal(&m, &g, &p, &ThreatModel::CircleUda { radius_m: 250.0 }, &spec).unwrap();
        let ring = log_lik_h1_marginal(
            &m,
            &g,
            &p,
            &ThreatModel::AnnulusMd { inner_m: 250.0, outer_m: 250.0 },
            &spec,
        )
        .unwrap();
        assert_eq!(circle, ring);
    }

    #[test]
    fn monte_carlo_and_quadrature_agree() {
        let g = irregular();
        let p = channel();
        let model = ThreatModel::AnnulusMd { inner_m: 120.0, outer_m: 500.0 };
        let mc = MarginalTable::build(&g, &p, &model, &IntegrationSpec::monte_carlo(100_000, 77)).unwrap();
        let quad = MarginalTable::build(&g, &p, &model, &IntegrationSpec::polar(256, 256)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..6 {
            let m = if trial % 2 == 0 {
                let theta = Point2D::new(rng.random_range(-300.0..300.0), rng.random_range(150.0..400.0));
                sample_malicious(&g, &p, theta, 1, &mut rng).unwrap()
            } else {
                sample_with_means(&crate::model::claimed_means(&g, &p), 5.0, 1, &mut rng).unwrap()
            };
            let a = mc.log_marginal(&m).unwrap();
            let b = quad.log_marginal(&m).unwrap();
            assert!((a - b).abs() < 1e-2, "trial {trial}: mc {a} vs quad {b}");
        }
    }

    #[test]
    fn invariant_under_base_station_relabeling() {
        let g = irregular();
        let p = channel();
        let model = ThreatModel::AnnulusMd { inner_m: 150.0, outer_m: 450.0 };
        let spec = IntegrationSpec::polar(32, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = sample_malicious(&g, &p, Point2D::new(100.0, -300.0), 2, &mut rng).unwrap();

        let perm = [3usize, 0, 4, 1, 2];
        let bs: Vec<Point2D> = perm.iter().map(|&i| g.base_stations()[i]).collect();
        let g2 = NetworkGeometry::new(bs, g.claimed()).unwrap();
        let values: Vec<f64> = perm.iter().flat_map(|&i| m.row(i).to_vec()).collect();
        let m2 = MeasurementMatrix::new(5, 2, values).unwrap();

        let a = log_lik_h1_marginal(&m, &g, &p, &model, &spec).unwrap().0;
        let b = log_lik_h1_marginal(&m2, &g2, &p, &model, &spec).unwrap().0;
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}
