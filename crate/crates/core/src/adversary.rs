//! Attacker behavior and threat-model position priors.
//!
//! The attacker always transmits with the power boost that minimizes the
//! KL divergence between its RSS distribution and the one a legitimate user
//! at the claimed position would produce. Where it stands is described by a
//! [`ThreatModel`]: infinitely far away, uniform on a circle, or uniform over
//! an annulus around the claimed position.

use alloc::vec::Vec;
use core::f64::consts::{LN_10, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{claimed_means, mean, ChannelParams, NetworkGeometry, Point2D};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThreatModel {
    /// Far-field approximation: every base station sees the same mean power.
    Ffa,
    /// Attacker uniform on a circle of `radius_m` around the claimed position.
    CircleUda { radius_m: f64 },
    /// Attacker uniform over the annulus `inner_m ≤ d ≤ outer_m`.
    AnnulusMd { inner_m: f64, outer_m: f64 },
}

impl ThreatModel {
    /// Circle of radius `rho · r`.
    pub fn circle_from_rho(rho: f64, geom: &NetworkGeometry) -> Self {
        Self::CircleUda {
            radius_m: rho * geom.max_claimed_distance(),
        }
    }

    /// Annulus with inner radius `rho · r` and the given outer/inner ratio.
    pub fn annulus_from_rho(rho: f64, outer_over_inner: f64, geom: &NetworkGeometry) -> Self {
        let inner_m = rho * geom.max_claimed_distance();
        Self::AnnulusMd {
            inner_m,
            outer_m: inner_m * outer_over_inner,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ffa => "ffa",
            Self::CircleUda { .. } => "circle",
            Self::AnnulusMd { .. } => "annulus",
        }
    }

    /// Radii of the prior support, `None` for the far-field model. A circle
    /// is reported as a degenerate annulus.
    pub fn radii(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Ffa => None,
            Self::CircleUda { radius_m } => Some((radius_m, radius_m)),
            Self::AnnulusMd { inner_m, outer_m } => Some((inner_m, outer_m)),
        }
    }

    pub fn validate(&self, geom: &NetworkGeometry) -> Result<()> {
        match *self {
            Self::Ffa => Ok(()),
            Self::CircleUda { radius_m } => {
                if !(radius_m.is_finite() && radius_m > geom.max_claimed_distance()) {
                    return Err(Error::InvalidParameter {
                        name: "radius_m",
                        reason: "circle radius must exceed the largest base-station distance",
                    });
                }
                Ok(())
            }
            Self::AnnulusMd { inner_m, outer_m } => {
                if !(inner_m > 0.0 && inner_m <= outer_m && outer_m.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "inner_m/outer_m",
                        reason: "annulus needs 0 < inner <= outer",
                    });
                }
                Ok(())
            }
        }
    }
}

/// Ring radius relative to the network size, and the reference ratio at
/// which far-field behavior is expected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSpec {
    pub rho: f64,
    pub rho_star: f64,
}

impl RhoSpec {
    pub fn new(rho: f64, params: &ChannelParams) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: "must be positive",
            });
        }
        Ok(Self {
            rho,
            rho_star: rho_star(params),
        })
    }

    /// `rho = factor · rho_star`.
    pub fn from_factor(factor: f64, params: &ChannelParams) -> Result<Self> {
        Self::new(factor * rho_star(params), params)
    }
}

/// Where the attacker stands for one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruePosition {
    AtInfinity,
    At(Point2D),
}

fn true_means(geom: &NetworkGeometry, params: &ChannelParams, true_pos: Point2D) -> Result<Vec<f64>> {
    geom.base_stations()
        .iter()
        .map(|bs| {
            let d = bs.distance_to(&true_pos);
            if d > 0.0 {
                Ok(params.mean_rss_unchecked(d))
            } else {
                Err(Error::CoincidentWithBaseStation)
            }
        })
        .collect()
}

/// KL-optimal power boost `P_x* = (1/K) Σ (μᵢᶜ − μᵢᵗ)`, in dB.
pub fn optimal_power_boost(geom: &NetworkGeometry, params: &ChannelParams, true_pos: Point2D) -> Result<f64> {
    let mu_t = true_means(geom, params, true_pos)?;
    Ok(mean(&claimed_means(geom, params)) - mean(&mu_t))
}

/// Per-base-station means seen from an attacker at `true_pos` that applies
/// the optimal boost: `μᵢᵗ + P_x*`.
pub fn attacker_means(geom: &NetworkGeometry, params: &ChannelParams, true_pos: Point2D) -> Result<Vec<f64>> {
    let mu_t = true_means(geom, params, true_pos)?;
    let boost = mean(&claimed_means(geom, params)) - mean(&mu_t);
    Ok(mu_t.into_iter().map(|m| m + boost).collect())
}

/// Means seen from a far-field attacker: `μ̄ᶜ` at every base station.
pub fn far_field_means(geom: &NetworkGeometry, params: &ChannelParams) -> Vec<f64> {
    let mu_bar = mean(&claimed_means(geom, params));
    alloc::vec![mu_bar; geom.len()]
}

/// `D_KL(p(m|H0) ‖ p(m|θ,H1)) = Σᵢ (μᵢᶜ − μᵢᵗ − P_x)² / (2σ²)`, in nats.
pub fn kl_divergence_h0_vs_h1(
    geom: &NetworkGeometry,
    params: &ChannelParams,
    true_pos: Point2D,
    boost_db: f64,
) -> Result<f64> {
    let mu_t = true_means(geom, params, true_pos)?;
    let mu_c = claimed_means(geom, params);
    let ss: f64 = mu_c
        .iter()
        .zip(&mu_t)
        .map(|(c, t)| {
            let r = c - t - boost_db;
            r * r
        })
        .sum();
    Ok(ss / (2.0 * params.variance()))
}

/// Reference ring ratio `ρ* = 2 / (exp(σ ln10 / 10γ) − 1) + 1`.
pub fn rho_star(params: &ChannelParams) -> f64 {
    let x = params.shadowing_sigma_db * LN_10 / (10.0 * params.path_loss_exponent);
    2.0 / libm::expm1(x) + 1.0
}

/// Draws the attacker position from the threat-model prior.
///
/// The far-field model draws nothing and returns [`TruePosition::AtInfinity`].
/// The circle consumes one uniform, the annulus two (radius by inverse CDF of
/// the area measure, then angle).
pub fn sample_true_position<R: Rng + ?Sized>(model: &ThreatModel, claimed: Point2D, rng: &mut R) -> TruePosition {
    match *model {
        ThreatModel::Ffa => TruePosition::AtInfinity,
        ThreatModel::CircleUda { radius_m } => {
            let angle = 2.0 * PI * rng.random::<f64>();
            TruePosition::At(Point2D::from_polar(claimed, radius_m, angle))
        }
        ThreatModel::AnnulusMd { inner_m, outer_m } => {
            let u: f64 = rng.random();
            let r = math::sqrt(inner_m * inner_m + u * (outer_m * outer_m - inner_m * inner_m));
            let angle = 2.0 * PI * rng.random::<f64>();
            TruePosition::At(Point2D::from_polar(claimed, r, angle))
        }
    }
}
