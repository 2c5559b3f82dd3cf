//! Network geometry, log-normal shadowing channel and RSS synthesis.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::adversary;
use crate::error::{Error, Result};
use crate::math;

/// A position in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub u: f64,
    pub v: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { u: 0.0, v: 0.0 };

    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn from_polar(center: Point2D, radius: f64, angle: f64) -> Self {
        let (s, c) = math::sin_cos(angle);
        Self::new(center.u + radius * c, center.v + radius * s)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn distance_to(&self, other: &Point2D) -> f64 {
        distance(*self, *other)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point2D, b: Point2D) -> f64 {
    math::hypot(a.u - b.u, a.v - b.v)
}

/// Base-station layout plus the position the user claims.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGeometry {
    base_stations: Vec<Point2D>,
    claimed: Point2D,
    claimed_distances: Vec<f64>,
}

impl NetworkGeometry {
    /// Validates and builds a geometry.
    ///
    /// Needs at least three finite, non-collinear base stations, none of
    /// them at the claimed position.
    pub fn new(base_stations: Vec<Point2D>, claimed: Point2D) -> Result<Self> {
        if base_stations.len() < 3 {
            return Err(Error::Geometry("need more than two base stations"));
        }
        if !claimed.is_finite() || base_stations.iter().any(|p| !p.is_finite()) {
            return Err(Error::Geometry("coordinates must be finite"));
        }
        let claimed_distances: Vec<f64> = base_stations.iter().map(|bs| distance(*bs, claimed)).collect();
        if claimed_distances.iter().any(|&d| d <= 0.0) {
            return Err(Error::Geometry("a base station sits on the claimed position"));
        }
        let geometry = Self {
            base_stations,
            claimed,
            claimed_distances,
        };
        // Relative tolerance so exactly collinear inputs survive rounding.
        let extent = geometry
            .base_stations
            .iter()
            .map(|p| p.distance_to(&geometry.base_stations[0]))
            .fold(0.0, f64::max);
        if geometry.collinearity_deviation() <= 1e-9 * extent {
            return Err(Error::Geometry("base stations are collinear"));
        }
        Ok(geometry)
    }

    /// Number of base stations, K.
    pub fn len(&self) -> usize {
        self.base_stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_stations.is_empty()
    }

    pub fn base_stations(&self) -> &[Point2D] {
        &self.base_stations
    }

    pub fn claimed(&self) -> Point2D {
        self.claimed
    }

    /// Distance from every base station to the claimed position.
    pub fn claimed_distances(&self) -> &[f64] {
        &self.claimed_distances
    }

    /// `r`, the largest base-station distance from the claimed position.
    pub fn max_claimed_distance(&self) -> f64 {
        self.claimed_distances.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the base station closest to the claimed position.
    pub fn nearest_to_claimed(&self) -> usize {
        self.claimed_distances
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn distances_from(&self, p: Point2D) -> Vec<f64> {
        self.base_stations.iter().map(|bs| distance(*bs, p)).collect()
    }

    /// Largest perpendicular distance of any base station from the total
    /// least squares line through all of them. Zero means collinear.
    pub fn collinearity_deviation(&self) -> f64 {
        collinearity_deviation(&self.base_stations)
    }
}

pub(crate) fn collinearity_deviation(points: &[Point2D]) -> f64 {
    let n = points.len() as f64;
    let cu = points.iter().map(|p| p.u).sum::<f64>() / n;
    let cv = points.iter().map(|p| p.v).sum::<f64>() / n;
    let (mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0);
    for p in points {
        let (du, dv) = (p.u - cu, p.v - cv);
        suu += du * du;
        svv += dv * dv;
        suv += du * dv;
    }
    // Direction of the principal axis of the scatter matrix.
    let angle = 0.5 * math::atan2(2.0 * suv, suu - svv);
    let (s, c) = math::sin_cos(angle);
    points
        .iter()
        .map(|p| (-(p.u - cu) * s + (p.v - cv) * c).abs())
        .fold(0.0, f64::max)
}

/// Log-normal shadowing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Received power at the reference distance, dB.
    pub ref_power_db: f64,
    /// Reference distance d₀, meters.
    pub ref_distance_m: f64,
    /// Path-loss exponent γ.
    pub path_loss_exponent: f64,
    /// Shadowing standard deviation σ, dB.
    pub shadowing_sigma_db: f64,
}

impl ChannelParams {
    /// Channel with 0 dB reference power at 1 m.
    pub fn new(path_loss_exponent: f64, shadowing_sigma_db: f64) -> Result<Self> {
        Self::with_reference(0.0, 1.0, path_loss_exponent, shadowing_sigma_db)
    }

    pub fn with_reference(
        ref_power_db: f64,
        ref_distance_m: f64,
        path_loss_exponent: f64,
        shadowing_sigma_db: f64,
    ) -> Result<Self> {
        let p = Self {
            ref_power_db,
            ref_distance_m,
            path_loss_exponent,
            shadowing_sigma_db,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.ref_power_db.is_finite() {
            return Err(Error::InvalidParameter {
                name: "ref_power_db",
                reason: "must be finite",
            });
        }
        if !(self.ref_distance_m > 0.0 && self.ref_distance_m.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "ref_distance_m",
                reason: "must be positive",
            });
        }
        if !(self.path_loss_exponent > 0.0 && self.path_loss_exponent.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "path_loss_exponent",
                reason: "must be positive",
            });
        }
        if !(self.shadowing_sigma_db > 0.0 && self.shadowing_sigma_db.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "shadowing_sigma_db",
                reason: "must be positive",
            });
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        self.shadowing_sigma_db * self.shadowing_sigma_db
    }

    /// Mean received power at distance `d`, without the range check.
    #[inline]
    pub(crate) fn mean_rss_unchecked(&self, d: f64) -> f64 {
        self.ref_power_db - 10.0 * self.path_loss_exponent * math::log10(d / self.ref_distance_m)
    }
}

/// Mean RSS at distance `d`: `P₀ − 10γ log₁₀(d/d₀)`.
pub fn mean_rss(params: &ChannelParams, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(params.mean_rss_unchecked(d))
}

/// Per-base-station mean RSS for a transmitter at the claimed position.
pub fn claimed_means(geom: &NetworkGeometry, params: &ChannelParams) -> Vec<f64> {
    geom.claimed_distances()
        .iter()
        .map(|&d| params.mean_rss_unchecked(d))
        .collect()
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Prior probability that a user is legitimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorParams {
    p_legitimate: f64,
}

impl PriorParams {
    pub fn new(p_legitimate: f64) -> Result<Self> {
        if !(p_legitimate > 0.0 && p_legitimate < 1.0) {
            return Err(Error::InvalidParameter {
                name: "prior_legitimate",
                reason: "must lie strictly between 0 and 1",
            });
        }
        Ok(Self { p_legitimate })
    }

    pub fn legitimate(&self) -> f64 {
        self.p_legitimate
    }

    pub fn malicious(&self) -> f64 {
        1.0 - self.p_legitimate
    }
}

/// K×L matrix of RSS samples in dB, one row per base station.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl MeasurementMatrix {
    /// Builds a matrix from row-major values.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                rows: if cols == 0 { 0 } else { values.len() / cols },
                cols,
                expected_rows: rows,
                expected_cols: cols,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteMeasurement);
        }
        Ok(Self { rows, cols, values })
    }

    /// Every column equal to `means`.
    pub fn from_means(means: &[f64], cols: usize) -> Result<Self> {
        let values = means
            .iter()
            .flat_map(|&m| core::iter::repeat_n(m, cols))
            .collect();
        Self::new(means.len(), cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sum over columns for each base station.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub(crate) fn check_rows(&self, k: usize) -> Result<()> {
        if self.rows != k {
            return Err(Error::DimensionMismatch {
                rows: self.rows,
                cols: self.cols,
                expected_rows: k,
                expected_cols: self.cols,
            });
        }
        Ok(())
    }
}

/// Draws a K×L matrix with row means `means` and i.i.d. N(0, σ²) noise.
///
/// Noise is drawn row by row, so two calls with the same RNG state produce
/// the same noise realization whatever the means are.
pub fn sample_with_means<R: Rng + ?Sized>(
    means: &[f64],
    sigma_db: f64,
    cols: usize,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    let mut values = Vec::with_capacity(means.len() * cols);
    for &mu in means {
        for _ in 0..cols {
            let z: f64 = rng.sample(StandardNormal);
            values.push(mu + sigma_db * z);
        }
    }
    MeasurementMatrix::new(means.len(), cols, values)
}

/// RSS samples from a legitimate user at the claimed position.
pub fn sample_legitimate<R: Rng + ?Sized>(
    geom: &NetworkGeometry,
    params: &ChannelParams,
    cols: usize,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    sample_with_means(&claimed_means(geom, params), params.shadowing_sigma_db, cols, rng)
}

/// RSS samples from an attacker at `true_pos` applying the optimal power
/// boost.
pub fn sample_malicious<R: Rng + ?Sized>(
    geom: &NetworkGeometry,
    params: &ChannelParams,
    true_pos: Point2D,
    cols: usize,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    let means = adversary::attacker_means(geom, params, true_pos)?;
    sample_with_means(&means, params.shadowing_sigma_db, cols, rng)
}

/// RSS samples from an attacker in the far field: every base station sees
/// the average claimed-position mean.
pub fn sample_far_field<R: Rng + ?Sized>(
    geom: &NetworkGeometry,
    params: &ChannelParams,
    cols: usize,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    let means = adversary::far_field_means(geom, params);
    sample_with_means(&means, params.shadowing_sigma_db, cols, rng)
}
