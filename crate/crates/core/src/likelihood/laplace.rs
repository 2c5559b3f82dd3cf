//! Laplace approximation of the marginal likelihood.
//!
//! The log-posterior `h(θ) = ln p(m|θ,H1) + ln p(θ|H1)` is expanded to second
//! order around its maximum `θ̂`, giving
//! `ln p̂(m|H1) = h(θ̂) + (d/2) ln 2π − ½ ln det(−H)`
//! with `H` the Hessian of `h` at `θ̂` and `d` the dimension of the prior
//! support (2 for an annulus, 1 for a circle, parametrized by arc length).

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{LogLikelihood, MarginalTable};
use crate::adversary::ThreatModel;
use crate::error::{Error, Result};
use crate::math::{self, LN_2PI};
use crate::model::{claimed_means, mean, ChannelParams, MeasurementMatrix, NetworkGeometry, Point2D};

/// Finite-difference step for the Hessian, meters.
pub const HESSIAN_STEP_M: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapEstimate {
    pub point: Point2D,
    /// `ln p(m | θ̂, H1)`.
    pub log_likelihood: f64,
    /// The maximum sits on the edge of the prior support.
    pub on_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub log_lik: LogLikelihood,
    pub map: MapEstimate,
}

/// `ln p(m|θ,H1)` evaluated without allocating, for the optimizer.
struct ConditionalLikelihood<'a> {
    base_stations: &'a [Point2D],
    params: &'a ChannelParams,
    /// Row sums of `m − μ̄ᶜ`.
    sums: Vec<f64>,
    sum_sq: f64,
    cols: f64,
    norm: f64,
    buf: core::cell::RefCell<Vec<f64>>,
}

impl<'a> ConditionalLikelihood<'a> {
    fn new(m: &MeasurementMatrix, geom: &'a NetworkGeometry, params: &'a ChannelParams) -> Result<Self> {
        m.check_rows(geom.len())?;
        let center = mean(&claimed_means(geom, params));
        let sums = (0..m.rows()).map(|i| m.row(i).iter().map(|x| x - center).sum()).collect();
        let sum_sq = m.values().iter().map(|x| (x - center) * (x - center)).sum();
        let norm = -0.5 * m.values().len() as f64 * (LN_2PI + math::ln(params.variance()));
        Ok(Self {
            base_stations: geom.base_stations(),
            params,
            sums,
            sum_sq,
            cols: m.cols() as f64,
            norm,
            buf: core::cell::RefCell::new(alloc::vec![0.0; geom.len()]),
        })
    }

    fn eval(&self, p: Point2D) -> f64 {
        let mut buf = self.buf.borrow_mut();
        let mut total = 0.0;
        for (slot, bs) in buf.iter_mut().zip(self.base_stations) {
            let d = bs.distance_to(&p);
            if !(d > 0.0) {
                return f64::NEG_INFINITY;
            }
            *slot = self.params.mean_rss_unchecked(d);
            total += *slot;
        }
        // Optimal boost makes the attacker means average to the claimed mean,
        // so centered means are just the deviations from their own average.
        let mu_t_bar = total / buf.len() as f64;
        let (mut cross, mut sq) = (0.0, 0.0);
        for (a, s) in buf.iter().zip(&self.sums) {
            let c = a - mu_t_bar;
            cross += c * s;
            sq += c * c;
        }
        let ss = (self.sum_sq - 2.0 * cross + self.cols * sq).max(0.0);
        self.norm - ss / (2.0 * self.params.variance())
    }
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Maximum a-posteriori attacker position for a circle or annulus model.
///
/// The prior is flat on its support, so this is the likelihood maximizer
/// restricted to the support. Located by a coarse polar scan followed by
/// local refinement from the best few scan points.
pub fn laplace_map_estimate(
    m: &MeasurementMatrix,
    geom: &NetworkGeometry,
    params: &ChannelParams,
    model: &ThreatModel,
) -> Result<MapEstimate> {
    let (r1, r2) = model.radii().ok_or(Error::MarginalNeedsSpatialPrior)?;
    let lik = ConditionalLikelihood::new(m, geom, params)?;
    let c = geom.claimed();
    let at = |r: f64, a: f64| Point2D::from_polar(c, r, a);

    if r1 == r2 {
        const SCAN: usize = 72;
        let step = 2.0 * PI / SCAN as f64;
        let mut scan: Vec<(f64, f64)> = (0..SCAN)
            .map(|j| {
                let a = step * j as f64;
                (a, lik.eval(at(r1, a)))
            })
            .collect();
        scan.sort_by(|x, y| y.1.total_cmp(&x.1));
        let (angle, value) = scan
            .iter()
            .take(3)
            .map(|&(a, _)| math::golden_section_max(|t| lik.eval(at(r1, t)), a - step, a + step, 1e-10))
            .fold((0.0, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best });
        if !value.is_finite() {
            return Err(Error::MapNotConverged);
        }
        return Ok(MapEstimate {
            point: at(r1, angle),
            log_likelihood: value,
            on_boundary: false,
        });
    }

    const RADII: usize = 8;
    const ANGLES: usize = 32;
    const STARTS: usize = 4;
    let (s1, s2) = (r1 * r1, r2 * r2);
    let mut scan = Vec::with_capacity(RADII * ANGLES);
    for i in 0..RADII {
        let r = math::sqrt(s1 + (s2 - s1) * i as f64 / (RADII - 1) as f64);
        for j in 0..ANGLES {
            let a = 2.0 * PI * j as f64 / ANGLES as f64;
            scan.push((r, a, lik.eval(at(r, a))));
        }
    }
    scan.sort_by(|x, y| y.2.total_cmp(&x.2));

    let objective = |x: [f64; 2]| lik.eval(at(clamp(x[0], r1, r2), x[1]));
    let scale = [(r2 - r1) / 8.0, 2.0 * PI / ANGLES as f64];
    let mut best: Option<(Point2D, f64)> = None;
    for &(r, a, _) in scan.iter().take(STARTS) {
        let res = math::nelder_mead_max(objective, [r, a], scale, 1e-8, 2000);
        if !res.converged || !res.value.is_finite() {
            continue;
        }
        let p = at(clamp(res.point[0], r1, r2), res.point[1]);
        if best.is_none_or(|(_, v)| res.value > v) {
            best = Some((p, res.value));
        }
    }
    let (point, value) = best.ok_or(Error::MapNotConverged)?;
    let r = point.distance_to(&c);
    let tol = 1e-6 * r2;
    Ok(MapEstimate {
        point,
        log_likelihood: value,
        on_boundary: r <= r1 + tol || r >= r2 - tol,
    })
}

/// `ln ∫ exp(f(x, y)) dx dy` by the Laplace method around `mode`.
///
/// Fails with [`Error::IndefiniteHessian`] when the finite-difference
/// Hessian is not negative definite.
pub fn laplace_log_integral_2d<F: Fn([f64; 2]) -> f64>(f: F, mode: [f64; 2], step: f64) -> Result<f64> {
    let f0 = f(mode);
    let h = step;
    let shifted = |dx: f64, dy: f64| f([mode[0] + dx, mode[1] + dy]);
    let hxx = (shifted(h, 0.0) - 2.0 * f0 + shifted(-h, 0.0)) / (h * h);
    let hyy = (shifted(0.0, h) - 2.0 * f0 + shifted(0.0, -h)) / (h * h);
    let hxy = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h);
    let det = hxx * hyy - hxy * hxy;
    if !(hxx < 0.0 && det > 0.0) || !det.is_finite() {
        return Err(Error::IndefiniteHessian);
    }
    Ok(f0 + LN_2PI - 0.5 * math::ln(det))
}

/// One-dimensional counterpart of [`laplace_log_integral_2d`].
pub fn laplace_log_integral_1d<F: Fn(f64) -> f64>(f: F, mode: f64, step: f64) -> Result<f64> {
    let f0 = f(mode);
    let d2 = (f(mode + step) - 2.0 * f0 + f(mode - step)) / (step * step);
    if !(d2 < 0.0) || !d2.is_finite() {
        return Err(Error::IndefiniteHessian);
    }
    Ok(f0 + 0.5 * LN_2PI - 0.5 * math::ln(-d2))
}

/// Laplace estimate of `ln p(m|H1)` for a circle or annulus model.
pub fn log_lik_h1_laplace(
    m: &MeasurementMatrix,
    geom: &NetworkGeometry,
    params: &ChannelParams,
    model: &ThreatModel,
) -> Result<LaplaceEstimate> {
    let map = laplace_map_estimate(m, geom, params, model)?;
    let lik = ConditionalLikelihood::new(m, geom, params)?;
    let (r1, r2) = model.radii().ok_or(Error::MarginalNeedsSpatialPrior)?;
    let c = geom.claimed();

    let log_lik = if r1 == r2 {
        // Density 1/(2πR) per unit arc length; expand along the arc.
        let angle = math::atan2(map.point.v - c.v, map.point.u - c.u);
        let log_prior = -math::ln(2.0 * PI * r1);
        let along = |t: f64| lik.eval(Point2D::from_polar(c, r1, angle + t / r1)) + log_prior;
        laplace_log_integral_1d(along, 0.0, HESSIAN_STEP_M)?
    } else {
        let log_prior = -math::ln(PI * (r2 * r2 - r1 * r1));
        let posterior = |x: [f64; 2]| lik.eval(Point2D::new(x[0], x[1])) + log_prior;
        laplace_log_integral_2d(posterior, [map.point.u, map.point.v], HESSIAN_STEP_M)?
    };
    Ok(LaplaceEstimate {
        log_lik: LogLikelihood(log_lik),
        map,
    })
}

/// How a Laplace-rule likelihood was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceStatus {
    Approximated,
    /// MAP on the support boundary; the numerical marginal was used.
    BoundaryFallback,
    /// Hessian not negative definite; the numerical marginal was used.
    IndefiniteFallback,
}

/// Laplace estimate, or the numerical marginal from `table` when the
/// expansion point is on the support boundary or the Hessian is unusable.
pub fn laplace_or_marginal(
    m: &MeasurementMatrix,
    geom: &NetworkGeometry,
    params: &ChannelParams,
    table: &MarginalTable,
) -> Result<(LogLikelihood, LaplaceStatus)> {
    match log_lik_h1_laplace(m, geom, params, table.model()) {
        Ok(est) if !est.map.on_boundary => Ok((est.log_lik, LaplaceStatus::Approximated)),
        Ok(_) => Ok((LogLikelihood(table.log_marginal(m)?), LaplaceStatus::BoundaryFallback)),
        Err(Error::IndefiniteHessian) | Err(Error::MapNotConverged) => {
            Ok((LogLikelihood(table.log_marginal(m)?), LaplaceStatus::IndefiniteFallback))
        }
        Err(e) => Err(e),
    }
}
