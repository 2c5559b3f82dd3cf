//! Floating point helpers that work without `std`.
//!
//! `core` does not ship transcendental functions, so everything goes through
//! `libm`. The small optimizers here (golden section, Nelder-Mead) and the
//! Gauss-Legendre rule are used by the threshold search and the marginal
//! likelihood code.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

/// `ln(2π)`.
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln Σ exp(xᵢ)` without overflow. Returns `-∞` for an empty input or when
/// every term is `-∞`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| exp(v - max)).sum();
    max + ln(sum)
}

/// Evenly spaced points over `[start, end]`, both ends included.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![start],
        n => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { end } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal function on `[lo, hi]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadResult {
    pub point: [f64; 2],
    pub value: f64,
    pub converged: bool,
}

/// Maximizes `f` over the plane with the Nelder-Mead simplex method.
///
/// `scale` sets the initial simplex edge per coordinate; convergence is
/// declared once every vertex is within `tol` (per coordinate, relative to
/// `scale`) of the best one and the function spread is below `1e-12`.
pub fn nelder_mead_max<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    scale: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> NelderMeadResult {
    let neg = |p: [f64; 2]| {
        let v = f(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };
    let mut simplex = [
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut values = [neg(simplex[0]), neg(simplex[1]), neg(simplex[2])];

    let mut converged = false;
    for _ in 0..max_iter {
        // Order vertices best (lowest) to worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        values = [values[order[0]], values[order[1]], values[order[2]]];

        let spread_x = (1..3).all(|i| {
            (0..2).all(|d| (simplex[i][d] - simplex[0][d]).abs() <= tol * scale[d])
        });
        if spread_x && (values[2] - values[0]).abs() <= 1e-12 * (1.0 + values[0].abs()) {
            converged = true;
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };

        let reflected = along(-1.0);
        let fr = neg(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = neg(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = neg(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        0.5 * (simplex[0][0] + simplex[i][0]),
                        0.5 * (simplex[0][1] + simplex[i][1]),
                    ];
                    values[i] = neg(simplex[i]);
                }
            }
        }
    }

    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    NelderMeadResult {
        point: simplex[best],
        value: -values[best],
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_naive_and_survives_underflow() {
        let v = [0.1, -2.0, 1.5];
        let naive = ln(v.iter().map(|&x| exp(x)).sum());
        assert!((log_sum_exp(&v) - naive).abs() < 1e-14);

        let tiny = [-2000.0, -2000.0];
        assert!((log_sum_exp(&tiny) - (-2000.0 + ln(2.0))).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Degree 8 is within the 2n-1 = 9 exactness bound.
        let integral: f64 = x.iter().zip(&w).map(|(&x, &w)| w * libm::pow(x, 8.0)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);

        let (x, w) = gauss_legendre(128);
        let integral: f64 = x.iter().zip(&w).map(|(&x, &w)| w * exp(x)).sum();
        assert!((integral - (exp(1.0) - exp(-1.0))).abs() < 1e-13);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_finds_rosenbrock_like_peak() {
        let f = |p: [f64; 2]| -((p[0] - 3.0) * (p[0] - 3.0) + 10.0 * (p[1] + 1.0) * (p[1] + 1.0));
        let r = nelder_mead_max(f, [0.0, 0.0], [1.0, 1.0], 1e-9, 2000);
        assert!(r.converged);
        assert!((r.point[0] - 3.0).abs() < 1e-6);
        assert!((r.point[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(-25.0, 25.0, 201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], -25.0);
        assert_eq!(g[200], 25.0);
        assert!((g[100]).abs() < 1e-12);
    }
}
