//! Power-law-with-offset fits `y ≈ a·n^(−b) + c`.
//!
//! For fixed `b` the model is linear in `(a, c)`, so the fit profiles the
//! residual over `b`: a 200-point logarithmic grid on `[0.05, 3]` picks the
//! basin, then golden-section search refines `b` inside the two grid cells
//! around the best grid point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const B_MIN: f64 = 0.05;
pub const B_MAX: f64 = 3.0;
pub const GRID_POINTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Root-mean-square misfit.
    pub residual: f64,
}

impl FitResult {
    pub fn eval(&self, n: f64) -> f64 {
        self.a * n.powf(-self.b) + self.c
    }
}

/// Least squares for `(a, c)` at fixed `b`, with `c ≥ 0`.
fn solve_linear(xs: &[f64], ys: &[f64], b: f64) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let basis: Vec<f64> = xs.iter().map(|n| n.powf(-b)).collect();
    let sx: f64 = basis.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = basis.iter().map(|x| x * x).sum();
    let sxy: f64 = basis.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = k * sxx - sx * sx;
    let (mut a, mut c) = if det.abs() > 1e-300 {
        ((k * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
    } else {
        (0.0, sy / k)
    };
    if c < 0.0 {
        c = 0.0;
        a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    }
    let sse: f64 = basis
        .iter()
        .zip(ys)
        .map(|(x, y)| (a * x + c - y).powi(2))
        .sum();
    (a, c, (sse / k).sqrt())
}

fn grid() -> Vec<f64> {
    let (lo, hi) = (B_MIN.ln(), B_MAX.ln());
    (0..GRID_POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// Fits `sizes ≈ a·steps^(−b) + c`. Needs at least four points with strictly
/// increasing steps `≥ 1` and non-negative finite sizes.
pub fn fit_power_law(steps: &[f64], sizes: &[f64]) -> Result<FitResult> {
    if steps.len() != sizes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} steps but {} sizes",
            steps.len(),
            sizes.len()
        )));
    }
    if steps.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 points, got {}",
            steps.len()
        )));
    }
    if steps.iter().any(|&n| !(n >= 1.0) || !n.is_finite())
        || steps.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidArgument(
            "steps must be finite, >= 1 and strictly increasing".into(),
        ));
    }
    if sizes.iter().any(|&y| !(y >= 0.0) || !y.is_finite()) {
        return Err(Error::InvalidArgument(
            "sizes must be finite and non-negative".into(),
        ));
    }
    if sizes.iter().all(|&y| y == sizes[0]) {
        return Ok(FitResult {
            a: 0.0,
            b: B_MIN,
            c: sizes[0],
            residual: 0.0,
        });
    }

    let bs = grid();
    let residuals: Vec<f64> = bs
        .iter()
        .map(|&b| solve_linear(steps, sizes, b).2)
        .collect();
    let best = residuals
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);

    // golden-section refinement in log b over the neighbouring cells
    let mut lo = bs[best.saturating_sub(1)].ln();
    let mut hi = bs[(best + 1).min(GRID_POINTS - 1)].ln();
    let profile = |logb: f64| solve_linear(steps, sizes, logb.exp()).2;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (profile(x1), profile(x2));
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = profile(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = profile(x2);
        }
    }
    let mut b = ((lo + hi) / 2.0).exp();
    let mut result = solve_linear(steps, sizes, b);
    if residuals[best] < result.2 {
        b = bs[best];
        result = solve_linear(steps, sizes, b);
    }
    let (a, c, residual) = result;
    Ok(FitResult { a, b, c, residual })
}
