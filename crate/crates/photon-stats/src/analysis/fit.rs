//! Pearson correlation and scaling-law fits.

use serde::Serialize;

use crate::correlations::CorrelationRecord;
use crate::error::{Error, Result};
use crate::geometry::GeometryRecipe;
use crate::numeric;
use crate::vec3::Vec3;

use super::ensemble::{condition_scaling_sweep, ScalingTable};
use super::search::ConditionKind;

/// Power-law fit `y = a x^b`: prefactor, exponent, and the RMS of the
/// log-space residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub rms_log_residual: f64,
}

/// Pearson correlation coefficient, population normalization
/// (the sample/population factor cancels in the ratio; population keeps
/// intermediate values bit-comparable across implementations).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let n = x.len() as f64;
    let mx = numeric::sum_f64(x) / n;
    let my = numeric::sum_f64(y) / n;
    let cov = numeric::sum_f64_by(x.len(), |i| (x[i] - mx) * (y[i] - my)) / n;
    let vx = numeric::sum_f64_by(x.len(), |i| (x[i] - mx) * (x[i] - mx)) / n;
    let vy = numeric::sum_f64_by(y.len(), |i| (y[i] - my) * (y[i] - my)) / n;
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::DegenerateInput("zero variance in Pearson input".into()));
    }
    Ok(cov / (vx * vy).sqrt())
}

/// The anticorrelation statistic of the angular maps: Pearson `r` between
/// `log G1` and `1 - exp(-g2)` over the map records.
pub fn intensity_g2_anticorrelation(records: &[CorrelationRecord]) -> Result<f64> {
    let x: Vec<f64> = records.iter().map(|r| r.g1_normalized.ln()).collect();
    let y: Vec<f64> = records.iter().map(|r| 1.0 - (-r.g2).exp()).collect();
    pearson(&x, &y)
}

/// Least squares of `log y` on `log x`: returns `a = exp(intercept)`,
/// `b = slope`, and the RMS log-residual.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need matching lists of at least 2 points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::InvalidArgument("power-law fit requires positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = numeric::sum_f64(&lx) / n;
    let my = numeric::sum_f64(&ly) / n;
    let sxx = numeric::sum_f64_by(lx.len(), |i| (lx[i] - mx) * (lx[i] - mx));
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all x values identical".into()));
    }
    let sxy = numeric::sum_f64_by(lx.len(), |i| (lx[i] - mx) * (ly[i] - my));
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let ss = numeric::sum_f64_by(lx.len(), |i| {
        let r = ly[i] - (intercept + b * lx[i]);
        r * r
    });
    Ok(FitResult { a: intercept.exp(), b, rms_log_residual: (ss / n).sqrt() })
}

/// The composite antibunching model `y = (1 + u) / u^2` with `u = a N^b`.
fn antibunch_model(u: f64) -> f64 {
    (1.0 + u) / (u * u)
}

/// Least squares of measured `<(1 + |S|^2) / |S|^4>` values against
/// `(1 + a N^b) / (a N^b)^2` over `(a, b)`.
///
/// The model is exactly invertible (`u = (1 + sqrt(1 + 4y)) / 2y`), which
/// seeds a log-log linear fit; Levenberg-Marquardt in `(ln a, b)` then
/// minimizes the y-space residual. The reported residual is the RMS of
/// `ln(y / model)` for consistency with [`power_law_fit`].
pub fn antibunch_model_fit(ns: &[f64], ys: &[f64]) -> Result<FitResult> {
    if ns.len() != ys.len() || ns.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "composite fit needs at least 3 points, got {} and {}",
            ns.len(),
            ys.len()
        )));
    }
    if ns.iter().chain(ys).any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::InvalidArgument("composite fit requires positive finite data".into()));
    }

    // Exact inversion of y = (1+u)/u^2 for the initial guess.
    let us: Vec<f64> = ys.iter().map(|&y| (1.0 + (1.0 + 4.0 * y).sqrt()) / (2.0 * y)).collect();
    let seed = power_law_fit(ns, &us)?;
    let mut ln_a = seed.a.ln();
    let mut b = seed.b;

    let sse = |ln_a: f64, b: f64| -> f64 {
        numeric::sum_f64_by(ns.len(), |i| {
            let u = (ln_a + b * ns[i].ln()).exp();
            let r = ys[i] - antibunch_model(u);
            r * r
        })
    };

    let mut lambda = 1e-3;
    let mut current = sse(ln_a, b);
    let mut converged = false;
    for _ in 0..200 {
        // Accumulate J^T J and J^T r for the 2-parameter problem.
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..ns.len() {
            let ln_n = ns[i].ln();
            let u = (ln_a + b * ln_n).exp();
            let r = ys[i] - antibunch_model(u);
            // d model / du = -(2 + u) / u^3; du/d ln_a = u, du/db = u ln N.
            let dm_du = -(2.0 + u) / (u * u * u);
            let j1 = -dm_du * u;
            let j2 = j1 * ln_n;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        let m11 = a11 * (1.0 + lambda);
        let m22 = a22 * (1.0 + lambda);
        let det = m11 * m22 - a12 * a12;
        if det.abs() < 1e-300 {
            break;
        }
        let d_ln_a = (g1 * m22 - g2 * a12) / det;
        let d_b = (g2 * m11 - g1 * a12) / det;
        let trial = sse(ln_a + d_ln_a, b + d_b);
        if trial < current {
            ln_a += d_ln_a;
            b += d_b;
            lambda = (lambda / 10.0).max(1e-12);
            let improved = current - trial;
            current = trial;
            if d_ln_a.abs() + d_b.abs() < 1e-12 || improved <= 1e-14 * current.max(1e-300) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                converged = true; // step size exhausted at a minimum
                break;
            }
        }
    }
    if !converged && current.is_nan() {
        return Err(Error::FitDidNotConverge(format!(
            "composite antibunch fit, SSE = {current:.3e} at a = {:.3e}, b = {b:.4}",
            ln_a.exp()
        )));
    }

    let ss_log = numeric::sum_f64_by(ns.len(), |i| {
        let u = (ln_a + b * ns[i].ln()).exp();
        let r = (ys[i] / antibunch_model(u)).ln();
        r * r
    });
    Ok(FitResult { a: ln_a.exp(), b, rms_log_residual: (ss_log / ns.len() as f64).sqrt() })
}

/// Full pipeline for the antibunching N-scaling: ensemble averages of
/// `(1 + |S|^2) / |S|^4` at numerically found `S^(2) = 0` directions for each
/// emitter count, followed by the composite fit.
#[allow(clippy::too_many_arguments)]
pub fn antibunch_scaling_statistic(
    recipe: &GeometryRecipe,
    k_laser: Vec3,
    n_values: &[usize],
    n_seeds: usize,
    n_realizations: usize,
    master_seed: u64,
    resolution: (usize, usize),
) -> Result<(ScalingTable, FitResult)> {
    if n_values.len() < 3 {
        return Err(Error::InvalidArgument("antibunching scaling needs at least 3 emitter counts".into()));
    }
    let table = condition_scaling_sweep(
        recipe,
        k_laser,
        n_values,
        ConditionKind::GeneralizedAntibunch,
        n_seeds,
        n_realizations,
        master_seed,
        resolution,
    )?;
    let fit = antibunch_model_fit(&table.controls(), &table.means())?;
    Ok((table, fit))
}
