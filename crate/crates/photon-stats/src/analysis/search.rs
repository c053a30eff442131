//! Extremum search on the sphere and interference-condition finders.
//!
//! Both are deterministic: a dense coarse grid followed by local grid
//! refinement (shrink factor 4 per level, 9x9 window recentered on the best
//! point). Ties break to the lowest grid index, and parallel evaluation
//! preserves index order, so results are independent of thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::correlations::{self, DriveParams};
use crate::error::{Error, Result};
use crate::geometry::EmitterConfig;
use crate::structure;
use crate::vec3::{self, Vec3};

use super::grid::AngularGrid;

/// Default coarse resolution for [`extremum_search`] (theta x phi).
pub const EXTREMUM_GRID: (usize, usize) = (360, 720);

/// Default refinement depth for [`extremum_search`].
pub const EXTREMUM_LEVELS: usize = 5;

/// Default coarse resolution for [`find_condition_directions`].
pub const CONDITION_GRID: (usize, usize) = (180, 360);

/// Default refinement depth for the condition finders. Deeper than the
/// extremum default because chain roots are exact zeros and the acceptance
/// residuals sit near 1e-18 * N^2.
pub const CONDITION_LEVELS: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// Minimize `|S(k)|^2` (destructive interference, superbunching).
    Destructive,
    /// Minimize `|S^(m)(k)|^2` (generalized antibunching).
    GeneralizedAntibunch,
}

#[derive(Debug, Clone, Copy)]
pub struct ExtremumResult {
    pub theta: f64,
    pub phi: f64,
    pub k_obs: Vec3,
    pub value: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ConditionDirection {
    pub theta: f64,
    pub phi: f64,
    pub k_obs: Vec3,
    /// The minimized quantity itself (`|S|^2` or `|S^(m)|^2`) at the
    /// returned direction; reported, never assumed zero.
    pub residual: f64,
}

fn argbest(values: &[f64], which: ExtremumKind) -> (usize, f64) {
    let mut best_idx = 0;
    let mut best = values[0];
    for (i, &v) in values.iter().enumerate().skip(1) {
        let better = match which {
            ExtremumKind::Max => v > best,
            ExtremumKind::Min => v < best,
        };
        if better {
            best_idx = i;
            best = v;
        }
    }
    (best_idx, best)
}

/// Local grid refinement around `(theta0, phi0)`. Each level scans a 9x9
/// window at the current step (center included, so the value can only
/// improve), recenters, then shrinks the step by 4.
fn refine_on_sphere<F: Fn(f64, f64) -> f64>(
    objective: &F,
    start: (f64, f64, f64),
    mut step_theta: f64,
    mut step_phi: f64,
    levels: usize,
    which: ExtremumKind,
) -> (f64, f64, f64) {
    let (mut best_t, mut best_p, mut best_v) = start;
    for _ in 0..levels {
        let (center_t, center_p) = (best_t, best_p);
        for dt in -4i32..=4 {
            for dp in -4i32..=4 {
                if dt == 0 && dp == 0 {
                    continue;
                }
                let t = center_t + dt as f64 * step_theta;
                let p = center_p + dp as f64 * step_phi;
                let v = objective(t, p);
                let better = match which {
                    ExtremumKind::Max => v > best_v,
                    ExtremumKind::Min => v < best_v,
                };
                if better {
                    best_t = t;
                    best_p = p;
                    best_v = v;
                }
            }
        }
        step_theta /= 4.0;
        step_phi /= 4.0;
    }
    (best_t, best_p, best_v)
}

/// Shared implementation: coarse scan + refinement of a direction objective.
fn search_direction<F: Fn(f64, f64) -> f64 + Sync>(
    objective: F,
    grid: &AngularGrid,
    which: ExtremumKind,
    levels: usize,
) -> ExtremumResult {
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (t, p) = grid.angles(i);
            objective(t, p)
        })
        .collect();
    let (idx, coarse_best) = argbest(&values, which);
    let (t0, p0) = grid.angles(idx);
    let (dt, dp) = grid.steps();
    let (theta, phi, value) =
        refine_on_sphere(&objective, (t0, p0, coarse_best), dt / 4.0, dp / 4.0, levels, which);
    ExtremumResult { theta, phi, k_obs: vec3::direction(theta, phi), value }
}

fn entry_guard(config: &EmitterConfig, s: f64) -> Result<()> {
    config.validate()?;
    if s * (config.len() as f64) < correlations::MIN_NORMALIZED_INTENSITY {
        return Err(Error::DegenerateInput(format!(
            "sN = {:.3e} leaves the normalized intensity unguarded",
            s * config.len() as f64
        )));
    }
    Ok(())
}

/// Builds the order-`m` objective over observation directions: the exact
/// closed form for `m = 2`, the leading-order `g^(m)` otherwise.
fn gm_objective<'a>(
    config: &'a EmitterConfig,
    drive: &DriveParams,
    m: usize,
) -> Result<impl Fn(f64, f64) -> f64 + Sync + 'a> {
    let partitions = if m == 2 { None } else { Some(structure::enumerate_partitions(m)?) };
    let s = drive.s();
    let n = config.len() as f64;
    let k_laser = drive.k_laser();
    Ok(move |theta: f64, phi: f64| {
        let k = vec3::sub(vec3::direction(theta, phi), k_laser);
        match &partitions {
            None => {
                let v = structure::harmonics(config, k, 2);
                correlations::g2_value(s, n, v[0], v[1])
            }
            Some(parts) => {
                let v = structure::harmonics(config, k, m);
                let generalized = structure::generalized_from_values(parts, &v);
                let g1n = s * n + v[0].norm_sqr();
                generalized.norm_sqr() / g1n.powi(m as i32)
            }
        }
    })
}

/// Two-stage deterministic search for the direction extremizing the order-`m`
/// autocorrelation: dense grid (default 720x360 in phi x theta), then
/// 5 levels of factor-4 local refinement. The returned value is never worse
/// than the best coarse-grid value.
pub fn extremum_search(
    config: &EmitterConfig,
    drive: &DriveParams,
    m: usize,
    which: ExtremumKind,
) -> Result<ExtremumResult> {
    extremum_search_with(config, drive, m, which, EXTREMUM_GRID, EXTREMUM_LEVELS)
}

/// [`extremum_search`] with explicit coarse resolution `(n_theta, n_phi)`
/// and refinement depth.
pub fn extremum_search_with(
    config: &EmitterConfig,
    drive: &DriveParams,
    m: usize,
    which: ExtremumKind,
    resolution: (usize, usize),
    levels: usize,
) -> Result<ExtremumResult> {
    if m < 1 {
        return Err(Error::InvalidArgument("correlation order must be at least 1".into()));
    }
    entry_guard(config, drive.s())?;
    let grid = AngularGrid::new(resolution.0, resolution.1)?;
    let objective = gm_objective(config, drive, m)?;
    Ok(search_direction(objective, &grid, which, levels))
}

/// `S(k)` and `S(2k)` tabulated on an angular grid for one configuration and
/// laser direction. The `s`-dependence of `g2` is analytic, so one table
/// serves a whole saturation sweep; refinement re-evaluates exactly at fresh
/// directions.
#[derive(Debug, Clone)]
pub struct StructureFactorTable {
    config: EmitterConfig,
    k_laser: Vec3,
    grid: AngularGrid,
    s1: Vec<Complex64>,
    s2: Vec<Complex64>,
}

impl StructureFactorTable {
    pub fn compute(
        config: EmitterConfig,
        k_laser: Vec3,
        resolution: (usize, usize),
    ) -> Result<Self> {
        config.validate()?;
        if !vec3::is_unit(k_laser) {
            return Err(Error::InvalidArgument("laser direction must be a unit vector".into()));
        }
        let grid = AngularGrid::new(resolution.0, resolution.1)?;
        let pairs: Vec<(Complex64, Complex64)> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let k = vec3::sub(grid.point(i), k_laser);
                let v = structure::harmonics(&config, k, 2);
                (v[0], v[1])
            })
            .collect();
        let (s1, s2) = pairs.into_iter().unzip();
        Ok(StructureFactorTable { config, k_laser, grid, s1, s2 })
    }

    /// Extremum of the exact `g2` at saturation `s`, seeded from the table
    /// and refined with fresh structure-factor evaluations.
    pub fn g2_extremum(&self, s: f64, which: ExtremumKind, levels: usize) -> Result<ExtremumResult> {
        entry_guard(&self.config, s)?;
        let n = self.config.len() as f64;
        let values: Vec<f64> = (0..self.grid.len())
            .map(|i| correlations::g2_value(s, n, self.s1[i], self.s2[i]))
            .collect();
        let (idx, coarse_best) = argbest(&values, which);
        let (t0, p0) = self.grid.angles(idx);
        let (dt, dp) = self.grid.steps();
        let objective = |theta: f64, phi: f64| {
            let k = vec3::sub(vec3::direction(theta, phi), self.k_laser);
            let v = structure::harmonics(&self.config, k, 2);
            correlations::g2_value(s, n, v[0], v[1])
        };
        let (theta, phi, value) =
            refine_on_sphere(&objective, (t0, p0, coarse_best), dt / 4.0, dp / 4.0, levels, which);
        Ok(ExtremumResult { theta, phi, k_obs: vec3::direction(theta, phi), value })
    }
}

/// Coherent-intensity floor separating true generalized-antibunching roots
/// from joint zeros. On a chain, every destructive root (`S = 0` and
/// `S(2k) = 0`) also zeroes `S^(2) = S^2 - S(2k)`, but those directions are
/// superbunching peaks, not antibunching dips; physical antibunching roots
/// carry `|S| = 1` (chains) or `|S| ~ N^(1/4)` (disorder), far above this
/// floor, while refined joint zeros sit many orders below it.
const MIN_COHERENT_AT_ANTIBUNCH: f64 = 1e-3;

/// Finds observation directions satisfying an interference condition by
/// minimizing its residual from `n_seeds` coarse-grid seeds (default grid
/// 180x360, 18 refinement levels). Seeds are kept a few cells apart so they
/// converge to distinct minima; results come back sorted by residual.
///
/// On a chain with geometric phase `phi`, the destructive roots are
/// `phi = 2 pi q / N` for `q` not a multiple of `N`; for even `N` the
/// half-integer roots `phi = (2q+1) pi` are special in that `S(2k) = N`
/// there, turning them into the strongest superbunching directions rather
/// than ordinary destructive ones. Antibunching roots sit on the
/// `phi = 2 pi q / (N-1)` lattice instead.
///
/// For [`ConditionKind::GeneralizedAntibunch`], candidates whose coherent
/// intensity `|S(k)|^2` collapsed below [`MIN_COHERENT_AT_ANTIBUNCH`] are
/// discarded as joint zeros (see the constant's documentation); if every
/// seed converged to one, a degenerate-input error asks for more seeds.
pub fn find_condition_directions(
    config: &EmitterConfig,
    k_laser: Vec3,
    m: usize,
    kind: ConditionKind,
    n_seeds: usize,
) -> Result<Vec<ConditionDirection>> {
    find_condition_directions_with(config, k_laser, m, kind, n_seeds, CONDITION_GRID, CONDITION_LEVELS)
}

/// [`find_condition_directions`] with explicit coarse resolution and
/// refinement depth.
pub fn find_condition_directions_with(
    config: &EmitterConfig,
    k_laser: Vec3,
    m: usize,
    kind: ConditionKind,
    n_seeds: usize,
    resolution: (usize, usize),
    levels: usize,
) -> Result<Vec<ConditionDirection>> {
    if n_seeds < 1 {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    config.validate()?;
    if !vec3::is_unit(k_laser) {
        return Err(Error::InvalidArgument("laser direction must be a unit vector".into()));
    }
    let partitions = match kind {
        ConditionKind::Destructive => None,
        ConditionKind::GeneralizedAntibunch => Some(structure::enumerate_partitions(m)?),
    };
    // Seeding and refinement run on a steering objective; the reported
    // residual is always the condition quantity |S|^2 or |S^(m)|^2 itself.
    // For the antibunch kind the steering objective is |S^(m)|^2 / |S|^(2m):
    // it vanishes at true roots but diverges at joint zeros (where S -> 0
    // faster than S(lk)), whose wide shallow |S^(m)|^2 valleys would
    // otherwise capture every seed.
    let evaluate = |theta: f64, phi: f64| -> (f64, f64, f64) {
        let k = vec3::sub(vec3::direction(theta, phi), k_laser);
        match &partitions {
            None => {
                let residual = structure::structure_factor(config, k).norm_sqr();
                (residual, residual, residual)
            }
            Some(parts) => {
                let v = structure::harmonics(config, k, m);
                let residual = structure::generalized_from_values(parts, &v).norm_sqr();
                let s_abs2 = v[0].norm_sqr();
                (residual / s_abs2.powi(m as i32), residual, s_abs2)
            }
        }
    };
    let steering = |theta: f64, phi: f64| evaluate(theta, phi).0;

    let grid = AngularGrid::new(resolution.0, resolution.1)?;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (t, p) = grid.angles(i);
            steering(t, p)
        })
        .collect();

    // Seeds: ascending steering value, separated by at least 4 cells
    // (Manhattan on the grid, phi wrapping) so they explore distinct basins.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let n_phi = grid.n_phi();
    let mut seeds: Vec<usize> = Vec::with_capacity(n_seeds);
    for idx in order {
        let (ti, pi) = (idx / n_phi, idx % n_phi);
        let separated = seeds.iter().all(|&s| {
            let (ts, ps) = (s / n_phi, s % n_phi);
            let dp = (pi as isize - ps as isize).unsigned_abs();
            let dp = dp.min(n_phi - dp);
            (ti as isize - ts as isize).unsigned_abs() + dp >= 4
        });
        if separated {
            seeds.push(idx);
            if seeds.len() == n_seeds {
                break;
            }
        }
    }

    let (dt, dp) = grid.steps();
    let mut found: Vec<(ConditionDirection, f64)> = seeds
        .par_iter()
        .map(|&idx| {
            let (t0, p0) = grid.angles(idx);
            let (theta, phi, _) = refine_on_sphere(
                &steering,
                (t0, p0, values[idx]),
                dt / 4.0,
                dp / 4.0,
                levels,
                ExtremumKind::Min,
            );
            let (_, residual, s_abs2) = evaluate(theta, phi);
            (
                ConditionDirection { theta, phi, k_obs: vec3::direction(theta, phi), residual },
                s_abs2,
            )
        })
        .collect();
    if kind == ConditionKind::GeneralizedAntibunch {
        found.retain(|(_, s_abs2)| *s_abs2 >= MIN_COHERENT_AT_ANTIBUNCH);
        if found.is_empty() {
            return Err(Error::DegenerateInput(
                "every antibunch seed converged to a joint zero of S and S(2k); increase n_seeds".into(),
            ));
        }
    }
    let mut found: Vec<ConditionDirection> = found.into_iter().map(|(d, _)| d).collect();
    found.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    Ok(found)
}
