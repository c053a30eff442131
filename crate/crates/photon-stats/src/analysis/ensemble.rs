//! Ensemble averaging over disorder realizations with reproducible seeding.
//!
//! Realization `r` of an ensemble keyed by `master_seed` uses the
//! configuration seed `stable_hash(master_seed, r)`. The hash is a fixed
//! 64-bit mix (splitmix64), so any implementation of this interface can
//! reproduce identical ensembles given the same RNG algorithm; the position
//! generator itself is ChaCha8, recorded in output metadata as
//! [`RNG_ALGORITHM`]. Reductions run over realization-indexed vectors with
//! pairwise summation, making every statistic independent of execution order
//! and thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{EmitterConfig, GeometryRecipe};
use crate::numeric;
use crate::structure;
use crate::vec3::{self, Vec3};

use super::search::{
    ConditionKind, ExtremumKind, StructureFactorTable, CONDITION_LEVELS, EXTREMUM_LEVELS,
};

/// Name of the position RNG, echoed into output metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// splitmix64 (Steele, Lea, Flood 2014), the standard finalizer constants:
/// increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB, shifts 30/27/31.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-realization seed: `splitmix64(splitmix64(master_seed) ^ realization)`.
pub fn stable_hash(master_seed: u64, realization: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ realization)
}

/// Mean and standard error of a statistic over an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStat {
    pub mean: f64,
    /// `None` for a single realization (standard error undefined).
    pub std_error: Option<f64>,
    pub n_realizations: usize,
}

/// Evaluates `statistic` on `n_realizations` independently seeded
/// realizations of `recipe` and reduces to mean and standard error.
pub fn ensemble_average<F>(
    recipe: &GeometryRecipe,
    statistic: F,
    n_realizations: usize,
    master_seed: u64,
) -> Result<EnsembleStat>
where
    F: Fn(&EmitterConfig) -> Result<f64> + Sync,
{
    if n_realizations < 1 {
        return Err(Error::InvalidArgument("need at least one realization".into()));
    }
    let values: Result<Vec<f64>> = (0..n_realizations)
        .into_par_iter()
        .map(|r| {
            let config = recipe.realize(stable_hash(master_seed, r as u64))?;
            statistic(&config)
        })
        .collect();
    let values = values?;
    let (mean, std_error) = numeric::mean_and_std_error(&values);
    Ok(EnsembleStat { mean, std_error, n_realizations })
}

/// One row of a scaling table: ensemble statistic at one control value
/// (saturation parameter or emitter count).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub control: f64,
    pub mean: f64,
    pub std_error: Option<f64>,
    pub n_realizations: usize,
}

/// Ensemble statistics along a strictly monotone control axis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    pub fn validate(&self) -> Result<()> {
        if self.rows.iter().any(|r| r.n_realizations < 1) {
            return Err(Error::InvalidArgument("row with zero realizations".into()));
        }
        let increasing = self.rows.windows(2).all(|w| w[0].control < w[1].control);
        let decreasing = self.rows.windows(2).all(|w| w[0].control > w[1].control);
        if !(increasing || decreasing) {
            return Err(Error::InvalidArgument("control values must be strictly monotone".into()));
        }
        Ok(())
    }

    pub fn controls(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.control).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean).collect()
    }
}

/// Max and min of `g2` over the sphere, per saturation value, averaged over
/// realizations. One structure-factor table per realization serves the whole
/// saturation sweep. Returns `(max table, min table)` with `s` as control.
pub fn extremum_scaling_sweep(
    recipe: &GeometryRecipe,
    k_laser: Vec3,
    s_values: &[f64],
    n_realizations: usize,
    master_seed: u64,
    resolution: (usize, usize),
) -> Result<(ScalingTable, ScalingTable)> {
    if s_values.is_empty() {
        return Err(Error::InvalidArgument("empty saturation list".into()));
    }
    if n_realizations < 1 {
        return Err(Error::InvalidArgument("need at least one realization".into()));
    }
    // [realization][s index] -> (max, min)
    let per_realization: Result<Vec<Vec<(f64, f64)>>> = (0..n_realizations)
        .into_par_iter()
        .map(|r| {
            let config = recipe.realize(stable_hash(master_seed, r as u64))?;
            let table = StructureFactorTable::compute(config, k_laser, resolution)?;
            s_values
                .iter()
                .map(|&s| {
                    let hi = table.g2_extremum(s, ExtremumKind::Max, EXTREMUM_LEVELS)?;
                    let lo = table.g2_extremum(s, ExtremumKind::Min, EXTREMUM_LEVELS)?;
                    Ok((hi.value, lo.value))
                })
                .collect()
        })
        .collect();
    let per_realization = per_realization?;

    let mut max_rows = Vec::with_capacity(s_values.len());
    let mut min_rows = Vec::with_capacity(s_values.len());
    for (si, &s) in s_values.iter().enumerate() {
        let maxima: Vec<f64> = per_realization.iter().map(|row| row[si].0).collect();
        let minima: Vec<f64> = per_realization.iter().map(|row| row[si].1).collect();
        let (mean, std_error) = numeric::mean_and_std_error(&maxima);
        max_rows.push(ScalingRow { control: s, mean, std_error, n_realizations });
        let (mean, std_error) = numeric::mean_and_std_error(&minima);
        min_rows.push(ScalingRow { control: s, mean, std_error, n_realizations });
    }
    Ok((ScalingTable { rows: max_rows }, ScalingTable { rows: min_rows }))
}

/// Structure-factor statistic evaluated at the best numerically found
/// condition direction of each realization, versus emitter count `N`.
///
/// - [`ConditionKind::Destructive`]: `|S(2k)|^2` where `S(k) = 0`
/// - [`ConditionKind::GeneralizedAntibunch`]: `(1 + |S(k)|^2) / |S(k)|^4`
///   where `S^(2)(k) = 0`
#[allow(clippy::too_many_arguments)]
pub fn condition_scaling_sweep(
    recipe: &GeometryRecipe,
    k_laser: Vec3,
    n_values: &[usize],
    kind: ConditionKind,
    n_seeds: usize,
    n_realizations: usize,
    master_seed: u64,
    resolution: (usize, usize),
) -> Result<ScalingTable> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("empty emitter-count list".into()));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for (row_idx, &n) in n_values.iter().enumerate() {
        let row_recipe = recipe.with_count(n);
        let row_seed = stable_hash(master_seed, row_idx as u64);
        let stat = ensemble_average(
            &row_recipe,
            |config| {
                let dirs = super::search::find_condition_directions_with(
                    config,
                    k_laser,
                    2,
                    kind,
                    n_seeds,
                    resolution,
                    CONDITION_LEVELS,
                )?;
                let best = dirs[0];
                let k = vec3::sub(best.k_obs, k_laser);
                match kind {
                    ConditionKind::Destructive => {
                        Ok(structure::structure_factor(config, vec3::scale(k, 2.0)).norm_sqr())
                    }
                    ConditionKind::GeneralizedAntibunch => {
                        let s_abs2 = structure::structure_factor(config, k).norm_sqr();
                        Ok((1.0 + s_abs2) / (s_abs2 * s_abs2))
                    }
                }
            },
            n_realizations,
            row_seed,
        )?;
        rows.push(ScalingRow {
            control: n as f64,
            mean: stat.mean,
            std_error: stat.std_error,
            n_realizations,
        });
    }
    Ok(ScalingTable { rows })
}
