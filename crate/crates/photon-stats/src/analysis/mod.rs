//! Angular maps, great-circle scans, extremum searches, ensemble averages,
//! and scaling fits over observation directions.
//!
//! Everything here is deterministic under a fixed master seed: grid points
//! and realizations evaluate independently, reductions are pairwise over
//! index-ordered vectors, and argmax ties break to the lowest index, so
//! results are bit-identical across thread counts.

mod ensemble;
mod fit;
mod grid;
mod search;

pub use ensemble::{
    condition_scaling_sweep, ensemble_average, extremum_scaling_sweep, stable_hash, EnsembleStat,
    ScalingRow, ScalingTable, RNG_ALGORITHM,
};
pub use fit::{
    antibunch_model_fit, antibunch_scaling_statistic, intensity_g2_anticorrelation, pearson,
    power_law_fit, FitResult,
};
pub use grid::AngularGrid;
pub use search::{
    extremum_search, extremum_search_with, find_condition_directions,
    find_condition_directions_with, ConditionDirection, ConditionKind, ExtremumKind,
    ExtremumResult, StructureFactorTable, CONDITION_GRID, CONDITION_LEVELS, EXTREMUM_GRID,
    EXTREMUM_LEVELS,
};

use rayon::prelude::*;

use crate::correlations::{CorrelationRecord, DriveParams};
use crate::error::{Error, Result};
use crate::geometry::EmitterConfig;
use crate::structure::ScatteringVector;
use crate::vec3::{self, Vec3};

/// One record per grid point, in grid order (theta rows, phi fastest).
pub fn angular_map(
    config: &EmitterConfig,
    drive: &DriveParams,
    grid: &AngularGrid,
    orders: &[usize],
) -> Result<Vec<CorrelationRecord>> {
    config.validate()?;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let sv = ScatteringVector::new(grid.point(i), drive.k_laser())?;
            CorrelationRecord::evaluate(config, drive, sv, orders)
        })
        .collect()
}

/// Records along the great circle cut by the plane with the given normal,
/// at `n_points` equally spaced angles in `[0, 2 pi)`. The angle origin is
/// the laser direction (its in-plane projection when the laser is tilted out
/// of the plane), so `angle = 0` is forward scattering.
pub fn plane_scan(
    config: &EmitterConfig,
    drive: &DriveParams,
    plane_normal: Vec3,
    n_points: usize,
    orders: &[usize],
) -> Result<Vec<(f64, CorrelationRecord)>> {
    config.validate()?;
    if n_points < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 points".into()));
    }
    let normal = vec3::normalize(plane_normal)
        .ok_or_else(|| Error::InvalidArgument("plane normal must be a non-zero vector".into()))?;
    let k_laser = drive.k_laser();
    let in_plane = vec3::sub(k_laser, vec3::scale(normal, vec3::dot(k_laser, normal)));
    let e1 = vec3::normalize(in_plane).unwrap_or_else(|| vec3::any_orthonormal(normal));
    let e2 = vec3::cross(normal, e1);
    (0..n_points)
        .into_par_iter()
        .map(|i| {
            let angle = i as f64 * std::f64::consts::TAU / n_points as f64;
            let (sin_a, cos_a) = angle.sin_cos();
            let k_obs = vec3::add(vec3::scale(e1, cos_a), vec3::scale(e2, sin_a));
            let sv = ScatteringVector::new(k_obs, k_laser)?;
            Ok((angle, CorrelationRecord::evaluate(config, drive, sv, orders)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{g2_ordered_predictions, OrderedRegime};
    use crate::geometry::{self, GeometryKind};
    use std::f64::consts::PI;

    fn drive(s: f64) -> DriveParams {
        DriveParams::new(s, [0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn single_emitter_map_is_all_antibunched() {
        let c = geometry::sample_ball(1, 1.0, 0).unwrap();
        let grid = AngularGrid::new(18, 36).unwrap();
        let records = angular_map(&c, &drive(0.3), &grid, &[]).unwrap();
        assert_eq!(records.len(), grid.len());
        assert!(records.iter().all(|r| r.g2.abs() < 1e-12));
    }

    #[test]
    fn forward_pixel_carries_coherent_intensity() {
        // A grid with odd n_theta has no pixel exactly at the pole, so scan
        // for the record nearest the forward direction instead.
        let n = 50;
        let c = geometry::sample_ball(n, 4.0, 8).unwrap();
        let grid = AngularGrid::new(90, 180).unwrap();
        let records = angular_map(&c, &drive(1e-3), &grid, &[]).unwrap();
        let forward = records
            .iter()
            .enumerate()
            .min_by(|(i, _), (j, _)| {
                let ti = grid.angles(*i).0;
                let tj = grid.angles(*j).0;
                ti.total_cmp(&tj)
            })
            .unwrap()
            .1;
        let expect = 1e-3 * n as f64 + (n * n) as f64;
        assert!(
            (forward.g1_normalized - expect).abs() / expect < 0.05,
            "g1 = {}, expected about {expect}",
            forward.g1_normalized
        );
    }

    #[test]
    fn map_is_deterministic_across_thread_counts() {
        let c = geometry::sample_ball(20, 5.0, 4).unwrap();
        let d = drive(1e-4);
        let grid = AngularGrid::new(24, 48).unwrap();
        let reference = angular_map(&c, &d, &grid, &[2, 3]).unwrap();
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let map = pool.install(|| angular_map(&c, &d, &grid, &[2, 3]).unwrap());
            for (a, b) in reference.iter().zip(&map) {
                assert_eq!(a.g2.to_bits(), b.g2.to_bits());
                assert_eq!(a.g1_normalized.to_bits(), b.g1_normalized.to_bits());
            }
        }
    }

    #[test]
    fn chain_scan_reproduces_geometric_phase() {
        // Chain along x, laser along z, scan in the xz-plane: the geometric
        // phase is d sin(angle), so every scan value must equal the closed
        // form evaluated from the 1D chain structure factors at that phase.
        let n = 100;
        let spacing = 0.2;
        let chain = geometry::generate_chain(n, spacing, [1.0, 0.0, 0.0]).unwrap();
        let s = 1e-3;
        let points = 4096;
        let scan = plane_scan(&chain, &drive(s), [0.0, 1.0, 0.0], points, &[]).unwrap();
        assert_eq!(scan.len(), points);
        for (angle, record) in &scan {
            let phi = spacing * angle.sin();
            let s1 = crate::structure::chain_structure_factor(n, phi);
            let s2 = crate::structure::chain_structure_factor(n, 2.0 * phi);
            let expect = crate::correlations::g2_value(s, n as f64, s1, s2);
            assert!(
                (record.g2 - expect).abs() / expect.abs().max(1e-30) < 1e-9,
                "angle {angle}: scan {} vs chain formula {expect}",
                record.g2
            );
        }

        // The sampled peak sits near the q = 1 destructive root and
        // approaches the closed-form prediction from below.
        let peak = scan.iter().map(|(_, r)| r.g2).fold(f64::NEG_INFINITY, f64::max);
        let predicted = g2_ordered_predictions(n, s, OrderedRegime::Destructive).unwrap();
        assert!(
            peak > 0.5 * predicted && peak < predicted * (1.0 + 1e-9),
            "peak {peak} vs prediction {predicted}"
        );
    }

    #[test]
    fn weakly_driven_cloud_map_spans_super_and_antibunching() {
        let c = geometry::sample_ball(100, 6.0 * PI, 1).unwrap();
        let grid = AngularGrid::new(180, 360).unwrap();
        let records = angular_map(&c, &drive(1e-6), &grid, &[]).unwrap();
        let max = records.iter().map(|r| r.g2).fold(f64::NEG_INFINITY, f64::max);
        let min = records.iter().map(|r| r.g2).fold(f64::INFINITY, f64::min);
        assert!(max > 100.0, "expected superbunching pixels, max = {max}");
        assert!(min < 0.1, "expected antibunching pixels, min = {min}");
    }

    #[test]
    fn scan_fluctuations_grow_as_drive_vanishes() {
        let c = geometry::sample_ball(100, 6.0 * PI, 2).unwrap();
        let mut spans = Vec::new();
        for &s in &[1e-6, 1e-2, 10.0] {
            let scan = plane_scan(&c, &drive(s), [0.0, 1.0, 0.0], 720, &[]).unwrap();
            let max = scan.iter().map(|(_, r)| r.g2).fold(f64::NEG_INFINITY, f64::max);
            let min = scan.iter().map(|(_, r)| r.g2).fold(f64::INFINITY, f64::min);
            spans.push(max - min);
        }
        assert!(spans[0] > spans[1] && spans[1] > spans[2], "spans = {spans:?}");
    }

    #[test]
    fn mirror_symmetric_pair_scans_symmetrically() {
        let c = EmitterConfig {
            kind: GeometryKind::Custom,
            seed: None,
            params: serde_json::Map::new(),
            positions: vec![[1.0, 0.7, 3.0], [1.0, -0.7, 3.0]],
        };
        let scan = plane_scan(&c, &drive(0.5), [0.0, 1.0, 0.0], 360, &[]).unwrap();
        let n = scan.len();
        for i in 1..n / 2 {
            let fwd = scan[i].1.g2;
            let bwd = scan[n - i].1.g2;
            assert!((fwd - bwd).abs() < 1e-10, "asymmetry at index {i}: {fwd} vs {bwd}");
        }
    }

    #[test]
    fn scan_rejects_zero_normal() {
        let c = geometry::sample_ball(3, 2.0, 0).unwrap();
        assert!(plane_scan(&c, &drive(1.0), [0.0, 0.0, 0.0], 10, &[]).is_err());
        assert!(plane_scan(&c, &drive(1.0), [0.0, 1.0, 0.0], 1, &[]).is_err());
    }
}
