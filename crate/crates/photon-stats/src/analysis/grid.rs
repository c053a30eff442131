//! Regular angular grid over the full sphere.

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// `n_theta x n_phi` grid of observation directions at cell centers,
/// `theta` from the z-axis and `phi` the azimuth, stored row-major with
/// `phi` fastest. Weights are exact cell solid angles
/// `(cos theta_lo - cos theta_hi) * dphi`, which partition `4 pi` exactly
/// (they reduce to `sin theta * dtheta * dphi` at first order).
#[derive(Debug, Clone)]
pub struct AngularGrid {
    n_theta: usize,
    n_phi: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    theta_weights: Vec<f64>,
    dphi: f64,
}

impl AngularGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be positive, got {n_theta} x {n_phi}"
            )));
        }
        let dtheta = std::f64::consts::PI / n_theta as f64;
        let dphi = std::f64::consts::TAU / n_phi as f64;
        let thetas: Vec<f64> = (0..n_theta).map(|i| (i as f64 + 0.5) * dtheta).collect();
        let phis: Vec<f64> = (0..n_phi).map(|j| (j as f64 + 0.5) * dphi).collect();
        let theta_weights: Vec<f64> = (0..n_theta)
            .map(|i| {
                let lo = i as f64 * dtheta;
                let hi = (i as f64 + 1.0) * dtheta;
                lo.cos() - hi.cos()
            })
            .collect();
        Ok(AngularGrid { n_theta, n_phi, thetas, phis, theta_weights, dphi })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell-center angles of flat index `idx` (row-major, `phi` fastest).
    pub fn angles(&self, idx: usize) -> (f64, f64) {
        (self.thetas[idx / self.n_phi], self.phis[idx % self.n_phi])
    }

    /// Unit observation direction of flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec3 {
        let (theta, phi) = self.angles(idx);
        vec3::direction(theta, phi)
    }

    /// Solid-angle weight of flat index `idx`; the weights sum to `4 pi`.
    pub fn weight(&self, idx: usize) -> f64 {
        self.theta_weights[idx / self.n_phi] * self.dphi
    }

    /// Angular steps `(dtheta, dphi)`.
    pub fn steps(&self) -> (f64, f64) {
        (std::f64::consts::PI / self.n_theta as f64, self.dphi)
    }
}
