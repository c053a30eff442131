//! Minimal helpers for `[f64; 3]` vectors.
//!
//! Positions are stored dimensionless (position times optical wavenumber), so
//! every phase in the library is a plain dot product with a wave vector.

pub type Vec3 = [f64; 3];

/// Tolerance for unit-norm checks on direction vectors.
pub const UNIT_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, t: f64) -> Vec3 {
    [a[0] * t, a[1] * t, a[2] * t]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn is_unit(a: Vec3) -> bool {
    (norm(a) - 1.0).abs() <= UNIT_TOL
}

pub fn is_finite(a: Vec3) -> bool {
    a.iter().all(|c| c.is_finite())
}

/// Normalizes `a`; returns `None` for vectors shorter than `1e-12`.
pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    if n < 1e-12 {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

/// Unit vector on the sphere: `theta` measured from the z-axis, `phi` azimuth
/// from the x-axis.
#[inline]
pub fn direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Some unit vector orthogonal to `a` (deterministic choice: Gram-Schmidt
/// against the coordinate axis least aligned with `a`).
pub fn any_orthonormal(a: Vec3) -> Vec3 {
    let abs = [a[0].abs(), a[1].abs(), a[2].abs()];
    let mut least = 0;
    if abs[1] < abs[least] {
        least = 1;
    }
    if abs[2] < abs[least] {
        least = 2;
    }
    let mut e = [0.0; 3];
    e[least] = 1.0;
    let proj = dot(e, a);
    normalize(sub(e, scale(a, proj))).expect("axis least aligned with a unit vector")
}
