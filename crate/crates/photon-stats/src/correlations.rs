//! Intensity and photon autocorrelation functions for ensembles of
//! independent, weakly driven two-level emitters.
//!
//! The steady state of each emitter is the product of identical single-atom
//! density matrices, so every expectation value factorizes per atom. The
//! closed-form second-order autocorrelation reads
//!
//! ```text
//! g2(k) = [ 2sN(2 + s(N-1)) + 4s(N-2)|S(k)|^2 + |S^2(k) - S(2k)|^2 ]
//!         / (sN + |S(k)|^2)^2
//! ```
//!
//! and is checked against [`correlation_bruteforce`], a direct sum over all
//! index tuples using only the per-atom operator algebra — an oracle with no
//! shared algebra beyond the steady state itself.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::EmitterConfig;
use crate::structure::{self, ScatteringVector};
use crate::vec3::{self, Vec3};

/// Normalized-intensity floor below which correlation functions report a
/// degenerate input instead of dividing toward infinity. Unreachable for any
/// validated drive (`s > 0` implies `sN` above it), but pathological inputs
/// funnel here.
pub const MIN_NORMALIZED_INTENSITY: f64 = 1e-30;

/// Heuristic validity threshold for the destructive-direction prediction:
/// the residual coherent intensity should satisfy `|S(k)|^2 < 0.01 * sN`.
/// Library constant, not a measured value.
pub const DESTRUCTIVE_REGIME_FRACTION: f64 = 0.01;

/// Heuristic agreement tolerance for the antibunching approximation at
/// numerically found generalized-antibunching directions.
pub const ANTIBUNCH_PREDICTION_TOLERANCE: f64 = 0.30;

/// Saturation parameter and laser direction of the resonant plane-wave drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    s: f64,
    k_laser: Vec3,
}

impl DriveParams {
    pub fn new(s: f64, k_laser: Vec3) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "saturation parameter must be finite and positive, got {s}"
            )));
        }
        if !vec3::is_unit(k_laser) {
            return Err(Error::InvalidArgument(format!(
                "laser direction must be a unit vector, got norm {}",
                vec3::norm(k_laser)
            )));
        }
        Ok(Self { s, k_laser })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn k_laser(&self) -> Vec3 {
        self.k_laser
    }

    pub fn steady_state(&self) -> SteadyState {
        SteadyState::new(self.s)
    }
}

/// Single-atom steady state of the optical Bloch equations under resonant
/// drive: excited population `s / 2(1+s)` and real, negative dipole
/// coherence `<sigma+> = -sqrt(s) / (sqrt(2) (1+s))`.
///
/// To first order in `s` the coherence approaches `-sqrt(s/2)`, the
/// amplitude of the classical damped-oscillator coherent state; the mapping
/// degrades at higher drive, which is where the nonclassical statistics
/// originate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub excited_population: f64,
    pub coherence: f64,
}

impl SteadyState {
    pub fn new(s: f64) -> Self {
        SteadyState {
            excited_population: s / (2.0 * (1.0 + s)),
            coherence: -s.sqrt() / (std::f64::consts::SQRT_2 * (1.0 + s)),
        }
    }
}

/// Normalized and physical first-order intensity at scattering vector `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intensity {
    /// `sN + |S(k)|^2`
    pub normalized: f64,
    /// `s / (2 (1+s)^2) * (sN + |S(k)|^2)`
    pub physical: f64,
}

/// First-order correlation `G1(k)`: the spontaneous-emission background `sN`
/// plus the coherent speckle `|S(k)|^2`.
pub fn g1(config: &EmitterConfig, drive: &DriveParams, k: Vec3) -> Intensity {
    let s = drive.s;
    let n = config.len() as f64;
    let s_abs2 = structure::structure_factor(config, k).norm_sqr();
    let normalized = s * n + s_abs2;
    let physical = s / (2.0 * (1.0 + s) * (1.0 + s)) * normalized;
    Intensity { normalized, physical }
}

/// Raw closed form from `S(k)` and `S(2k)`; callers guard the denominator
/// (see [`MIN_NORMALIZED_INTENSITY`]).
pub(crate) fn g2_value(s: f64, n: f64, s_k: Complex64, s_2k: Complex64) -> f64 {
    let s_abs2 = s_k.norm_sqr();
    let g1n = s * n + s_abs2;
    // |S^2 - S(2k)|^2 in complex arithmetic before the modulus; the expanded
    // four-term form is reserved for the oracle.
    let interference = (s_k * s_k - s_2k).norm_sqr();
    let numerator = 2.0 * s * n * (2.0 + s * (n - 1.0)) + 4.0 * s * (n - 2.0) * s_abs2 + interference;
    numerator / (g1n * g1n)
}

/// Core of the closed form, shared by the standalone entry point and the
/// map evaluators that already hold `S(k)` and `S(2k)`.
pub(crate) fn g2_from_factors(s: f64, n: f64, s_k: Complex64, s_2k: Complex64) -> Result<f64> {
    let g1n = s * n + s_k.norm_sqr();
    if g1n < MIN_NORMALIZED_INTENSITY {
        return Err(Error::DegenerateInput(format!(
            "normalized intensity {g1n:.3e} below {MIN_NORMALIZED_INTENSITY:.0e}"
        )));
    }
    Ok(g2_value(s, n, s_k, s_2k))
}

/// Equal-time second-order autocorrelation `g2(k)`, evaluated exactly from
/// the structure factors at `k` and `2k`.
pub fn g2_closed_form(config: &EmitterConfig, drive: &DriveParams, k: Vec3) -> Result<f64> {
    let values = structure::harmonics(config, k, 2);
    g2_from_factors(drive.s, config.len() as f64, values[0], values[1])
}

/// Leading term of `g^(m)(k)` as `s -> 0`:
/// `|S^(m)(k)|^2 / (sN + |S(k)|^2)^m`.
pub fn gm_leading_order(
    config: &EmitterConfig,
    drive: &DriveParams,
    k: Vec3,
    m: usize,
) -> Result<f64> {
    let set = structure::StructureFactorSet::compute(config, k, m)?;
    let g1n = drive.s * config.len() as f64 + set.values[0].norm_sqr();
    if g1n < MIN_NORMALIZED_INTENSITY {
        return Err(Error::DegenerateInput(format!(
            "normalized intensity {g1n:.3e} below {MIN_NORMALIZED_INTENSITY:.0e}"
        )));
    }
    Ok(set.generalized.norm_sqr() / g1n.powi(m as i32))
}

/// Direct evaluation of `g^(m)(k) = G^(m) / (G^(1))^m` by summing the
/// 2m-fold index expansion of `<E- ... E- E+ ... E+>` over all tuples.
///
/// Per atom, an operator content of `a` raisings and `b` lowerings
/// evaluates to 0 if `a >= 2` or `b >= 2` (a two-level atom cannot absorb a
/// second photon), the excited population for `(1,1)`, the coherence for
/// `(1,0)` or `(0,1)`, and 1 for `(0,0)`. Tuples hitting a zero factor are
/// pruned. This is the independent oracle for [`g2_closed_form`] at `m = 2`
/// and the only full-drive path for `m >= 3`.
///
/// Guarded at `N^(2m) <= 1e8` enumerated tuples.
pub fn correlation_bruteforce(
    config: &EmitterConfig,
    drive: &DriveParams,
    k: Vec3,
    m: usize,
) -> Result<f64> {
    if !(1..=structure::MAX_ORDER).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "order m = {m} outside supported range 1..={}",
            structure::MAX_ORDER
        )));
    }
    let n = config.len();
    if (n as f64).powi(2 * m as i32) > 1e8 {
        return Err(Error::ResourceLimit(format!(
            "brute-force g^({m}) over N = {n} emitters exceeds 1e8 tuples"
        )));
    }
    let g_m = bruteforce_unnormalized(config, drive, k, m);
    let g_1 = bruteforce_unnormalized(config, drive, k, 1);
    if g_1.powi(m as i32) < MIN_NORMALIZED_INTENSITY {
        return Err(Error::DegenerateInput(format!(
            "brute-force G1^m = {:.3e} below {MIN_NORMALIZED_INTENSITY:.0e}",
            g_1.powi(m as i32)
        )));
    }
    Ok(g_m / g_1.powi(m as i32))
}

/// `G^(m)` by direct tuple enumeration (no guard; callers guard).
fn bruteforce_unnormalized(config: &EmitterConfig, drive: &DriveParams, k: Vec3, m: usize) -> f64 {
    let ss = drive.steady_state();
    let z: Vec<Complex64> = config
        .positions
        .iter()
        .map(|p| Complex64::cis(vec3::dot(k, *p)))
        .collect();
    let n = z.len();

    // Weight bookkeeping: an atom contributes p_ee if it carries one raising
    // and one lowering, coh if it carries exactly one operator, 1 if none.
    let mut pee_pow = vec![1.0; m + 1];
    for i in 1..=m {
        pee_pow[i] = pee_pow[i - 1] * ss.excited_population;
    }
    let mut coh_pow = vec![1.0; 2 * m + 1];
    for i in 1..=2 * m {
        coh_pow[i] = coh_pow[i - 1] * ss.coherence;
    }

    struct Ctx<'a> {
        z: &'a [Complex64],
        raise_count: Vec<u8>,
        lower_count: Vec<u8>,
        pairs: usize,
        singles: usize,
        pee_pow: &'a [f64],
        coh_pow: &'a [f64],
        total: Complex64,
    }

    fn raise_rec(ctx: &mut Ctx, slot: usize, m: usize, phase: Complex64) {
        if slot == m {
            lower_rec(ctx, 0, m, phase);
            return;
        }
        for i in 0..ctx.z.len() {
            if ctx.raise_count[i] > 0 {
                continue; // (sigma+)^2 annihilates
            }
            ctx.raise_count[i] = 1;
            ctx.singles += 1;
            let zi = ctx.z[i];
            raise_rec(ctx, slot + 1, m, phase * zi);
            ctx.raise_count[i] = 0;
            ctx.singles -= 1;
        }
    }

    fn lower_rec(ctx: &mut Ctx, slot: usize, m: usize, phase: Complex64) {
        if slot == m {
            let w = ctx.pee_pow[ctx.pairs] * ctx.coh_pow[ctx.singles];
            ctx.total += phase * w;
            return;
        }
        for i in 0..ctx.z.len() {
            if ctx.lower_count[i] > 0 {
                continue; // (sigma-)^2 annihilates
            }
            ctx.lower_count[i] = 1;
            let raised = ctx.raise_count[i] > 0;
            if raised {
                ctx.pairs += 1;
                ctx.singles -= 1;
            } else {
                ctx.singles += 1;
            }
            let zi_conj = ctx.z[i].conj();
            lower_rec(ctx, slot + 1, m, phase * zi_conj);
            ctx.lower_count[i] = 0;
            if raised {
                ctx.pairs -= 1;
                ctx.singles += 1;
            } else {
                ctx.singles -= 1;
            }
        }
    }

    let mut ctx = Ctx {
        z: &z,
        raise_count: vec![0; n],
        lower_count: vec![0; n],
        pairs: 0,
        singles: 0,
        pee_pow: &pee_pow,
        coh_pow: &coh_pow,
        total: Complex64::new(0.0, 0.0),
    };
    raise_rec(&mut ctx, 0, m, Complex64::new(1.0, 0.0));
    ctx.total.re
}

/// Asymptotic regime selectors for the ordered-chain predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderedRegime {
    /// Destructive interference, `S(k) = 0` and `S(2k) = 0`:
    /// `g2 = 4/(sN) + 2 - 2/N`.
    Destructive,
    /// Antibunching root, `S^2(k) = S(2k)` with `|S| = 1`: `g2 ~ 8sN`,
    /// valid for `sN << 1`.
    Antibunch,
    /// Even-N half-integer root, `S(k) = 0` but `S(2k) = N`: the closed form
    /// with those factors, scaling as `1/s^2`.
    EvenException,
}

/// Closed-form chain predictions at the named interference conditions.
pub fn g2_ordered_predictions(n: usize, s: f64, regime: OrderedRegime) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "ordered predictions need at least 2 emitters, got {n}"
        )));
    }
    let nf = n as f64;
    match regime {
        OrderedRegime::Destructive => Ok(4.0 / (s * nf) + 2.0 - 2.0 / nf),
        OrderedRegime::Antibunch => Ok(8.0 * s * nf),
        OrderedRegime::EvenException => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "the half-integer-root exception requires even N, got {n}"
                )));
            }
            // The closed form with S = 0, S(2k) = N.
            let numerator = 2.0 * s * nf * (2.0 + s * (nf - 1.0)) + nf * nf;
            Ok(numerator / (s * nf * (s * nf)))
        }
    }
}

/// Destructive-direction prediction using the configuration's actual
/// `S(2k)`: `|S(2k)|^2 / (sN)^2 + 4/(sN) + 2 - 2/N`. Intended for
/// directions where `|S(k)|^2 << sN`.
pub fn g2_destructive_prediction(config: &EmitterConfig, drive: &DriveParams, k: Vec3) -> f64 {
    let n = config.len() as f64;
    let sn = drive.s * n;
    let s_2k = structure::structure_factor(config, vec3::scale(k, 2.0));
    s_2k.norm_sqr() / (sn * sn) + 4.0 / sn + 2.0 - 2.0 / n
}

/// Antibunching approximation near generalized-antibunching directions:
/// `4sN (1 + |S(k)|^2) / |S(k)|^4`, using the actual `|S(k)|^2`.
pub fn g2_antibunch_prediction(config: &EmitterConfig, drive: &DriveParams, k: Vec3) -> f64 {
    let n = config.len() as f64;
    let s_abs2 = structure::structure_factor(config, k).norm_sqr();
    4.0 * drive.s * n * (1.0 + s_abs2) / (s_abs2 * s_abs2)
}

/// Per-direction bundle carried by maps and scans.
#[derive(Debug, Clone)]
pub struct CorrelationRecord {
    pub k: ScatteringVector,
    /// `S(k)` itself (the CSV exports its real and imaginary parts).
    pub s_k: Complex64,
    pub s_abs2: f64,
    pub g1_normalized: f64,
    pub g1_physical: f64,
    pub g2: f64,
    /// Leading-order `g^(m)` for explicitly requested orders, sorted by `m`.
    pub gm: Vec<(usize, f64)>,
}

impl CorrelationRecord {
    /// Evaluates one observation direction. `orders` lists the additional
    /// generalized orders to attach (leading-order values); `g2` itself is
    /// always the exact closed form.
    pub fn evaluate(
        config: &EmitterConfig,
        drive: &DriveParams,
        k: ScatteringVector,
        orders: &[usize],
    ) -> Result<CorrelationRecord> {
        let s = drive.s;
        let n = config.len() as f64;
        let m_max = orders.iter().copied().max().unwrap_or(0).max(2);
        let values = structure::harmonics(config, k.k(), m_max);
        let s_k = values[0];
        let s_abs2 = s_k.norm_sqr();
        let g1_normalized = s * n + s_abs2;
        let g1_physical = s / (2.0 * (1.0 + s) * (1.0 + s)) * g1_normalized;
        let g2 = g2_from_factors(s, n, values[0], values[1])?;
        let mut gm = Vec::with_capacity(orders.len());
        for &m in orders {
            let partitions = structure::enumerate_partitions(m)?;
            let generalized = structure::generalized_from_values(&partitions, &values[..m]);
            gm.push((m, generalized.norm_sqr() / g1_normalized.powi(m as i32)));
        }
        gm.sort_by_key(|(m, _)| *m);
        Ok(CorrelationRecord { k, s_k, s_abs2, g1_normalized, g1_physical, g2, gm })
    }
}
