//! Plain and generalized structure factors.
//!
//! The plain structure factor is the coherent phase sum
//! `S(k) = sum_mu exp(i k . R_mu)`. The generalized order-`m` factor
//! `S^(m)(k)` is the same sum restricted to m-tuples of mutually distinct
//! emitters; it evaluates in closed form through the integer partitions of
//! `m` (the conjugacy classes of the symmetric group), with exact integer
//! cardinalities and signs. A direct tuple sum is kept as the independent
//! oracle for the partition formula.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::EmitterConfig;
use crate::numeric;
use crate::vec3::{self, Vec3};

/// Default cap on the correlation/partition order. Partition count and
/// brute-force cost both explode combinatorially; the physics of interest
/// lives at m <= 4. Opt in to higher orders with the `*_with_limit` variants.
pub const MAX_ORDER: usize = 12;

/// Hard cap for the opt-in override: cardinalities are exact `u64` only while
/// `m!` fits, i.e. m <= 20.
pub const MAX_ORDER_HARD: usize = 20;

/// Above this emitter count, phase sums switch to pairwise (tree)
/// accumulation, bounding round-off growth to O(log N) ulps.
const PAIRWISE_THRESHOLD: usize = 10_000;

/// Tuple-count guard for the brute-force oracle.
const BRUTEFORCE_MAX_TUPLES: f64 = 1e8;

/// Observation and laser directions; the scattering vector is their
/// difference in units of the optical wavenumber, `|k| <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringVector {
    k_obs: Vec3,
    k_laser: Vec3,
}

impl ScatteringVector {
    pub fn new(k_obs: Vec3, k_laser: Vec3) -> Result<Self> {
        for (name, v) in [("k_obs", k_obs), ("k_laser", k_laser)] {
            if !vec3::is_unit(v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a unit vector within {:.0e}, got norm {}",
                    vec3::UNIT_TOL,
                    vec3::norm(v)
                )));
            }
        }
        Ok(Self { k_obs, k_laser })
    }

    pub fn k_obs(&self) -> Vec3 {
        self.k_obs
    }

    pub fn k_laser(&self) -> Vec3 {
        self.k_laser
    }

    /// The scattering vector `k_obs - k_laser`.
    pub fn k(&self) -> Vec3 {
        vec3::sub(self.k_obs, self.k_laser)
    }
}

/// `S(k) = sum_mu exp(i k . R_mu)`; `|S| <= N` and `S(0) = N`.
pub fn structure_factor(config: &EmitterConfig, k: Vec3) -> Complex64 {
    let pos = &config.positions;
    if pos.len() <= PAIRWISE_THRESHOLD {
        let mut s = Complex64::new(0.0, 0.0);
        for p in pos {
            s += Complex64::cis(vec3::dot(k, *p));
        }
        s
    } else {
        numeric::sum_complex_by(pos.len(), |i| Complex64::cis(vec3::dot(k, pos[i])))
    }
}

/// Closed-form chain structure factor `(1 - e^{iN phi}) / (e^{-i phi} - 1)`
/// for `N` emitters at positions `mu * d` with geometric phase
/// `phi = d n . k`. The removable singularity at `phi = 0 (mod 2 pi)` is
/// evaluated as the limit value `N` (window 1e-9) instead of dividing by a
/// near-zero denominator.
pub fn chain_structure_factor(n: usize, phi: f64) -> Complex64 {
    use std::f64::consts::TAU;
    let wrapped = phi.rem_euclid(TAU);
    if wrapped.min(TAU - wrapped) < 1e-9 {
        return Complex64::new(n as f64, 0.0);
    }
    let numerator = Complex64::new(1.0, 0.0) - Complex64::cis(n as f64 * phi);
    let denominator = Complex64::cis(-phi) - Complex64::new(1.0, 0.0);
    numerator / denominator
}

/// One integer partition of `m`, in cycle-count form: `counts[j-1]` disjoint
/// cycles of length `j`, with `sum_j j * counts[j-1] = m`. `cardinality` is
/// the exact size of the corresponding conjugacy class of the symmetric
/// group, `m! / prod(c_j! j^{c_j})`, and `sign = (-1)^(m - sum_j c_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionTerm {
    pub order: usize,
    pub counts: Vec<usize>,
    pub cardinality: u64,
    pub sign: i8,
}

impl PartitionTerm {
    fn new(order: usize, counts: Vec<usize>) -> Self {
        debug_assert_eq!(
            counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum::<usize>(),
            order
        );
        let mut denom: u128 = 1;
        for (i, &c) in counts.iter().enumerate() {
            let j = (i + 1) as u128;
            denom *= factorial_u128(c) * j.pow(c as u32);
        }
        let numer = factorial_u128(order);
        assert_eq!(numer % denom, 0, "conjugacy-class cardinality must divide m!");
        let cardinality = (numer / denom) as u64;
        let cycles: usize = counts.iter().sum();
        let sign = if (order - cycles).is_multiple_of(2) { 1 } else { -1 };
        PartitionTerm { order, counts, cardinality, sign }
    }
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All integer partitions of `m` with exact cardinalities and signs,
/// enumerated largest-part-first. The count equals the partition function
/// p(m), and the cardinalities sum to `m!`.
pub fn enumerate_partitions(m: usize) -> Result<Vec<PartitionTerm>> {
    enumerate_partitions_with_limit(m, MAX_ORDER)
}

/// Same as [`enumerate_partitions`] with an explicit opt-in order cap
/// (hard limit [`MAX_ORDER_HARD`], beyond which cardinalities overflow u64).
pub fn enumerate_partitions_with_limit(m: usize, max_order: usize) -> Result<Vec<PartitionTerm>> {
    let cap = max_order.min(MAX_ORDER_HARD);
    if m < 1 || m > cap {
        return Err(Error::InvalidArgument(format!(
            "order m = {m} outside supported range 1..={cap}"
        )));
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; m];
    fn recurse(j: usize, remaining: usize, counts: &mut Vec<usize>, m: usize, out: &mut Vec<PartitionTerm>) {
        if j == 0 {
            if remaining == 0 {
                out.push(PartitionTerm::new(m, counts.clone()));
            }
            return;
        }
        for c in (0..=remaining / j).rev() {
            counts[j - 1] = c;
            recurse(j - 1, remaining - c * j, counts, m, out);
        }
        counts[j - 1] = 0;
    }
    recurse(m, m, &mut counts, m, &mut out);
    Ok(out)
}

/// `S(l k)` for `l = 1..=m` together with the generalized factor `S^(m)(k)`.
///
/// All phase powers come from one `exp(i k . R)` per emitter, so the set is
/// O(N) trig evaluations regardless of order.
#[derive(Debug, Clone)]
pub struct StructureFactorSet {
    /// `values[l-1] = S(l k)`.
    pub values: Vec<Complex64>,
    /// The generalized factor `S^(m)(k)` from the partition formula.
    pub generalized: Complex64,
}

impl StructureFactorSet {
    pub fn compute(config: &EmitterConfig, k: Vec3, m: usize) -> Result<Self> {
        let partitions = enumerate_partitions(m)?;
        let values = harmonics(config, k, m);
        let generalized = generalized_from_values(&partitions, &values);
        Ok(StructureFactorSet { values, generalized })
    }
}

/// `S(l k)` for `l = 1..=m`.
pub(crate) fn harmonics(config: &EmitterConfig, k: Vec3, m: usize) -> Vec<Complex64> {
    let pos = &config.positions;
    let n = pos.len();
    let mut values = vec![Complex64::new(0.0, 0.0); m];
    if n <= PAIRWISE_THRESHOLD {
        for p in pos {
            let z = Complex64::cis(vec3::dot(k, *p));
            let mut zl = z;
            for v in values.iter_mut() {
                *v += zl;
                zl *= z;
            }
        }
    } else {
        let z: Vec<Complex64> = pos.iter().map(|p| Complex64::cis(vec3::dot(k, *p))).collect();
        let mut zl = z.clone();
        for (l, value) in values.iter_mut().enumerate() {
            *value = numeric::sum_complex_by(n, |i| zl[i]);
            if l + 1 < m {
                for (acc, base) in zl.iter_mut().zip(&z) {
                    *acc *= *base;
                }
            }
        }
    }
    values
}

pub(crate) fn generalized_from_values(partitions: &[PartitionTerm], values: &[Complex64]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for term in partitions {
        let mut product = Complex64::new(term.sign as f64 * term.cardinality as f64, 0.0);
        for (i, &c) in term.counts.iter().enumerate() {
            if c > 0 {
                product *= values[i].powu(c as u32);
            }
        }
        total += product;
    }
    total
}

/// Generalized structure factor `S^(m)(k)` via the partition formula
/// `sum_P (-1)^(m - sum c_j) C_P prod_l S(l k)^{c_l}`. For `m = 1` this is
/// `S(k)`.
pub fn generalized_structure_factor(config: &EmitterConfig, k: Vec3, m: usize) -> Result<Complex64> {
    Ok(StructureFactorSet::compute(config, k, m)?.generalized)
}

/// Direct sum over all m-tuples of mutually distinct emitter indices:
/// the defining expression of `S^(m)(k)` and the oracle for the partition
/// formula. Guarded at `N^m <= 1e8` tuples.
pub fn generalized_structure_factor_bruteforce(
    config: &EmitterConfig,
    k: Vec3,
    m: usize,
) -> Result<Complex64> {
    if !(1..=MAX_ORDER_HARD).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "order m = {m} outside supported range 1..={MAX_ORDER_HARD}"
        )));
    }
    let n = config.positions.len();
    if (n as f64).powi(m as i32) > BRUTEFORCE_MAX_TUPLES {
        return Err(Error::ResourceLimit(format!(
            "brute-force S^({m}) over N = {n} emitters exceeds {BRUTEFORCE_MAX_TUPLES:.0} tuples"
        )));
    }
    let z: Vec<Complex64> = config
        .positions
        .iter()
        .map(|p| Complex64::cis(vec3::dot(k, *p)))
        .collect();
    let mut used = vec![false; n];
    let mut total = Complex64::new(0.0, 0.0);
    fn recurse(
        z: &[Complex64],
        used: &mut [bool],
        depth: usize,
        acc: Complex64,
        total: &mut Complex64,
    ) {
        if depth == 0 {
            *total += acc;
            return;
        }
        for i in 0..z.len() {
            if !used[i] {
                used[i] = true;
                recurse(z, used, depth - 1, acc * z[i], total);
                used[i] = false;
            }
        }
    }
    recurse(&z, &mut used, m, Complex64::new(1.0, 0.0), &mut total);
    Ok(total)
}

/// Unsigned Stirling numbers of the first kind `c(m, j)` for `j = 1..=m`,
/// reconstructed from the conjugacy-class cardinalities: `c(m, j)` is the
/// number of permutations of `m` elements with exactly `j` cycles.
pub fn unsigned_stirling_numbers(m: usize) -> Result<Vec<BigInt>> {
    let partitions = enumerate_partitions(m)?;
    let mut c = vec![BigInt::from(0u64); m];
    for term in &partitions {
        let cycles: usize = term.counts.iter().sum();
        c[cycles - 1] += BigInt::from(term.cardinality);
    }
    Ok(c)
}

/// Evaluates both sides of the falling-factorial identity
/// `N (N-1) ... (N-m+1) = sum_j s(m, j) N^j` in exact integer arithmetic,
/// with `s(m, j) = (-1)^(m-j) c(m, j)` and `c(m, j)` summed from partition
/// cardinalities. Returns `(falling factorial, partition-side sum)`.
pub fn stirling_falling_factorial_check(m: usize, n: u64) -> Result<(BigInt, BigInt)> {
    if n > 1_000_000 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds the exact-arithmetic guard 1e6"
        )));
    }
    let c = unsigned_stirling_numbers(m)?;
    let big_n = BigInt::from(n);

    let mut falling = BigInt::from(1u64);
    for i in 0..m as u64 {
        falling *= &big_n - BigInt::from(i);
    }

    let mut sum = BigInt::from(0u64);
    let mut n_pow = big_n.clone(); // N^1
    for (idx, coeff) in c.iter().enumerate() {
        let j = idx + 1;
        let signed = if (m - j).is_multiple_of(2) { coeff.clone() } else { -coeff.clone() };
        sum += signed * &n_pow;
        n_pow *= &big_n;
    }
    Ok((falling, sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{self, GeometryKind};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn custom(positions: Vec<Vec3>) -> EmitterConfig {
        EmitterConfig {
            kind: GeometryKind::Custom,
            seed: None,
            params: serde_json::Map::new(),
            positions,
        }
    }

    /// Two emitters whose phases along z are {0, pi} for k = z-hat.
    fn opposite_pair() -> EmitterConfig {
        custom(vec![[0.0, 0.0, 0.0], [0.0, 0.0, PI]])
    }

    #[test]
    fn forward_direction_gives_exactly_n() {
        let c = geometry::sample_ball(100, 6.0 * PI, 3).unwrap();
        let s = structure_factor(&c, [0.0, 0.0, 0.0]);
        assert_eq!(s, Complex64::new(100.0, 0.0));
    }

    #[test]
    fn opposite_phase_pair_cancels_at_k_but_not_2k() {
        let c = opposite_pair();
        let k = [0.0, 0.0, 1.0];
        let s1 = structure_factor(&c, k);
        let s2 = structure_factor(&c, vec3::scale(k, 2.0));
        assert!(s1.norm() < 1e-12, "1 + e^(i pi) = 0, got {s1}");
        assert!((s2 - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn chain_antibunch_root_has_unit_modulus() {
        // (N-1)th root of unity: S(k) = e^{i phi}.
        let n = 100;
        let phi = TAU / (n as f64 - 1.0);
        let s = chain_structure_factor(n, phi);
        assert!((s.norm() - 1.0).abs() < 1e-10);
        assert!((s - Complex64::cis(phi)).norm() < 1e-9);
    }

    #[test]
    fn chain_closed_form_limit_and_roots() {
        assert_eq!(chain_structure_factor(7, 0.0), Complex64::new(7.0, 0.0));
        assert!(chain_structure_factor(4, PI).norm() < 1e-12);
        assert_eq!(chain_structure_factor(4, TAU), Complex64::new(4.0, 0.0));
        // Nth root of unity makes the numerator vanish.
        assert!(chain_structure_factor(100, TAU * 7.0 / 100.0).norm() < 1e-9);
    }

    #[test]
    fn chain_closed_form_matches_direct_sum() {
        let n = 100;
        let spacing = 0.83;
        let axis = [1.0, 0.0, 0.0];
        let chain = geometry::generate_chain(n, spacing, axis).unwrap();
        for &kx in &[0.3, 1.1, -0.7, 1.9] {
            let k = [kx, 0.4, -0.2]; // off-axis components do not touch the chain phase
            let phi = spacing * kx;
            let closed = chain_structure_factor(n, phi);
            let direct = structure_factor(&chain, [k[0], 0.0, 0.0]);
            assert!(
                (closed - direct).norm() <= 1e-12 * n as f64,
                "phi = {phi}: closed {closed} vs direct {direct}"
            );
        }
    }

    #[test]
    fn pairwise_path_matches_closed_form_above_threshold() {
        // 20001 emitters exercises the tree-accumulation branch.
        let n = 20_001;
        let spacing = 0.37;
        let chain = geometry::generate_chain(n, spacing, [0.0, 0.0, 1.0]).unwrap();
        for &kz in &[0.513, -1.311] {
            let direct = structure_factor(&chain, [0.0, 0.0, kz]);
            let closed = chain_structure_factor(n, spacing * kz);
            assert!(
                (direct - closed).norm() <= 1e-12 * n as f64,
                "kz = {kz}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn partitions_of_two() {
        let parts = enumerate_partitions(2).unwrap();
        assert_eq!(parts.len(), 2);
        // P_{0,1} = one 2-cycle, P_{2,0} = 1+1.
        let two_cycle = parts.iter().find(|p| p.counts == vec![0, 1]).unwrap();
        assert_eq!((two_cycle.cardinality, two_cycle.sign), (1, -1));
        let identity = parts.iter().find(|p| p.counts == vec![2, 0]).unwrap();
        assert_eq!((identity.cardinality, identity.sign), (1, 1));
    }

    #[test]
    fn partitions_of_three_have_cardinalities_1_3_2() {
        let parts = enumerate_partitions(3).unwrap();
        let mut cards: Vec<u64> = parts.iter().map(|p| p.cardinality).collect();
        cards.sort_unstable();
        assert_eq!(cards, vec![1, 2, 3]);
        assert_eq!(parts.iter().map(|p| p.cardinality).sum::<u64>(), 6);
    }

    #[test]
    fn partition_function_counts_and_cardinality_sums() {
        // p(1)..p(12)
        let p = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
        for (m, &pm) in (1..=12).zip(&p) {
            let parts = enumerate_partitions(m).unwrap();
            assert_eq!(parts.len(), pm, "p({m})");
            let total: u64 = parts.iter().map(|t| t.cardinality).sum();
            assert_eq!(total, (1..=m as u64).product::<u64>(), "sum of cardinalities at m = {m}");
            for t in &parts {
                let weight: usize = t.counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
                assert_eq!(weight, m);
            }
        }
    }

    #[test]
    fn order_guard_rejects_out_of_range() {
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(13).is_err());
        assert!(enumerate_partitions_with_limit(13, 16).is_ok());
        assert!(enumerate_partitions_with_limit(21, 30).is_err());
    }

    #[test]
    fn generalized_m2_is_s_squared_minus_s2k() {
        let c = geometry::sample_ball(7, 5.0, 99).unwrap();
        let k = [0.4, -0.9, 0.3];
        let s1 = structure_factor(&c, k);
        let s2 = structure_factor(&c, vec3::scale(k, 2.0));
        let expect = s1 * s1 - s2;
        let got = generalized_structure_factor(&c, k, 2).unwrap();
        assert!((got - expect).norm() < 1e-10 * expect.norm().max(1.0));
    }

    #[test]
    fn generalized_m2_of_opposite_pair_is_minus_two() {
        let got = generalized_structure_factor(&opposite_pair(), [0.0, 0.0, 1.0], 2).unwrap();
        assert!((got - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn explicit_m3_and_m4_expansions() {
        let c = geometry::sample_ball(6, 4.0, 17).unwrap();
        let k = [0.7, 0.2, -0.5];
        let s: Vec<Complex64> = (1..=4)
            .map(|l| structure_factor(&c, vec3::scale(k, l as f64)))
            .collect();
        let m3 = s[0].powu(3) - 3.0 * s[0] * s[1] + 2.0 * s[2];
        let got3 = generalized_structure_factor(&c, k, 3).unwrap();
        assert!((got3 - m3).norm() < 1e-9);

        let m4 = s[0].powu(4) - 6.0 * s[0].powu(2) * s[1] + 3.0 * s[1].powu(2)
            + 8.0 * s[0] * s[2]
            - 6.0 * s[3];
        let got4 = generalized_structure_factor(&c, k, 4).unwrap();
        assert!((got4 - m4).norm() < 1e-9 * m4.norm().max(1.0));
    }

    #[test]
    fn bruteforce_trivial_cases() {
        let single = custom(vec![[0.3, 0.1, -0.2]]);
        let got = generalized_structure_factor_bruteforce(&single, [1.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(got, Complex64::new(0.0, 0.0), "no distinct pair for N = 1");

        let c = geometry::sample_ball(5, 3.0, 1).unwrap();
        let k = [0.2, 0.5, -0.8];
        let bf = generalized_structure_factor_bruteforce(&c, k, 1).unwrap();
        assert!((bf - structure_factor(&c, k)).norm() < 1e-12);
    }

    #[test]
    fn bruteforce_guard_trips() {
        let c = geometry::sample_ball(200, 5.0, 1).unwrap();
        assert!(matches!(
            generalized_structure_factor_bruteforce(&c, [1.0, 0.0, 0.0], 4),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn partition_formula_matches_bruteforce_random_m4() {
        let c = geometry::sample_ball(6, 6.0, 31).unwrap();
        let k = [0.9, -0.3, 0.4];
        let formula = generalized_structure_factor(&c, k, 4).unwrap();
        let brute = generalized_structure_factor_bruteforce(&c, k, 4).unwrap();
        let scale = brute.norm().max(1e-30);
        assert!((formula - brute).norm() / scale < 1e-10);
    }

    #[test]
    fn lattice_structure_factor_factorizes() {
        let lattice = geometry::generate_lattice(&[3, 4], &[0.9, 1.3]).unwrap();
        let k = [0.37, -1.21, 0.0];
        let s = structure_factor(&lattice, k);
        let sx = chain_structure_factor(3, 0.9 * k[0]);
        let sy = chain_structure_factor(4, 1.3 * k[1]);
        let product = sx * sy;
        assert!(
            (s - product).norm() <= 1e-12 * product.norm().max(12.0),
            "S = {s}, Sx*Sy = {product}"
        );
    }

    #[test]
    fn stirling_identity_small_cases() {
        let (fall, sum) = stirling_falling_factorial_check(1, 9).unwrap();
        assert_eq!(fall, BigInt::from(9));
        assert_eq!(sum, BigInt::from(9));

        // m = 3: both sides are N^3 - 3N^2 + 2N; at N = 5 that is 60.
        let (fall, sum) = stirling_falling_factorial_check(3, 5).unwrap();
        assert_eq!(fall, BigInt::from(60));
        assert_eq!(sum, BigInt::from(60));

        let (fall, sum) = stirling_falling_factorial_check(6, 10).unwrap();
        assert_eq!(fall, BigInt::from(151_200));
        assert_eq!(sum, BigInt::from(151_200));
    }

    #[test]
    fn stirling_identity_holds_up_to_guard() {
        for m in 1..=12 {
            for &n in &[1u64, 2, 7, 100, 1_000_000] {
                let (fall, sum) = stirling_falling_factorial_check(m, n).unwrap();
                assert_eq!(fall, sum, "m = {m}, n = {n}");
            }
        }
        assert!(stirling_falling_factorial_check(3, 1_000_001).is_err());
    }

    #[test]
    fn unsigned_stirling_matches_recurrence() {
        // c(m+1, j) = m c(m, j) + c(m, j-1)
        for m in 1..=10usize {
            let cm = unsigned_stirling_numbers(m).unwrap();
            let cm1 = unsigned_stirling_numbers(m + 1).unwrap();
            for j in 1..=m + 1 {
                let from_same = if j <= m { BigInt::from(m as u64) * &cm[j - 1] } else { BigInt::from(0u64) };
                let from_lower = if j >= 2 { cm[j - 2].clone() } else { BigInt::from(0u64) };
                assert_eq!(cm1[j - 1], from_same + from_lower, "c({}, {j})", m + 1);
            }
        }
    }

    #[test]
    fn generalized_vanishes_when_order_exceeds_emitter_count() {
        // Fewer atoms than operators: the tuple sum is empty (exact zero)
        // and the partition formula cancels to rounding noise.
        let c = geometry::sample_ball(2, 5.0, 4).unwrap();
        let k = [0.8, -0.1, 0.4];
        let brute = generalized_structure_factor_bruteforce(&c, k, 3).unwrap();
        assert_eq!(brute, Complex64::new(0.0, 0.0));
        let formula = generalized_structure_factor(&c, k, 3).unwrap();
        assert!(formula.norm() < 1e-12, "cancellation residual {formula}");
    }

    #[test]
    fn partition_formula_agrees_with_bruteforce_over_seeded_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..100 {
            let m = rng.random_range(2..=4);
            let n = rng.random_range(m..=8);
            let c = geometry::sample_ball(n, 8.0, rng.random()).unwrap();
            let k = [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let formula = generalized_structure_factor(&c, k, m).unwrap();
            let brute = generalized_structure_factor_bruteforce(&c, k, m).unwrap();
            let scale = brute.norm().max(1e-30);
            assert!(
                (formula - brute).norm() / scale < 1e-10,
                "case {case}: N = {n}, m = {m}, formula {formula} vs brute {brute}"
            );
        }
    }

    #[test]
    fn scattering_vector_validates_unit_norms() {
        assert!(ScatteringVector::new([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).is_ok());
        assert!(ScatteringVector::new([1.0, 1.0, 0.0], [0.0, 0.0, 1.0]).is_err());
        let sv = ScatteringVector::new([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sv.k(), [0.0, 0.0, 0.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conjugation_symmetry_and_bound(
            n in 1usize..30,
            seed in 0u64..500,
            kx in -2.0f64..2.0,
            ky in -2.0f64..2.0,
            kz in -2.0f64..2.0,
        ) {
            let c = geometry::sample_ball(n, 9.0, seed).unwrap();
            let k = [kx, ky, kz];
            let s = structure_factor(&c, k);
            let s_neg = structure_factor(&c, vec3::scale(k, -1.0));
            prop_assert!((s.conj() - s_neg).norm() < 1e-10 * (n as f64));
            prop_assert!(s.norm() <= n as f64 * (1.0 + 1e-12));
        }

        #[test]
        fn chain_modulus_bounded_by_n(n in 1usize..200, phi in -10.0f64..10.0) {
            let s = chain_structure_factor(n, phi);
            prop_assert!(s.norm() <= n as f64 * (1.0 + 1e-9));
        }
    }
}
