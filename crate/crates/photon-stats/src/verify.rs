//! Self-verification suite: oracle equivalences, combinatorial identities,
//! and analytic limits, with failing inputs reported verbatim.

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correlations::{self, DriveParams};
use crate::geometry;
use crate::structure;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    /// N <= 6, m <= 3, reduced case counts.
    Fast,
    /// N <= 8, m <= 4, full case counts.
    Full,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// For failures: the exact inputs needed to reproduce the case.
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct GroupReport {
    pub group: String,
    pub checks: Vec<CheckOutcome>,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn random_k(rng: &mut ChaCha8Rng) -> Vec3 {
    [
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    ]
}

fn oracle_group(level: VerifyLevel) -> GroupReport {
    let (max_n, cases, s_values): (usize, usize, &[f64]) = match level {
        VerifyLevel::Fast => (6, 10, &[1e-6, 1.0]),
        VerifyLevel::Full => (8, 50, &[1e-6, 1e-2, 1.0, 10.0]),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut checks = Vec::new();
    'outer: for case in 0..cases {
        let n = rng.random_range(2..=max_n);
        let seed: u64 = rng.random();
        let config = geometry::sample_ball(n, 8.0, seed).expect("valid ball");
        for &s in s_values {
            let drive = DriveParams::new(s, [0.0, 0.0, 1.0]).expect("valid drive");
            let k = random_k(&mut rng);
            let closed = correlations::g2_closed_form(&config, &drive, k).expect("finite drive");
            let brute =
                correlations::correlation_bruteforce(&config, &drive, k, 2).expect("small N");
            let rel = (closed - brute).abs() / closed.abs().max(1e-30);
            if rel > 1e-9 {
                checks.push(CheckOutcome {
                    name: format!("g2 closed form vs brute force, case {case}"),
                    passed: false,
                    detail: format!(
                        "N = {n}, ball seed = {seed}, s = {s}, k = {k:?}: closed = {closed:.17e}, brute = {brute:.17e}, rel = {rel:.3e}"
                    ),
                });
                break 'outer;
            }
        }
    }
    if checks.is_empty() {
        checks.push(CheckOutcome {
            name: format!("g2 closed form vs brute force ({cases} random cases, rel <= 1e-9)"),
            passed: true,
            detail: String::new(),
        });
    }
    GroupReport { group: "oracle-g2".into(), checks }
}

fn partition_group(level: VerifyLevel) -> GroupReport {
    let (max_n, max_m, cases) = match level {
        VerifyLevel::Fast => (6, 3, 20),
        VerifyLevel::Full => (8, 4, 100),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    let mut checks = Vec::new();
    for case in 0..cases {
        // n >= m keeps S^(m) structurally nonzero so the relative check is
        // meaningful (the tuple sum is empty for n < m).
        let m = rng.random_range(2..=max_m);
        let n = rng.random_range(m..=max_n);
        let seed: u64 = rng.random();
        let config = geometry::sample_ball(n, 8.0, seed).expect("valid ball");
        let k = random_k(&mut rng);
        let formula = structure::generalized_structure_factor(&config, k, m).expect("m in range");
        let brute = structure::generalized_structure_factor_bruteforce(&config, k, m)
            .expect("small N");
        let rel = (formula - brute).norm() / brute.norm().max(1e-30);
        if rel > 1e-10 {
            checks.push(CheckOutcome {
                name: format!("S^(m) partition formula vs tuple sum, case {case}"),
                passed: false,
                detail: format!(
                    "N = {n}, ball seed = {seed}, m = {m}, k = {k:?}: formula = {formula}, brute = {brute}, rel = {rel:.3e}"
                ),
            });
            return GroupReport { group: "partition-sm".into(), checks };
        }
    }
    checks.push(CheckOutcome {
        name: format!("S^(m) partition formula vs tuple sum ({cases} cases, m <= {max_m}, rel <= 1e-10)"),
        passed: true,
        detail: String::new(),
    });
    GroupReport { group: "partition-sm".into(), checks }
}

fn stirling_group(level: VerifyLevel) -> GroupReport {
    let max_m = match level {
        VerifyLevel::Fast => 6,
        VerifyLevel::Full => 12,
    };
    let mut checks = Vec::new();

    let expected_p = [1usize, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
    let mut ok = true;
    let mut detail = String::new();
    for m in 1..=max_m {
        let parts = structure::enumerate_partitions(m).expect("m in range");
        let total: u64 = parts.iter().map(|t| t.cardinality).sum();
        let fact: u64 = (1..=m as u64).product();
        if parts.len() != expected_p[m - 1] || total != fact {
            ok = false;
            detail = format!(
                "m = {m}: p(m) = {} (expected {}), cardinality sum = {total} (expected {fact})",
                parts.len(),
                expected_p[m - 1]
            );
            break;
        }
    }
    checks.push(CheckOutcome {
        name: format!("partition counts p(m) and cardinality sums m! for m <= {max_m}"),
        passed: ok,
        detail,
    });

    let mut ok = true;
    let mut detail = String::new();
    'outer: for m in 1..=max_m {
        for &n in &[1u64, 5, 100, 1_000_000] {
            let (fall, sum) = structure::stirling_falling_factorial_check(m, n).expect("in range");
            if fall != sum {
                ok = false;
                detail = format!("m = {m}, N = {n}: falling = {fall}, partition side = {sum}");
                break 'outer;
            }
        }
    }
    checks.push(CheckOutcome {
        name: format!("falling factorial = Stirling sum, exact, m <= {max_m}, N <= 1e6"),
        passed: ok,
        detail,
    });

    let mut ok = true;
    let mut detail = String::new();
    'rec: for m in 1..=max_m.min(10) {
        let cm = structure::unsigned_stirling_numbers(m).expect("in range");
        let cm1 = structure::unsigned_stirling_numbers(m + 1).expect("in range");
        for j in 1..=m + 1 {
            let same = if j <= m { BigInt::from(m as u64) * &cm[j - 1] } else { BigInt::from(0u64) };
            let lower = if j >= 2 { cm[j - 2].clone() } else { BigInt::from(0u64) };
            if cm1[j - 1] != same + lower {
                ok = false;
                detail = format!("recurrence failed at c({}, {j})", m + 1);
                break 'rec;
            }
        }
    }
    checks.push(CheckOutcome {
        name: "unsigned Stirling recurrence c(m+1, j) = m c(m, j) + c(m, j-1)".into(),
        passed: ok,
        detail,
    });

    GroupReport { group: "stirling".into(), checks }
}

fn limits_group(_level: VerifyLevel) -> GroupReport {
    let mut checks = Vec::new();
    let z_laser = [0.0, 0.0, 1.0];

    // Single emitter: no photon pairs at any drive or direction.
    let single = geometry::sample_ball(1, 1.0, 3).expect("valid");
    let mut worst: f64 = 0.0;
    for &s in &[1e-8, 1e-2, 1.0, 100.0] {
        let drive = DriveParams::new(s, z_laser).expect("valid");
        for &k in &[[0.0, 0.0, 0.0], [1.3, -0.4, 0.8], [0.0, 2.0, 0.0]] {
            let g2 = correlations::g2_closed_form(&single, &drive, k).expect("valid");
            worst = worst.max(g2.abs());
        }
    }
    checks.push(CheckOutcome {
        name: "single-emitter antibunching: g2(N=1) = 0 to machine precision".into(),
        passed: worst < 1e-12,
        detail: if worst < 1e-12 { String::new() } else { format!("worst |g2| = {worst:.3e}") },
    });

    // Chaotic limit 2 - 2/N at s = 1e8.
    let cloud = geometry::sample_ball(100, 6.0 * std::f64::consts::PI, 77).expect("valid");
    let drive = DriveParams::new(1e8, z_laser).expect("valid");
    let g2 = correlations::g2_closed_form(&cloud, &drive, [0.9, 0.2, -0.8]).expect("valid");
    let expect = 1.98;
    let rel = (g2 - expect).abs() / expect;
    checks.push(CheckOutcome {
        name: "chaotic limit: g2 -> 2 - 2/N at s = 1e8".into(),
        passed: rel < 1e-5,
        detail: if rel < 1e-5 { String::new() } else { format!("g2 = {g2:.12}, rel = {rel:.3e}") },
    });

    // Forward coherent limit (1 - 1/N)^2 at s = 1e-10.
    let drive = DriveParams::new(1e-10, z_laser).expect("valid");
    let g2 = correlations::g2_closed_form(&cloud, &drive, [0.0, 0.0, 0.0]).expect("valid");
    let expect = 0.9801;
    let rel = (g2 - expect).abs() / expect;
    checks.push(CheckOutcome {
        name: "forward coherent limit: g2(k=0) -> (1 - 1/N)^2 at s = 1e-10".into(),
        passed: rel < 1e-6,
        detail: if rel < 1e-6 { String::new() } else { format!("g2 = {g2:.12}, rel = {rel:.3e}") },
    });

    // Ordered chain: closed form against 4/(sN) + 2 - 2/N at the q = 1 root.
    let n = 100;
    let s = 1e-3;
    let chain = geometry::generate_chain(n, std::f64::consts::TAU / n as f64, [1.0, 0.0, 0.0])
        .expect("valid");
    let drive = DriveParams::new(s, z_laser).expect("valid");
    let k = [1.0, 0.0, -1.0]; // k_obs = x, laser = z: phase = spacing
    let closed = correlations::g2_closed_form(&chain, &drive, k).expect("valid");
    let predicted =
        correlations::g2_ordered_predictions(n, s, correlations::OrderedRegime::Destructive)
            .expect("valid");
    let rel = (closed - predicted).abs() / predicted;
    checks.push(CheckOutcome {
        name: "ordered chain destructive root matches 4/(sN) + 2 - 2/N".into(),
        passed: rel < 1e-6,
        detail: if rel < 1e-6 {
            String::new()
        } else {
            format!("closed = {closed:.12}, predicted = {predicted:.12}, rel = {rel:.3e}")
        },
    });

    GroupReport { group: "limits".into(), checks }
}

/// Runs every verification group at the requested level.
pub fn run(level: VerifyLevel) -> Vec<GroupReport> {
    vec![
        oracle_group(level),
        partition_group(level),
        stirling_group(level),
        limits_group(level),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let reports = run(VerifyLevel::Fast);
        for report in &reports {
            assert!(
                report.passed(),
                "group {} failed: {:?}",
                report.group,
                report.first_failure()
            );
        }
        assert_eq!(reports.len(), 4);
    }
}
