//! Generalized m-photon statistics: superbunching ~ 1/s^m, antibunching ~ s.
//!
//! Two demonstrations at order m = 3:
//!
//! 1. a 99-emitter chain at the geometric phase 2 pi / 3, where S(k) and
//!    S(2k) vanish but S(3k) = N: the leading-order g3 scales exactly as
//!    1/s^3 (g3 * s^3 is flat);
//! 2. a random 6-emitter cloud at a numerically found S^(3) = 0 direction,
//!    where the brute-force g3 is linear in s (g3 / s is flat).
//!
//! ```bash
//! cargo run --release --example higher_order
//! ```

use photon_stats::analysis::{find_condition_directions, ConditionKind};
use photon_stats::correlations::{correlation_bruteforce, gm_leading_order, DriveParams};
use photon_stats::geometry::{generate_chain, sample_ball};
use photon_stats::vec3;

fn main() -> photon_stats::Result<()> {
    let laser = [0.0, 0.0, 1.0];
    let s_values = [1e-8, 1e-7, 1e-6];

    // Chain tuned so that k_obs = x gives phase 2 pi / 3: the first two
    // harmonics interfere destructively while S(3k) survives.
    let n = 99;
    let spacing = 2.0 * std::f64::consts::PI / 3.0;
    let chain = generate_chain(n, spacing, [1.0, 0.0, 0.0])?;
    let k = [1.0, 0.0, -1.0];
    println!("chain N = {n} at phase 2 pi/3 (S = S(2k) = 0, S(3k) = N):");
    println!("{:>10} {:>16} {:>16}", "s", "g3 leading", "g3 * s^3");
    for &s in &s_values {
        let drive = DriveParams::new(s, laser)?;
        let g3 = gm_leading_order(&chain, &drive, k, 3)?;
        println!("{s:>10.1e} {g3:>16.6e} {:>16.9e}", g3 * s * s * s);
    }
    println!("  (flat third column: m-th order superbunching grows as 1/s^m)");
    println!();

    // Random small cloud: find S^(3) = 0 and watch g3 vanish linearly.
    let cloud = sample_ball(6, 6.0, 99)?;
    let dirs =
        find_condition_directions(&cloud, laser, 3, ConditionKind::GeneralizedAntibunch, 8)?;
    let best = dirs[0];
    let k = vec3::sub(best.k_obs, laser);
    println!(
        "random N = 6 cloud, S^(3) = 0 direction (residual {:.1e}):",
        best.residual
    );
    println!("{:>10} {:>16} {:>16}", "s", "g3 (brute)", "g3 / s");
    for &s in &s_values {
        let drive = DriveParams::new(s, laser)?;
        let g3 = correlation_bruteforce(&cloud, &drive, k, 3)?;
        println!("{s:>10.1e} {g3:>16.6e} {:>16.9e}", g3 / s);
    }
    println!("  (flat third column: m-th order antibunching vanishes linearly in s)");
    Ok(())
}
