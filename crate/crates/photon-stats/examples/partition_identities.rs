//! The combinatorics behind the generalized structure factor.
//!
//! Prints the integer partitions of m = 4 with their conjugacy-class
//! cardinalities and signs, evaluates S^(m) both from the partition formula
//! and from the defining sum over distinct index tuples, and checks the
//! falling-factorial identity against the Stirling numbers reconstructed
//! from the partition cardinalities.
//!
//! ```bash
//! cargo run --release --example partition_identities
//! ```

use photon_stats::geometry::sample_ball;
use photon_stats::structure::{
    enumerate_partitions, generalized_structure_factor, generalized_structure_factor_bruteforce,
    stirling_falling_factorial_check, unsigned_stirling_numbers,
};

fn main() -> photon_stats::Result<()> {
    let m = 4;
    println!("integer partitions of {m} (cycle counts c_j, cardinality, sign):");
    let parts = enumerate_partitions(m)?;
    for p in &parts {
        let as_parts: Vec<String> = p
            .counts
            .iter()
            .enumerate()
            .rev()
            .flat_map(|(i, &c)| std::iter::repeat_n((i + 1).to_string(), c))
            .collect();
        println!(
            "  {} = {:<12} counts = {:?}, cardinality = {}, sign = {:+}",
            m,
            as_parts.join("+"),
            p.counts,
            p.cardinality,
            p.sign
        );
    }
    let total: u64 = parts.iter().map(|p| p.cardinality).sum();
    println!("  sum of cardinalities = {total} = {m}!");
    println!();

    let config = sample_ball(6, 6.0, 13)?;
    let k = [0.8, -0.4, 0.3];
    println!("S^(m) on a random 6-emitter cloud, k = {k:?}:");
    for order in 1..=4 {
        let formula = generalized_structure_factor(&config, k, order)?;
        let brute = generalized_structure_factor_bruteforce(&config, k, order)?;
        println!(
            "  m = {order}: partition formula = {formula:.12}, tuple sum = {brute:.12}, diff = {:.2e}",
            (formula - brute).norm()
        );
    }
    println!();

    println!("unsigned Stirling numbers from partition cardinalities:");
    for order in 1..=6 {
        let c = unsigned_stirling_numbers(order)?;
        println!("  c({order}, 1..={order}) = {:?}", c.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    }
    println!();

    println!("falling factorial identity N(N-1)...(N-m+1) = sum_j s(m,j) N^j (exact):");
    for &(order, n) in &[(3usize, 5u64), (6, 10), (6, 1_000_000)] {
        let (falling, sum) = stirling_falling_factorial_check(order, n)?;
        println!("  m = {order}, N = {n}: {falling} = {sum}  ({})", falling == sum);
    }
    Ok(())
}
