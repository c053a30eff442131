//! Ensemble statistics of S(2k) at destructive interference directions.
//!
//! At a direction where S(k) = 0, the superbunching peak height is set by
//! |S(2k)|^2. Over random clouds this quantity averages to ~N (the
//! incoherent sum of N unit phasors), which is why disordered superbunching
//! gains a full factor 1/s over the ordered case. The run fits <|S(2k)|^2>
//! against a N^b and expects b near 1.
//!
//! ```bash
//! cargo run --release --example destructive_scaling
//! ```

use photon_stats::analysis::{condition_scaling_sweep, power_law_fit, ConditionKind};
use photon_stats::geometry::GeometryRecipe;

fn main() -> photon_stats::Result<()> {
    let recipe = GeometryRecipe::Ball { n: 100, diameter: 6.0 * std::f64::consts::PI };
    let n_values = [25, 50, 100, 200];
    let realizations = 40;

    println!("<|S(2k)|^2> at numerically found S(k) = 0 directions, {realizations} realizations:");
    let table = condition_scaling_sweep(
        &recipe,
        [0.0, 0.0, 1.0],
        &n_values,
        ConditionKind::Destructive,
        8,
        realizations,
        7,
        (90, 180),
    )?;
    println!("{:>6} {:>14} {:>12}", "N", "<|S(2k)|^2>", "std error");
    for row in &table.rows {
        println!(
            "{:>6} {:>14.4e} {:>12.2e}",
            row.control,
            row.mean,
            row.std_error.unwrap_or(f64::NAN)
        );
    }
    let fit = power_law_fit(&table.controls(), &table.means())?;
    println!();
    println!("fit a N^b: a = {:.3}, b = {:.3} (expected b near 1)", fit.a, fit.b);
    Ok(())
}
