//! Pairwise (tree) summation and order-insensitive reductions.
//!
//! Large phase sums and ensemble reductions accumulate here through a fixed
//! binary tree, which bounds round-off growth to O(log n) ulps and makes the
//! result independent of thread count (the tree shape depends only on the
//! index range).

use num_complex::Complex64;

const PAIRWISE_BASE: usize = 64;

fn pairwise_c64<F: Fn(usize) -> Complex64>(lo: usize, hi: usize, f: &F) -> Complex64 {
    if hi - lo <= PAIRWISE_BASE {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_c64(lo, mid, f) + pairwise_c64(mid, hi, f)
    }
}

fn pairwise_f64<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    if hi - lo <= PAIRWISE_BASE {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_f64(lo, mid, f) + pairwise_f64(mid, hi, f)
    }
}

/// Pairwise sum of `f(i)` for `i` in `0..n`.
pub fn sum_complex_by<F: Fn(usize) -> Complex64>(n: usize, f: F) -> Complex64 {
    pairwise_c64(0, n, &f)
}

/// Pairwise sum of `f(i)` for `i` in `0..n`.
pub fn sum_f64_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    pairwise_f64(0, n, &f)
}

/// Pairwise sum of a slice.
pub fn sum_f64(xs: &[f64]) -> f64 {
    sum_f64_by(xs.len(), |i| xs[i])
}

/// Mean and standard error of the mean (sample convention, `n - 1` in the
/// variance). The standard error is `None` for a single observation.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len();
    assert!(n >= 1, "mean of empty sample");
    let mean = sum_f64(xs) / n as f64;
    if n == 1 {
        return (mean, None);
    }
    let ss = sum_f64_by(n, |i| {
        let d = xs[i] - mean;
        d * d
    });
    let var = ss / (n as f64 - 1.0);
    (mean, Some((var / n as f64).sqrt()))
}
