//! Wall-clock cost of the per-slot scheduling step.
//!
//! The scheduler's slot work is one exact knapsack solve, so that is what
//! gets timed, over pre-generated random instances whose size tracks the
//! slice count (capacity `2N`, weights up to 8). Instances are built
//! outside the timed region. Besides the plain mean, each point reports a
//! median of batch means, which shrugs off scheduler hiccups and clock
//! noise on shared machines.

use crate::scheduler::solve_knapsack;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use std::time::{Duration, Instant};

const BATCHES: usize = 10;
const INSTANCE_POOL: usize = 256;

/// Timing summary for one slice count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchPoint {
    pub n: usize,
    /// Solves actually timed: the requested count rounded down to a
    /// multiple of the batch count.
    pub solves: usize,
    pub mean_us: f64,
    pub median_of_means_us: f64,
}

/// Times the per-slot Max-Weight step for each slice count in `n_values`.
/// `solves_per_n` is split into ten equal batches.
pub fn bench_max_weight(n_values: &[usize], solves_per_n: usize, seed: u64) -> Vec<BenchPoint> {
    assert!(
        solves_per_n >= BATCHES,
        "need at least {BATCHES} solves for batching"
    );
    n_values
        .iter()
        .map(|&n| bench_point(n, solves_per_n, seed))
        .collect()
}

fn bench_point(n: usize, solves_per_n: usize, seed: u64) -> BenchPoint {
    assert!(n >= 1, "a slot must have at least one slice");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let pool: Vec<(Vec<f64>, Vec<u64>)> = (0..INSTANCE_POOL)
        .map(|_| {
            let values = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
            let weights = (0..n).map(|_| rng.random_range(1..=8u64)).collect();
            (values, weights)
        })
        .collect();
    let capacity = 2 * n as u64;

    let batch_size = solves_per_n / BATCHES;
    let mut batch_means = Vec::with_capacity(BATCHES);
    let mut total = Duration::ZERO;
    let mut sink = 0.0f64;
    let mut next = 0usize;
    for _ in 0..BATCHES {
        let start = Instant::now();
        for _ in 0..batch_size {
            let (values, weights) = &pool[next];
            next = (next + 1) % pool.len();
            let selection = solve_knapsack(black_box(values), black_box(weights), black_box(capacity));
            sink += selection.value;
        }
        let elapsed = start.elapsed();
        total += elapsed;
        batch_means.push(elapsed.as_secs_f64() * 1e6 / batch_size as f64);
    }
    black_box(sink);

    batch_means.sort_by(f64::total_cmp);
    let mid = batch_means.len() / 2;
    let median_of_means_us = if batch_means.len() % 2 == 0 {
        (batch_means[mid - 1] + batch_means[mid]) / 2.0
    } else {
        batch_means[mid]
    };
    let solves = batch_size * BATCHES;
    BenchPoint {
        n,
        solves,
        mean_us: total.as_secs_f64() * 1e6 / solves as f64,
        median_of_means_us,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_echo_sizes_and_report_positive_times() {
        let points = bench_max_weight(&[2, 4], 200, 0);
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].n, 2);
        assert_eq!(points[1].n, 4);
        for point in &points {
            assert_eq!(point.solves, 200);
            assert!(point.mean_us > 0.0);
            assert!(point.median_of_means_us > 0.0);
        }
    }

    #[test]
    fn requested_solves_round_down_to_full_batches() {
        let points = bench_max_weight(&[2], 25, 0);
        assert_eq!(points[0].solves, 20);
    }
}
