//! From a demand trace to dedicated floors: the isolation degree picks a
//! quantile of the per-slice demand distribution.
//!
//! Run with `cargo run --example isolation_floors`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::demand::TraceParams;
use slicemux::stats::{isolation_floor, isolation_floors, EmpiricalCdf};

fn main() {
    let model = MarkovDemandModel::from_parts(vec![
        // Mostly quiet with rare 8-PRB spikes.
        (vec![0, 2, 8], vec![
            vec![0.8, 0.15, 0.05],
            vec![0.4, 0.5, 0.1],
            vec![0.3, 0.3, 0.4],
        ]),
        // Always-on slice oscillating between 3 and 6 PRBs.
        (vec![3, 6], vec![vec![0.7, 0.3], vec![0.4, 0.6]]),
    ])
    .unwrap();
    let trace = model
        .generate(&TraceParams {
            horizon: 50_000,
            seed: 9,
            ..TraceParams::default()
        })
        .unwrap();

    // One slice, every isolation degree: the floor is the smallest
    // bandwidth whose demand quantile reaches the degree, so it climbs
    // the support of the distribution step by step.
    let cdf = EmpiricalCdf::from_samples(&trace.column(0)).unwrap();
    println!("slice 0 demand quantiles:");
    println!("  degree   floor   fraction within floor");
    for degree in [0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0] {
        let floor = isolation_floor(&cdf, degree).unwrap();
        println!("  {degree:<8} {:<7} {:.4}", floor.w_l, floor.p_m);
    }

    // Both slices at the degrees a service agreement would pin.
    let floors = isolation_floors(&trace, &[0.9, 0.5]).unwrap();
    println!("\nper-slice floors at degrees [0.9, 0.5]:");
    for (i, floor) in floors.iter().enumerate() {
        println!(
            "  slice {i}: reserve {} PRB, covers {:.2}% of slots alone",
            floor.w_l,
            floor.p_m * 100.0
        );
    }

    // The floor never overshoots: one PRB less already misses the degree.
    let tight = isolation_floor(&cdf, 0.9).unwrap();
    if tight.w_l > 0 {
        let below = cdf.fraction_at(tight.w_l - 1);
        println!(
            "\nfloor {} is minimal: coverage at {} PRB is only {below:.4}",
            tight.w_l,
            tight.w_l - 1
        );
    }
}
