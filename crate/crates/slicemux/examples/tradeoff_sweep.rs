//! The efficiency/isolation tradeoff: total provisioned bandwidth as the
//! isolation degree rises from pure multiplexing to full reservation.
//!
//! Run with `cargo run --example tradeoff_sweep`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::demand::TraceParams;
use slicemux::provision::{full_isolation_baseline, isolation_sweep};
use slicemux::sla::SlaSpec;

fn main() {
    let model = MarkovDemandModel::from_parts(vec![
        (vec![0, 6], vec![vec![0.75, 0.25], vec![0.5, 0.5]]),
        (vec![0, 8], vec![vec![0.8, 0.2], vec![0.4, 0.6]]),
        (vec![2, 5], vec![vec![0.6, 0.4], vec![0.5, 0.5]]),
    ])
    .unwrap();
    let trace = model
        .generate(&TraceParams {
            horizon: 30_000,
            seed: 21,
            ..TraceParams::default()
        })
        .unwrap();
    // The grid overrides the isolation degrees cell by cell; only the
    // availability targets matter here.
    let sla = SlaSpec::new(vec![0.9, 0.85, 0.9], vec![0.0, 0.0, 0.0]).unwrap();

    // The sweep grid runs each slice's isolation degree from 0 up to its
    // availability degree. The diagonal (all slices at one common degree)
    // is the headline curve.
    let surface = isolation_sweep(&trace, &sla, 0.25).unwrap();
    println!("{} grid cells solved", surface.rows.len());
    println!("\ncommon degree   floors        pool   total");
    for row in &surface.rows {
        if row.p_l.windows(2).all(|pair| pair[0] == pair[1]) {
            println!(
                "{:<15} {:<13} {:<6} {}",
                row.p_l[0],
                format!("{:?}", row.plan.w_l),
                row.plan.w_c,
                row.plan.total
            );
        }
    }

    // Dedicating a full availability-quantile reserve to every slice needs
    // this much; the sweep shows how much multiplexing saves below it.
    let dedicated = full_isolation_baseline(&trace, &sla.p_h).unwrap();
    let multiplexed = surface
        .rows
        .iter()
        .find(|row| row.p_l.iter().all(|&p| p == 0.0))
        .map(|row| row.plan.total)
        .unwrap();
    println!("\nfully dedicated reserves: {dedicated} PRBs");
    println!(
        "pure multiplexing:        {multiplexed} PRBs ({:.0}% saved)",
        (1.0 - multiplexed as f64 / dedicated as f64) * 100.0
    );

    // Totals along the diagonal never decrease: a stricter isolation
    // requirement can only cost bandwidth.
    let diagonal: Vec<u64> = surface
        .rows
        .iter()
        .filter(|row| row.p_l.windows(2).all(|pair| pair[0] == pair[1]))
        .map(|row| row.plan.total)
        .collect();
    assert!(diagonal.windows(2).all(|pair| pair[0] <= pair[1]));
    println!("diagonal totals are monotone: {diagonal:?}");
}
