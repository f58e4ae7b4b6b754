//! End-to-end provisioning: floors from the isolation degrees, then the
//! smallest shared pool that still meets every availability target.
//!
//! Run with `cargo run --example provision_plan`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::demand::TraceParams;
use slicemux::provision::full_plan;
use slicemux::sla::SlaSpec;

fn main() {
    // Two independent bursty slices: 0 or 10 PRBs, a coin flip per slot.
    // Each needs its demand met in 75% of slots.
    let model = MarkovDemandModel::from_parts(vec![
        (vec![0, 10], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
        (vec![0, 10], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
    ])
    .unwrap();
    let trace = model
        .generate(&TraceParams {
            horizon: 100_000,
            seed: 13,
            ..TraceParams::default()
        })
        .unwrap();

    // No isolation requirement: everything rides the shared pool. The
    // bursts rarely collide, so one burst's worth of pool serves both.
    let shared = SlaSpec::new(vec![0.75, 0.75], vec![0.0, 0.0]).unwrap();
    let plan = full_plan(&trace, &shared).unwrap();
    println!("shared multiplexing (isolation degree 0):");
    println!("  floors {:?}, pool {}, total {} PRBs", plan.w_l, plan.w_c, plan.total);

    // Full isolation: every slice must be covered by its own reserve in
    // 75% of slots, which forces a 10-PRB floor each. Twice the bandwidth
    // for the same availability.
    let isolated = SlaSpec::new(vec![0.75, 0.75], vec![0.75, 0.75]).unwrap();
    let plan = full_plan(&trace, &isolated).unwrap();
    println!("full isolation (isolation degree = availability degree):");
    println!("  floors {:?}, pool {}, total {} PRBs", plan.w_l, plan.w_c, plan.total);

    // In between: isolate the typical slot, multiplex the bursts.
    let mixed = SlaSpec::new(vec![0.75, 0.75], vec![0.5, 0.5]).unwrap();
    let plan = full_plan(&trace, &mixed).unwrap();
    println!("intermediate (isolation degree 0.5):");
    println!("  floors {:?}, pool {}, total {} PRBs", plan.w_l, plan.w_c, plan.total);
    println!(
        "  within-floor coverage per slice: [{:.3}, {:.3}]",
        plan.p_m[0], plan.p_m[1]
    );
}
