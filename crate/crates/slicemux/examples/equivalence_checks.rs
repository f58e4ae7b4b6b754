//! Why provisioning pins every reserve at its isolation floor: any
//! feasible plan with larger reserves can be rewritten to the floor plan
//! without losing feasibility or bandwidth, and no reserve split beats
//! the floors on an exhaustive search.
//!
//! Run with `cargo run --example equivalence_checks`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::demand::TraceParams;
use slicemux::equivalence::{generate_feasible_corpus, verify_prop1, verify_prop2_small};
use slicemux::oracle::OracleCaps;
use slicemux::sla::SlaSpec;

fn main() {
    let model = MarkovDemandModel::from_parts(vec![
        (vec![0, 5], vec![vec![0.6, 0.4], vec![0.5, 0.5]]),
        (vec![1, 4], vec![vec![0.7, 0.3], vec![0.4, 0.6]]),
    ])
    .unwrap();
    let trace = model
        .generate(&TraceParams {
            horizon: 2_000,
            seed: 3,
            ..TraceParams::default()
        })
        .unwrap();
    let sla = SlaSpec::new(vec![0.85, 0.8], vec![0.5, 0.4]).unwrap();

    // Feasible plans with reserves deliberately raised above the floors.
    let corpus = generate_feasible_corpus(&trace, &sla, 10, 77).unwrap();
    println!("lift check on {} oversized plans:", corpus.len());
    for (k, point) in corpus.iter().enumerate() {
        let report = verify_prop1(point, &trace, &sla).unwrap();
        println!(
            "  plan {k}: reserves {:?} + pool {:>2} -> floors, objective {} -> {}, {}",
            point.w_r,
            point.w_c,
            report.original_objective,
            report.lifted_objective,
            if report.pass { "equivalent" } else { "BROKEN" }
        );
        assert!(report.pass);
        // The rewrite touches nothing the agreement measures: availability
        // counts match slot for slot and the floor still covers its share.
        assert_eq!(report.original_availability, report.lifted_availability);
    }

    // Exhaustive counterpart on a short trace: try every reserve vector
    // between the floors and the peak demands, solve the offline pool
    // problem at each, and compare against the floor-pinned plan.
    let short = model
        .generate(&TraceParams {
            horizon: 60,
            seed: 5,
            ..TraceParams::default()
        })
        .unwrap();
    let report = verify_prop2_small(&short, &sla, &OracleCaps::default()).unwrap();
    println!(
        "\nreserve grid search over {} points: floors give {}, best alternative {} at {:?}",
        report.grid_points, report.floor_objective, report.best_objective, report.best_w_r
    );
    assert!(report.pass, "some reserve split beat the floors");
    println!("no reserve split beats the isolation floors");
}
