//! The three pool-size baselines that keep the causal scheduler honest:
//! the stationary policy program, its feasibility threshold, and the
//! non-causal offline optimum on a sampled trace.
//!
//! Run with `cargo run --example oracle_baselines`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::demand::TraceParams;
use slicemux::oracle::{
    offline_optimal, static_epsilon, static_threshold, ExcessModel, OracleCaps,
};
use slicemux::provision::{provision_max_weight, required_counts};
use slicemux::stats::ExcessTrace;

fn main() {
    // Two independent burst sources, no reserves: each slice demands 0 or
    // 10 PRBs per slot with equal probability and needs coverage beyond
    // its floor in a quarter of all slots.
    let model = MarkovDemandModel::from_parts(vec![
        (vec![0, 10], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
        (vec![0, 10], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
    ])
    .unwrap();
    let floors = [0u32, 0];
    let targets = [0.25, 0.25];
    let caps = OracleCaps::default();
    let excess_model = ExcessModel::new(&model, &floors).unwrap();

    // The stationary program: the best uniform slack a randomized policy
    // can hold at each pool size, knowing only the current joint state.
    println!("pool   best stationary slack");
    for w_c in [0, 5, 9, 10, 11] {
        let result = static_epsilon(&excess_model, w_c, &targets, &caps).unwrap();
        println!("{w_c:>4}   {:+.4}", result.epsilon_star);
    }

    // Below 10 PRBs no burst fits, so no policy reaches the targets; at 10
    // one burst per slot fits and the slack turns positive.
    let threshold = static_threshold(&excess_model, &targets, &caps).unwrap();
    println!("\nsmallest feasible stationary pool: {threshold}");

    // The same question asked of a concrete trace, twice: once for a
    // clairvoyant scheduler that sees the whole trace, once for the causal
    // deficit scheduler that sees only the past.
    let trace = model
        .generate(&TraceParams {
            horizon: 10_000,
            seed: 13,
            ..TraceParams::default()
        })
        .unwrap();
    let excess = ExcessTrace::new(&trace, &floors).unwrap();
    let required = required_counts(&targets, trace.horizon());
    let offline = offline_optimal(&excess, &required, &caps).unwrap();
    let causal = provision_max_weight(&excess, &targets, trace.horizon()).unwrap();
    println!("offline optimum on a sampled trace: {}", offline.w_c_offline);
    println!("causal max-weight needs:            {causal}");

    // The offline bound costs at most what the causal scheduler costs, and
    // on this workload they coincide: hindsight buys nothing.
    assert!(offline.w_c_offline <= causal);

    // The policy the stationary program found at the threshold.
    let at_threshold = static_epsilon(&excess_model, threshold, &targets, &caps).unwrap();
    println!("\nstationary policy at pool {threshold}:");
    for ((state, prob), actions) in at_threshold.joint_states.iter().zip(&at_threshold.policy) {
        let described: Vec<String> = actions
            .iter()
            .filter(|a| a.probability > 1e-9)
            .map(|a| format!("serve {:?} w.p. {:.2}", a.serve, a.probability))
            .collect();
        println!("  state {state:?} (p={prob:.2}): {}", described.join(", "));
    }
}
