//! Expected-drift certificates for the deficit dynamics: when the
//! stationary slack is positive, the quadratic potential of the deficit
//! vector falls everywhere outside a bounded ball, which pins the deficits
//! near zero over long runs.
//!
//! Run with `cargo run --example drift_diagnostics`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::oracle::{deficit_grid, drift_check, static_epsilon, ExcessModel, OracleCaps};

fn main() {
    let model = MarkovDemandModel::from_parts(vec![
        (vec![0, 4], vec![vec![0.6, 0.4], vec![0.5, 0.5]]),
        (vec![0, 3], vec![vec![0.7, 0.3], vec![0.6, 0.4]]),
        (vec![0, 2], vec![vec![0.8, 0.2], vec![0.5, 0.5]]),
    ])
    .unwrap();
    let excess_model = ExcessModel::new(&model, &[0, 0, 0]).unwrap();
    let targets = [0.3, 0.25, 0.15];
    let caps = OracleCaps::default();

    // Every deficit vector on a geometric grid; the drift must honor the
    // bound at each of them.
    let grid = deficit_grid(&[0.0, 1.0, 2.0, 4.0, 8.0], 3);
    println!("checking {} deficit vectors", grid.len());

    for w_c in [5, 9] {
        let slack = static_epsilon(&excess_model, w_c, &targets, &caps)
            .unwrap()
            .epsilon_star;
        let report = drift_check(&excess_model, w_c, &targets, &grid, &caps).unwrap();
        println!("\npool {w_c}: stationary slack {slack:+.4}");
        println!("  drift constant (derived)  {:.4}", report.b_std);
        println!("  drift constant (variant)  {:.4}", report.b_alt);
        println!("  worst bound margin        {:+.6}", report.min_margin());

        // The exact expected drift at a few grid points, against the bound
        // B - eps * sum(d). Positive margin means the bound holds.
        println!("  deficits        drift      bound      margin");
        for point in report.points.iter().rev().take(3).rev() {
            println!(
                "  {:<14}  {:>8.3}  {:>8.3}  {:+.4}",
                format!("{:?}", point.d),
                point.drift,
                point.bound,
                point.margin
            );
        }
        assert!(
            report.min_margin() > -1e-9,
            "drift bound violated at pool {w_c}"
        );
    }

    // With a positive slack the drift turns negative once the deficits are
    // large: the potential shrinks whenever sum(d) > B / eps.
    let report = drift_check(&excess_model, 9, &targets, &grid, &caps).unwrap();
    let big = report
        .points
        .iter()
        .filter(|p| p.d.iter().sum::<f64>() >= 16.0)
        .collect::<Vec<_>>();
    println!(
        "\npool 9, deficits summing to 16+: all {} drifts negative: {}",
        big.len(),
        big.iter().all(|p| p.drift < 0.0)
    );
}
