//! Demand generation: one slice per traffic model, plus window aggregation.
//!
//! Run with `cargo run --example generate_traces`.

use slicemux::demand::markov::MarkovDemandModel;
use slicemux::demand::onoff::OnOffSourceSpec;
use slicemux::demand::web::WebBrowsingSpec;
use slicemux::demand::{Dist, TraceParams};

fn column_summary(label: &str, column: &[u32]) {
    let mean = column.iter().map(|&v| f64::from(v)).sum::<f64>() / column.len() as f64;
    let max = column.iter().copied().max().unwrap_or(0);
    let busy = column.iter().filter(|&&v| v > 0).count() as f64 / column.len() as f64;
    println!("{label:<18} mean {mean:6.2} PRB   peak {max:3} PRB   busy {:5.1}%", busy * 100.0);
}

fn main() {
    let params = TraceParams {
        horizon: 20_000,
        slot_ms: 1.0,
        seed: 42,
        system_bandwidth: 100,
    };

    // A bursty two-state chain: long quiet spells, 10-PRB bursts.
    let markov = MarkovDemandModel::from_parts(vec![(
        vec![0, 10],
        vec![vec![0.9, 0.1], vec![0.5, 0.5]],
    )])
    .unwrap();
    let markov_trace = markov.generate(&params).unwrap();
    column_summary("markov chain", &markov_trace.column(0));

    // Voice-like on-off sources: Pareto activity spells, exponential gaps.
    let onoff = OnOffSourceSpec {
        user_count: 200,
        active_mean_s: 2.0,
        idle_mean_s: 5.0,
        pareto_shape: 1.5,
        rate_bps: 16_000.0,
        packet_bytes: 40,
        bits_per_prb: 1_000,
    };
    let onoff_trace = onoff.generate(&params).unwrap();
    column_summary("on-off sources", &onoff_trace.column(0));

    // Web browsing: page downloads separated by parsing and reading pauses.
    let web = WebBrowsingSpec {
        user_count: 15,
        object_size_bytes: Dist::LogNormal {
            mu_log: 8.37,
            sigma_log: 1.37,
        },
        objects_per_page: Dist::Pareto {
            scale: 2.0,
            shape: 1.5,
        },
        parsing_time_s: Dist::Exponential { mean: 0.13 },
        reading_time_s: Dist::Exponential { mean: 5.0 },
        bits_per_prb: 1_000,
    };
    let web_trace = web.generate(&params).unwrap();
    column_summary("web browsing", &web_trace.column(0));

    // Window aggregation: the per-window maximum is what provisioning sees
    // when demands are quoted on a coarser grid than the scheduler slot.
    let windowed = markov_trace.window_max(100).unwrap();
    println!(
        "\nwindow-max 100x: {} slots -> {} windows",
        markov_trace.horizon(),
        windowed.horizon()
    );
    column_summary("markov, windowed", &windowed.column(0));

    // Same parameters, same seed, same trace: generation is deterministic.
    let replay = markov.generate(&params).unwrap();
    assert_eq!(replay, markov_trace);
    println!("\nsame seed replays the identical trace");
}
