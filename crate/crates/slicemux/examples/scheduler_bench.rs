//! Per-slot scheduling cost as the slice count grows. Each solve is one
//! exact 0/1 knapsack over the slices with positive excess demand.
//!
//! Run with `cargo run --release --example scheduler_bench`.

use slicemux::bench::bench_max_weight;

fn main() {
    // 2,000 solves per point keeps this example snappy; the `bench`
    // subcommand runs 10,000 for stabler medians.
    let points = bench_max_weight(&[2, 4, 8, 16, 32], 2_000, 1);

    println!("slices   mean per solve   median of batch means");
    for point in &points {
        println!(
            "{:>6}   {:>11.3} us   {:>18.3} us",
            point.n, point.mean_us, point.median_of_means_us
        );
    }

    let per_slot = points
        .iter()
        .find(|p| p.n == 16)
        .map(|p| p.median_of_means_us)
        .unwrap();
    println!(
        "\n16 slices cost {per_slot:.2} us per slot,{} enough for a 1 ms scheduling grid",
        if per_slot < 1_000.0 { "" } else { " NOT" }
    );
}
