// Uplink throughput gain from turning some of each sector's uplink flows
// into direct D2D flows, for a growing number of converted flows.
//
// `cargo run --release --example throughput_offload -- 20 2000` runs
// 20 drops of 2000 subframes.

use std::error::Error;

use d2dsim::engine::{run_throughput_experiment, ExperimentConfig};

pub fn run_with(n_drops: usize, n_subframes: usize) -> Result<(), Box<dyn Error>> {
    let cfg = ExperimentConfig {
        n_drops,
        n_subframes,
        ..ExperimentConfig::throughput_default()
    };
    println!("{:>3} {:>12} {:>12} {:>9} {:>9}", "k", "mean Mbit/s", "p5 Mbit/s", "gain", "gain p5");
    for k in [1, 3, 5, 7, 9] {
        let c = run_throughput_experiment(&cfg, k)?;
        println!(
            "{k:>3} {:>12.3} {:>12.3} {:>9.3} {:>9.3}",
            c.offload.mean_bps / 1e6,
            c.offload.p5_bps / 1e6,
            c.mean_gain(),
            c.p5_gain()
        );
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run_with(1, 200)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let drops = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let subframes = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);
    run_with(drops, subframes)
}
