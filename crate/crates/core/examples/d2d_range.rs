// Urban 500 m grid: long-range D2D with one co-channel transmitter per
// sector versus short-range D2D with two concurrent transmitters.
//
// `cargo run --release --example d2d_range -- 100` runs 100 drops.

use std::error::Error;

use d2dsim::engine::{run_sinr_experiment, ExperimentConfig};
use d2dsim::{ChannelConfig, CoordinationMode};

pub fn run_with(n_drops: usize) -> Result<(), Box<dyn Error>> {
    let long = ExperimentConfig {
        n_drops,
        isd_m: 500.0,
        n_d2d_tx_per_sector: 1,
        channel: ChannelConfig::default(),
        ..ExperimentConfig::sinr_default()
    };
    let short = ExperimentConfig {
        d2d_range_m: 50.0,
        n_d2d_tx_per_sector: 10,
        coordination: CoordinationMode::SpatialReuse(2),
        ..long.clone()
    };
    for (name, cfg) in [("range 250 m, 1 TX/sector", long), ("range 50 m, reuse 2", short)] {
        let report = run_sinr_experiment(&cfg)?;
        let best = report
            .summaries
            .iter()
            .max_by(|a, b| a.fraction_above.partial_cmp(&b.fraction_above).unwrap())
            .ok_or("empty sweep")?;
        println!(
            "{name}: best setting {} reaches P(SINR > -6 dB) = {:.3}",
            best.setting.label(),
            best.fraction_above.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run_with(2)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let drops = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    run_with(drops)
}
