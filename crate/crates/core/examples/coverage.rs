// Downlink SINR coverage of dropped UEs against the -6 dB threshold.

use std::error::Error;

use d2dsim::channel::{build_coupling_table, ChannelConfig};
use d2dsim::engine::{drop_rng, DEFAULT_ENB_TX_POWER_DBM};
use d2dsim::layout::{build_hex_grid, drop_cellular_ues};
use d2dsim::radio::{classify_coverage, downlink_sinr_db, Coverage, RadioConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let layout = build_hex_grid(1732.0, 2, true)?;
    let rc = RadioConfig::default();
    let mut rng = drop_rng(5, 0);
    let ues = drop_cellular_ues(&layout, 5, 0, &mut rng);
    let table = build_coupling_table(&layout, &ues, &ChannelConfig::default(), &mut rng)?;

    let mut outside = 0;
    let mut worst = f64::INFINITY;
    for ue in &ues {
        worst = worst.min(downlink_sinr_db(ue, &layout, &table, DEFAULT_ENB_TX_POWER_DBM, &rc)?);
        if classify_coverage(ue, &layout, &table, DEFAULT_ENB_TX_POWER_DBM, &rc)? == Coverage::OutOfCoverage {
            outside += 1;
        }
    }
    println!("{outside} of {} UEs out of coverage, worst downlink SINR {worst:.1} dB", ues.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
