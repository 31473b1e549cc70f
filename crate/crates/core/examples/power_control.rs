// Open-loop transmit power across the pathloss range and the SINR it
// buys for a D2D link with one co-channel interferer.

use std::error::Error;

use d2dsim::channel::{build_coupling_table, ChannelConfig, Endpoint};
use d2dsim::engine::drop_rng;
use d2dsim::layout::{build_hex_grid, drop_d2d_pairs};
use d2dsim::radio::{compute_sinr, open_loop_tx_power, rate_from_sinr, PowerControlConfig, RadioConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let rc = RadioConfig::default();
    let base = PowerControlConfig::default().with_noise(rc.ue_noise_dbm());
    println!("UE noise {:.1} dBm, eNB noise {:.1} dBm", rc.ue_noise_dbm(), rc.enb_noise_dbm());
    for alpha in [0.0, 0.8, 1.0] {
        let pc = PowerControlConfig { alpha, ..base };
        let row: Vec<String> = [60.0, 80.0, 100.0, 120.0]
            .iter()
            .map(|&pl| format!("{:6.1}", open_loop_tx_power(&pc, pl)))
            .collect();
        println!("alpha {alpha:.1}: P_tx at PL 60/80/100/120 dB = {} dBm", row.join(" "));
    }

    let layout = build_hex_grid(500.0, 0, false)?;
    let mut rng = drop_rng(11, 0);
    let pairs = drop_d2d_pairs(&layout, 1, 50.0, 3.0, 0, &mut rng)?;
    let ues: Vec<_> = pairs.into_iter().flat_map(|(tx, rx)| [tx, rx]).collect();
    let table = build_coupling_table(&layout, &ues, &ChannelConfig::default(), &mut rng)?;
    let (tx0, rx0, tx1) = (ues[0].id, ues[1].id, ues[2].id);
    let active = [tx0, tx1];
    for pc in [base, PowerControlConfig { enabled: false, ..base }] {
        let mut powers = vec![f64::NEG_INFINITY; ues.len()];
        for &(tx, rx) in &[(tx0, rx0), (tx1, ues[3].id)] {
            powers[tx] = open_loop_tx_power(&pc, table.loss_db(tx, Endpoint::Ue(rx))?);
        }
        let sinr = compute_sinr(Endpoint::Ue(rx0), tx0, &active, &powers, &table, rc.ue_noise_dbm())?;
        println!(
            "power control {}: SINR {sinr:.1} dB, rate {:.2} Mbit/s",
            if pc.enabled { "on " } else { "off" },
            rate_from_sinr(sinr, rc.bandwidth_hz, &rc) / 1e6
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
