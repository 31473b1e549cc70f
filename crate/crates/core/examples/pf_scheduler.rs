// Proportional-fair uplink scheduling of one drop: airtime and served
// rate per flow when three of ten flows per sector go direct.

use std::error::Error;

use d2dsim::engine::{prepare_drop, ExperimentConfig};
use d2dsim::radio::open_loop_tx_power;
use d2dsim::scheduling::{run_pf_uplink, Destination, Flow};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = ExperimentConfig::throughput_default();
    let layout = cfg.layout()?;
    let state = prepare_drop(&cfg, &layout, 0, cfg.n_cellular_per_sector, 0)?;
    let pc = cfg.pc_sweep()[0].to_config(cfg.p_max_dbm, cfg.radio.enb_noise_dbm());

    let mut powers = vec![f64::NEG_INFINITY; state.ues.len()];
    let mut sector_flows: Vec<Vec<Flow>> = vec![Vec::new(); layout.n_sectors()];
    for (id, &(tx, rx)) in state.pairs.iter().enumerate() {
        let home = state.ues[tx].home_sector;
        let destination = if sector_flows[home].len() < 3 { Destination::Peer(rx) } else { Destination::Enb(home) };
        powers[tx] = open_loop_tx_power(&pc, state.table.loss_db(tx, destination.endpoint())?);
        sector_flows[home].push(Flow {
            id,
            tx,
            destination,
            avg_rate_bps: 1.0,
        });
    }
    let flows: Vec<Flow> = sector_flows.iter().flatten().copied().collect();
    let n_subframes = 1000;
    let out = run_pf_uplink(sector_flows, &powers, &state.table, &cfg.radio, n_subframes, cfg.pf_time_constant)?;
    for f in flows {
        println!(
            "flow {:>2} {:<9} airtime {:5.1}%  {:6.2} Mbit/s",
            f.id,
            if f.destination.is_d2d() { "D2D" } else { "uplink" },
            100.0 * out.grants[f.id] as f64 / n_subframes as f64,
            out.throughput_bps[f.id] / 1e6
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
