// Pathloss, antenna gain and the coupling loss of one frozen drop.

use std::error::Error;

use d2dsim::channel::{
    build_coupling_table, los_probability, sector_antenna_gain, ue_enb_pathloss, ue_ue_pathloss, ChannelConfig,
    Endpoint,
};
use d2dsim::engine::drop_rng;
use d2dsim::layout::{build_hex_grid, drop_d2d_pairs};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = ChannelConfig::default();
    println!("breakpoint distance {:.2} m", cfg.breakpoint_m());
    println!("{:>8} {:>8} {:>9} {:>9} {:>9}", "d [m]", "P(LOS)", "UE LOS", "UE NLOS", "UE-eNB");
    for d in [10.0, 50.0, 100.0, 250.0, 500.0] {
        println!(
            "{d:>8} {:>8.3} {:>9.1} {:>9.1} {:>9.1}",
            los_probability(d),
            ue_ue_pathloss(d, true, &cfg)?,
            ue_ue_pathloss(d, false, &cfg)?,
            ue_enb_pathloss(d, &cfg)
        );
    }
    for angle in [0.0, 35.0, 70.0, 180.0] {
        println!("antenna gain at {angle:>5} deg: {:6.1} dBi", sector_antenna_gain(angle));
    }

    let layout = build_hex_grid(500.0, 0, false)?;
    let mut rng = drop_rng(3, 0);
    let pairs = drop_d2d_pairs(&layout, 1, 50.0, 3.0, 0, &mut rng)?;
    let ues: Vec<_> = pairs.into_iter().flat_map(|(tx, rx)| [tx, rx]).collect();
    let table = build_coupling_table(&layout, &ues, &cfg, &mut rng)?;
    let (tx, rx) = (ues[0].id, ues[1].id);
    let link = table.link(tx, Endpoint::Ue(rx))?;
    println!(
        "pair 0: {:.1} m, los {:?}, shadow {:.1} dB, coupling {:.1} dB",
        link.distance_m, link.los, link.shadow_db, link.loss_db
    );
    for s in 0..table.n_sectors() {
        println!("UE {tx} -> sector {s}: {:.1} dB", table.loss_db(tx, Endpoint::Sector(s))?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
