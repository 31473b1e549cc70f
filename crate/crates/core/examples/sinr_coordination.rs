// Dense public-safety scenario: ten D2D transmitters per sector, either
// all transmitting at once or time-multiplexed one per subframe.
//
// `cargo run --release --example sinr_coordination -- 100` runs 100 drops.

use std::error::Error;

use d2dsim::engine::{run_sinr_experiment, ExperimentConfig};
use d2dsim::CoordinationMode;

pub fn run_with(n_drops: usize) -> Result<(), Box<dyn Error>> {
    let base = ExperimentConfig {
        n_drops,
        ..ExperimentConfig::sinr_default()
    };
    for mode in [CoordinationMode::Uncoordinated, CoordinationMode::OrthogonalTdm] {
        let report = run_sinr_experiment(&ExperimentConfig {
            coordination: mode,
            ..base.clone()
        })?;
        println!("{mode:?}");
        for s in &report.summaries {
            println!(
                "  {:<26} P(SINR > -6 dB) = {:.3}  mean {:6.1} dB",
                s.setting.label(),
                s.fraction_above.unwrap_or(f64::NAN),
                s.mean_db.unwrap_or(f64::NAN)
            );
        }
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
