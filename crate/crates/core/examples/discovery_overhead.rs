// Capacity cost of periodic discovery subframes and the matching sleep
// ratio for UEs that only wake up to discover.

use std::error::Error;

use d2dsim::discovery_overhead;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (reserved, period_s) in [(50, 5.0), (64, 10.0), (10, 1.0)] {
        let (overhead, sleep) = discovery_overhead(reserved, period_s)?;
        println!(
            "{reserved:>3} subframes every {period_s:>4} s: overhead {:.2}%, sleep {:.2}%",
            overhead * 100.0,
            sleep * 100.0
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
