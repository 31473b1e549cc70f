// Builds the 19-site wrapped grid, drops UEs and shows how wraparound
// shortens distances across the edge of the network.

use std::error::Error;

use d2dsim::engine::drop_rng;
use d2dsim::layout::{build_hex_grid, drop_cellular_ues, drop_d2d_pairs, wrap_distance};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let layout = build_hex_grid(1732.0, 2, true)?;
    println!(
        "{} sites, {} sectors, cell radius {:.1} m, {} wrap offsets",
        layout.sites().len(),
        layout.n_sectors(),
        layout.cell_radius(),
        layout.wrap_offsets().len()
    );

    let sites = layout.sites();
    let (a, b) = sites
        .iter()
        .flat_map(|&a| sites.iter().map(move |&b| (a, b)))
        .max_by(|x, y| x.0.distance(x.1).total_cmp(&y.0.distance(y.1)))
        .ok_or("no sites")?;
    println!(
        "farthest sites: euclidean {:.0} m, wrapped {:.0} m",
        a.distance(b),
        wrap_distance(a, b, &layout)
    );

    let mut rng = drop_rng(7, 0);
    let ues = drop_cellular_ues(&layout, 2, 0, &mut rng);
    let misplaced = ues.iter().filter(|u| layout.locate_sector(u.position) != u.home_sector).count();
    println!("{} cellular UEs dropped, {misplaced} outside their home sector", ues.len());

    let pairs = drop_d2d_pairs(&layout, 1, 250.0, 3.0, ues.len(), &mut rng)?;
    let spans: Vec<f64> = pairs
        .iter()
        .map(|(tx, rx)| wrap_distance(tx.position, rx.position, &layout))
        .collect();
    let longest = spans.iter().copied().fold(0.0, f64::max);
    println!("{} D2D pairs, longest span {longest:.1} m", pairs.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
