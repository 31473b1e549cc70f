//! Hexagonal multi-site geometry and UE dropping.
//!
//! Sites sit on a hexagonal lattice with nearest-neighbour spacing equal to
//! the inter-site distance (ISD). Every site carries three sectors whose
//! boresights point at 30°, 150° and 270°; a sector's region is the 120°
//! wedge of the site's hexagon centred on its boresight. When wraparound is
//! enabled the finite layout is tiled by six translated copies of itself so
//! that every UE sees a full ring of interferers.

use rand::Rng;

use crate::error::{Result, SimError};

/// Dense identifier of a dropped UE. Ids index directly into per-drop
/// vectors (powers, coupling rows).
pub type UeId = usize;

/// Boresight azimuths of the three sectors of every site, degrees from +x.
pub const BORESIGHTS_DEG: [f64; 3] = [30.0, 150.0, 270.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, azimuth_deg: f64) -> Self {
        let a = azimuth_deg.to_radians();
        Point::new(r * a.cos(), r * a.sin())
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub site: usize,
    pub boresight_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    isd: f64,
    n_rings: usize,
    sites: Vec<Point>,
    sectors: Vec<Sector>,
    wraparound: bool,
    /// Identity first, then the six tiling translations when wraparound is on.
    wrap_offsets: Vec<(f64, f64)>,
}

impl NetworkLayout {
    pub fn isd(&self) -> f64 {
        self.isd
    }

    pub fn n_rings(&self) -> usize {
        self.n_rings
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn wraparound_enabled(&self) -> bool {
        self.wrap_offsets.len() > 1
    }

    /// Requested wraparound flag (it has no effect on a single site).
    pub fn wraparound_requested(&self) -> bool {
        self.wraparound
    }

    pub fn wrap_offsets(&self) -> &[(f64, f64)] {
        &self.wrap_offsets
    }

    /// Circumradius of each site's hexagon.
    pub fn cell_radius(&self) -> f64 {
        self.isd / 3f64.sqrt()
    }

    pub fn sector_site_position(&self, sector: usize) -> Point {
        self.sites[self.sectors[sector].site]
    }

    /// Displacement from `from` to the closest wrapped image of `to`.
    pub fn wrap_vector(&self, from: Point, to: Point) -> (f64, f64) {
        let mut best = (to.x - from.x, to.y - from.y);
        let mut best_d2 = best.0 * best.0 + best.1 * best.1;
        for &(ox, oy) in &self.wrap_offsets[1..] {
            let v = (to.x + ox - from.x, to.y + oy - from.y);
            let d2 = v.0 * v.0 + v.1 * v.1;
            if d2 < best_d2 {
                best = v;
                best_d2 = d2;
            }
        }
        best
    }

    /// True when `p`, expressed relative to a site centre, lies in that
    /// site's hexagon.
    fn in_site_hexagon(&self, rel: (f64, f64)) -> bool {
        let half = 0.5 * self.isd * (1.0 + 1e-12);
        (0..6).all(|k| {
            let a = (60.0 * k as f64).to_radians();
            rel.0 * a.cos() + rel.1 * a.sin() <= half
        })
    }

    /// Index (0..3) of the sector of a site whose wedge contains `rel`.
    fn wedge_of(rel: (f64, f64)) -> usize {
        let az = rel.1.atan2(rel.0).to_degrees();
        BORESIGHTS_DEG
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                angle_diff_deg(az, **a)
                    .abs()
                    .total_cmp(&angle_diff_deg(az, **b).abs())
            })
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Whether `p` lies inside the region of `sector` (no wrapping applied).
    pub fn sector_contains(&self, sector: usize, p: Point) -> bool {
        let s = self.sectors[sector];
        let site = self.sites[s.site];
        let rel = (p.x - site.x, p.y - site.y);
        self.in_site_hexagon(rel) && angle_diff_deg(rel.1.atan2(rel.0).to_degrees(), s.boresight_deg).abs() <= 60.0 + 1e-9
    }

    /// Geometric sector containing `p`: nearest site (wrap-aware), then the
    /// wedge by azimuth. Points outside an unwrapped layout map to the
    /// nearest site's wedge.
    pub fn locate_sector(&self, p: Point) -> usize {
        let (site, rel) = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, self.wrap_vector(s, p)))
            .min_by(|(_, a), (_, b)| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)))
            .expect("layout has at least one site");
        site * 3 + Self::wedge_of(rel)
    }

    fn sample_in_sector<R: Rng + ?Sized>(&self, sector: usize, rng: &mut R) -> Point {
        let s = self.sectors[sector];
        let site = self.sites[s.site];
        let r = self.cell_radius();
        let corners = [
            Point::ORIGIN,
            Point::polar(r, s.boresight_deg - 60.0),
            Point::polar(r, s.boresight_deg),
            Point::polar(r, s.boresight_deg + 60.0),
        ];
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for c in corners {
            x0 = x0.min(c.x);
            x1 = x1.max(c.x);
            y0 = y0.min(c.y);
            y1 = y1.max(c.y);
        }
        loop {
            let p = Point::new(
                site.x + rng.random_range(x0..x1),
                site.y + rng.random_range(y0..y1),
            );
            if self.sector_contains(sector, p) {
                return p;
            }
        }
    }
}

/// Signed difference `a - b` wrapped into (-180, 180].
pub fn angle_diff_deg(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % 360.0;
    if d <= -180.0 {
        d += 360.0;
    } else if d > 180.0 {
        d -= 360.0;
    }
    d
}

/// Builds a hexagonal layout of `1 + 3 n (n + 1)` sites centred on the origin.
pub fn build_hex_grid(isd: f64, n_rings: usize, wraparound: bool) -> Result<NetworkLayout> {
    if !(isd.is_finite() && isd > 0.0) {
        return Err(SimError::invalid("isd", format!("must be positive, got {isd}")));
    }
    let n = n_rings as i64;
    let a1 = (isd, 0.0);
    let a2 = (0.5 * isd, 0.5 * 3f64.sqrt() * isd);
    let to_xy = |q: i64, r: i64| (q as f64 * a1.0 + r as f64 * a2.0, q as f64 * a1.1 + r as f64 * a2.1);

    // Ring by ring so site 0 is the centre and indices grow outwards.
    let mut axial = vec![(0i64, 0i64)];
    for ring in 1..=n {
        let dirs = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
        let (mut q, mut r) = (ring * dirs[4].0, ring * dirs[4].1);
        for d in dirs {
            for _ in 0..ring {
                axial.push((q, r));
                q += d.0;
                r += d.1;
            }
        }
    }
    let sites: Vec<Point> = axial
        .iter()
        .map(|&(q, r)| {
            let (x, y) = to_xy(q, r);
            Point::new(x, y)
        })
        .collect();
    let sectors = (0..sites.len())
        .flat_map(|site| {
            BORESIGHTS_DEG.iter().map(move |&b| Sector {
                site,
                boresight_deg: b,
            })
        })
        .collect();

    let mut wrap_offsets = vec![(0.0, 0.0)];
    if wraparound && n_rings >= 1 {
        // (n+1) a1 + n a2 spans a tile of exactly 3n^2 + 3n + 1 sites.
        let (tx, ty) = to_xy(n + 1, n);
        for k in 0..6 {
            let a = (60.0 * k as f64).to_radians();
            wrap_offsets.push((tx * a.cos() - ty * a.sin(), tx * a.sin() + ty * a.cos()));
        }
    }
    Ok(NetworkLayout {
        isd,
        n_rings,
        sites,
        sectors,
        wraparound,
        wrap_offsets,
    })
}

/// Minimum Euclidean distance from `a` to any wrapped image of `b`.
pub fn wrap_distance(a: Point, b: Point, layout: &NetworkLayout) -> f64 {
    let (dx, dy) = layout.wrap_vector(a, b);
    dx.hypot(dy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    CellularTx,
    D2dTx,
    D2dRx,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeRecord {
    pub id: UeId,
    pub position: Point,
    pub role: Role,
    pub home_sector: usize,
    pub peer: Option<UeId>,
}

impl UeRecord {
    pub fn is_transmitter(&self) -> bool {
        matches!(self.role, Role::CellularTx | Role::D2dTx)
    }
}

/// Drops `n_per_sector` cellular UEs uniformly in every sector, ids starting
/// at `first_id`, sector by sector.
pub fn drop_cellular_ues<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    n_per_sector: usize,
    first_id: UeId,
    rng: &mut R,
) -> Vec<UeRecord> {
    let mut out = Vec::with_capacity(n_per_sector * layout.n_sectors());
    for sector in 0..layout.n_sectors() {
        for _ in 0..n_per_sector {
            out.push(UeRecord {
                id: first_id + out.len(),
                position: layout.sample_in_sector(sector, rng),
                role: Role::CellularTx,
                home_sector: sector,
                peer: None,
            });
        }
    }
    out
}

/// Drops `n_tx_per_sector` D2D transmitters per sector like cellular UEs and,
/// for each, a receiver uniformly in the annulus `[min_dist, d2d_range]`
/// around it. Ids alternate TX, RX starting at `first_id`.
pub fn drop_d2d_pairs<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    n_tx_per_sector: usize,
    d2d_range: f64,
    min_dist: f64,
    first_id: UeId,
    rng: &mut R,
) -> Result<Vec<(UeRecord, UeRecord)>> {
    if !(min_dist > 0.0) {
        return Err(SimError::invalid("min_d2d_dist_m", "must be positive"));
    }
    if !(min_dist < d2d_range) || !d2d_range.is_finite() {
        return Err(SimError::invalid(
            "d2d_range_m",
            format!("must exceed the minimum distance {min_dist} m, got {d2d_range}"),
        ));
    }
    let mut out = Vec::with_capacity(n_tx_per_sector * layout.n_sectors());
    for sector in 0..layout.n_sectors() {
        for _ in 0..n_tx_per_sector {
            let tx_id = first_id + 2 * out.len();
            let tx_pos = layout.sample_in_sector(sector, rng);
            let (r, theta) = loop {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                let r = d2d_range * rng.random::<f64>().sqrt();
                if r >= min_dist {
                    break (r, theta);
                }
            };
            let rx_pos = tx_pos.offset(r * theta.cos(), r * theta.sin());
            let tx = UeRecord {
                id: tx_id,
                position: tx_pos,
                role: Role::D2dTx,
                home_sector: sector,
                peer: Some(tx_id + 1),
            };
            let rx = UeRecord {
                id: tx_id + 1,
                position: rx_pos,
                role: Role::D2dRx,
                home_sector: layout.locate_sector(rx_pos),
                peer: Some(tx_id),
            };
            out.push((tx, rx));
        }
    }
    Ok(out)
}
