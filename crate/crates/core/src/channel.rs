//! Large-scale propagation and the per-drop coupling table.
//!
//! UE-UE links follow the Winner+ B1 street-level model with both antenna
//! heights at UE height and a signed dB offset; LOS state comes from the
//! ITU-R UMi LOS probability. UE-eNB links use the 3GPP macro pathloss and
//! the parabolic three-sector antenna pattern. Shadowing is lognormal and
//! i.i.d. per ordered link. Fast fading is not modelled.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, SimError};
use crate::layout::{angle_diff_deg, NetworkLayout, Role, UeId, UeRecord};

pub const SPEED_OF_LIGHT: f64 = 3.0e8;
pub const MAX_ANTENNA_GAIN_DBI: f64 = 14.0;
pub const MAX_ANTENNA_ATTENUATION_DB: f64 = 25.0;
pub const ANTENNA_3DB_BEAMWIDTH_DEG: f64 = 70.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LosModel {
    /// ITU-R UMi LOS probability on every UE-UE link.
    ItuUmi,
    AlwaysNlos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub carrier_ghz: f64,
    pub ue_height: f64,
    /// Signed offset added to UE-UE pathloss.
    pub d2d_offset_db: f64,
    pub shadow_std_ueue_db: f64,
    pub shadow_std_enbue_db: f64,
    /// Minimum coupling loss before antenna gain.
    pub min_pl_db: f64,
    /// UE-UE distances below this are clamped when building the table.
    pub min_ue_distance_m: f64,
    pub los_model: LosModel,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            carrier_ghz: 2.0,
            ue_height: 1.5,
            d2d_offset_db: -10.0,
            shadow_std_ueue_db: 7.0,
            shadow_std_enbue_db: 8.0,
            min_pl_db: 30.0,
            min_ue_distance_m: 3.0,
            los_model: LosModel::ItuUmi,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_ghz > 0.0 && self.carrier_ghz.is_finite()) {
            return Err(SimError::invalid("carrier_ghz", "must be positive"));
        }
        if !(self.ue_height > 1.0) {
            return Err(SimError::invalid("ue_height", "must exceed 1 m (effective height)"));
        }
        if !(self.shadow_std_ueue_db >= 0.0 && self.shadow_std_enbue_db >= 0.0) {
            return Err(SimError::invalid("shadow_std", "must be non-negative"));
        }
        if !self.d2d_offset_db.is_finite() {
            return Err(SimError::invalid("d2d_offset_db", "must be finite"));
        }
        if !(self.min_ue_distance_m > 0.0) {
            return Err(SimError::invalid("min_ue_distance_m", "must be positive"));
        }
        Ok(())
    }

    /// Winner+ B1 LOS breakpoint distance for two UE-height antennas.
    pub fn breakpoint_m(&self) -> f64 {
        let h_eff = self.ue_height - 1.0;
        4.0 * h_eff * h_eff * self.carrier_ghz * 1e9 / SPEED_OF_LIGHT
    }
}

/// ITU-R UMi line-of-sight probability at 2-D distance `d`.
pub fn los_probability(d: f64) -> f64 {
    if d <= 18.0 {
        return 1.0;
    }
    let e = (-d / 36.0).exp();
    (18.0 / d) * (1.0 - e) + e
}

/// Winner+ B1 UE-UE pathloss plus the configured offset, floored.
pub fn ue_ue_pathloss(d: f64, los: bool, cfg: &ChannelConfig) -> Result<f64> {
    if !(d >= cfg.min_ue_distance_m) {
        return Err(SimError::invalid(
            "distance",
            format!("{d} m is below the minimum UE-UE distance {} m", cfg.min_ue_distance_m),
        ));
    }
    let fc = cfg.carrier_ghz;
    let pl = if los {
        if d < cfg.breakpoint_m() {
            22.7 * d.log10() + 27.0 + 20.0 * fc.log10()
        } else {
            let h_eff = cfg.ue_height - 1.0;
            40.0 * d.log10() + 7.56 - 17.3 * h_eff.log10() - 17.3 * h_eff.log10() + 2.7 * fc.log10()
        }
    } else {
        let h = cfg.ue_height;
        (44.9 - 6.55 * h.log10()) * d.log10() + 5.83 * h.log10() + 14.78 + 34.97 * fc.log10()
    };
    Ok((pl + cfg.d2d_offset_db).max(cfg.min_pl_db))
}

/// Macro UE-eNB pathloss, `d` in metres.
pub fn ue_enb_pathloss(d: f64, cfg: &ChannelConfig) -> f64 {
    (128.1 + 37.6 * (d / 1000.0).log10()).max(cfg.min_pl_db)
}

/// Horizontal three-sector antenna pattern (dBi).
pub fn sector_antenna_gain(angle_off_boresight_deg: f64) -> f64 {
    let theta = angle_off_boresight_deg / ANTENNA_3DB_BEAMWIDTH_DEG;
    MAX_ANTENNA_GAIN_DBI - (12.0 * theta * theta).min(MAX_ANTENNA_ATTENUATION_DB)
}

pub fn draw_shadowing<R: Rng + ?Sized>(std_db: f64, rng: &mut R) -> f64 {
    if std_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std_db)
        .expect("shadowing std is finite and non-negative")
        .sample(rng)
}

/// Receiving end of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Ue(UeId),
    Sector(usize),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Ue(id) => write!(f, "UE {id}"),
            Endpoint::Sector(s) => write!(f, "sector {s}"),
        }
    }
}

/// Everything drawn and derived for one ordered link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    /// Wrap-aware 2-D distance before any clamping.
    pub distance_m: f64,
    /// LOS draw for UE-UE links, `None` towards a sector.
    pub los: Option<bool>,
    pub shadow_db: f64,
    pub antenna_gain_dbi: f64,
    /// Coupling loss: max(pathloss + shadowing, floor) - antenna gain.
    pub loss_db: f64,
    /// Same loss with shadowing at its mean.
    pub mean_loss_db: f64,
}

/// Frozen per-drop coupling losses.
///
/// Holds every transmitter to every D2D receiver, and every UE to every
/// sector. Lookups outside those sets fail with [`SimError::MissingCoupling`].
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    n_sectors: usize,
    tx_slot: Vec<Option<usize>>,
    rx_slot: Vec<Option<usize>>,
    n_rx: usize,
    ue_links: Vec<Link>,
    sector_links: Vec<Link>,
}

impl CouplingTable {
    pub fn link(&self, tx: UeId, rx: Endpoint) -> Result<&Link> {
        let missing = || SimError::MissingCoupling { tx, rx };
        match rx {
            Endpoint::Sector(s) => {
                if s >= self.n_sectors || tx * self.n_sectors >= self.sector_links.len() {
                    return Err(missing());
                }
                Ok(&self.sector_links[tx * self.n_sectors + s])
            }
            Endpoint::Ue(r) => {
                let t = self.tx_slot.get(tx).copied().flatten().ok_or_else(missing)?;
                let r = self.rx_slot.get(r).copied().flatten().ok_or_else(missing)?;
                Ok(&self.ue_links[t * self.n_rx + r])
            }
        }
    }

    pub fn loss_db(&self, tx: UeId, rx: Endpoint) -> Result<f64> {
        self.link(tx, rx).map(|l| l.loss_db)
    }

    pub fn mean_loss_db(&self, tx: UeId, rx: Endpoint) -> Result<f64> {
        self.link(tx, rx).map(|l| l.mean_loss_db)
    }

    pub fn n_sectors(&self) -> usize {
        self.n_sectors
    }
}

/// Builds the coupling table for one drop. `ues[i].id` must equal `i`.
///
/// Draw order is fixed (UE-UE links by transmitter then receiver id, then
/// UE-sector links by UE then sector), so the table is a pure function of
/// the inputs and the rng stream. LOS and shadowing are drawn per ordered
/// pair; reciprocity is not enforced.
pub fn build_coupling_table<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    ues: &[UeRecord],
    cfg: &ChannelConfig,
    rng: &mut R,
) -> Result<CouplingTable> {
    cfg.validate()?;
    for (i, u) in ues.iter().enumerate() {
        if u.id != i {
            return Err(SimError::invalid("ues", format!("UE at index {i} has id {}", u.id)));
        }
    }
    let mut tx_slot = vec![None; ues.len()];
    let mut rx_slot = vec![None; ues.len()];
    let (mut n_tx, mut n_rx) = (0, 0);
    for u in ues {
        if u.is_transmitter() {
            tx_slot[u.id] = Some(n_tx);
            n_tx += 1;
        } else if u.role == Role::D2dRx {
            rx_slot[u.id] = Some(n_rx);
            n_rx += 1;
        }
    }
    let receivers: Vec<&UeRecord> = ues.iter().filter(|u| u.role == Role::D2dRx).collect();

    let mut ue_links = Vec::with_capacity(n_tx * n_rx);
    for tx in ues.iter().filter(|u| u.is_transmitter()) {
        for rx in &receivers {
            let d = layout.wrap_vector(tx.position, rx.position);
            let distance_m = d.0.hypot(d.1);
            let los = match cfg.los_model {
                LosModel::ItuUmi => rng.random::<f64>() < los_probability(distance_m),
                LosModel::AlwaysNlos => false,
            };
            let shadow_db = draw_shadowing(cfg.shadow_std_ueue_db, rng);
            let pl = ue_ue_pathloss(distance_m.max(cfg.min_ue_distance_m), los, cfg)?;
            ue_links.push(Link {
                distance_m,
                los: Some(los),
                shadow_db,
                antenna_gain_dbi: 0.0,
                loss_db: (pl + shadow_db).max(cfg.min_pl_db),
                mean_loss_db: pl,
            });
        }
    }

    let n_sectors = layout.n_sectors();
    let mut sector_links = Vec::with_capacity(ues.len() * n_sectors);
    for ue in ues {
        for sector in layout.sectors() {
            let site = layout.sites()[sector.site];
            let v = layout.wrap_vector(site, ue.position);
            let distance_m = v.0.hypot(v.1);
            let azimuth = v.1.atan2(v.0).to_degrees();
            let gain = sector_antenna_gain(angle_diff_deg(azimuth, sector.boresight_deg));
            let shadow_db = draw_shadowing(cfg.shadow_std_enbue_db, rng);
            let pl = ue_enb_pathloss(distance_m.max(1.0), cfg);
            sector_links.push(Link {
                distance_m,
                los: None,
                shadow_db,
                antenna_gain_dbi: gain,
                loss_db: (pl + shadow_db).max(cfg.min_pl_db) - gain,
                mean_loss_db: pl - gain,
            });
        }
    }

    Ok(CouplingTable {
        n_sectors,
        tx_slot,
        rx_slot,
        n_rx,
        ue_links,
        sector_links,
    })
}
