//! Transmit power, SINR, link-to-rate mapping and the coverage rule.

use crate::channel::{CouplingTable, Endpoint};
use crate::error::{Result, SimError};
use crate::layout::{NetworkLayout, UeId, UeRecord};

pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Open-loop power control: `min(P_max, SNR_target + P_noise + alpha * PL)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerControlConfig {
    pub p_max_dbm: f64,
    pub snr_target_db: f64,
    /// Noise power at the intended receiver over the scheduled bandwidth.
    pub noise_dbm: f64,
    /// Fractional pathloss compensation factor in [0, 1].
    pub alpha: f64,
    /// When false every UE transmits at `p_max_dbm`.
    pub enabled: bool,
}

impl Default for PowerControlConfig {
    fn default() -> Self {
        PowerControlConfig {
            p_max_dbm: 23.0,
            snr_target_db: 10.0,
            noise_dbm: RadioConfig::default().ue_noise_dbm(),
            alpha: 1.0,
            enabled: true,
        }
    }
}

impl PowerControlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SimError::invalid("alpha", format!("must lie in [0, 1], got {}", self.alpha)));
        }
        if !self.p_max_dbm.is_finite() || !self.snr_target_db.is_finite() || !self.noise_dbm.is_finite() {
            return Err(SimError::invalid("power_control", "all levels must be finite"));
        }
        Ok(())
    }

    pub fn with_noise(self, noise_dbm: f64) -> Self {
        PowerControlConfig { noise_dbm, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub noise_figure_ue_db: f64,
    pub noise_figure_enb_db: f64,
    pub shannon_efficiency: f64,
    pub spectral_cap_bps_hz: f64,
    pub coverage_threshold_db: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bandwidth_hz: 10e6,
            noise_figure_ue_db: 9.0,
            noise_figure_enb_db: 5.0,
            shannon_efficiency: 0.6,
            spectral_cap_bps_hz: 4.4,
            coverage_threshold_db: -6.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(SimError::invalid("bandwidth_hz", "must be positive"));
        }
        if !(self.shannon_efficiency > 0.0 && self.shannon_efficiency <= 1.0) {
            return Err(SimError::invalid("shannon_efficiency", "must lie in (0, 1]"));
        }
        if !(self.spectral_cap_bps_hz > 0.0) {
            return Err(SimError::invalid("spectral_cap_bps_hz", "must be positive"));
        }
        Ok(())
    }

    pub fn ue_noise_dbm(&self) -> f64 {
        thermal_noise_dbm(self.bandwidth_hz, self.noise_figure_ue_db)
    }

    pub fn enb_noise_dbm(&self) -> f64 {
        thermal_noise_dbm(self.bandwidth_hz, self.noise_figure_enb_db)
    }

    /// Receiver noise at `rx` over the full band.
    pub fn noise_at(&self, rx: Endpoint) -> f64 {
        match rx {
            Endpoint::Ue(_) => self.ue_noise_dbm(),
            Endpoint::Sector(_) => self.enb_noise_dbm(),
        }
    }
}

pub fn thermal_noise_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + noise_figure_db + 10.0 * bandwidth_hz.log10()
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// `pl_db` is the link loss with shadowing already included.
pub fn open_loop_tx_power(pc: &PowerControlConfig, pl_db: f64) -> f64 {
    if !pc.enabled {
        return pc.p_max_dbm;
    }
    pc.p_max_dbm
        .min(pc.snr_target_db + pc.noise_dbm + pc.alpha * pl_db)
}

/// SINR in dB at `rx` for `serving`, with every other member of `active`
/// interfering. `powers_dbm` is indexed by UE id.
pub fn compute_sinr(
    rx: Endpoint,
    serving: UeId,
    active: &[UeId],
    powers_dbm: &[f64],
    table: &CouplingTable,
    noise_dbm: f64,
) -> Result<f64> {
    let mut found = false;
    let mut interference = 0.0;
    for &tx in active {
        if tx == serving {
            found = true;
            continue;
        }
        interference += dbm_to_mw(powers_dbm[tx] - table.loss_db(tx, rx)?);
    }
    if !found {
        return Err(SimError::invalid(
            "active",
            format!("serving UE {serving} is not among the active transmitters"),
        ));
    }
    let signal = dbm_to_mw(powers_dbm[serving] - table.loss_db(serving, rx)?);
    Ok(mw_to_dbm(signal / (dbm_to_mw(noise_dbm) + interference)))
}

/// Attenuated Shannon mapping, capped at the peak spectral efficiency.
pub fn rate_from_sinr(sinr_db: f64, bandwidth_share_hz: f64, rc: &RadioConfig) -> f64 {
    let se = rc.shannon_efficiency * (1.0 + 10f64.powf(sinr_db / 10.0)).log2();
    se.min(rc.spectral_cap_bps_hz) * bandwidth_share_hz
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    InCoverage,
    OutOfCoverage,
}

/// Out of coverage iff the network SINR is strictly below the threshold.
pub fn coverage_from_sinr(sinr_db: f64, rc: &RadioConfig) -> Coverage {
    if sinr_db < rc.coverage_threshold_db {
        Coverage::OutOfCoverage
    } else {
        Coverage::InCoverage
    }
}

/// Wideband downlink SINR at `ue` from its strongest sector, all sectors
/// transmitting at `enb_tx_power_dbm` over shadowing-averaged couplings.
pub fn downlink_sinr_db(
    ue: &UeRecord,
    layout: &NetworkLayout,
    table: &CouplingTable,
    enb_tx_power_dbm: f64,
    rc: &RadioConfig,
) -> Result<f64> {
    let mut rx_mw = Vec::with_capacity(layout.n_sectors());
    for s in 0..layout.n_sectors() {
        rx_mw.push(dbm_to_mw(enb_tx_power_dbm - table.mean_loss_db(ue.id, Endpoint::Sector(s))?));
    }
    let total: f64 = rx_mw.iter().sum();
    let best = rx_mw.iter().copied().fold(0.0, f64::max);
    Ok(mw_to_dbm(best / (dbm_to_mw(rc.ue_noise_dbm()) + (total - best))))
}

pub fn classify_coverage(
    ue: &UeRecord,
    layout: &NetworkLayout,
    table: &CouplingTable,
    enb_tx_power_dbm: f64,
    rc: &RadioConfig,
) -> Result<Coverage> {
    downlink_sinr_db(ue, layout, table, enb_tx_power_dbm, rc).map(|s| coverage_from_sinr(s, rc))
}
