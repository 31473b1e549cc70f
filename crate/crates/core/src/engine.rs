//! Seeded Monte Carlo orchestration of the SINR and throughput-offload
//! experiments, summary statistics and the discovery-overhead calculator.
//!
//! Every drop draws from its own ChaCha8 stream seeded by
//! [`drop_seed`]`(seed, drop_index)`, so drops can run in any order (and in
//! parallel) while reports stay byte-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{build_coupling_table, ChannelConfig, CouplingTable, Endpoint};
use crate::error::{Result, SimError};
use crate::layout::{build_hex_grid, drop_cellular_ues, drop_d2d_pairs, NetworkLayout, UeId, UeRecord};
use crate::radio::{dbm_to_mw, mw_to_dbm, open_loop_tx_power, PowerControlConfig, RadioConfig};
use crate::scheduling::{
    assign_d2d_slots, run_pf_uplink, CoordinationMode, Destination, Flow, DEFAULT_PF_TIME_CONSTANT,
};

pub const COVERAGE_SINR_DB: f64 = -6.0;
pub const DEFAULT_ENB_TX_POWER_DBM: f64 = 46.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Sinr,
    Throughput,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Sinr => "sinr",
            ExperimentKind::Throughput => "throughput",
        }
    }
}

/// One power-control point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcSetting {
    pub alpha: f64,
    pub snr_target_db: f64,
    /// False for the "every UE at maximum power" entry.
    pub enabled: bool,
}

impl PcSetting {
    pub const NO_POWER_CONTROL: PcSetting = PcSetting {
        alpha: 0.0,
        snr_target_db: 0.0,
        enabled: false,
    };

    pub fn to_config(self, p_max_dbm: f64, noise_dbm: f64) -> PowerControlConfig {
        PowerControlConfig {
            p_max_dbm,
            snr_target_db: self.snr_target_db,
            noise_dbm,
            alpha: self.alpha,
            enabled: self.enabled,
        }
    }

    pub fn label(&self) -> String {
        if self.enabled {
            format!("alpha={} snr_t={}dB", self.alpha, self.snr_target_db)
        } else {
            "no power control".to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub isd_m: f64,
    pub n_rings: usize,
    pub wraparound: bool,
    /// SINR runs: cellular UEs per sector, active every subframe.
    /// Throughput runs: transmitting UEs per sector (cellular and D2D).
    pub n_cellular_per_sector: usize,
    pub n_d2d_tx_per_sector: usize,
    pub d2d_range_m: f64,
    pub min_d2d_dist_m: f64,
    pub coordination: CoordinationMode,
    pub alpha_list: Vec<f64>,
    pub snr_target_db_list: Vec<f64>,
    pub no_power_control: bool,
    pub n_drops: usize,
    pub n_subframes: usize,
    pub k_d2d: usize,
    pub seed: u64,
    pub p_max_dbm: f64,
    pub pf_time_constant: f64,
    pub channel: ChannelConfig,
    pub radio: RadioConfig,
}

impl ExperimentConfig {
    /// Public-safety SINR study: 19 wrapped sites, ISD 1732 m, 700 MHz
    /// carrier, 250 m range, ten uncoordinated D2D transmitters per sector.
    pub fn sinr_default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Sinr,
            isd_m: 1732.0,
            n_rings: 2,
            wraparound: true,
            n_cellular_per_sector: 0,
            n_d2d_tx_per_sector: 10,
            d2d_range_m: 250.0,
            min_d2d_dist_m: 3.0,
            coordination: CoordinationMode::Uncoordinated,
            alpha_list: vec![0.0, 0.8, 1.0],
            snr_target_db_list: vec![0.0, 5.0, 10.0, 15.0],
            no_power_control: true,
            n_drops: 100,
            n_subframes: 2000,
            k_d2d: 0,
            seed: 1,
            p_max_dbm: 23.0,
            pf_time_constant: DEFAULT_PF_TIME_CONSTANT,
            channel: ChannelConfig {
                carrier_ghz: PUBLIC_SAFETY_CARRIER_GHZ,
                ..ChannelConfig::default()
            },
            radio: RadioConfig::default(),
        }
    }

    /// Single site, three sectors, ISD 500 m, 50 m range, ten transmitting
    /// UEs per sector under PF, all at maximum power, 2 GHz.
    pub fn throughput_default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Throughput,
            isd_m: 500.0,
            n_rings: 0,
            wraparound: false,
            n_cellular_per_sector: 10,
            n_d2d_tx_per_sector: 0,
            d2d_range_m: 50.0,
            alpha_list: Vec::new(),
            snr_target_db_list: Vec::new(),
            no_power_control: true,
            n_drops: 20,
            n_subframes: 2000,
            k_d2d: 5,
            channel: ChannelConfig::default(),
            ..Self::sinr_default()
        }
    }

    pub fn preset(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::Sinr => Self::sinr_default(),
            ExperimentKind::Throughput => Self::throughput_default(),
        }
    }

    /// `alpha_list x snr_target_db_list`, then the no-power-control entry.
    pub fn pc_sweep(&self) -> Vec<PcSetting> {
        let mut out: Vec<PcSetting> = self
            .alpha_list
            .iter()
            .flat_map(|&alpha| {
                self.snr_target_db_list.iter().map(move |&snr| PcSetting {
                    alpha,
                    snr_target_db: snr,
                    enabled: true,
                })
            })
            .collect();
        if self.no_power_control {
            out.push(PcSetting::NO_POWER_CONTROL);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_drops == 0 {
            return Err(SimError::invalid("n_drops", "must be at least 1"));
        }
        if self.pc_sweep().is_empty() {
            return Err(SimError::invalid("alpha_list", "power-control sweep is empty"));
        }
        for &alpha in &self.alpha_list {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(SimError::invalid("alpha_list", format!("alpha {alpha} outside [0, 1]")));
            }
        }
        if !(self.min_d2d_dist_m > 0.0 && self.min_d2d_dist_m < self.d2d_range_m) {
            return Err(SimError::invalid(
                "min_d2d_dist_m",
                format!("need 0 < min_d2d_dist_m < d2d_range_m, got {} and {}", self.min_d2d_dist_m, self.d2d_range_m),
            ));
        }
        self.coordination.validate()?;
        self.channel.validate()?;
        self.radio.validate()?;
        if self.experiment == ExperimentKind::Throughput {
            if self.n_subframes == 0 {
                return Err(SimError::invalid("n_subframes", "must be at least 1"));
            }
            if self.k_d2d > self.n_cellular_per_sector {
                return Err(SimError::invalid(
                    "k_d2d",
                    format!("{} exceeds the {} transmitting UEs per sector", self.k_d2d, self.n_cellular_per_sector),
                ));
            }
            if !(self.pf_time_constant >= 1.0) {
                return Err(SimError::invalid("pf_time_constant", "must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<NetworkLayout> {
        build_hex_grid(self.isd_m, self.n_rings, self.wraparound)
    }
}

pub const PUBLIC_SAFETY_CARRIER_GHZ: f64 = 0.7;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the per-drop stream: `splitmix64(seed ^ splitmix64(drop_index))`.
pub fn drop_seed(seed: u64, drop_index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(drop_index as u64))
}

pub fn drop_rng(seed: u64, drop_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(drop_seed(seed, drop_index))
}

/// Geometry and frozen channel of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropState {
    pub ues: Vec<UeRecord>,
    /// `(tx, rx)` ids of every D2D pair, sector by sector.
    pub pairs: Vec<(UeId, UeId)>,
    pub table: CouplingTable,
}

impl DropState {
    pub fn n_cellular(&self) -> usize {
        self.ues.len() - 2 * self.pairs.len()
    }
}

/// Drops UEs and freezes the coupling table for drop `drop_index`.
///
/// Cellular UEs take ids `0..n_cellular`; D2D pairs follow as (TX, RX).
/// `n_pairs_per_sector` D2D pairs are dropped per sector.
pub fn prepare_drop(
    cfg: &ExperimentConfig,
    layout: &NetworkLayout,
    n_cellular_per_sector: usize,
    n_pairs_per_sector: usize,
    drop_index: usize,
) -> Result<DropState> {
    let mut rng = drop_rng(cfg.seed, drop_index);
    let mut ues = drop_cellular_ues(layout, n_cellular_per_sector, 0, &mut rng);
    let d2d = drop_d2d_pairs(
        layout,
        n_pairs_per_sector,
        cfg.d2d_range_m,
        cfg.min_d2d_dist_m,
        ues.len(),
        &mut rng,
    )?;
    let mut pairs = Vec::with_capacity(d2d.len());
    for (tx, rx) in d2d {
        pairs.push((tx.id, rx.id));
        ues.push(tx);
        ues.push(rx);
    }
    let table = build_coupling_table(layout, &ues, &cfg.channel, &mut rng)?;
    Ok(DropState { ues, pairs, table })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub setting_id: usize,
    pub drop: usize,
    /// Home sector of the D2D transmitter.
    pub sector: usize,
    /// Index of the D2D pair within its drop.
    pub link: usize,
    pub sinr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSummary {
    pub setting_id: usize,
    pub setting: PcSetting,
    pub n_samples: usize,
    /// Fraction of samples strictly above -6 dB; `None` without samples.
    pub fraction_above: Option<f64>,
    pub mean_db: Option<f64>,
    pub p5_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub settings: Vec<PcSetting>,
    pub samples: Vec<SinrSample>,
    pub summaries: Vec<SinrSummary>,
}

impl SinrReport {
    pub fn samples_for(&self, setting_id: usize) -> impl Iterator<Item = &SinrSample> {
        self.samples.iter().filter(move |s| s.setting_id == setting_id)
    }

    fn summarize(settings: &[PcSetting], samples: &[SinrSample]) -> Vec<SinrSummary> {
        settings
            .iter()
            .enumerate()
            .map(|(id, &setting)| {
                let v: Vec<f64> = samples.iter().filter(|s| s.setting_id == id).map(|s| s.sinr_db).collect();
                SinrSummary {
                    setting_id: id,
                    setting,
                    n_samples: v.len(),
                    fraction_above: fraction_above(&v, COVERAGE_SINR_DB).ok(),
                    mean_db: mean(&v).ok(),
                    p5_db: percentile(&v, 0.05).ok(),
                }
            })
            .collect()
    }
}

/// Expected number of SINR samples for `cfg`.
pub fn expected_sinr_samples(cfg: &ExperimentConfig, n_sectors: usize) -> usize {
    cfg.pc_sweep().len()
        * cfg.n_drops
        * n_sectors
        * cfg.n_d2d_tx_per_sector
        * cfg.coordination.positions_per_tx(cfg.n_d2d_tx_per_sector)
}

/// SINR distribution of D2D links over the power-control sweep.
///
/// Per drop: cellular UEs transmit every subframe at open-loop power
/// towards their home sector; D2D transmitters use open-loop power towards
/// their peer and follow the coordination pattern over one full cycle.
/// Each active D2D receiver contributes one sample per active subframe.
pub fn run_sinr_experiment(cfg: &ExperimentConfig) -> Result<SinrReport> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    let settings = cfg.pc_sweep();
    let per_drop: Vec<Vec<SinrSample>> = (0..cfg.n_drops)
        .into_par_iter()
        .map(|d| sinr_drop(cfg, &layout, &settings, d))
        .collect::<Result<_>>()?;
    let mut samples: Vec<SinrSample> = per_drop.into_iter().flatten().collect();
    samples.sort_by_key(|s| s.setting_id);
    let summaries = SinrReport::summarize(&settings, &samples);
    Ok(SinrReport {
        settings,
        samples,
        summaries,
    })
}

fn sinr_drop(
    cfg: &ExperimentConfig,
    layout: &NetworkLayout,
    settings: &[PcSetting],
    drop: usize,
) -> Result<Vec<SinrSample>> {
    let state = prepare_drop(cfg, layout, cfg.n_cellular_per_sector, cfg.n_d2d_tx_per_sector, drop)?;
    let n_cell = state.n_cellular();
    let n_ues = state.ues.len();
    let mut by_sector: Vec<Vec<UeId>> = vec![Vec::new(); layout.n_sectors()];
    let mut pair_of = vec![usize::MAX; n_ues];
    for (i, &(tx, _)) in state.pairs.iter().enumerate() {
        by_sector[state.ues[tx].home_sector].push(tx);
        pair_of[tx] = i;
    }
    let cycle = cfg.coordination.cycle_len(cfg.n_d2d_tx_per_sector);
    let slots = assign_d2d_slots(cfg.coordination, &by_sector, cycle)?;

    // Linear gains from every transmitter to every D2D receiver, so the
    // sweep reuses them instead of re-reading the table.
    let transmitters: Vec<UeId> = state.ues.iter().filter(|u| u.is_transmitter()).map(|u| u.id).collect();
    let mut tx_col = vec![usize::MAX; n_ues];
    for (c, &t) in transmitters.iter().enumerate() {
        tx_col[t] = c;
    }
    let mut gains = Vec::with_capacity(state.pairs.len() * transmitters.len());
    for &(_, rx) in &state.pairs {
        for &tx in &transmitters {
            gains.push(dbm_to_mw(-state.table.loss_db(tx, Endpoint::Ue(rx))?));
        }
    }
    let n_tx = transmitters.len();

    let ue_noise = cfg.radio.ue_noise_dbm();
    let enb_noise = cfg.radio.enb_noise_dbm();
    let noise_mw = dbm_to_mw(ue_noise);
    let mut out = Vec::with_capacity(settings.len() * state.pairs.len());
    let mut power_mw = vec![0.0; n_tx];
    let mut active_cols: Vec<usize> = Vec::with_capacity(n_tx);

    for (setting_id, setting) in settings.iter().enumerate() {
        let pc_cell = setting.to_config(cfg.p_max_dbm, enb_noise);
        let pc_d2d = setting.to_config(cfg.p_max_dbm, ue_noise);
        for ue in &state.ues[..n_cell] {
            let loss = state.table.loss_db(ue.id, Endpoint::Sector(ue.home_sector))?;
            power_mw[tx_col[ue.id]] = dbm_to_mw(open_loop_tx_power(&pc_cell, loss));
        }
        for &(tx, rx) in &state.pairs {
            let loss = state.table.loss_db(tx, Endpoint::Ue(rx))?;
            power_mw[tx_col[tx]] = dbm_to_mw(open_loop_tx_power(&pc_d2d, loss));
        }
        for slot in &slots {
            active_cols.clear();
            active_cols.extend((0..n_cell).map(|id| tx_col[id]));
            active_cols.extend(slot.all_active().map(|id| tx_col[id]));
            for tx in slot.all_active() {
                let link = pair_of[tx];
                let row = &gains[link * n_tx..(link + 1) * n_tx];
                let own = tx_col[tx];
                let mut interference = 0.0;
                for &c in &active_cols {
                    if c != own {
                        interference += power_mw[c] * row[c];
                    }
                }
                let sinr_db = mw_to_dbm(power_mw[own] * row[own] / (noise_mw + interference));
                out.push(SinrSample {
                    setting_id,
                    drop,
                    sector: state.ues[tx].home_sector,
                    link,
                    sinr_db,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Baseline,
    Offload,
}

impl RunKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RunKind::Baseline => "baseline",
            RunKind::Offload => "offload",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub drop: usize,
    /// Flow index within the drop (= D2D pair index).
    pub flow: usize,
    pub sector: usize,
    pub d2d: bool,
    pub throughput_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    pub run: RunKind,
    pub samples: Vec<FlowSample>,
    pub mean_bps: f64,
    pub p5_bps: f64,
}

impl ThroughputReport {
    fn from_samples(run: RunKind, samples: Vec<FlowSample>) -> Result<Self> {
        let v: Vec<f64> = samples.iter().map(|s| s.throughput_bps).collect();
        Ok(ThroughputReport {
            run,
            mean_bps: mean(&v)?,
            p5_bps: percentile(&v, 0.05)?,
            samples,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputComparison {
    pub k_d2d: usize,
    pub setting: PcSetting,
    pub baseline: ThroughputReport,
    pub offload: ThroughputReport,
}

impl ThroughputComparison {
    pub fn mean_gain(&self) -> f64 {
        self.offload.mean_bps / self.baseline.mean_bps
    }

    pub fn p5_gain(&self) -> f64 {
        self.offload.p5_bps / self.baseline.p5_bps
    }
}

/// Baseline (every transmitter sends uplink to its home sector) versus
/// offload (the first `k_d2d` transmitters of each sector send to their
/// dropped peer instead), on identical drops. Uses the first sweep setting
/// for open-loop power.
pub fn run_throughput_experiment(cfg: &ExperimentConfig, k_d2d: usize) -> Result<ThroughputComparison> {
    let cfg = ExperimentConfig {
        experiment: ExperimentKind::Throughput,
        k_d2d,
        ..cfg.clone()
    };
    cfg.validate()?;
    let layout = cfg.layout()?;
    let setting = cfg.pc_sweep()[0];
    let per_drop: Vec<(Vec<FlowSample>, Vec<FlowSample>)> = (0..cfg.n_drops)
        .into_par_iter()
        .map(|d| throughput_drop(&cfg, &layout, setting, d))
        .collect::<Result<_>>()?;
    let (base, off): (Vec<_>, Vec<_>) = per_drop.into_iter().unzip();
    Ok(ThroughputComparison {
        k_d2d,
        setting,
        baseline: ThroughputReport::from_samples(RunKind::Baseline, base.into_iter().flatten().collect())?,
        offload: ThroughputReport::from_samples(RunKind::Offload, off.into_iter().flatten().collect())?,
    })
}

fn throughput_drop(
    cfg: &ExperimentConfig,
    layout: &NetworkLayout,
    setting: PcSetting,
    drop: usize,
) -> Result<(Vec<FlowSample>, Vec<FlowSample>)> {
    let state = prepare_drop(cfg, layout, 0, cfg.n_cellular_per_sector, drop)?;
    let pc_cell = setting.to_config(cfg.p_max_dbm, cfg.radio.enb_noise_dbm());
    let pc_d2d = setting.to_config(cfg.p_max_dbm, cfg.radio.ue_noise_dbm());

    let run = |k: usize| -> Result<Vec<FlowSample>> {
        let mut powers = vec![f64::NEG_INFINITY; state.ues.len()];
        let mut sector_flows: Vec<Vec<Flow>> = vec![Vec::new(); layout.n_sectors()];
        for (i, &(tx, rx)) in state.pairs.iter().enumerate() {
            let home = state.ues[tx].home_sector;
            let d2d = sector_flows[home].len() < k;
            let destination = if d2d { Destination::Peer(rx) } else { Destination::Enb(home) };
            let pc = if d2d { &pc_d2d } else { &pc_cell };
            powers[tx] = open_loop_tx_power(pc, state.table.loss_db(tx, destination.endpoint())?);
            sector_flows[home].push(Flow {
                id: i,
                tx,
                destination,
                avg_rate_bps: 1.0,
            });
        }
        let roles: Vec<(usize, bool)> = sector_flows
            .iter()
            .enumerate()
            .flat_map(|(s, fl)| fl.iter().map(move |f| (s, f.destination.is_d2d())))
            .collect();
        let outcome = run_pf_uplink(sector_flows, &powers, &state.table, &cfg.radio, cfg.n_subframes, cfg.pf_time_constant)?;
        Ok(roles
            .into_iter()
            .enumerate()
            .map(|(flow, (sector, d2d))| FlowSample {
                drop,
                flow,
                sector,
                d2d,
                throughput_bps: outcome.throughput_bps[flow],
            })
            .collect())
    };
    Ok((run(0)?, run(cfg.k_d2d)?))
}

pub fn mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(SimError::EmptySamples);
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Nearest-rank percentile: the `ceil(p n)`-th smallest sample, the
/// minimum for `p = 0`.
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(SimError::EmptySamples);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(SimError::invalid("p", format!("percentile rank {p} outside [0, 1]")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    // Guard against p*n landing a hair above an integer.
    let rank = ((p * v.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(v[rank.min(v.len()) - 1])
}

/// Fraction of samples strictly above `threshold_db`.
pub fn fraction_above(samples_db: &[f64], threshold_db: f64) -> Result<f64> {
    if samples_db.is_empty() {
        return Err(SimError::EmptySamples);
    }
    Ok(samples_db.iter().filter(|&&s| s > threshold_db).count() as f64 / samples_db.len() as f64)
}

/// Share of capacity taken by `reserved_subframes` 1 ms discovery subframes
/// per period, and the complementary share UEs may sleep.
pub fn discovery_overhead(reserved_subframes: u64, period_s: f64) -> Result<(f64, f64)> {
    let period_ms = period_s * 1000.0;
    if !(period_ms > 0.0 && period_ms.is_finite()) {
        return Err(SimError::invalid("period_s", "must be positive"));
    }
    let reserved = reserved_subframes as f64;
    if reserved > period_ms {
        return Err(SimError::invalid(
            "reserved_subframes",
            format!("{reserved_subframes} ms of reservation exceeds the {period_s} s period"),
        ));
    }
    Ok((reserved / period_ms, (period_ms - reserved) / period_ms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::compute_sinr;
    use proptest::prelude::*;

    fn tiny_sinr_cfg(mode: CoordinationMode) -> ExperimentConfig {
        ExperimentConfig {
            isd_m: 500.0,
            n_rings: 1,
            n_d2d_tx_per_sector: 3,
            n_cellular_per_sector: 1,
            d2d_range_m: 100.0,
            coordination: mode,
            n_drops: 3,
            ..ExperimentConfig::sinr_default()
        }
    }

    #[test]
    fn percentile_examples() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.05).unwrap(), 5.0);
        assert_eq!(percentile(&v, 1.0).unwrap(), 100.0);
        assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
        assert!(percentile(&[], 0.5).is_err());
        assert!(percentile(&v, 1.5).is_err());
    }

    #[test]
    fn percentile_of_uniform_samples() {
        use rand::Rng;
        let mut rng = drop_rng(42, 0);
        let v: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let p = percentile(&v, 0.05).unwrap();
        assert!((0.03..=0.08).contains(&p), "{p}");
    }

    #[test]
    fn fraction_above_examples() {
        assert_eq!(fraction_above(&[-6.0, -6.0], -6.0).unwrap(), 0.0);
        assert_eq!(fraction_above(&[-7.0, -5.0], -6.0).unwrap(), 0.5);
        assert!(fraction_above(&[], -6.0).is_err());
    }

    #[test]
    fn discovery_examples() {
        assert_eq!(discovery_overhead(50, 5.0).unwrap(), (0.01, 0.99));
        assert_eq!(discovery_overhead(0, 5.0).unwrap(), (0.0, 1.0));
        assert_eq!(discovery_overhead(5000, 5.0).unwrap(), (1.0, 0.0));
        assert!(discovery_overhead(5001, 5.0).is_err());
    }

    #[test]
    fn drop_seeds_are_independent_of_drop_count() {
        let a = ExperimentConfig { n_drops: 2, ..tiny_sinr_cfg(CoordinationMode::Uncoordinated) };
        let b = ExperimentConfig { n_drops: 3, ..a.clone() };
        let ra = run_sinr_experiment(&a).unwrap();
        let rb = run_sinr_experiment(&b).unwrap();
        let first_two: Vec<_> = rb.samples.iter().filter(|s| s.drop < 2).copied().collect();
        assert_eq!(ra.samples, first_two);
        assert_ne!(drop_seed(1, 0), drop_seed(1, 1));
        assert_ne!(drop_seed(1, 0), drop_seed(2, 0));
    }

    #[test]
    fn no_d2d_means_no_samples() {
        let cfg = ExperimentConfig { n_d2d_tx_per_sector: 0, ..tiny_sinr_cfg(CoordinationMode::Uncoordinated) };
        let r = run_sinr_experiment(&cfg).unwrap();
        assert!(r.samples.is_empty());
        assert!(r.summaries.iter().all(|s| s.fraction_above.is_none()));
    }

    #[test]
    fn sample_accounting() {
        for mode in [
            CoordinationMode::Uncoordinated,
            CoordinationMode::OrthogonalTdm,
            CoordinationMode::SpatialReuse(2),
        ] {
            let cfg = tiny_sinr_cfg(mode);
            let r = run_sinr_experiment(&cfg).unwrap();
            assert_eq!(r.samples.len(), expected_sinr_samples(&cfg, 21));
        }
    }

    /// Recomputes one drop's SINRs with `compute_sinr` over the table.
    fn brute_force_drop(cfg: &ExperimentConfig, drop: usize) -> Vec<SinrSample> {
        let layout = cfg.layout().unwrap();
        let st = prepare_drop(cfg, &layout, cfg.n_cellular_per_sector, cfg.n_d2d_tx_per_sector, drop).unwrap();
        let mut by_sector = vec![Vec::new(); layout.n_sectors()];
        for &(tx, _) in &st.pairs {
            by_sector[st.ues[tx].home_sector].push(tx);
        }
        let slots = assign_d2d_slots(cfg.coordination, &by_sector, cfg.coordination.cycle_len(cfg.n_d2d_tx_per_sector)).unwrap();
        let rc = cfg.radio;
        let mut out = Vec::new();
        for (sid, setting) in cfg.pc_sweep().iter().enumerate() {
            let mut powers = vec![0.0; st.ues.len()];
            for u in &st.ues[..st.n_cellular()] {
                let pc = setting.to_config(23.0, rc.enb_noise_dbm());
                powers[u.id] = open_loop_tx_power(&pc, st.table.loss_db(u.id, Endpoint::Sector(u.home_sector)).unwrap());
            }
            for &(tx, rx) in &st.pairs {
                let pc = setting.to_config(23.0, rc.ue_noise_dbm());
                powers[tx] = open_loop_tx_power(&pc, st.table.loss_db(tx, Endpoint::Ue(rx)).unwrap());
            }
            for slot in &slots {
                let mut active: Vec<UeId> = (0..st.n_cellular()).collect();
                active.extend(slot.all_active());
                for tx in slot.all_active() {
                    let link = st.pairs.iter().position(|p| p.0 == tx).unwrap();
                    let rx = st.pairs[link].1;
                    let sinr_db = compute_sinr(Endpoint::Ue(rx), tx, &active, &powers, &st.table, rc.ue_noise_dbm()).unwrap();
                    out.push(SinrSample { setting_id: sid, drop, sector: st.ues[tx].home_sector, link, sinr_db });
                }
            }
        }
        out
    }

    #[test]
    fn engine_matches_brute_force_and_tdm_beats_uncoordinated() {
        for seed in 0..4 {
            let unc = ExperimentConfig { seed, ..tiny_sinr_cfg(CoordinationMode::Uncoordinated) };
            let tdm = ExperimentConfig { coordination: CoordinationMode::OrthogonalTdm, ..unc.clone() };
            for cfg in [&unc, &tdm] {
                let report = run_sinr_experiment(cfg).unwrap();
                let mut got: Vec<SinrSample> = report.samples.clone();
                let mut want: Vec<SinrSample> = (0..cfg.n_drops).flat_map(|d| brute_force_drop(cfg, d)).collect();
                let key = |s: &SinrSample| (s.setting_id, s.drop, s.link);
                got.sort_by_key(key);
                want.sort_by_key(key);
                assert_eq!(got.len(), want.len());
                for (g, w) in got.iter().zip(&want) {
                    assert_eq!(key(g), key(w));
                    assert!((g.sinr_db - w.sinr_db).abs() < 1e-9, "{g:?} vs {w:?}");
                }
            }
            let ru = run_sinr_experiment(&unc).unwrap();
            let rt = run_sinr_experiment(&tdm).unwrap();
            for (u, t) in ru.summaries.iter().zip(&rt.summaries) {
                assert!(t.fraction_above.unwrap() >= u.fraction_above.unwrap());
            }
        }
    }

    #[test]
    fn sinr_report_is_deterministic() {
        let cfg = tiny_sinr_cfg(CoordinationMode::SpatialReuse(2));
        assert_eq!(run_sinr_experiment(&cfg).unwrap(), run_sinr_experiment(&cfg).unwrap());
    }

    fn tiny_tp_cfg() -> ExperimentConfig {
        ExperimentConfig {
            n_drops: 3,
            n_subframes: 300,
            ..ExperimentConfig::throughput_default()
        }
    }

    #[test]
    fn k_zero_offload_equals_baseline() {
        let c = run_throughput_experiment(&tiny_tp_cfg(), 0).unwrap();
        assert_eq!(c.baseline.samples, c.offload.samples);
        assert_eq!(c.mean_gain(), 1.0);
    }

    #[test]
    fn throughput_rejects_k_out_of_range() {
        assert!(run_throughput_experiment(&tiny_tp_cfg(), 11).is_err());
    }

    #[test]
    fn throughput_summaries_recompute() {
        let c = run_throughput_experiment(&tiny_tp_cfg(), 3).unwrap();
        for r in [&c.baseline, &c.offload] {
            let v: Vec<f64> = r.samples.iter().map(|s| s.throughput_bps).collect();
            assert_eq!(r.mean_bps, mean(&v).unwrap());
            assert_eq!(r.p5_bps, percentile(&v, 0.05).unwrap());
            assert_eq!(v.len(), 3 * 3 * 10);
            let cap = 4.4 * 10e6;
            assert!(v.iter().all(|&t| (0.0..=cap).contains(&t)));
        }
        assert_eq!(c.offload.samples.iter().filter(|s| s.d2d).count(), 3 * 3 * 3);
        assert!(c.baseline.samples.iter().all(|s| !s.d2d));
    }

    #[test]
    fn baseline_and_offload_share_the_drop() {
        let cfg = tiny_tp_cfg();
        let layout = cfg.layout().unwrap();
        let a = prepare_drop(&cfg, &layout, 0, 10, 1).unwrap();
        let b = prepare_drop(&cfg, &layout, 0, 10, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation_errors() {
        let mut c = ExperimentConfig::sinr_default();
        c.n_drops = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::sinr_default();
        c.alpha_list.clear();
        c.no_power_control = false;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::sinr_default();
        c.min_d2d_dist_m = 300.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_sweep_has_thirteen_settings() {
        let s = ExperimentConfig::sinr_default().pc_sweep();
        assert_eq!(s.len(), 13);
        assert_eq!(*s.last().unwrap(), PcSetting::NO_POWER_CONTROL);
    }

    proptest! {
        #[test]
        fn fraction_above_is_permutation_invariant(
            mut v in proptest::collection::vec(-30.0..30.0f64, 1..200),
            t in -10.0..10.0f64,
            seed: u64,
        ) {
            use rand::seq::SliceRandom;
            let naive = v.iter().filter(|&&x| x > t).count() as f64 / v.len() as f64;
            prop_assert_eq!(fraction_above(&v, t).unwrap(), naive);
            v.shuffle(&mut drop_rng(seed, 0));
            prop_assert_eq!(fraction_above(&v, t).unwrap(), naive);
        }

        #[test]
        fn percentile_matches_sorted_rank(v in proptest::collection::vec(-1e3..1e3f64, 1..300), p in 0.0..=1.0f64) {
            let mut s = v.clone();
            s.sort_by(f64::total_cmp);
            let got = percentile(&v, p).unwrap();
            let below = s.iter().filter(|&&x| x < got).count();
            let at_or_below = s.iter().filter(|&&x| x <= got).count();
            let rank = ((p * s.len() as f64) - 1e-9).ceil().max(1.0) as usize;
            prop_assert!(below < rank && rank <= at_or_below);
        }
    }
}
