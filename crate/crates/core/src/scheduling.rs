//! D2D coordination patterns and the subframe-level proportional-fair
//! uplink scheduler.

use crate::channel::{CouplingTable, Endpoint};
use crate::error::{Result, SimError};
use crate::layout::UeId;
use crate::radio::{dbm_to_mw, mw_to_dbm, rate_from_sinr, RadioConfig};

pub const SUBFRAME_S: f64 = 1e-3;
pub const DEFAULT_PF_TIME_CONSTANT: f64 = 100.0;

/// Which D2D transmitters of a sector share a subframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinationMode {
    /// Every D2D transmitter is active in every subframe.
    Uncoordinated,
    /// One D2D transmitter per sector per subframe, round-robin.
    OrthogonalTdm,
    /// `k` D2D transmitters per sector per subframe, rotating.
    SpatialReuse(usize),
}

impl CoordinationMode {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoordinationMode::SpatialReuse(0) => Err(SimError::invalid("coordination", "reuse factor must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Concurrent transmitters per sector when `n_tx` are dropped.
    pub fn concurrent(&self, n_tx: usize) -> usize {
        match *self {
            CoordinationMode::Uncoordinated => n_tx,
            CoordinationMode::OrthogonalTdm => n_tx.min(1),
            CoordinationMode::SpatialReuse(k) => n_tx.min(k),
        }
    }

    /// Shortest schedule after which every transmitter has had equal airtime.
    pub fn cycle_len(&self, n_tx: usize) -> usize {
        let m = self.concurrent(n_tx);
        if n_tx == 0 || m == 0 {
            return 1;
        }
        n_tx / gcd(n_tx, m)
    }

    /// Subframes each transmitter is active within one cycle.
    pub fn positions_per_tx(&self, n_tx: usize) -> usize {
        if n_tx == 0 {
            return 0;
        }
        self.concurrent(n_tx) * self.cycle_len(n_tx) / n_tx
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotAssignment {
    pub subframe: usize,
    /// Active D2D transmitters, indexed by sector.
    pub active: Vec<Vec<UeId>>,
}

impl SlotAssignment {
    pub fn all_active(&self) -> impl Iterator<Item = UeId> + '_ {
        self.active.iter().flatten().copied()
    }
}

/// Rotating window per sector: at subframe `t` the transmitters
/// `(t*m .. t*m + m) mod n` are active, with `m` the concurrency of `mode`.
pub fn assign_d2d_slots(
    mode: CoordinationMode,
    d2d_txs_by_sector: &[Vec<UeId>],
    n_subframes: usize,
) -> Result<Vec<SlotAssignment>> {
    mode.validate()?;
    if n_subframes == 0 {
        return Err(SimError::invalid("n_subframes", "must be at least 1"));
    }
    Ok((0..n_subframes)
        .map(|t| SlotAssignment {
            subframe: t,
            active: d2d_txs_by_sector
                .iter()
                .map(|txs| {
                    let n = txs.len();
                    let m = mode.concurrent(n);
                    (0..m).map(|j| txs[(t * m + j) % n]).collect()
                })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    Enb(usize),
    Peer(UeId),
}

impl Destination {
    pub fn endpoint(self) -> Endpoint {
        match self {
            Destination::Enb(s) => Endpoint::Sector(s),
            Destination::Peer(u) => Endpoint::Ue(u),
        }
    }

    pub fn is_d2d(self) -> bool {
        matches!(self, Destination::Peer(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub id: usize,
    pub tx: UeId,
    pub destination: Destination,
    /// PF state: exponential moving average of the served rate.
    pub avg_rate_bps: f64,
}

/// Argmax of `inst_rate / avg_rate`, ties to the lowest flow id.
/// `inst_rates_bps[i]` belongs to `flows[i]`.
pub fn pf_select(flows: &[Flow], inst_rates_bps: &[f64]) -> Result<usize> {
    if flows.is_empty() || flows.len() != inst_rates_bps.len() {
        return Err(SimError::invalid("flows", "need one instantaneous rate per flow and at least one flow"));
    }
    let mut best = (flows[0].id, inst_rates_bps[0] / flows[0].avg_rate_bps);
    for (f, &r) in flows.iter().zip(inst_rates_bps).skip(1) {
        let metric = r / f.avg_rate_bps;
        if metric > best.1 || (metric == best.1 && f.id < best.0) {
            best = (f.id, metric);
        }
    }
    Ok(best.0)
}

pub fn pf_update(flow: &mut Flow, served_rate_bps: f64, t_c: f64) {
    let w = 1.0 / t_c;
    flow.avg_rate_bps = (1.0 - w) * flow.avg_rate_bps + w * served_rate_bps;
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfOutcome {
    /// Mean served rate per flow, indexed by flow id.
    pub throughput_bps: Vec<f64>,
    /// Subframes granted per flow, indexed by flow id.
    pub grants: Vec<usize>,
}

/// Whole-band PF scheduling, one grant per sector per subframe.
///
/// Grants at subframe `t` are picked from SINRs against the transmitters
/// granted at `t - 1` (noise only at `t = 0`); the bits actually served use
/// the interference of the grants made at `t`. Flow ids must be dense,
/// `0..total flows`. `powers_dbm` is indexed by UE id.
pub fn run_pf_uplink(
    mut sector_flows: Vec<Vec<Flow>>,
    powers_dbm: &[f64],
    table: &CouplingTable,
    rc: &RadioConfig,
    n_subframes: usize,
    t_c: f64,
) -> Result<PfOutcome> {
    if !(t_c >= 1.0) {
        return Err(SimError::invalid("t_c", "PF time constant must be at least one subframe"));
    }
    let n_flows: usize = sector_flows.iter().map(Vec::len).sum();
    let mut seen = vec![false; n_flows];
    for f in sector_flows.iter().flatten() {
        if f.id >= n_flows || std::mem::replace(&mut seen[f.id], true) {
            return Err(SimError::invalid("flows", "flow ids must be dense and unique"));
        }
    }

    // Per flow: linear signal power and noise at its receiver.
    let mut signal_mw = vec![0.0; n_flows];
    let mut noise_mw = vec![0.0; n_flows];
    for f in sector_flows.iter_mut().flatten() {
        let rx = f.destination.endpoint();
        signal_mw[f.id] = dbm_to_mw(powers_dbm[f.tx] - table.loss_db(f.tx, rx)?);
        noise_mw[f.id] = dbm_to_mw(rc.noise_at(rx));
        let snr = mw_to_dbm(signal_mw[f.id] / noise_mw[f.id]);
        f.avg_rate_bps = rate_from_sinr(snr, rc.bandwidth_hz, rc).max(1.0);
    }

    let rate_under = |f: &Flow, own_sector: usize, grants: &[Option<UeId>]| -> Result<f64> {
        let rx = f.destination.endpoint();
        let mut interference = 0.0;
        for (s, g) in grants.iter().enumerate() {
            if let (Some(tx), true) = (g, s != own_sector) {
                interference += dbm_to_mw(powers_dbm[*tx] - table.loss_db(*tx, rx)?);
            }
        }
        let sinr = mw_to_dbm(signal_mw[f.id] / (noise_mw[f.id] + interference));
        Ok(rate_from_sinr(sinr, rc.bandwidth_hz, rc))
    };

    let n_sectors = sector_flows.len();
    let mut served_bits = vec![0.0; n_flows];
    let mut grants = vec![0usize; n_flows];
    let mut prev: Vec<Option<UeId>> = vec![None; n_sectors];
    let mut current: Vec<Option<UeId>> = vec![None; n_sectors];
    let mut chosen: Vec<Option<usize>> = vec![None; n_sectors];
    let mut inst = Vec::new();

    for _ in 0..n_subframes {
        for (s, flows) in sector_flows.iter().enumerate() {
            if flows.is_empty() {
                current[s] = None;
                chosen[s] = None;
                continue;
            }
            inst.clear();
            for f in flows {
                inst.push(rate_under(f, s, &prev)?);
            }
            let id = pf_select(flows, &inst)?;
            let idx = flows.iter().position(|f| f.id == id).expect("selected flow is in sector");
            chosen[s] = Some(idx);
            current[s] = Some(flows[idx].tx);
        }
        for (s, flows) in sector_flows.iter_mut().enumerate() {
            let Some(idx) = chosen[s] else { continue };
            let served = rate_under(&flows[idx], s, &current)?;
            served_bits[flows[idx].id] += served * SUBFRAME_S;
            grants[flows[idx].id] += 1;
            for (i, f) in flows.iter_mut().enumerate() {
                pf_update(f, if i == idx { served } else { 0.0 }, t_c);
            }
        }
        std::mem::swap(&mut prev, &mut current);
    }

    let duration = n_subframes as f64 * SUBFRAME_S;
    Ok(PfOutcome {
        throughput_bps: served_bits
            .into_iter()
            .map(|b| if n_subframes == 0 { 0.0 } else { b / duration })
            .collect(),
        grants,
    })
}
