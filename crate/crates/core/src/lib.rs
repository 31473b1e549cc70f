//! System-level Monte Carlo simulator for device-to-device (D2D) links
//! sharing the LTE uplink with cellular traffic.
//!
//! The crate is organised bottom-up:
//!
//! - [`layout`]: hexagonal sites and sectors, wraparound, UE dropping.
//! - [`channel`]: pathloss, LOS probability, shadowing, antenna pattern and
//!   the frozen per-drop [`channel::CouplingTable`].
//! - [`radio`]: open-loop power control, SINR, rate mapping, coverage.
//! - [`scheduling`]: D2D coordination patterns and the PF uplink scheduler.
//! - [`engine`]: seeded, drop-parallel experiments and statistics.
//! - [`config`] and [`report`]: the `key = value` run file and CSV output
//!   used by the `d2dsim` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod layout;
pub mod radio;
pub mod report;
pub mod scheduling;

pub use channel::{ChannelConfig, CouplingTable, Endpoint};
pub use engine::{
    discovery_overhead, fraction_above, percentile, run_sinr_experiment, run_throughput_experiment,
    ExperimentConfig, ExperimentKind, PcSetting, SinrReport, ThroughputComparison,
};
pub use error::SimError;
pub use layout::{build_hex_grid, NetworkLayout, Point, Role, UeRecord};
pub use radio::{PowerControlConfig, RadioConfig};
pub use scheduling::CoordinationMode;
