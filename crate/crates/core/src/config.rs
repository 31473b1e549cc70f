//! Plain-text run configuration: one `key = value` per line, `#` starts a
//! comment. Unknown or repeated keys are errors; missing keys take the
//! defaults of the selected experiment's preset.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::{ExperimentConfig, ExperimentKind};
use crate::error::SimError;
use crate::scheduling::CoordinationMode;

pub const KEYS: &[&str] = &[
    "experiment",
    "isd_m",
    "n_rings",
    "wraparound",
    "n_cellular_per_sector",
    "n_d2d_tx_per_sector",
    "d2d_range_m",
    "min_d2d_dist_m",
    "coordination",
    "alpha_list",
    "snr_target_db_list",
    "no_power_control",
    "n_drops",
    "n_subframes",
    "k_d2d",
    "seed",
    "carrier_ghz",
    "d2d_offset_db",
    "out_dir",
];

pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(SimError),
}

impl ConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Line { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// A parsed run file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub out_dir: PathBuf,
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(err(line, format!("unknown key `{key}`")));
        }
        if let Some(first) = seen.insert(key, line) {
            return Err(err(line, format!("duplicate key `{key}` (first set on line {first})")));
        }
        entries.push((line, key, value));
    }

    let kind = match entries.iter().find(|e| e.1 == "experiment") {
        Some(&(line, _, v)) => match v {
            "sinr" => ExperimentKind::Sinr,
            "throughput" => ExperimentKind::Throughput,
            _ => return Err(err(line, format!("experiment must be `sinr` or `throughput`, got `{v}`"))),
        },
        None => ExperimentKind::Sinr,
    };
    let mut cfg = ExperimentConfig::preset(kind);
    let mut out_dir = PathBuf::from(DEFAULT_OUT_DIR);

    for &(line, key, value) in &entries {
        let bad = |what: &str| err(line, format!("`{key}` expects {what}, got `{value}`"));
        match key {
            "experiment" => {}
            "isd_m" => cfg.isd_m = parse_f64(value).ok_or_else(|| bad("a number"))?,
            "n_rings" => cfg.n_rings = value.parse().map_err(|_| bad("a non-negative integer"))?,
            "wraparound" => cfg.wraparound = parse_bool(value).ok_or_else(|| bad("true or false"))?,
            "n_cellular_per_sector" => {
                cfg.n_cellular_per_sector = value.parse().map_err(|_| bad("a non-negative integer"))?
            }
            "n_d2d_tx_per_sector" => {
                cfg.n_d2d_tx_per_sector = value.parse().map_err(|_| bad("a non-negative integer"))?
            }
            "d2d_range_m" => cfg.d2d_range_m = parse_f64(value).ok_or_else(|| bad("a number"))?,
            "min_d2d_dist_m" => cfg.min_d2d_dist_m = parse_f64(value).ok_or_else(|| bad("a number"))?,
            "coordination" => {
                cfg.coordination = parse_coordination(value).ok_or_else(|| bad("uncoordinated, tdm or reuse:k"))?
            }
            "alpha_list" => cfg.alpha_list = parse_list(value).ok_or_else(|| bad("comma-separated numbers"))?,
            "snr_target_db_list" => {
                cfg.snr_target_db_list = parse_list(value).ok_or_else(|| bad("comma-separated numbers"))?
            }
            "no_power_control" => cfg.no_power_control = parse_bool(value).ok_or_else(|| bad("true or false"))?,
            "n_drops" => cfg.n_drops = value.parse().map_err(|_| bad("a positive integer"))?,
            "n_subframes" => cfg.n_subframes = value.parse().map_err(|_| bad("a positive integer"))?,
            "k_d2d" => cfg.k_d2d = value.parse().map_err(|_| bad("a non-negative integer"))?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad("an unsigned 64-bit integer"))?,
            "carrier_ghz" => cfg.channel.carrier_ghz = parse_f64(value).ok_or_else(|| bad("a number"))?,
            "d2d_offset_db" => cfg.channel.d2d_offset_db = parse_f64(value).ok_or_else(|| bad("a number"))?,
            "out_dir" => {
                if value.is_empty() {
                    return Err(bad("a directory path"));
                }
                out_dir = PathBuf::from(value);
            }
            _ => unreachable!("key list checked above"),
        }
    }

    cfg.validate().map_err(|e| locate(e, &seen))?;
    Ok(RunConfig {
        experiment: cfg,
        out_dir,
    })
}

fn err(line: usize, message: String) -> ConfigError {
    ConfigError::Line { line, message }
}

/// Attaches the line of the offending key when the file set it.
fn locate(e: SimError, seen: &HashMap<&str, usize>) -> ConfigError {
    let candidates: &[&str] = match &e {
        SimError::InvalidParameter { name, .. } => match *name {
            "isd" => &["isd_m"],
            // An empty sweep can come from either list or the no-PC flag.
            "alpha_list" => &["alpha_list", "snr_target_db_list", "no_power_control"],
            "min_d2d_dist_m" | "d2d_range_m" => &["min_d2d_dist_m", "d2d_range_m"],
            "k_d2d" => &["k_d2d", "n_cellular_per_sector"],
            other => KEYS
                .iter()
                .find(|k| **k == other)
                .map(std::slice::from_ref)
                .unwrap_or(&[]),
        },
        _ => &[],
    };
    match candidates.iter().find_map(|k| seen.get(k)) {
        Some(&line) => ConfigError::Line {
            line,
            message: e.to_string(),
        },
        None => ConfigError::Invalid(e),
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|v| parse_f64(v.trim())).collect()
}

pub fn parse_coordination(s: &str) -> Option<CoordinationMode> {
    match s {
        "uncoordinated" => Some(CoordinationMode::Uncoordinated),
        "tdm" => Some(CoordinationMode::OrthogonalTdm),
        _ => s
            .strip_prefix("reuse:")
            .and_then(|k| k.trim().parse().ok())
            .filter(|&k| k >= 1)
            .map(CoordinationMode::SpatialReuse),
    }
}

pub fn coordination_str(mode: CoordinationMode) -> String {
    match mode {
        CoordinationMode::Uncoordinated => "uncoordinated".into(),
        CoordinationMode::OrthogonalTdm => "tdm".into(),
        CoordinationMode::SpatialReuse(k) => format!("reuse:{k}"),
    }
}

fn list_str(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Every key with its resolved value, in canonical order. Parsing the
/// output yields the same configuration.
pub fn render_config(run: &RunConfig) -> String {
    let c = &run.experiment;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("experiment", c.experiment.as_str().into());
    kv("isd_m", c.isd_m.to_string());
    kv("n_rings", c.n_rings.to_string());
    kv("wraparound", c.wraparound.to_string());
    kv("n_cellular_per_sector", c.n_cellular_per_sector.to_string());
    kv("n_d2d_tx_per_sector", c.n_d2d_tx_per_sector.to_string());
    kv("d2d_range_m", c.d2d_range_m.to_string());
    kv("min_d2d_dist_m", c.min_d2d_dist_m.to_string());
    kv("coordination", coordination_str(c.coordination));
    kv("alpha_list", list_str(&c.alpha_list));
    kv("snr_target_db_list", list_str(&c.snr_target_db_list));
    kv("no_power_control", c.no_power_control.to_string());
    kv("n_drops", c.n_drops.to_string());
    kv("n_subframes", c.n_subframes.to_string());
    kv("k_d2d", c.k_d2d.to_string());
    kv("seed", c.seed.to_string());
    kv("carrier_ghz", c.channel.carrier_ghz.to_string());
    kv("d2d_offset_db", c.channel.d2d_offset_db.to_string());
    kv("out_dir", run.out_dir.display().to_string());
    s
}
