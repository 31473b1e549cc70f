//! CSV, summary and manifest output for a finished run.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::config::{render_config, RunConfig};
use crate::engine::{SinrReport, ThroughputComparison, COVERAGE_SINR_DB};

pub const SINR_CSV: &str = "sinr_samples.csv";
pub const THROUGHPUT_CSV: &str = "throughput.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const MANIFEST_TXT: &str = "manifest.txt";
pub const SINR_HEADER: &str = "setting_id,alpha,snr_target_db,drop,sector,link,sinr_db";
pub const THROUGHPUT_HEADER: &str = "run,drop,flow,role,throughput_bps";

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Sinr(SinrReport),
    Throughput(ThroughputComparison),
}

/// Formats `x` with six significant digits, `%g` style: fixed notation for
/// decimal exponents in [-5, 6), scientific otherwise, trailing zeros cut.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn sinr_csv(report: &SinrReport) -> String {
    let mut s = String::with_capacity(48 * report.samples.len() + 64);
    s.push_str(SINR_HEADER);
    s.push('\n');
    for x in &report.samples {
        let setting = report.settings[x.setting_id];
        let (alpha, snr) = if setting.enabled {
            (fmt_sig6(setting.alpha), fmt_sig6(setting.snr_target_db))
        } else {
            ("NA".into(), "NA".into())
        };
        let _ = writeln!(
            s,
            "{},{alpha},{snr},{},{},{},{}",
            x.setting_id,
            x.drop,
            x.sector,
            x.link,
            fmt_sig6(x.sinr_db)
        );
    }
    s
}

pub fn throughput_csv(cmp: &ThroughputComparison) -> String {
    let mut s = String::from(THROUGHPUT_HEADER);
    s.push('\n');
    for r in [&cmp.baseline, &cmp.offload] {
        for x in &r.samples {
            let role = if x.d2d { "d2d" } else { "cellular" };
            let _ = writeln!(s, "{},{},{},{role},{}", r.run.as_str(), x.drop, x.flow, fmt_sig6(x.throughput_bps));
        }
    }
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_sig6).unwrap_or_else(|| "NA".into())
}

pub fn summary_text(report: &Report) -> String {
    let mut s = String::new();
    match report {
        Report::Sinr(r) => {
            let _ = writeln!(s, "D2D link SINR, fraction above {} dB per power-control setting", COVERAGE_SINR_DB);
            for x in &r.summaries {
                let _ = writeln!(
                    s,
                    "setting {} ({}): samples={} frac_above={} mean_db={} p5_db={}",
                    x.setting_id,
                    x.setting.label(),
                    x.n_samples,
                    opt(x.fraction_above),
                    opt(x.mean_db),
                    opt(x.p5_db)
                );
            }
        }
        Report::Throughput(c) => {
            let _ = writeln!(s, "Uplink throughput, k_d2d = {} ({})", c.k_d2d, c.setting.label());
            for r in [&c.baseline, &c.offload] {
                let _ = writeln!(
                    s,
                    "{}: flows={} mean_bps={} p5_bps={}",
                    r.run.as_str(),
                    r.samples.len(),
                    fmt_sig6(r.mean_bps),
                    fmt_sig6(r.p5_bps)
                );
            }
            let _ = writeln!(s, "gain_mean = {}", fmt_sig6(c.mean_gain()));
            let _ = writeln!(s, "gain_p5 = {}", fmt_sig6(c.p5_gain()));
        }
    }
    s
}

/// Re-parseable config echo; run metadata lines are comments.
pub fn manifest_text(run: &RunConfig, duration: Duration) -> String {
    let mut s = String::from("# d2dsim run manifest\n");
    let _ = writeln!(s, "# artifact_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# experiment_name = {}", run.experiment.experiment.as_str());
    s.push_str(&render_config(run));
    let _ = writeln!(s, "# wall_clock_s = {:.3}", duration.as_secs_f64());
    s
}

/// Writes the CSV, `summary.txt` and `manifest.txt` into `out_dir`,
/// creating it if needed. Returns the written paths.
pub fn emit_reports(report: &Report, run: &RunConfig, out_dir: &Path, duration: Duration) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let (csv_name, csv) = match report {
        Report::Sinr(r) => (SINR_CSV, sinr_csv(r)),
        Report::Throughput(c) => (THROUGHPUT_CSV, throughput_csv(c)),
    };
    let files = [
        (csv_name, csv),
        (SUMMARY_TXT, summary_text(report)),
        (MANIFEST_TXT, manifest_text(run, duration)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
