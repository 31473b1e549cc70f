//! End-to-end acceptance checks at full run sizes. Each test prints one
//! `PASS`/`FAIL` line before asserting.

use std::fs;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use d2dsim::channel::{build_coupling_table, ChannelConfig, Endpoint};
use d2dsim::config::{RunConfig, DEFAULT_OUT_DIR};
use d2dsim::engine::{
    discovery_overhead, fraction_above, percentile, run_sinr_experiment, run_throughput_experiment, ExperimentConfig,
    SinrReport, ThroughputComparison, COVERAGE_SINR_DB,
};
use d2dsim::layout::{build_hex_grid, drop_cellular_ues, drop_d2d_pairs};
use d2dsim::radio::{
    classify_coverage, compute_sinr, coverage_from_sinr, downlink_sinr_db, open_loop_tx_power, Coverage,
    PowerControlConfig, RadioConfig,
};
use d2dsim::report::{emit_reports, Report, MANIFEST_TXT, SINR_CSV, SUMMARY_TXT, THROUGHPUT_CSV};
use d2dsim::scheduling::{assign_d2d_slots, CoordinationMode};

fn verdict(name: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn fractions(report: &SinrReport) -> Vec<(String, f64)> {
    report
        .summaries
        .iter()
        .map(|s| (s.setting.label(), s.fraction_above.expect("every setting has samples")))
        .collect()
}

fn timed_sinr(cfg: &ExperimentConfig) -> (Vec<(String, f64)>, Duration) {
    let t = Instant::now();
    let report = run_sinr_experiment(cfg).expect("sinr run");
    (fractions(&report), t.elapsed())
}

fn wide_area() -> ExperimentConfig {
    ExperimentConfig::sinr_default()
}

fn urban() -> ExperimentConfig {
    ExperimentConfig {
        isd_m: 500.0,
        n_d2d_tx_per_sector: 1,
        channel: ChannelConfig::default(),
        ..ExperimentConfig::sinr_default()
    }
}

fn highest(f: &[(String, f64)]) -> &(String, f64) {
    f.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap()
}

#[test]
fn wide_area_uncoordinated_sinr_is_poor() {
    let cfg = wide_area();
    let (f, took) = timed_sinr(&cfg);
    let (label, top) = highest(&f);
    let ok = f.iter().all(|(_, x)| *x <= 0.50) && took < Duration::from_secs(120);
    assert!(verdict(
        "wide-area uncoordinated D2D",
        ok,
        format!("highest P(SINR > -6 dB) = {top:.3} ({label}) <= 0.50 over {} drops in {took:.1?}", cfg.n_drops)
    ));
}

#[test]
fn wide_area_tdm_sinr_is_good() {
    let cfg = ExperimentConfig {
        coordination: CoordinationMode::OrthogonalTdm,
        ..wide_area()
    };
    let (f, took) = timed_sinr(&cfg);
    let (label, top) = highest(&f);
    let ok = *top >= 0.90 && took < Duration::from_secs(120);
    assert!(verdict(
        "wide-area time-multiplexed D2D",
        ok,
        format!("best P(SINR > -6 dB) = {top:.3} ({label}) >= 0.90 in {took:.1?}")
    ));
}

#[test]
fn urban_long_range_sinr_is_poor() {
    let (f, took) = timed_sinr(&urban());
    let (label, top) = highest(&f);
    let ok = f.iter().all(|(_, x)| *x <= 0.60);
    assert!(verdict(
        "urban 250 m single co-channel D2D",
        ok,
        format!("highest P(SINR > -6 dB) = {top:.3} ({label}) <= 0.60 in {took:.1?}")
    ));
}

#[test]
fn urban_short_range_reuse_is_supported() {
    let cfg = ExperimentConfig {
        d2d_range_m: 50.0,
        n_d2d_tx_per_sector: 10,
        coordination: CoordinationMode::SpatialReuse(2),
        ..urban()
    };
    let (f, took) = timed_sinr(&cfg);
    let (label, top) = highest(&f);
    assert!(verdict(
        "urban 50 m D2D with two concurrent TX",
        *top >= 0.90,
        format!("best P(SINR > -6 dB) = {top:.3} ({label}) >= 0.90 in {took:.1?}")
    ));
}

#[test]
fn offload_throughput_trends() {
    let cfg = ExperimentConfig::throughput_default();
    let t = Instant::now();
    let runs: Vec<ThroughputComparison> = [1, 3, 5, 7, 9]
        .iter()
        .map(|&k| run_throughput_experiment(&cfg, k).expect("throughput run"))
        .collect();
    let took = t.elapsed();
    for c in &runs {
        println!("     k = {}: mean gain {:.3}, p5 gain {:.3}", c.k_d2d, c.mean_gain(), c.p5_gain());
    }
    let gain = |k: usize| runs.iter().find(|c| c.k_d2d == k).unwrap();

    let a = [1, 3, 5].iter().all(|&k| gain(k).mean_gain() >= 1.0 && gain(k).p5_gain() >= 1.0);
    let b = runs.iter().any(|c| c.p5_gain() > c.mean_gain());
    let c = gain(9).mean_gain() < gain(5).mean_gain();
    let a = verdict("offload gains at least 1 for k = 1, 3, 5", a, format!("{} drops x {} subframes", cfg.n_drops, cfg.n_subframes));
    let b = verdict("offload helps the bottom 5% more than the mean", b, "p5 gain > mean gain for some k");
    let c = verdict(
        "offload mean gain falls off for many D2D transmitters",
        c,
        format!("need gain(9) < gain(5), got {:.3} vs {:.3}", gain(9).mean_gain(), gain(5).mean_gain()),
    );
    let t_ok = verdict("offload sweep runtime", took < Duration::from_secs(600), format!("{took:.1?} < 10 min"));
    assert!(a && b && c && t_ok);
}

#[test]
fn discovery_overhead_is_exact() {
    let got = discovery_overhead(50, 5.0).unwrap();
    assert!(verdict("discovery overhead", got == (0.01, 0.99), format!("(50 subframes, 5 s) -> {got:?}")));
}

fn compute_sinr_matches_linear_sum() -> bool {
    let layout = build_hex_grid(500.0, 1, true).unwrap();
    let cfg = ChannelConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_rel: f64 = 0.0;
    let mut instances = 0;
    while instances < 1000 {
        let mut ues = drop_cellular_ues(&layout, 0, 0, &mut rng);
        let pairs = drop_d2d_pairs(&layout, 1, 100.0, 3.0, 0, &mut rng).unwrap();
        ues.extend(pairs.into_iter().flat_map(|(t, r)| [t, r]));
        let table = build_coupling_table(&layout, &ues, &cfg, &mut rng).unwrap();
        let txs: Vec<usize> = ues.iter().filter(|u| u.is_transmitter()).map(|u| u.id).collect();
        let rxs: Vec<usize> = ues.iter().filter(|u| !u.is_transmitter()).map(|u| u.id).collect();
        for _ in 0..50 {
            let n = rng.random_range(1..=5);
            let active: Vec<usize> = sample(&mut rng, txs.len(), n).into_iter().map(|i| txs[i]).collect();
            let serving = active[rng.random_range(0..n)];
            let rx = if rng.random_bool(0.5) {
                Endpoint::Ue(rxs[rng.random_range(0..rxs.len())])
            } else {
                Endpoint::Sector(rng.random_range(0..layout.n_sectors()))
            };
            let powers: Vec<f64> = (0..ues.len()).map(|_| rng.random_range(-40.0..23.0)).collect();
            let noise = rng.random_range(-110.0..-90.0);

            let lin = |db: f64| 10f64.powf(db / 10.0);
            let rx_power = |tx: usize| lin(powers[tx] - table.link(tx, rx).unwrap().loss_db);
            let interference: f64 = active.iter().filter(|&&t| t != serving).map(|&t| rx_power(t)).sum();
            let expected = rx_power(serving) / (lin(noise) + interference);

            let got = lin(compute_sinr(rx, serving, &active, &powers, &table, noise).unwrap());
            worst_rel = worst_rel.max(((got - expected) / expected).abs());
            instances += 1;
        }
    }
    verdict("SINR oracle", worst_rel <= 1e-9, format!("{instances} instances, worst relative error {worst_rel:.2e}"))
}

fn power_control_invariants() -> bool {
    let mut runner = TestRunner::new(PropConfig {
        cases: 2000,
        ..PropConfig::default()
    });
    let strategy = (0.0f64..=1.0, -10.0f64..30.0, -110.0f64..-80.0, 10.0f64..160.0, 0.0f64..20.0, 0.0f64..30.0);
    let result = runner.run(&strategy, |(alpha, snr, noise, pl, dpl, p_max)| {
        let pc = PowerControlConfig {
            p_max_dbm: p_max,
            snr_target_db: snr,
            noise_dbm: noise,
            alpha,
            enabled: true,
        };
        let p = open_loop_tx_power(&pc, pl);
        prop_assert!(p <= p_max);
        prop_assert!(open_loop_tx_power(&pc, pl + dpl) >= p);
        let wanted = snr + noise + alpha * pl;
        if wanted < p_max {
            prop_assert!((p - wanted).abs() < 1e-9);
            if alpha == 1.0 {
                prop_assert!((p - pl - noise - snr).abs() < 1e-9);
            }
        } else {
            prop_assert_eq!(p, p_max);
        }
        let off = PowerControlConfig { enabled: false, ..pc };
        prop_assert_eq!(open_loop_tx_power(&off, pl), p_max);
        Ok(())
    });
    verdict("power-control invariants", result.is_ok(), format!("2000 cases: {result:?}"))
}

fn tdm_has_no_intra_sector_interference() -> bool {
    let mut assignments = 0;
    let mut clean = true;
    for n_sectors in [1, 3, 21] {
        for n_tx in 1..=12 {
            let by_sector: Vec<Vec<usize>> =
                (0..n_sectors).map(|s| (0..n_tx).map(|j| s * n_tx + j).collect()).collect();
            let slots = assign_d2d_slots(CoordinationMode::OrthogonalTdm, &by_sector, 3 * n_tx).unwrap();
            for slot in &slots {
                assignments += 1;
                clean &= slot.active.iter().all(|a| a.len() == 1);
            }
            for (s, txs) in by_sector.iter().enumerate() {
                clean &= txs.iter().all(|tx| slots[..n_tx].iter().any(|slot| slot.active[s] == [*tx]));
            }
        }
    }
    verdict("time multiplexing isolation", clean, format!("{assignments} slot assignments, one D2D TX per sector each"))
}

fn statistics_match_naive() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut ok = true;
    for _ in 0..500 {
        let n = rng.random_range(1..300);
        let v: Vec<f64> = (0..n).map(|_| (rng.random_range(-200..200) as f64) / 10.0).collect();
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        for pct in [0usize, 1, 5, 10, 50, 90, 95, 100] {
            let rank = (pct * n).div_ceil(100).max(1);
            ok &= percentile(&v, pct as f64 / 100.0).unwrap() == sorted[rank - 1];
        }
        let thr = rng.random_range(-200..200) as f64 / 10.0;
        let mut above = 0;
        for x in &v {
            if *x > thr {
                above += 1;
            }
        }
        ok &= fraction_above(&v, thr).unwrap() == above as f64 / n as f64;
    }
    verdict("percentile and fraction recomputation", ok, "500 random sample sets")
}

fn runs_are_byte_identical() -> bool {
    let sinr = ExperimentConfig {
        isd_m: 500.0,
        n_rings: 1,
        n_drops: 4,
        ..ExperimentConfig::sinr_default()
    };
    let thr = ExperimentConfig {
        n_drops: 3,
        n_subframes: 300,
        ..ExperimentConfig::throughput_default()
    };
    let mut ok = true;
    for (cfg, csv) in [(sinr, SINR_CSV), (thr, THROUGHPUT_CSV)] {
        let outputs: Vec<(Vec<u8>, Vec<u8>, String)> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let report = match csv {
                    SINR_CSV => Report::Sinr(run_sinr_experiment(&cfg).unwrap()),
                    _ => Report::Throughput(run_throughput_experiment(&cfg, cfg.k_d2d).unwrap()),
                };
                let run = RunConfig {
                    experiment: cfg.clone(),
                    out_dir: DEFAULT_OUT_DIR.into(),
                };
                emit_reports(&report, &run, dir.path(), Duration::ZERO).unwrap();
                let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
                (read(csv), read(SUMMARY_TXT), String::from_utf8(read(MANIFEST_TXT)).unwrap())
            })
            .collect();
        ok &= outputs[0] == outputs[1];
    }
    verdict("reproducible output", ok, "sinr and throughput runs written twice")
}

#[test]
fn oracle_suites() {
    let results = [
        compute_sinr_matches_linear_sum(),
        power_control_invariants(),
        tdm_has_no_intra_sector_interference(),
        statistics_match_naive(),
        runs_are_byte_identical(),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn coverage_flips_strictly_below_threshold() {
    let rc = RadioConfig::default();
    let mut ok = coverage_from_sinr(COVERAGE_SINR_DB, &rc) == Coverage::InCoverage;
    for i in -500..=500 {
        let s = COVERAGE_SINR_DB + i as f64 * 1e-3;
        let expected = if s < COVERAGE_SINR_DB { Coverage::OutOfCoverage } else { Coverage::InCoverage };
        ok &= coverage_from_sinr(s, &rc) == expected;
    }

    let layout = build_hex_grid(500.0, 1, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ues = drop_cellular_ues(&layout, 3, 0, &mut rng);
    let table = build_coupling_table(&layout, &ues, &ChannelConfig::default(), &mut rng).unwrap();
    let mut near = 0;
    for ue in &ues {
        for step in 0..200 {
            let p = -40.0 + step as f64 * 0.5;
            let s = downlink_sinr_db(ue, &layout, &table, p, &rc).unwrap();
            if (s - COVERAGE_SINR_DB).abs() <= 0.5 {
                near += 1;
            }
            let expected = if s < COVERAGE_SINR_DB { Coverage::OutOfCoverage } else { Coverage::InCoverage };
            ok &= classify_coverage(ue, &layout, &table, p, &rc).unwrap() == expected;
        }
    }
    ok &= near > 0;
    assert!(verdict(
        "coverage threshold",
        ok,
        format!("1001-point scan of +-0.5 dB plus {near} dropped UEs within 0.5 dB of the threshold")
    ));
}
