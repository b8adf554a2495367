//! Sweeps behind the command-line tools. Each returns a [`Table`] whose
//! column names carry units.

use crate::config::ScenarioConfig;
use crate::link::{
    ber_from_snr_db, md_threshold_for_error_free, moa_for_per, per_from_snr_db, predicted_snr_db,
    snr_piecewise_db, MdThreshold,
};
use crate::report::Table;
use crate::sim::{simulate_transmission, Scenario, SimOutcome};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Analytic,
    MonteCarlo,
}

/// `from, from + step, …` up to and including `to` (within 1e-9 of a step).
pub fn stepped(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && from.is_finite() && to.is_finite() && to >= from) {
        return Err(Error::Usage(format!(
            "range {from}..{to} step {step} needs step > 0 and to >= from"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

/// Loss breakdown against distance for each wavelength.
pub fn attenuation(
    cfg: &ScenarioConfig,
    wavelengths_nm: &[f64],
    d_max_m: f64,
    step_m: f64,
) -> Result<Table> {
    let distances = stepped(0.0, d_max_m, step_m)?;
    let model = cfg.channel_model();
    let atmosphere = cfg.atmosphere()?;
    let geometry = cfg.geometry();
    let mut t = Table::new([
        "wavelength_nm",
        "distance_m",
        "aerosol_scattering_db",
        "rayleigh_scattering_db",
        "absorption_db",
        "scintillation_db",
        "geometric_db",
        "total_db",
    ]);
    for &wl in wavelengths_nm {
        let path = model.coefficients(&atmosphere, &geometry, wl)?;
        for &d in &distances {
            let b = path.at(d)?;
            t.push(vec![
                wl.into(),
                d.into(),
                b.aerosol_scattering_db.into(),
                b.rayleigh_scattering_db.into(),
                b.absorption_db.into(),
                b.scintillation_db.into(),
                b.geometric_db.into(),
                b.total_db.into(),
            ]);
        }
    }
    Ok(t)
}

/// Monte Carlo run at one analytic SNR on a detector-limited link.
pub fn awgn_run(cfg: &ScenarioConfig, snr_db: f64) -> Result<SimOutcome> {
    let mut s = Scenario::awgn_at_snr(snr_db, cfg.run.n_packets, cfg.run.seed);
    s.chain = cfg.chain();
    s.threshold = cfg.run.threshold;
    s.workers = cfg.run.workers;
    s.eye_packets = 0;
    Ok(simulate_transmission(&s)?)
}

/// BER and PER against SNR; Monte Carlo mode adds empirical columns.
pub fn per_vs_snr(cfg: &ScenarioConfig, snrs_db: &[f64], mode: Mode) -> Result<Table> {
    let mut columns = vec!["snr_db", "ber", "per_analytic"];
    if mode == Mode::MonteCarlo {
        columns.extend([
            "snr_measured_db",
            "packets_sent",
            "packets_errored",
            "per_montecarlo",
            "ci95_low",
            "ci95_high",
        ]);
    }
    let mut t = Table::new(columns);
    for &snr in snrs_db {
        let mut row = vec![
            snr.into(),
            ber_from_snr_db(snr).into(),
            per_from_snr_db(snr, cfg.run.n_bits).into(),
        ];
        if mode == Mode::MonteCarlo {
            let o = awgn_run(cfg, snr)?;
            row.extend([
                o.stats.snr_db.into(),
                o.estimate.packets_sent.into(),
                o.estimate.packets_errored.into(),
                o.estimate.per.into(),
                o.estimate.ci95_low.into(),
                o.estimate.ci95_high.into(),
            ]);
        }
        t.push(row);
    }
    Ok(t)
}

/// Maximal tolerable attenuation for each packet error target.
pub fn moa(cfg: &ScenarioConfig, per_targets: &[f64]) -> Result<Table> {
    let hw = cfg.hardware();
    let noise = cfg.noise_profile();
    let mut t = Table::new([
        "per_target",
        "snr_required_db",
        "d_db",
        "moa_db",
        "reachable",
    ]);
    for &p in per_targets {
        let m = moa_for_per(p, &hw, &noise, cfg.run.n_bits)?;
        t.push(vec![
            p.into(),
            m.snr_required_db.into(),
            m.d_db.into(),
            m.moa_db.into(),
            m.reachable.into(),
        ]);
    }
    Ok(t)
}

/// Longest path whose loss fits the MOA budget at `per_target`.
pub fn link_length(cfg: &ScenarioConfig, wavelengths_nm: &[f64], per_target: f64) -> Result<Table> {
    let budget = moa_for_per(
        per_target,
        &cfg.hardware(),
        &cfg.noise_profile(),
        cfg.run.n_bits,
    )?;
    let model = cfg.channel_model();
    let atmosphere = cfg.atmosphere()?;
    let geometry = cfg.geometry();
    let mut t = Table::new([
        "wavelength_nm",
        "visibility_km",
        "budget_db",
        "max_length_m",
        "max_length_km",
        "unbounded",
    ]);
    for &wl in wavelengths_nm {
        let (d, unbounded) = if budget.reachable && budget.moa_db > 0.0 {
            let r = model.max_link_length(&atmosphere, &geometry, wl, budget.moa_db)?;
            (r.distance_m, r.unbounded)
        } else {
            (0.0, false)
        };
        t.push(vec![
            wl.into(),
            atmosphere.visibility_km.into(),
            budget.moa_db.into(),
            d.into(),
            (d / 1000.0).into(),
            unbounded.into(),
        ]);
    }
    Ok(t)
}

/// SNR against channel attenuation for several modulation depths.
pub fn regime_scan(
    cfg: &ScenarioConfig,
    mds: &[f64],
    moas_db: &[f64],
    mode: Mode,
) -> Result<Table> {
    let noise = cfg.noise_profile();
    let mut columns = vec![
        "moa_db",
        "md",
        "snr_db",
        "regime",
        "per",
        "crossover_moa_db",
    ];
    if mode == Mode::MonteCarlo {
        columns.extend(["snr_montecarlo_db", "per_montecarlo", "saturated"]);
    }
    let mut t = Table::new(columns);
    for &md in mds {
        let hw = cfg.hardware().with_md(md);
        for &moa in moas_db {
            let r = snr_piecewise_db(moa, &hw, &noise)?;
            let mut row = vec![
                moa.into(),
                md.into(),
                r.snr_db.into(),
                r.regime.to_string().into(),
                per_from_snr_db(r.snr_db, cfg.run.n_bits).into(),
                r.crossover_moa_db.into(),
            ];
            if mode == Mode::MonteCarlo {
                let o = simulate_transmission(&cfg.scenario(moa, md))?;
                row.extend([
                    o.stats.snr_db.into(),
                    o.estimate.per.into(),
                    o.saturation_flag.into(),
                ]);
            }
            t.push(row);
        }
    }
    Ok(t)
}

/// Attenuation where `snr_db` first falls 3.01 dB below its first value,
/// interpolated linearly. `None` if it never does.
pub fn crossover_from_scan(moas_db: &[f64], snrs_db: &[f64]) -> Option<f64> {
    let target = snrs_db.first()? - 10.0 * 2f64.log10();
    let i = snrs_db.iter().position(|&s| s <= target)?;
    if i == 0 {
        return None;
    }
    let (x0, x1, y0, y1) = (moas_db[i - 1], moas_db[i], snrs_db[i - 1], snrs_db[i]);
    Some(x0 + (target - y0) * (x1 - x0) / (y1 - y0))
}

/// PER against modulation depth at fixed attenuation.
pub fn md_scan(cfg: &ScenarioConfig, mds: &[f64], oa_db: f64, mode: Mode) -> Result<Table> {
    let noise = cfg.noise_profile();
    let target = cfg.run.per_target;
    let mut columns = vec!["md", "oa_db", "snr_db", "per_analytic", "error_free"];
    if mode == Mode::MonteCarlo {
        columns.extend([
            "snr_montecarlo_db",
            "packets_errored",
            "per_montecarlo",
            "error_free_montecarlo",
        ]);
    }
    let mut t = Table::new(columns);
    for &md in mds {
        if !(md > 0.0 && md <= 1.0) {
            return Err(Error::Usage(format!("md {md} outside (0, 1]")));
        }
        let snr = predicted_snr_db(oa_db, &cfg.hardware().with_md(md), &noise)?;
        let per = per_from_snr_db(snr, cfg.run.n_bits);
        let mut row = vec![
            md.into(),
            oa_db.into(),
            snr.into(),
            per.into(),
            (per <= target).into(),
        ];
        if mode == Mode::MonteCarlo {
            let o = simulate_transmission(&cfg.scenario(oa_db, md))?;
            row.extend([
                o.stats.snr_db.into(),
                o.estimate.packets_errored.into(),
                o.estimate.per.into(),
                (o.estimate.per <= target).into(),
            ]);
        }
        t.push(row);
    }
    Ok(t)
}

/// Analytic error-free MD threshold at `oa_db` with the configured target.
pub fn md_threshold(cfg: &ScenarioConfig, oa_db: f64) -> Result<MdThreshold> {
    Ok(md_threshold_for_error_free(
        oa_db,
        &cfg.hardware(),
        &cfg.noise_profile(),
        cfg.run.per_target,
        cfg.run.n_bits,
    )?)
}

/// One Monte Carlo run at the configured attenuation and modulation depth.
pub fn simulate(cfg: &ScenarioConfig) -> Result<SimOutcome> {
    Ok(simulate_transmission(
        &cfg.scenario(cfg.run.oa_db, cfg.laser.md),
    )?)
}
