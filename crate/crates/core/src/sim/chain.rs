use std::f64::consts::PI;

use crate::codec::{ChipStream, DEFAULT_CHIP_RATE_HZ};

use super::{Result, SimError};

/// Receiver front end: responsivity, transimpedance gain, clamp, anti-alias
/// low-pass and AC coupling, all at one sample rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorChainConfig {
    pub responsivity_v_per_w: f64,
    pub ac_gain: f64,
    pub saturation_w: f64,
    pub lowpass_cutoff_hz: f64,
    pub ac_coupling_cutoff_hz: f64,
    pub sample_rate_hz: f64,
    pub chip_rate_hz: f64,
}

impl Default for DetectorChainConfig {
    fn default() -> Self {
        Self {
            responsivity_v_per_w: 2793.0,
            ac_gain: 26.5,
            saturation_w: 0.0012,
            lowpass_cutoff_hz: 2.5e6,
            ac_coupling_cutoff_hz: 10.0,
            // 32 samples per chip keeps the low-pass corner below Nyquist.
            sample_rate_hz: 32.0 * DEFAULT_CHIP_RATE_HZ,
            chip_rate_hz: DEFAULT_CHIP_RATE_HZ,
        }
    }
}

impl DetectorChainConfig {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("responsivity_v_per_w", self.responsivity_v_per_w),
            ("ac_gain", self.ac_gain),
            ("saturation_w", self.saturation_w),
            ("lowpass_cutoff_hz", self.lowpass_cutoff_hz),
            ("ac_coupling_cutoff_hz", self.ac_coupling_cutoff_hz),
            ("sample_rate_hz", self.sample_rate_hz),
            ("chip_rate_hz", self.chip_rate_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::invalid(
                    what,
                    format!("must be positive, got {v}"),
                ));
            }
        }
        let ratio = self.sample_rate_hz / self.chip_rate_hz;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(SimError::invalid(
                "sample_rate_hz",
                format!("{ratio} samples per chip is not an integer"),
            ));
        }
        if ratio.round() < 4.0 {
            return Err(SimError::invalid(
                "sample_rate_hz",
                "needs at least 4 samples per chip".into(),
            ));
        }
        if self.lowpass_cutoff_hz >= 0.5 * self.sample_rate_hz {
            return Err(SimError::invalid(
                "lowpass_cutoff_hz",
                format!(
                    "{} Hz is not below Nyquist {} Hz",
                    self.lowpass_cutoff_hz,
                    0.5 * self.sample_rate_hz
                ),
            ));
        }
        if self.ac_coupling_cutoff_hz >= self.lowpass_cutoff_hz {
            return Err(SimError::invalid(
                "ac_coupling_cutoff_hz",
                "must lie below the low-pass corner".into(),
            ));
        }
        Ok(())
    }

    pub fn samples_per_chip(&self) -> usize {
        (self.sample_rate_hz / self.chip_rate_hz).round() as usize
    }

    /// Output volts per incident watt.
    pub fn volts_per_watt(&self) -> f64 {
        self.ac_gain * self.responsivity_v_per_w
    }
}

/// High and low optical levels with mean `mean_w` and depth `md`.
pub fn levels_from_md(mean_w: f64, md: f64) -> Result<(f64, f64)> {
    if !(mean_w >= 0.0 && mean_w.is_finite()) {
        return Err(SimError::invalid("mean_w", format!("got {mean_w}")));
    }
    if !(md > 0.0 && md <= 2.0) {
        return Err(SimError::invalid("md", format!("{md} outside (0, 2]")));
    }
    Ok((mean_w * (1.0 + 0.5 * md), mean_w * (1.0 - 0.5 * md)))
}

/// Rectangular optical waveform, `samples_per_chip` samples per chip.
pub fn render_waveform(
    chips: &ChipStream,
    p_high_w: f64,
    p_low_w: f64,
    cfg: &DetectorChainConfig,
) -> Result<Vec<f64>> {
    if !(p_low_w >= 0.0 && p_high_w >= p_low_w) {
        return Err(SimError::invalid(
            "levels",
            format!("need p_high >= p_low >= 0, got {p_high_w} / {p_low_w}"),
        ));
    }
    let spc = cfg.samples_per_chip();
    let mut out = Vec::with_capacity(chips.len() * spc);
    for &c in &chips.chips {
        out.extend(std::iter::repeat(if c { p_high_w } else { p_low_w }).take(spc));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutput {
    pub voltage: Vec<f64>,
    /// Some sample reached the saturation clamp.
    pub saturated: bool,
}

/// `v = G·R·min(P, P_sat)`, then single-pole low-pass, then single-pole
/// high-pass. Both filters start in steady state at the waveform mean.
pub fn detector_chain(optical_w: &[f64], cfg: &DetectorChainConfig) -> DetectorOutput {
    let gr = cfg.volts_per_watt();
    let mut saturated = false;
    let mut v: Vec<f64> = optical_w
        .iter()
        .map(|&p| {
            if p >= cfg.saturation_w {
                saturated = true;
                gr * cfg.saturation_w
            } else {
                gr * p
            }
        })
        .collect();
    if v.is_empty() {
        return DetectorOutput {
            voltage: v,
            saturated,
        };
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;

    let dt = 1.0 / cfg.sample_rate_hz;
    let alpha = 1.0 - (-2.0 * PI * cfg.lowpass_cutoff_hz * dt).exp();
    let beta = 1.0 / (1.0 + 2.0 * PI * cfg.ac_coupling_cutoff_hz * dt);
    let (mut lp, mut hp, mut prev) = (mean, 0.0, mean);
    for x in &mut v {
        lp += alpha * (*x - lp);
        hp = beta * (hp + lp - prev);
        prev = lp;
        *x = hp;
    }
    DetectorOutput {
        voltage: v,
        saturated,
    }
}
