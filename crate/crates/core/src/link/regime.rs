use std::fmt;

use serde::Serialize;

use super::{
    per_from_snr_db, require_probability_open, LinkError, LinkHardware, NoiseProfile, Result,
};

/// Which noise floor dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// High attenuation: detector background dominates.
    #[serde(rename = "HAR")]
    Har,
    /// Low attenuation: source intensity noise dominates.
    #[serde(rename = "LAR")]
    Lar,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Har => "HAR",
            Regime::Lar => "LAR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub crossover_moa_db: f64,
    pub snr_db: f64,
    pub sigma_total_v: f64,
}

/// SNR at channel attenuation `moa_db` with detector and source noise in
/// quadrature. Flat in LAR, falling 2 dB per dB in HAR.
pub fn snr_piecewise_db(
    moa_db: f64,
    hw: &LinkHardware,
    noise: &NoiseProfile,
) -> Result<RegimeReport> {
    if !(moa_db >= 0.0 && moa_db.is_finite()) {
        return Err(LinkError::OutOfRange {
            what: "moa_db",
            value: moa_db,
            range: "[0, inf)",
        });
    }
    report(moa_db, hw, noise)
}

/// As [`snr_piecewise_db`] at any finite attenuation, including gain (< 0 dB).
pub fn predicted_snr_db(oa_db: f64, hw: &LinkHardware, noise: &NoiseProfile) -> Result<f64> {
    if !oa_db.is_finite() {
        return Err(LinkError::OutOfRange {
            what: "oa_db",
            value: oa_db,
            range: "finite reals",
        });
    }
    Ok(report(oa_db, hw, noise)?.snr_db)
}

fn report(oa_db: f64, hw: &LinkHardware, noise: &NoiseProfile) -> Result<RegimeReport> {
    hw.validate()?;
    noise.validate()?;
    let swing = hw.received_swing_v(hw.p_out_w, oa_db);
    let source = noise.source_sigma_v(oa_db, hw.p_out_w);
    let sigma_total_v = noise.total_sigma_v(oa_db, hw.p_out_w);
    Ok(RegimeReport {
        regime: if source > noise.sigma_detector_v {
            Regime::Lar
        } else {
            Regime::Har
        },
        crossover_moa_db: noise.crossover_oa_db(hw.p_out_w),
        snr_db: 20.0 * (swing / (2.0 * sigma_total_v)).log10(),
        sigma_total_v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdStatus {
    Found,
    /// Target missed even at MD = 1; `md` is 1.
    Unreachable,
    /// Target met at the search floor; `md` is the floor.
    BelowFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MdThreshold {
    pub md: f64,
    pub status: ThresholdStatus,
    /// Predicted SNR at `md`.
    pub snr_db: f64,
}

/// Smallest modulation depth searched.
pub const MD_FLOOR: f64 = 1e-9;

/// Smallest MD whose predicted PER meets `per_target` at attenuation `oa_db`.
pub fn md_threshold_for_error_free(
    oa_db: f64,
    hw: &LinkHardware,
    noise: &NoiseProfile,
    per_target: f64,
    n_bits: u32,
) -> Result<MdThreshold> {
    let per_target = require_probability_open("per_target", per_target)?;
    let at = |md: f64| -> Result<(f64, f64)> {
        let snr = predicted_snr_db(oa_db, &hw.with_md(md), noise)?;
        Ok((snr, per_from_snr_db(snr, n_bits)))
    };

    let (snr_top, per_top) = at(1.0)?;
    if per_top > per_target {
        return Ok(MdThreshold {
            md: 1.0,
            status: ThresholdStatus::Unreachable,
            snr_db: snr_top,
        });
    }
    let (snr_floor, per_floor) = at(MD_FLOOR)?;
    if per_floor <= per_target {
        return Ok(MdThreshold {
            md: MD_FLOOR,
            status: ThresholdStatus::BelowFloor,
            snr_db: snr_floor,
        });
    }

    // PER falls monotonically in MD; bracket is (fails, passes].
    let (mut lo, mut hi) = (MD_FLOOR, 1.0);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if at(mid)?.1 <= per_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MdThreshold {
        md: hi,
        status: ThresholdStatus::Found,
        snr_db: at(hi)?.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::{DEFAULT_PACKET_BITS, ERROR_FREE_PER};
    use proptest::prelude::*;

    fn defaults() -> (LinkHardware, NoiseProfile) {
        (LinkHardware::default(), NoiseProfile::default())
    }

    #[test]
    fn crossover_and_plateau() {
        let (hw, noise) = defaults();
        let r = snr_piecewise_db(10.0, &hw, &noise).unwrap();
        assert_close!(r.crossover_moa_db, 25.403_322, 1e-6);
        assert_eq!(r.regime, Regime::Lar);

        let plateau = snr_piecewise_db(0.0, &hw, &noise).unwrap().snr_db;
        let at_cross = snr_piecewise_db(r.crossover_moa_db, &hw, &noise).unwrap();
        assert_close!(plateau - at_cross.snr_db, 3.0103, 1e-3);
        assert_close!(
            at_cross.sigma_total_v,
            noise.sigma_detector_v * 2f64.sqrt(),
            1e-15
        );
        assert_eq!(
            snr_piecewise_db(r.crossover_moa_db + 0.01, &hw, &noise)
                .unwrap()
                .regime,
            Regime::Har
        );
    }

    #[test]
    fn har_slope() {
        let (hw, noise) = defaults();
        let d = snr_piecewise_db(50.0, &hw, &noise).unwrap().snr_db
            - snr_piecewise_db(48.0, &hw, &noise).unwrap().snr_db;
        assert_close!(d, -4.0, 0.1);
    }

    #[test]
    fn md_halving_costs_six_db() {
        let (hw, noise) = defaults();
        let full = predicted_snr_db(30.0, &hw, &noise).unwrap();
        let half = predicted_snr_db(30.0, &hw.with_md(0.5), &noise).unwrap();
        assert_close!(full - half, 6.0206, 1e-4);
    }

    #[test]
    fn rejects_negative_moa() {
        let (hw, noise) = defaults();
        assert!(snr_piecewise_db(-1.0, &hw, &noise).is_err());
        assert!(predicted_snr_db(-1.0, &hw, &noise).is_ok());
    }

    #[test]
    fn lar_md_threshold() {
        let (hw, noise) = defaults();
        let t = md_threshold_for_error_free(13.0, &hw, &noise, ERROR_FREE_PER, DEFAULT_PACKET_BITS)
            .unwrap();
        assert_eq!(t.status, ThresholdStatus::Found);
        assert_close!(t.md, 0.008_454_6, 1e-7);
        assert!((0.006..=0.013).contains(&t.md));
        assert_close!(t.snr_db, 14.063_871, 1e-6);
    }

    #[test]
    fn md_threshold_scales_with_sigma() {
        let (hw, noise) = defaults();
        let twice = NoiseProfile {
            sigma_detector_v: 2.0 * noise.sigma_detector_v,
            sigma_source_v_at_ref: 2.0 * noise.sigma_source_v_at_ref,
            ..noise
        };
        let a = md_threshold_for_error_free(13.0, &hw, &noise, ERROR_FREE_PER, 72).unwrap();
        let b = md_threshold_for_error_free(13.0, &hw, &twice, ERROR_FREE_PER, 72).unwrap();
        assert_close!(b.md / a.md, 2.0, 1e-9);
    }

    #[test]
    fn md_threshold_flags() {
        let (hw, noise) = defaults();
        let far = md_threshold_for_error_free(80.0, &hw, &noise, ERROR_FREE_PER, 72).unwrap();
        assert_eq!(far.status, ThresholdStatus::Unreachable);
        assert_eq!(far.md, 1.0);
        // Source noise tracks the signal, so only a detector-limited link can
        // meet a target at the floor.
        let quiet = NoiseProfile {
            sigma_source_v_at_ref: 1e-30,
            ..noise
        };
        let near = md_threshold_for_error_free(-200.0, &hw, &quiet, 0.5, 72).unwrap();
        assert_eq!(near.status, ThresholdStatus::BelowFloor);
        assert!(md_threshold_for_error_free(13.0, &hw, &noise, 0.0, 72).is_err());
    }

    proptest! {
        #[test]
        fn continuous_in_moa(moa in 0.0f64..80.0) {
            let (hw, noise) = defaults();
            let a = snr_piecewise_db(moa, &hw, &noise).unwrap().snr_db;
            let b = snr_piecewise_db(moa + 1e-6, &hw, &noise).unwrap().snr_db;
            prop_assert!((a - b).abs() < 1e-5);
            prop_assert!(b <= a);
        }

        #[test]
        fn regime_matches_noise_balance(moa in 0.0f64..80.0) {
            let (hw, noise) = defaults();
            let r = snr_piecewise_db(moa, &hw, &noise).unwrap();
            prop_assert_eq!(r.regime == Regime::Lar, moa < r.crossover_moa_db);
        }
    }
}
