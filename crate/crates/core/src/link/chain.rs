use serde::Serialize;

use super::{
    q_function, q_inverse, require_positive, require_probability_open, LinkError, LinkHardware,
    NoiseProfile, Result,
};

/// 9-byte frame.
pub const DEFAULT_PACKET_BITS: u32 = 72;

/// One errored packet in 62 500: the error-free threshold.
pub const ERROR_FREE_PER: f64 = 1.6e-5;

/// `20·log₁₀(S_RX / 2σ)`.
pub fn snr_db(s_rx_pp_v: f64, sigma_rms_v: f64) -> Result<f64> {
    let s = require_positive("s_rx_pp_v", s_rx_pp_v)?;
    let sigma = require_positive("sigma_rms_v", sigma_rms_v)?;
    Ok(20.0 * (s / (2.0 * sigma)).log10())
}

/// `Q(10^(SNR/20))`.
pub fn ber_from_snr_db(snr_db: f64) -> f64 {
    q_function(10f64.powf(snr_db / 20.0))
}

/// Packet error probability for independent bit errors.
pub fn per_from_ber(ber: f64, n_bits: u32) -> f64 {
    let ber = ber.clamp(0.0, 1.0);
    if ber == 1.0 {
        return 1.0;
    }
    -(f64::from(n_bits) * (-ber).ln_1p()).exp_m1()
}

/// Exact inverse of [`per_from_ber`].
pub fn ber_from_per(per: f64, n_bits: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&per) {
        return Err(LinkError::OutOfRange {
            what: "per",
            value: per,
            range: "[0, 1)",
        });
    }
    if n_bits == 0 {
        return Err(LinkError::NonPositive {
            what: "n_bits",
            value: 0.0,
        });
    }
    Ok(-((-per).ln_1p() / f64::from(n_bits)).exp_m1())
}

pub fn per_from_snr_db(snr_db: f64, n_bits: u32) -> f64 {
    per_from_ber(ber_from_snr_db(snr_db), n_bits)
}

/// SNR (dB) at which the packet error rate equals `per_target`.
pub fn snr_required_db(per_target: f64, n_bits: u32) -> Result<f64> {
    let per = require_probability_open("per_target", per_target)?;
    let ber = ber_from_per(per, n_bits)?;
    Ok(20.0 * q_inverse(ber).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticalAttenuation {
    pub oa_db: f64,
    /// Mean optical power reaching the detector.
    pub p_inc_w: f64,
}

/// Channel attenuation inferred from a received swing at `hw.p_out_w`.
pub fn optical_attenuation_db(s_rx_pp_v: f64, hw: &LinkHardware) -> Result<OpticalAttenuation> {
    let s = require_positive("s_rx_pp_v", s_rx_pp_v)?;
    hw.validate()?;
    let p_inc_w = s / (hw.volts_per_watt() * hw.md);
    if p_inc_w >= hw.saturation_w {
        return Err(LinkError::Saturated {
            p_inc_w,
            saturation_w: hw.saturation_w,
        });
    }
    Ok(OpticalAttenuation {
        oa_db: -10.0 * (p_inc_w / hw.p_out_w).log10(),
        p_inc_w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoaEstimate {
    pub per_target: f64,
    pub moa_db: f64,
    pub snr_required_db: f64,
    /// SNR with no channel loss at `P_max`, detector-limited.
    pub d_db: f64,
    /// False when even a lossless channel misses the target; `moa_db` is 0.
    pub reachable: bool,
}

/// Largest detector-limited attenuation meeting `per_target` at `P_max`.
pub fn moa_for_per(
    per_target: f64,
    hw: &LinkHardware,
    noise: &NoiseProfile,
    n_bits: u32,
) -> Result<MoaEstimate> {
    hw.validate()?;
    noise.validate()?;
    let snr_required_db = snr_required_db(per_target, n_bits)?;
    let d_db =
        20.0 * (hw.volts_per_watt() * hw.md * hw.p_max_w / (2.0 * noise.sigma_detector_v)).log10();
    let reachable = snr_required_db <= d_db;
    Ok(MoaEstimate {
        per_target,
        moa_db: if reachable {
            0.5 * (d_db - snr_required_db)
        } else {
            0.0
        },
        snr_required_db,
        d_db,
        reachable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N: u32 = DEFAULT_PACKET_BITS;

    #[test]
    fn snr_reference_values() {
        assert_close!(snr_db(0.1, 0.0023).unwrap(), 26.745, 1e-3);
        assert_close!(snr_db(0.02, 0.01).unwrap(), 0.0, 1e-12);
        let a = snr_db(0.05, 0.003).unwrap();
        let b = snr_db(0.10, 0.003).unwrap();
        assert_close!(b - a, 6.0206, 1e-4);
        assert!(snr_db(0.0, 0.01).is_err());
        assert!(snr_db(0.1, -0.01).is_err());
    }

    #[test]
    fn ber_reference_values() {
        assert_close!(ber_from_snr_db(-400.0), 0.5, 1e-15);
        // Q(√10) = 7.827e-4, Q(10^0.65) = 3.969e-6 (mpmath)
        assert_close!(ber_from_snr_db(10.0) / 7.827_011e-4, 1.0, 1e-6);
        assert_close!(ber_from_snr_db(13.0) / 3.969_248e-6, 1.0, 1e-6);
    }

    #[test]
    fn per_reference_values() {
        assert_eq!(per_from_ber(0.0, N), 0.0);
        assert_eq!(per_from_ber(1.0, N), 1.0);
        assert_close!(per_from_ber(7.86e-4, N), 0.055_041, 1e-6);
        assert_eq!(ber_from_per(0.0, N).unwrap(), 0.0);
        assert_close!(ber_from_per(1.6e-5, N).unwrap() / 2.222_240e-7, 1.0, 1e-6);
        assert_close!(ber_from_per(1e-3, N).unwrap() / 1.389_574e-5, 1.0, 1e-6);
        assert!(ber_from_per(1.0, N).is_err());
        assert!(ber_from_per(-0.1, N).is_err());
    }

    #[test]
    fn per_vs_snr_points() {
        // 1.6e-5 sits at 14.064 dB; 14.07 dB lands just under it
        assert_close!(per_from_snr_db(14.07, N) / 1.570_424e-5, 1.0, 1e-5);
        assert_close!(per_from_snr_db(6.0, N), 0.812_854, 1e-6);
        assert_close!(per_from_snr_db(9.0, N), 0.159_677, 1e-6);
    }

    #[test]
    fn optical_attenuation_reference_values() {
        let hw = LinkHardware {
            p_out_w: 0.021,
            ..LinkHardware::default()
        };
        let oa = optical_attenuation_db(0.1, &hw).unwrap();
        assert_close!(oa.oa_db, 41.915_361, 1e-6);
        assert_close!(oa.p_inc_w, 1.351_087e-6, 1e-12);

        let full = hw.volts_per_watt() * hw.p_out_w;
        let lossless = LinkHardware {
            saturation_w: 1.0,
            ..hw
        };
        assert_close!(
            optical_attenuation_db(full, &lossless).unwrap().oa_db,
            0.0,
            1e-12
        );

        let half = LinkHardware { md: 0.5, ..hw };
        let drop = oa.oa_db - optical_attenuation_db(0.1, &half).unwrap().oa_db;
        assert_close!(drop, 3.0103, 1e-4);

        let saturating = hw.volts_per_watt() * 0.0013;
        assert!(matches!(
            optical_attenuation_db(saturating, &hw),
            Err(LinkError::Saturated { .. })
        ));
    }

    #[test]
    fn moa_reference_values() {
        let hw = LinkHardware::default();
        let noise = NoiseProfile::default();
        let m = moa_for_per(1.6e-5, &hw, &noise, N).unwrap();
        assert!(m.reachable);
        assert_close!(m.d_db, 110.575_565, 1e-6);
        assert_close!(m.snr_required_db, 14.063_871, 1e-6);
        assert_close!(m.moa_db, 48.255_847, 1e-6);
        let m3 = moa_for_per(1e-3, &hw, &noise, N).unwrap();
        assert_close!(m3.moa_db, 49.064_765, 1e-6);
        let slope = moa_for_per(1e-1, &hw, &noise, N).unwrap().moa_db
            - moa_for_per(1e-4, &hw, &noise, N).unwrap().moa_db;
        assert_close!(slope, 1.972_885, 1e-6);
    }

    #[test]
    fn moa_at_zero_db_requirement_is_half_d() {
        // BER = Q(1) puts the required SNR at exactly 0 dB.
        let per = per_from_ber(q_function(1.0), N);
        let m = moa_for_per(per, &LinkHardware::default(), &NoiseProfile::default(), N).unwrap();
        assert_close!(m.snr_required_db, 0.0, 1e-9);
        assert_close!(m.moa_db, m.d_db / 2.0, 1e-9);
    }

    #[test]
    fn unreachable_moa_is_flagged() {
        let weak = LinkHardware {
            gain: 1e-6,
            ..LinkHardware::default()
        };
        let m = moa_for_per(1.6e-5, &weak, &NoiseProfile::default(), N).unwrap();
        assert!(!m.reachable);
        assert_eq!(m.moa_db, 0.0);
        assert!(moa_for_per(0.0, &weak, &NoiseProfile::default(), N).is_err());
        assert!(moa_for_per(1.0, &weak, &NoiseProfile::default(), N).is_err());
    }

    proptest! {
        // 1 − PER must be representable for the inverse to be exact, so
        // the 1e-12 round trip holds while (1 − b)^N stays above ~1e-3.
        #[test]
        fn per_ber_round_trip(log_b in -12.0f64..-1.05) {
            let b = 10f64.powf(log_b);
            let back = ber_from_per(per_from_ber(b, N), N).unwrap();
            prop_assert!((back / b - 1.0).abs() < 1e-12, "b={b} back={back}");
        }

        // Beyond that the recovered BER degrades like ε / (N·b·(1−b)^(N−1)).
        #[test]
        fn per_ber_round_trip_conditioning(b in 0.089f64..0.5) {
            let per = per_from_ber(b, N);
            let complement = (1.0 - b).powi(N as i32);
            match ber_from_per(per, N) {
                Ok(back) => {
                    let bound = 4.0 * f64::EPSILON / (f64::from(N) * b * complement);
                    prop_assert!((back / b - 1.0).abs() <= bound.max(1e-12));
                }
                Err(_) => prop_assert!(complement < f64::EPSILON),
            }
        }

        #[test]
        fn per_monotone_in_ber(b in 0.0f64..1.0, db in 0.0f64..0.5) {
            prop_assert!(per_from_ber((b + db).min(1.0), N) >= per_from_ber(b, N));
        }

        #[test]
        fn ber_monotone_in_snr(s in -20.0f64..25.0, ds in 0.0f64..5.0) {
            prop_assert!(ber_from_snr_db(s + ds) <= ber_from_snr_db(s));
        }

        #[test]
        fn moa_grows_with_looser_target(a in -8.0f64..-0.5, b in -8.0f64..-0.5) {
            let (strict, loose) = if a < b { (a, b) } else { (b, a) };
            let hw = LinkHardware::default();
            let noise = NoiseProfile::default();
            let m_strict = moa_for_per(10f64.powf(strict), &hw, &noise, N).unwrap().moa_db;
            let m_loose = moa_for_per(10f64.powf(loose), &hw, &noise, N).unwrap().moa_db;
            prop_assert!(m_strict <= m_loose + 1e-9);
        }
    }
}
