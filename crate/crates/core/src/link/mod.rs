//! Analytic link budget: SNR → BER → PER, optical attenuation, maximal
//! tolerable attenuation (MOA), and the detector-limited / source-limited
//! noise regimes.
//!
//! SNR is expressed as `20·log₁₀(S_RX / 2σ)` where `S_RX` is the received
//! peak-to-peak AC swing. The Q-function argument is the amplitude ratio
//! `S_RX / 2σ = 10^(SNR/20)`.

mod chain;
mod hardware;
mod qfunc;
mod regime;

pub use chain::{
    ber_from_per, ber_from_snr_db, moa_for_per, optical_attenuation_db, per_from_ber,
    per_from_snr_db, snr_db, snr_required_db, MoaEstimate, OpticalAttenuation, DEFAULT_PACKET_BITS,
    ERROR_FREE_PER,
};
pub use hardware::{LinkHardware, NoiseProfile};
pub use qfunc::{q_function, q_inverse};
pub use regime::{
    md_threshold_for_error_free, predicted_snr_db, snr_piecewise_db, MdThreshold, Regime,
    RegimeReport, ThresholdStatus,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{what} = {value} outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("incident power {p_inc_w} W at or above detector saturation {saturation_w} W")]
    Saturated { p_inc_w: f64, saturation_w: f64 },
    #[error("output power {p_out_w} W exceeds the single-mode maximum {p_max_w} W")]
    Overdriven { p_out_w: f64, p_max_w: f64 },
}

pub type Result<T> = std::result::Result<T, LinkError>;

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(LinkError::NonPositive { what, value })
    }
}

pub(crate) fn require_probability_open(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(LinkError::OutOfRange {
            what,
            value,
            range: "(0, 1)",
        })
    }
}
