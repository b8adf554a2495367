//! Physical-layer Monte Carlo: waveform rendering, detector chain, detector
//! and source noise synthesis, packet transmission and eye capture.

mod chain;
mod eye;
mod noise;
mod transmission;

pub use chain::{
    detector_chain, levels_from_md, render_waveform, DetectorChainConfig, DetectorOutput,
};
pub use eye::{eye_export, EyeMatrix};
pub use noise::{gen_awgn, gen_flicker, FlickerBank};
pub use transmission::{
    simulate_transmission, PerReport, Scenario, SignalStats, SimOutcome, SourceNoise,
    ThresholdMode, DEFAULT_FLICKER_BAND_HZ, PREAMBLE_CHIPS,
};

use thiserror::Error;

use crate::codec::CodecError;
use crate::link::LinkError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl SimError {
    pub(crate) fn invalid(what: &'static str, detail: String) -> Self {
        SimError::Invalid { what, detail }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
