#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }};
}

pub mod channel;
pub mod codec;
pub mod config;
pub mod experiments;
pub mod link;
pub mod report;
pub mod sim;

pub use channel::{
    AbsorptionTable, Atmosphere, AttenuationBreakdown, ChannelError, ChannelModel, GeometricRule,
    LinkGeometry, LinkRange,
};
pub use codec::{CodecError, Packet, Payload, PerEstimate};
pub use config::{ConfigError, ScenarioConfig};
pub use link::{LinkError, LinkHardware, NoiseProfile, Regime};
pub use report::{Cell, OutputFormat, Table};
pub use sim::{PerReport, Scenario, SimError, SimOutcome};

/// Any failure surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the input itself is malformed rather than physically invalid.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Usage(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
