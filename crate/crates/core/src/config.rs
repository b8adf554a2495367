//! Flat `section.key = value` scenario files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key has a
//! default, so an empty file is valid. Unknown and repeated keys are
//! rejected. Optional values are written as an empty right-hand side.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::channel::{
    AbsorptionTable, Atmosphere, ChannelModel, GeometricRule, LinkGeometry, RayleighParams,
    HV_GROUND_CN2,
};
use crate::link::{LinkHardware, NoiseProfile, DEFAULT_PACKET_BITS, ERROR_FREE_PER};
use crate::sim::{DetectorChainConfig, Scenario, SourceNoise, ThresholdMode};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("`{key}` = `{value}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{context}: {message}")]
    Invalid {
        context: &'static str,
        message: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, ConfigError>;

/// A value that can appear on the right-hand side of a config line.
trait ConfigValue: Sized {
    fn parse(s: &str) -> std::result::Result<Self, String>;
    fn render(&self) -> String;
}

impl ConfigValue for f64 {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err("must be finite".into())
        }
    }
    fn render(&self) -> String {
        format!("{self:?}")
    }
}

macro_rules! integer_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse(s: &str) -> std::result::Result<Self, String> {
                s.parse().map_err(|e| format!("{e}"))
            }
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
integer_value!(u32, u64, usize);

impl ConfigValue for bool {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err("expected true or false".into()),
        }
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl<T: ConfigValue> ConfigValue for Option<T> {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            T::parse(s).map(Some)
        }
    }
    fn render(&self) -> String {
        self.as_ref().map(T::render).unwrap_or_default()
    }
}

impl ConfigValue for PathBuf {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        Ok(PathBuf::from(s))
    }
    fn render(&self) -> String {
        self.display().to_string()
    }
}

impl ConfigValue for SourceNoise {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s {
            "flicker" => Ok(SourceNoise::Flicker),
            "white" => Ok(SourceNoise::White),
            "off" => Ok(SourceNoise::Off),
            _ => Err("expected flicker, white or off".into()),
        }
    }
    fn render(&self) -> String {
        match self {
            SourceNoise::Flicker => "flicker",
            SourceNoise::White => "white",
            SourceNoise::Off => "off",
        }
        .into()
    }
}

impl ConfigValue for GeometricRule {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s {
            "step" => Ok(GeometricRule::TwiceRayleighLength),
            "continuous" => Ok(GeometricRule::Continuous),
            _ => Err("expected step or continuous".into()),
        }
    }
    fn render(&self) -> String {
        match self {
            GeometricRule::TwiceRayleighLength => "step",
            GeometricRule::Continuous => "continuous",
        }
        .into()
    }
}

impl ConfigValue for ThresholdMode {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        if s == "preamble" {
            return Ok(ThresholdMode::Preamble);
        }
        match s.strip_prefix("fixed:") {
            Some(v) => f64::parse(v).map(ThresholdMode::Fixed),
            None => Err("expected preamble or fixed:<volts>".into()),
        }
    }
    fn render(&self) -> String {
        match self {
            ThresholdMode::Preamble => "preamble".into(),
            ThresholdMode::Fixed(v) => format!("fixed:{}", v.render()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaserSection {
    pub wavelength_nm: f64,
    pub p_out_w: f64,
    pub p_max_w: f64,
    pub md: f64,
    pub allow_overdrive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSection {
    pub gain: f64,
    pub responsivity_v_per_w: f64,
    pub saturation_w: f64,
    pub sigma_detector_v: f64,
    pub lowpass_cutoff_hz: f64,
    pub ac_coupling_cutoff_hz: f64,
    pub sample_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSection {
    pub sigma_source_v_at_ref: f64,
    pub ref_oa_db: f64,
    pub ref_p_out_w: f64,
    pub source_model: SourceNoise,
    pub flicker_f_lo_hz: f64,
    pub flicker_f_hi_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySection {
    pub tx_aperture_radius_m: f64,
    pub rx_aperture_radius_m: f64,
    /// `None` uses the transmitter aperture radius.
    pub beam_waist_m: Option<f64>,
    pub geometric_rule: GeometricRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtmosphereSection {
    pub visibility_km: f64,
    pub altitude_m: f64,
    pub wind_mps: f64,
    /// `None` uses the shipped table.
    pub absorption_csv: Option<PathBuf>,
    pub cn2_override: Option<f64>,
    pub hv_ground_cn2: f64,
    pub rayleigh_beta0_per_km: f64,
    pub rayleigh_exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub n_packets: u64,
    pub seed: u64,
    pub n_bits: u32,
    pub per_target: f64,
    pub oa_db: f64,
    /// `None` uses every available core.
    pub workers: Option<usize>,
    pub eye_packets: u64,
    pub threshold: ThresholdMode,
}

/// Every constant a command needs, in one ingestable record.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub laser: LaserSection,
    pub detector: DetectorSection,
    pub noise: NoiseSection,
    pub geometry: GeometrySection,
    pub atmosphere: AtmosphereSection,
    pub run: RunSection,
    /// Directory relative paths resolve against.
    pub base_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let hw = LinkHardware::default();
        let noise = NoiseProfile::default();
        let chain = DetectorChainConfig::default();
        let geometry = LinkGeometry::default();
        let rayleigh = RayleighParams::default();
        Self {
            laser: LaserSection {
                wavelength_nm: 4720.0,
                p_out_w: hw.p_out_w,
                p_max_w: hw.p_max_w,
                md: hw.md,
                allow_overdrive: hw.allow_overdrive,
            },
            detector: DetectorSection {
                gain: hw.gain,
                responsivity_v_per_w: hw.responsivity_v_per_w,
                saturation_w: hw.saturation_w,
                sigma_detector_v: noise.sigma_detector_v,
                lowpass_cutoff_hz: chain.lowpass_cutoff_hz,
                ac_coupling_cutoff_hz: chain.ac_coupling_cutoff_hz,
                sample_rate_hz: chain.sample_rate_hz,
            },
            noise: NoiseSection {
                sigma_source_v_at_ref: noise.sigma_source_v_at_ref,
                ref_oa_db: noise.ref_oa_db,
                ref_p_out_w: noise.ref_p_out_w,
                source_model: SourceNoise::Flicker,
                flicker_f_lo_hz: crate::sim::DEFAULT_FLICKER_BAND_HZ.0,
                flicker_f_hi_hz: crate::sim::DEFAULT_FLICKER_BAND_HZ.1,
            },
            geometry: GeometrySection {
                tx_aperture_radius_m: geometry.tx_aperture_radius_m,
                rx_aperture_radius_m: geometry.rx_aperture_radius_m,
                beam_waist_m: None,
                geometric_rule: GeometricRule::default(),
            },
            atmosphere: AtmosphereSection {
                visibility_km: 1.0,
                altitude_m: 50.0,
                wind_mps: 30.0 / 3.6,
                absorption_csv: None,
                cn2_override: None,
                hv_ground_cn2: HV_GROUND_CN2,
                rayleigh_beta0_per_km: rayleigh.beta0_per_km,
                rayleigh_exponent: rayleigh.exponent,
            },
            run: RunSection {
                n_packets: 62_500,
                seed: 1,
                n_bits: DEFAULT_PACKET_BITS,
                per_target: ERROR_FREE_PER,
                oa_db: 13.0,
                workers: None,
                eye_packets: 4,
                threshold: ThresholdMode::Preamble,
            },
            base_dir: None,
        }
    }
}

macro_rules! config_keys {
    ($($key:literal => $section:ident . $field:ident),* $(,)?) => {
        impl ScenarioConfig {
            /// Every accepted key, in serialization order.
            pub const KEYS: &'static [&'static str] = &[$($key),*];

            /// Sets one key from its textual value.
            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                let value = value.trim();
                let invalid = |reason: String| ConfigError::InvalidValue {
                    key: key.to_string(),
                    value: value.to_string(),
                    reason,
                };
                match key {
                    $($key => self.$section.$field = ConfigValue::parse(value).map_err(invalid)?,)*
                    _ => return Err(ConfigError::UnknownKey(key.to_string())),
                }
                Ok(())
            }

            /// Textual value of one key.
            pub fn get(&self, key: &str) -> Result<String> {
                match key {
                    $($key => Ok(self.$section.$field.render()),)*
                    _ => Err(ConfigError::UnknownKey(key.to_string())),
                }
            }
        }
    };
}

config_keys! {
    "laser.wavelength_nm" => laser.wavelength_nm,
    "laser.p_out_w" => laser.p_out_w,
    "laser.p_max_w" => laser.p_max_w,
    "laser.md" => laser.md,
    "laser.allow_overdrive" => laser.allow_overdrive,
    "detector.gain" => detector.gain,
    "detector.responsivity_v_per_w" => detector.responsivity_v_per_w,
    "detector.saturation_w" => detector.saturation_w,
    "detector.sigma_detector_v" => detector.sigma_detector_v,
    "detector.lowpass_cutoff_hz" => detector.lowpass_cutoff_hz,
    "detector.ac_coupling_cutoff_hz" => detector.ac_coupling_cutoff_hz,
    "detector.sample_rate_hz" => detector.sample_rate_hz,
    "noise.sigma_source_v_at_ref" => noise.sigma_source_v_at_ref,
    "noise.ref_oa_db" => noise.ref_oa_db,
    "noise.ref_p_out_w" => noise.ref_p_out_w,
    "noise.source_model" => noise.source_model,
    "noise.flicker_f_lo_hz" => noise.flicker_f_lo_hz,
    "noise.flicker_f_hi_hz" => noise.flicker_f_hi_hz,
    "geometry.tx_aperture_radius_m" => geometry.tx_aperture_radius_m,
    "geometry.rx_aperture_radius_m" => geometry.rx_aperture_radius_m,
    "geometry.beam_waist_m" => geometry.beam_waist_m,
    "geometry.geometric_rule" => geometry.geometric_rule,
    "atmosphere.visibility_km" => atmosphere.visibility_km,
    "atmosphere.altitude_m" => atmosphere.altitude_m,
    "atmosphere.wind_mps" => atmosphere.wind_mps,
    "atmosphere.absorption_csv" => atmosphere.absorption_csv,
    "atmosphere.cn2_override" => atmosphere.cn2_override,
    "atmosphere.hv_ground_cn2" => atmosphere.hv_ground_cn2,
    "atmosphere.rayleigh_beta0_per_km" => atmosphere.rayleigh_beta0_per_km,
    "atmosphere.rayleigh_exponent" => atmosphere.rayleigh_exponent,
    "run.n_packets" => run.n_packets,
    "run.seed" => run.seed,
    "run.n_bits" => run.n_bits,
    "run.per_target" => run.per_target,
    "run.oa_db" => run.oa_db,
    "run.workers" => run.workers,
    "run.eye_packets" => run.eye_packets,
    "run.threshold" => run.threshold,
}

impl ScenarioConfig {
    /// Built-in defaults: the reference hardware, noise calibration and
    /// channel constants.
    pub fn reference() -> Self {
        Self::default()
    }

    /// Parses text over the defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected `section.key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey(key.to_string()));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Reads a file; relative paths inside it resolve against its directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Applies a `section.key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax {
                line: 0,
                message: format!("override `{assignment}` is not key=value"),
            })?;
        self.set(key.trim(), value)
    }

    pub fn hardware(&self) -> LinkHardware {
        LinkHardware {
            gain: self.detector.gain,
            responsivity_v_per_w: self.detector.responsivity_v_per_w,
            p_out_w: self.laser.p_out_w,
            p_max_w: self.laser.p_max_w,
            md: self.laser.md,
            saturation_w: self.detector.saturation_w,
            allow_overdrive: self.laser.allow_overdrive,
        }
    }

    pub fn noise_profile(&self) -> NoiseProfile {
        NoiseProfile {
            sigma_detector_v: self.detector.sigma_detector_v,
            sigma_source_v_at_ref: self.noise.sigma_source_v_at_ref,
            ref_oa_db: self.noise.ref_oa_db,
            ref_p_out_w: self.noise.ref_p_out_w,
        }
    }

    pub fn chain(&self) -> DetectorChainConfig {
        DetectorChainConfig {
            responsivity_v_per_w: self.detector.responsivity_v_per_w,
            ac_gain: self.detector.gain,
            saturation_w: self.detector.saturation_w,
            lowpass_cutoff_hz: self.detector.lowpass_cutoff_hz,
            ac_coupling_cutoff_hz: self.detector.ac_coupling_cutoff_hz,
            sample_rate_hz: self.detector.sample_rate_hz,
            ..DetectorChainConfig::default()
        }
    }

    pub fn geometry(&self) -> LinkGeometry {
        let g = LinkGeometry::new(
            self.geometry.tx_aperture_radius_m,
            self.geometry.rx_aperture_radius_m,
        );
        match self.geometry.beam_waist_m {
            Some(w) => g.with_beam_waist(w),
            None => g,
        }
    }

    pub fn channel_model(&self) -> ChannelModel {
        ChannelModel {
            rayleigh: RayleighParams {
                beta0_per_km: self.atmosphere.rayleigh_beta0_per_km,
                exponent: self.atmosphere.rayleigh_exponent,
            },
            hv_ground_cn2: self.atmosphere.hv_ground_cn2,
            geometric_rule: self.geometry.geometric_rule,
            ..ChannelModel::default()
        }
    }

    /// The absorption CSV path as it will be opened.
    pub fn absorption_path(&self) -> Option<PathBuf> {
        self.atmosphere
            .absorption_csv
            .as_ref()
            .map(|p| match &self.base_dir {
                Some(base) if p.is_relative() => base.join(p),
                _ => p.clone(),
            })
    }

    pub fn absorption_table(&self) -> Result<AbsorptionTable> {
        match self.absorption_path() {
            None => Ok(AbsorptionTable::shipped_default()),
            Some(path) => AbsorptionTable::from_csv_path(&path).map_err(|e| ConfigError::Invalid {
                context: "atmosphere.absorption_csv",
                message: format!("{}: {e}", path.display()),
            }),
        }
    }

    pub fn atmosphere(&self) -> Result<Atmosphere> {
        Ok(Atmosphere {
            visibility_km: self.atmosphere.visibility_km,
            altitude_m: self.atmosphere.altitude_m,
            wind_mps: self.atmosphere.wind_mps,
            cn2_override: self.atmosphere.cn2_override,
            absorption: self.absorption_table()?,
        })
    }

    /// Monte Carlo scenario at attenuation `oa_db` with modulation depth `md`.
    pub fn scenario(&self, oa_db: f64, md: f64) -> Scenario {
        let mut s = Scenario::new(
            self.hardware().with_md(md),
            self.noise_profile(),
            oa_db,
            self.run.n_packets,
            self.run.seed,
        );
        s.chain = self.chain();
        s.flicker_band_hz = (self.noise.flicker_f_lo_hz, self.noise.flicker_f_hi_hz);
        s.source_noise = self.noise.source_model;
        s.threshold = self.run.threshold;
        s.eye_packets = self.run.eye_packets;
        s.workers = self.run.workers;
        s
    }

    /// Checks every section against its domain rules.
    pub fn validate(&self) -> Result<()> {
        let wrap = |context: &'static str| {
            move |e: &dyn fmt::Display| ConfigError::Invalid {
                context,
                message: e.to_string(),
            }
        };
        self.hardware()
            .validate()
            .map_err(|e| wrap("laser/detector")(&e))?;
        self.noise_profile()
            .validate()
            .map_err(|e| wrap("noise")(&e))?;
        self.geometry()
            .validate()
            .map_err(|e| wrap("geometry")(&e))?;
        self.scenario(self.run.oa_db, self.laser.md)
            .validate()
            .map_err(|e| wrap("detector/noise/run")(&e))?;
        self.atmosphere()?
            .validate()
            .map_err(|e| wrap("atmosphere")(&e))?;
        if self.run.n_bits == 0 {
            return Err(wrap("run")(&"n_bits must be at least 1"));
        }
        if !(self.run.per_target > 0.0 && self.run.per_target < 1.0) {
            return Err(wrap("run")(&"per_target must lie in (0, 1)"));
        }
        if !(self.laser.wavelength_nm > 0.0 && self.laser.wavelength_nm.is_finite()) {
            return Err(wrap("laser")(&"wavelength_nm must be positive"));
        }
        Ok(())
    }
}

impl fmt::Display for ScenarioConfig {
    /// Every key, grouped by section.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut section = "";
        for key in Self::KEYS {
            let this = key.split('.').next().unwrap_or_default();
            if this != section {
                if !section.is_empty() {
                    writeln!(f)?;
                }
                section = this;
            }
            let value = self.get(key).map_err(|_| fmt::Error)?;
            if value.is_empty() {
                writeln!(f, "{key} =")?;
            } else {
                writeln!(f, "{key} = {value}")?;
            }
        }
        Ok(())
    }
}
