//! Distance-dependent attenuation of a horizontal free-space optical path.
//!
//! The total loss is split into five mechanisms, each reported separately in
//! an [`AttenuationBreakdown`]:
//!
//! * aerosol (Mie) scattering from the Kruse visibility model,
//! * molecular (Rayleigh) scattering from a calibrated power law,
//! * molecular and aerosol absorption, interpolated from an ingested table,
//! * scintillation loss driven by a Hufnagel-Valley `Cn²`,
//! * geometric spreading of a Gaussian beam beyond twice its Rayleigh length.
//!
//! [`ChannelModel`] carries the tunable model constants; the free functions
//! evaluate the same formulas with the default constants.

mod absorption;
mod geometry;
mod range;
mod scattering;
mod turbulence;

pub use absorption::AbsorptionTable;
pub use geometry::{geometric_attenuation_db, rayleigh_length_m, GeometricRule, LinkGeometry};
pub use range::{LinkRange, RangeSolver};
pub use scattering::{
    aerosol_scattering_db_per_km, kruse_exponent, rayleigh_scattering_db_per_km, RayleighParams,
    VISIBILITY_EXTINCTION,
};
pub use turbulence::{hufnagel_valley_cn2, scintillation_db, HV_GROUND_CN2};

use serde::Serialize;
use thiserror::Error;

/// 10·log₁₀(e): converts a natural extinction coefficient (1/km) to dB/km.
pub const DB_PER_NEPER_POWER: f64 = 4.342_944_819_032_518;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("absorption table is empty")]
    EmptyTable,
    #[error(
        "wavelength {wavelength_nm} nm outside absorption table range [{min_nm}, {max_nm}] nm"
    )]
    OutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },
    #[error("invalid absorption table: {0}")]
    InvalidTable(String),
    #[error("absorption csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("absorption csv: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ChannelError::NonPositive { what, value })
    }
}

pub(crate) fn require_non_negative(what: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ChannelError::Negative { what, value })
    }
}

/// Atmospheric state along the path.
#[derive(Debug, Clone, PartialEq)]
pub struct Atmosphere {
    pub visibility_km: f64,
    pub altitude_m: f64,
    pub wind_mps: f64,
    /// When set, replaces the Hufnagel-Valley estimate.
    pub cn2_override: Option<f64>,
    pub absorption: AbsorptionTable,
}

impl Atmosphere {
    pub fn new(visibility_km: f64, absorption: AbsorptionTable) -> Self {
        Self {
            visibility_km,
            altitude_m: 50.0,
            wind_mps: 30.0 / 3.6,
            cn2_override: None,
            absorption,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("visibility_km", self.visibility_km)?;
        require_non_negative("altitude_m", self.altitude_m)?;
        require_non_negative("wind_mps", self.wind_mps)?;
        if let Some(cn2) = self.cn2_override {
            require_positive("cn2_override", cn2)?;
        }
        Ok(())
    }

    /// Effective `Cn²` (m^-2/3) with the given Hufnagel-Valley ground term.
    pub fn cn2_with_ground(&self, ground_cn2: f64) -> Result<f64> {
        match self.cn2_override {
            Some(cn2) => require_positive("cn2_override", cn2),
            None => turbulence::hufnagel_valley_cn2_with_ground(
                self.altitude_m,
                self.wind_mps,
                ground_cn2,
            ),
        }
    }

    pub fn cn2(&self) -> Result<f64> {
        self.cn2_with_ground(HV_GROUND_CN2)
    }
}

/// Per-mechanism losses (dB) at one distance. `total_db` is the plain sum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AttenuationBreakdown {
    pub aerosol_scattering_db: f64,
    pub rayleigh_scattering_db: f64,
    pub absorption_db: f64,
    pub scintillation_db: f64,
    pub geometric_db: f64,
    pub total_db: f64,
}

impl AttenuationBreakdown {
    fn from_parts(
        aerosol_scattering_db: f64,
        rayleigh_scattering_db: f64,
        absorption_db: f64,
        scintillation_db: f64,
        geometric_db: f64,
    ) -> Self {
        Self {
            aerosol_scattering_db,
            rayleigh_scattering_db,
            absorption_db,
            scintillation_db,
            geometric_db,
            total_db: aerosol_scattering_db
                + rayleigh_scattering_db
                + absorption_db
                + scintillation_db
                + geometric_db,
        }
    }
}

/// Tunable constants of the channel model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub rayleigh: RayleighParams,
    /// Ground-level term `A` of the Hufnagel-Valley profile (m^-2/3).
    pub hv_ground_cn2: f64,
    pub geometric_rule: GeometricRule,
    pub solver: RangeSolver,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            rayleigh: RayleighParams::default(),
            hv_ground_cn2: HV_GROUND_CN2,
            geometric_rule: GeometricRule::default(),
            solver: RangeSolver::default(),
        }
    }
}

impl ChannelModel {
    pub fn total_attenuation(
        &self,
        atmosphere: &Atmosphere,
        geometry: &LinkGeometry,
        wavelength_nm: f64,
        distance_m: f64,
    ) -> Result<AttenuationBreakdown> {
        let coefficients = self.coefficients(atmosphere, geometry, wavelength_nm)?;
        coefficients.at(distance_m)
    }

    /// Largest distance whose total loss stays within `budget_db`.
    pub fn max_link_length(
        &self,
        atmosphere: &Atmosphere,
        geometry: &LinkGeometry,
        wavelength_nm: f64,
        budget_db: f64,
    ) -> Result<LinkRange> {
        require_positive("budget_db", budget_db)?;
        let coefficients = self.coefficients(atmosphere, geometry, wavelength_nm)?;
        self.solver
            .solve(|d| coefficients.at(d).map(|b| b.total_db), budget_db)
    }

    /// Evaluates everything that does not depend on distance once.
    pub fn coefficients<'a>(
        &'a self,
        atmosphere: &Atmosphere,
        geometry: &'a LinkGeometry,
        wavelength_nm: f64,
    ) -> Result<PathCoefficients<'a>> {
        atmosphere.validate()?;
        geometry.validate()?;
        require_positive("wavelength_nm", wavelength_nm)?;
        Ok(PathCoefficients {
            aerosol_db_per_km: aerosol_scattering_db_per_km(
                wavelength_nm,
                atmosphere.visibility_km,
            )?,
            rayleigh_db_per_km: self.rayleigh.db_per_km(wavelength_nm)?,
            absorption_db_per_km: atmosphere.absorption.alpha_db_per_km(wavelength_nm)?,
            cn2: atmosphere.cn2_with_ground(self.hv_ground_cn2)?,
            wavelength_nm,
            geometry,
            rule: self.geometric_rule,
        })
    }
}

/// Distance-independent part of a path evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PathCoefficients<'a> {
    pub aerosol_db_per_km: f64,
    pub rayleigh_db_per_km: f64,
    pub absorption_db_per_km: f64,
    pub cn2: f64,
    wavelength_nm: f64,
    geometry: &'a LinkGeometry,
    rule: GeometricRule,
}

impl PathCoefficients<'_> {
    pub fn at(&self, distance_m: f64) -> Result<AttenuationBreakdown> {
        require_non_negative("distance_m", distance_m)?;
        if distance_m == 0.0 {
            return Ok(AttenuationBreakdown::default());
        }
        let km = distance_m / 1000.0;
        Ok(AttenuationBreakdown::from_parts(
            self.aerosol_db_per_km * km,
            self.rayleigh_db_per_km * km,
            self.absorption_db_per_km * km,
            scintillation_db(self.wavelength_nm, distance_m, self.cn2)?,
            geometry::geometric_db_with_rule(
                self.geometry,
                self.wavelength_nm,
                distance_m,
                self.rule,
            )?,
        ))
    }
}

/// Loss breakdown with the default model constants.
pub fn total_attenuation(
    atmosphere: &Atmosphere,
    geometry: &LinkGeometry,
    wavelength_nm: f64,
    distance_m: f64,
) -> Result<AttenuationBreakdown> {
    ChannelModel::default().total_attenuation(atmosphere, geometry, wavelength_nm, distance_m)
}

/// Maximum link length with the default model constants and solver.
pub fn max_link_length_m(
    atmosphere: &Atmosphere,
    geometry: &LinkGeometry,
    wavelength_nm: f64,
    budget_db: f64,
) -> Result<LinkRange> {
    ChannelModel::default().max_link_length(atmosphere, geometry, wavelength_nm, budget_db)
}
