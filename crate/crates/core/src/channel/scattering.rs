use super::{require_positive, Result, DB_PER_NEPER_POWER};

/// Reference wavelength of the visibility definition (green light).
pub const VISIBILITY_WAVELENGTH_NM: f64 = 550.0;

/// Extinction over one visibility length: `ln(1/0.02)`, i.e. 2 % residual
/// transmission at 550 nm. Usually rounded to 3.91.
pub const VISIBILITY_EXTINCTION: f64 = 3.912_023_005_428_146;

/// Kruse size-distribution exponent `p` for a visibility in km.
///
/// Exactly 6 km and exactly 50 km fall in the lower-visibility branch.
pub fn kruse_exponent(visibility_km: f64) -> Result<f64> {
    let v = require_positive("visibility_km", visibility_km)?;
    Ok(if v > 50.0 {
        1.6
    } else if v > 6.0 {
        1.3
    } else {
        0.585 * v.cbrt()
    })
}

/// Aerosol (Mie) scattering coefficient in dB/km from the Kruse model.
pub fn aerosol_scattering_db_per_km(wavelength_nm: f64, visibility_km: f64) -> Result<f64> {
    let lambda = require_positive("wavelength_nm", wavelength_nm)?;
    let p = kruse_exponent(visibility_km)?;
    Ok(DB_PER_NEPER_POWER
        * (VISIBILITY_EXTINCTION / visibility_km)
        * (lambda / VISIBILITY_WAVELENGTH_NM).powf(-p))
}

/// Power-law molecular scattering `β₀·(550/λ)^q`, anchored at 550 nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighParams {
    /// Sea-level extinction at 550 nm (1/km).
    pub beta0_per_km: f64,
    pub exponent: f64,
}

impl Default for RayleighParams {
    fn default() -> Self {
        Self {
            beta0_per_km: 0.0116,
            exponent: 4.09,
        }
    }
}

impl RayleighParams {
    pub fn db_per_km(&self, wavelength_nm: f64) -> Result<f64> {
        let lambda = require_positive("wavelength_nm", wavelength_nm)?;
        Ok(DB_PER_NEPER_POWER
            * self.beta0_per_km
            * (VISIBILITY_WAVELENGTH_NM / lambda).powf(self.exponent))
    }
}

/// Molecular scattering in dB/km with the default sea-level calibration.
pub fn rayleigh_scattering_db_per_km(wavelength_nm: f64) -> Result<f64> {
    RayleighParams::default().db_per_km(wavelength_nm)
}
