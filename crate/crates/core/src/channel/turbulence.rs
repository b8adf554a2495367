use std::f64::consts::PI;

use super::{require_non_negative, require_positive, Result};

/// Default ground-level term `A` of the Hufnagel-Valley profile (m^-2/3).
pub const HV_GROUND_CN2: f64 = 1.7e-14;

/// Hufnagel-Valley refractive-index structure parameter at altitude `h` (m)
/// for an rms upper-atmosphere wind `v` (m/s).
pub fn hufnagel_valley_cn2(altitude_m: f64, wind_mps: f64) -> Result<f64> {
    hufnagel_valley_cn2_with_ground(altitude_m, wind_mps, HV_GROUND_CN2)
}

pub(crate) fn hufnagel_valley_cn2_with_ground(
    altitude_m: f64,
    wind_mps: f64,
    ground_cn2: f64,
) -> Result<f64> {
    let h = require_non_negative("altitude_m", altitude_m)?;
    let v = require_non_negative("wind_mps", wind_mps)?;
    let a = require_positive("hv_ground_cn2", ground_cn2)?;
    let upper = 0.00594 * (v / 27.0).powi(2) * (1e-5 * h).powi(10) * (-h / 1000.0).exp();
    let tropo = 2.7e-16 * (-h / 1500.0).exp();
    let ground = a * (-h / 100.0).exp();
    Ok(upper + tropo + ground)
}

/// Scintillation loss (dB) over a path of `link_m` metres.
pub fn scintillation_db(wavelength_nm: f64, link_m: f64, cn2: f64) -> Result<f64> {
    let lambda_m = require_positive("wavelength_nm", wavelength_nm)? * 1e-9;
    let l = require_positive("link_m", link_m)?;
    let cn2 = require_positive("cn2", cn2)?;
    let k = 2.0 * PI / lambda_m;
    Ok(2.0 * (23.17 * k.powf(7.0 / 6.0) * cn2 * l.powf(11.0 / 6.0)).sqrt())
}
