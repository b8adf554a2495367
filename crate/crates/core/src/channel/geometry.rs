use std::f64::consts::PI;

use super::{require_non_negative, require_positive, Result};

/// Transmitter and receiver optics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub tx_aperture_radius_m: f64,
    pub rx_aperture_radius_m: f64,
    pub beam_waist_m: f64,
}

impl Default for LinkGeometry {
    fn default() -> Self {
        Self::new(0.10, 0.10)
    }
}

impl LinkGeometry {
    /// Beam waist defaults to the transmitter aperture radius.
    pub fn new(tx_aperture_radius_m: f64, rx_aperture_radius_m: f64) -> Self {
        Self {
            tx_aperture_radius_m,
            rx_aperture_radius_m,
            beam_waist_m: tx_aperture_radius_m,
        }
    }

    pub fn with_beam_waist(mut self, beam_waist_m: f64) -> Self {
        self.beam_waist_m = beam_waist_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("tx_aperture_radius_m", self.tx_aperture_radius_m)?;
        require_positive("rx_aperture_radius_m", self.rx_aperture_radius_m)?;
        require_positive("beam_waist_m", self.beam_waist_m)?;
        Ok(())
    }

    pub fn capture_area_m2(&self) -> f64 {
        PI * self.rx_aperture_radius_m * self.rx_aperture_radius_m
    }
}

/// How geometric loss is switched on along the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeometricRule {
    /// No loss up to twice the Rayleigh length, beam/aperture area ratio
    /// beyond it. Produces a step at `2·z_R`.
    #[default]
    TwiceRayleighLength,
    /// Area ratio everywhere, clamped at zero.
    Continuous,
}

/// Rayleigh length `π·w₀²/λ` in metres.
pub fn rayleigh_length_m(beam_waist_m: f64, wavelength_nm: f64) -> Result<f64> {
    let w0 = require_positive("beam_waist_m", beam_waist_m)?;
    let lambda_m = require_positive("wavelength_nm", wavelength_nm)? * 1e-9;
    Ok(PI * w0 * w0 / lambda_m)
}

/// Geometric spreading loss (dB) with the twice-Rayleigh-length onset rule.
pub fn geometric_attenuation_db(
    geometry: &LinkGeometry,
    wavelength_nm: f64,
    distance_m: f64,
) -> Result<f64> {
    geometric_db_with_rule(
        geometry,
        wavelength_nm,
        distance_m,
        GeometricRule::TwiceRayleighLength,
    )
}

pub(crate) fn geometric_db_with_rule(
    geometry: &LinkGeometry,
    wavelength_nm: f64,
    distance_m: f64,
    rule: GeometricRule,
) -> Result<f64> {
    geometry.validate()?;
    let d = require_non_negative("distance_m", distance_m)?;
    let zr = rayleigh_length_m(geometry.beam_waist_m, wavelength_nm)?;
    if rule == GeometricRule::TwiceRayleighLength && d <= 2.0 * zr {
        return Ok(0.0);
    }
    let w = geometry.beam_waist_m * (1.0 + (d / zr).powi(2)).sqrt();
    let beam_area = PI * w * w;
    let capture = geometry.capture_area_m2();
    if beam_area <= capture {
        Ok(0.0)
    } else {
        Ok(10.0 * (beam_area / capture).log10())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_length_reference_values() {
        assert_close!(rayleigh_length_m(0.10, 4720.0).unwrap(), 6655.92, 0.01);
        assert_close!(rayleigh_length_m(0.10, 1557.7).unwrap(), 20168.15, 0.01);
        let a = rayleigh_length_m(0.05, 4000.0).unwrap();
        let b = rayleigh_length_m(0.10, 4000.0).unwrap();
        assert_close!(b / a, 4.0, 1e-12);
        assert!(rayleigh_length_m(0.0, 4000.0).is_err());
    }

    #[test]
    fn geometric_reference_values() {
        let g = LinkGeometry::default();
        assert_eq!(geometric_attenuation_db(&g, 4720.0, 0.0).unwrap(), 0.0);
        assert_close!(
            geometric_attenuation_db(&g, 4720.0, 20_000.0).unwrap(),
            10.0126,
            1e-4
        );
        let zr = rayleigh_length_m(0.1, 4720.0).unwrap();
        assert_eq!(geometric_attenuation_db(&g, 4720.0, 2.0 * zr).unwrap(), 0.0);
        let just_past = geometric_attenuation_db(&g, 4720.0, 2.0 * zr * (1.0 + 1e-12)).unwrap();
        assert_close!(just_past, 10.0 * 5f64.log10(), 1e-9);
    }

    #[test]
    fn continuous_rule_has_no_step() {
        let g = LinkGeometry::default();
        let zr = rayleigh_length_m(0.1, 4720.0).unwrap();
        let before =
            geometric_db_with_rule(&g, 4720.0, 2.0 * zr - 1.0, GeometricRule::Continuous).unwrap();
        let after =
            geometric_db_with_rule(&g, 4720.0, 2.0 * zr + 1.0, GeometricRule::Continuous).unwrap();
        assert!(after - before < 0.01);
        assert_close!(
            geometric_db_with_rule(&g, 4720.0, 0.0, GeometricRule::Continuous).unwrap(),
            0.0,
            0.0
        );
    }

    #[test]
    fn large_receiver_clamps_to_zero() {
        let g = LinkGeometry::new(0.1, 5.0);
        assert_eq!(geometric_attenuation_db(&g, 4720.0, 20_000.0).unwrap(), 0.0);
    }

    #[test]
    fn defaults_follow_tx_aperture() {
        let g = LinkGeometry::new(0.07, 0.1);
        assert_eq!(g.beam_waist_m, 0.07);
        assert!(LinkGeometry::new(0.0, 0.1).validate().is_err());
    }
}
