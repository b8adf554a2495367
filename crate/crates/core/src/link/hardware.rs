use super::{require_positive, LinkError, Result};

/// Laser, detector, and modulation constants of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkHardware {
    /// AC transimpedance gain (dimensionless).
    pub gain: f64,
    pub responsivity_v_per_w: f64,
    /// Emitted optical power at the operating point.
    pub p_out_w: f64,
    /// Maximum power with stable single-mode emission.
    pub p_max_w: f64,
    /// Modulation depth: peak-to-peak over mean optical power.
    pub md: f64,
    /// Incident power where the detector leaves its linear regime.
    pub saturation_w: f64,
    /// Allows `p_out_w > p_max_w`.
    pub allow_overdrive: bool,
}

impl Default for LinkHardware {
    fn default() -> Self {
        Self {
            gain: 26.5,
            responsivity_v_per_w: 2793.0,
            p_out_w: 0.0129,
            p_max_w: 0.021,
            md: 1.0,
            saturation_w: 0.0012,
            allow_overdrive: false,
        }
    }
}

impl LinkHardware {
    pub fn with_md(mut self, md: f64) -> Self {
        self.md = md;
        self
    }

    pub fn with_p_out(mut self, p_out_w: f64) -> Self {
        self.p_out_w = p_out_w;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("gain", self.gain)?;
        require_positive("responsivity_v_per_w", self.responsivity_v_per_w)?;
        require_positive("p_out_w", self.p_out_w)?;
        require_positive("p_max_w", self.p_max_w)?;
        require_positive("saturation_w", self.saturation_w)?;
        if !(self.md > 0.0 && self.md <= 1.0) {
            return Err(LinkError::OutOfRange {
                what: "md",
                value: self.md,
                range: "(0, 1]",
            });
        }
        if self.p_out_w > self.p_max_w && !self.allow_overdrive {
            return Err(LinkError::Overdriven {
                p_out_w: self.p_out_w,
                p_max_w: self.p_max_w,
            });
        }
        Ok(())
    }

    /// Volts per watt of optical swing at the receiver output (G·R).
    pub fn volts_per_watt(&self) -> f64 {
        self.gain * self.responsivity_v_per_w
    }

    /// Received peak-to-peak swing for emitted power `p_w` after `oa_db`.
    pub fn received_swing_v(&self, p_w: f64, oa_db: f64) -> f64 {
        self.volts_per_watt() * self.md * p_w * 10f64.powf(-oa_db / 10.0)
    }
}

/// Receiver noise amplitudes.
///
/// The detector floor is constant; source intensity noise rides on the
/// carrier and scales linearly with received optical power, calibrated at
/// one reference operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseProfile {
    pub sigma_detector_v: f64,
    pub sigma_source_v_at_ref: f64,
    pub ref_oa_db: f64,
    pub ref_p_out_w: f64,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        Self {
            sigma_detector_v: 0.0023,
            sigma_source_v_at_ref: 0.040,
            ref_oa_db: 13.0,
            ref_p_out_w: 0.0129,
        }
    }
}

impl NoiseProfile {
    pub fn validate(&self) -> Result<()> {
        require_positive("sigma_detector_v", self.sigma_detector_v)?;
        require_positive("sigma_source_v_at_ref", self.sigma_source_v_at_ref)?;
        require_positive("ref_p_out_w", self.ref_p_out_w)?;
        if !self.ref_oa_db.is_finite() {
            return Err(LinkError::OutOfRange {
                what: "ref_oa_db",
                value: self.ref_oa_db,
                range: "finite reals",
            });
        }
        Ok(())
    }

    pub fn source_sigma_v(&self, oa_db: f64, p_out_w: f64) -> f64 {
        self.sigma_source_v_at_ref
            * 10f64.powf(-(oa_db - self.ref_oa_db) / 10.0)
            * (p_out_w / self.ref_p_out_w)
    }

    /// Detector and source noise added in quadrature.
    pub fn total_sigma_v(&self, oa_db: f64, p_out_w: f64) -> f64 {
        self.sigma_detector_v
            .hypot(self.source_sigma_v(oa_db, p_out_w))
    }

    /// Attenuation where source and detector noise are equal.
    pub fn crossover_oa_db(&self, p_out_w: f64) -> f64 {
        self.ref_oa_db
            + 10.0
                * (self.sigma_source_v_at_ref * (p_out_w / self.ref_p_out_w)
                    / self.sigma_detector_v)
                    .log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardware_validation() {
        assert!(LinkHardware::default().validate().is_ok());
        assert!(LinkHardware::default().with_md(0.0).validate().is_err());
        assert!(LinkHardware::default().with_md(1.2).validate().is_err());
        let hot = LinkHardware::default().with_p_out(0.03);
        assert!(matches!(hot.validate(), Err(LinkError::Overdriven { .. })));
        let allowed = LinkHardware {
            allow_overdrive: true,
            ..hot
        };
        assert!(allowed.validate().is_ok());
    }

    #[test]
    fn source_noise_scaling() {
        let n = NoiseProfile::default();
        assert_close!(n.source_sigma_v(13.0, 0.0129), 0.040, 1e-15);
        assert_close!(n.source_sigma_v(23.0, 0.0129), 0.004, 1e-15);
        assert_close!(n.source_sigma_v(13.0, 0.0258), 0.080, 1e-15);
        // 13 + 10·log10(40/2.3)
        assert_close!(n.crossover_oa_db(0.0129), 25.403_321_553, 1e-8);
        let at = n.crossover_oa_db(0.0129);
        assert_close!(n.source_sigma_v(at, 0.0129), n.sigma_detector_v, 1e-15);
    }
}
