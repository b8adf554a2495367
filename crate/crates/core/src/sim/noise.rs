use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Result, SimError};

/// White Gaussian samples, mean 0, standard deviation `sigma_v`.
pub fn gen_awgn(sigma_v: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(sigma_v >= 0.0 && sigma_v.is_finite()) || n == 0 {
        return Err(SimError::invalid("awgn", format!("sigma {sigma_v}, n {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| sigma_v * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// Bank of unit-variance Ornstein-Uhlenbeck sources with corners at
/// `f_lo·2^k` up to `f_hi`. Their sum has a 1/f power spectrum between the
/// corners; the output is scaled to standard deviation `sigma_v`.
#[derive(Debug, Clone)]
pub struct FlickerBank {
    rho: Vec<f64>,
    innovation: Vec<f64>,
    /// One-step decay per source, kept for arbitrary strides.
    log_rho: Vec<f64>,
    state: Vec<f64>,
    scale: f64,
}

impl FlickerBank {
    pub fn new(sigma_v: f64, band_hz: (f64, f64), sample_rate_hz: f64) -> Result<Self> {
        let (f_lo, f_hi) = band_hz;
        if !(f_lo > 0.0 && f_lo < f_hi && f_hi <= 0.5 * sample_rate_hz) {
            return Err(SimError::invalid(
                "flicker_band_hz",
                format!(
                    "need 0 < f_lo < f_hi <= Nyquist ({} Hz), got ({f_lo}, {f_hi})",
                    0.5 * sample_rate_hz
                ),
            ));
        }
        if !(sigma_v >= 0.0 && sigma_v.is_finite()) {
            return Err(SimError::invalid("sigma_v", format!("got {sigma_v}")));
        }
        let corners: Vec<f64> = std::iter::successors(Some(f_lo), |f| Some(2.0 * f))
            .take_while(|&f| f <= f_hi * (1.0 + 1e-12))
            .collect();
        let log_rho: Vec<f64> = corners
            .iter()
            .map(|f| -2.0 * PI * f / sample_rate_hz)
            .collect();
        let rho: Vec<f64> = log_rho.iter().map(|l| l.exp()).collect();
        let innovation = rho.iter().map(|r| (1.0 - r * r).sqrt()).collect();
        Ok(Self {
            scale: sigma_v / (corners.len() as f64).sqrt(),
            state: vec![0.0; corners.len()],
            rho,
            innovation,
            log_rho,
        })
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    /// Draws every source from its stationary distribution.
    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for x in &mut self.state {
            *x = rng.sample(StandardNormal);
        }
    }

    pub fn value(&self) -> f64 {
        self.scale * self.state.iter().sum::<f64>()
    }

    /// Advances one sample and returns the new output.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let mut sum = 0.0;
        for ((x, r), q) in self.state.iter_mut().zip(&self.rho).zip(&self.innovation) {
            *x = r * *x + q * rng.sample::<f64, _>(StandardNormal);
            sum += *x;
        }
        self.scale * sum
    }

    /// Advances `k` samples exactly, drawing one innovation per source.
    pub fn advance<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> f64 {
        if k == 1 {
            return self.step(rng);
        }
        let mut sum = 0.0;
        for (x, l) in self.state.iter_mut().zip(&self.log_rho) {
            let rk = (l * k as f64).exp();
            *x = rk * *x + (1.0 - rk * rk).sqrt() * rng.sample::<f64, _>(StandardNormal);
            sum += *x;
        }
        self.scale * sum
    }
}

/// 1/f noise over `band_hz`, rescaled to sample standard deviation `sigma_v`.
pub fn gen_flicker(
    sigma_v: f64,
    band_hz: (f64, f64),
    n: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(SimError::invalid(
            "n",
            format!("need at least 2 samples, got {n}"),
        ));
    }
    let mut bank = FlickerBank::new(1.0, band_hz, sample_rate_hz)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bank.reset(&mut rng);
    let mut out: Vec<f64> = (0..n).map(|_| bank.step(&mut rng)).collect();
    let mean = out.iter().sum::<f64>() / n as f64;
    let std = (out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let gain = if std > 0.0 { sigma_v / std } else { 0.0 };
    for x in &mut out {
        *x = (*x - mean) * gain;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std(x: &[f64]) -> f64 {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn awgn_statistics() {
        let n = 1_000_000;
        let x = gen_awgn(0.0023, n, 42).unwrap();
        assert!((std(&x) / 0.0023 - 1.0).abs() < 0.01);
        assert_eq!(x, gen_awgn(0.0023, n, 42).unwrap());
        assert_ne!(x[..8], gen_awgn(0.0023, n, 43).unwrap()[..8]);
        let var = std(&x).powi(2);
        let bound = 3.0 / (n as f64).sqrt();
        for lag in 1..=5 {
            let r =
                x.iter().zip(&x[lag..]).map(|(a, b)| a * b).sum::<f64>() / ((n - lag) as f64 * var);
            assert!(r.abs() < bound, "lag {lag}: {r}");
        }
        assert!(gen_awgn(1.0, 0, 1).is_err());
    }

    #[test]
    fn flicker_scale_and_determinism() {
        let x = gen_flicker(0.040, (10.0, 2.5e6), 1_000_000, 7.3728e6, 5).unwrap();
        assert!((std(&x) / 0.040 - 1.0).abs() < 0.01);
        assert_eq!(
            x,
            gen_flicker(0.040, (10.0, 2.5e6), 1_000_000, 7.3728e6, 5).unwrap()
        );
        assert!(gen_flicker(1.0, (10.0, 5e6), 100, 7.3728e6, 5).is_err());
        assert!(gen_flicker(1.0, (100.0, 10.0), 100, 7.3728e6, 5).is_err());
    }

    #[test]
    fn octave_corners() {
        let bank = FlickerBank::new(1.0, (10.0, 2.5e6), 7.3728e6).unwrap();
        assert_eq!(bank.len(), 18);
        let bank = FlickerBank::new(1.0, (10.0, 80.0), 7.3728e6).unwrap();
        assert_eq!(bank.len(), 4);
    }

    #[test]
    fn stride_matches_stepping_in_distribution() {
        // Var of x(k) given x(0) = 1 is 1 − ρ^{2k}; mean is ρ^k.
        let fs = 1e5;
        let k = 37;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let template = FlickerBank::new(1.0, (1000.0, 1000.0 * 1.5), fs).unwrap();
        let rk = (-2.0 * PI * 1000.0 * k as f64 / fs).exp();
        let (mut s1, mut s2) = (Vec::new(), Vec::new());
        for _ in 0..20_000 {
            let mut a = template.clone();
            a.state[0] = 1.0;
            let mut b = a.clone();
            let mut v = 0.0;
            for _ in 0..k {
                v = a.step(&mut rng);
            }
            s1.push(v);
            s2.push(b.advance(k, &mut rng));
        }
        for s in [&s1, &s2] {
            let m = s.iter().sum::<f64>() / s.len() as f64;
            assert!((m - rk).abs() < 0.02, "mean {m} vs {rk}");
            assert!((std(s) / (1.0 - rk * rk).sqrt() - 1.0).abs() < 0.03);
        }
    }
}
