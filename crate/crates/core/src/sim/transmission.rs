use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{
    digitize_with, manchester_encode, ComparatorMode, FrameSync, Packet, PerEstimate, Slicer,
    EQUALIZATION, PACKET_BYTES,
};
use crate::link::{LinkHardware, NoiseProfile};

use super::{
    detector_chain, levels_from_md, render_waveform, DetectorChainConfig, EyeMatrix, FlickerBank,
    Result, SimError,
};

pub const DEFAULT_FLICKER_BAND_HZ: (f64, f64) = (10.0, 2.5e6);

/// Chips in the equalization preamble, where the threshold is estimated.
pub const PREAMBLE_CHIPS: usize = 16 * EQUALIZATION.len();

const FRAME_CHIPS: usize = 16 * PACKET_BYTES;

/// Spectral shape of the source intensity noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceNoise {
    #[default]
    Flicker,
    White,
    Off,
}

/// Comparator reference level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ThresholdMode {
    /// Mean of the received equalization segment, per packet.
    #[default]
    Preamble,
    Fixed(f64),
}

/// One Monte Carlo run.
///
/// Gain, responsivity and saturation come from `hw`; `chain` supplies the
/// filters and sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub hw: LinkHardware,
    pub noise: NoiseProfile,
    pub oa_db: f64,
    pub n_packets: u64,
    pub seed: u64,
    pub chain: DetectorChainConfig,
    pub flicker_band_hz: (f64, f64),
    pub source_noise: SourceNoise,
    pub detector_noise: bool,
    pub threshold: ThresholdMode,
    /// Leading packets whose traces are captured at full rate.
    pub eye_packets: u64,
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Scenario {
    pub fn new(
        hw: LinkHardware,
        noise: NoiseProfile,
        oa_db: f64,
        n_packets: u64,
        seed: u64,
    ) -> Self {
        Self {
            hw,
            noise,
            oa_db,
            n_packets,
            seed,
            chain: DetectorChainConfig::default(),
            flicker_band_hz: DEFAULT_FLICKER_BAND_HZ,
            source_noise: SourceNoise::Flicker,
            detector_noise: true,
            threshold: ThresholdMode::Preamble,
            eye_packets: 4,
            workers: None,
        }
    }

    /// Detector-limited link at 40 dB with the detector noise set so the
    /// analytic SNR equals `snr_db`.
    pub fn awgn_at_snr(snr_db: f64, n_packets: u64, seed: u64) -> Self {
        let hw = LinkHardware::default();
        let oa_db = 40.0;
        let swing = hw.received_swing_v(hw.p_out_w, oa_db);
        let noise = NoiseProfile {
            sigma_detector_v: swing / (2.0 * 10f64.powf(snr_db / 20.0)),
            ..NoiseProfile::default()
        };
        Self {
            source_noise: SourceNoise::Off,
            ..Self::new(hw, noise, oa_db, n_packets, seed)
        }
    }

    pub fn noiseless(mut self) -> Self {
        self.detector_noise = false;
        self.source_noise = SourceNoise::Off;
        self
    }

    /// The chain with the hardware's gain, responsivity and saturation.
    pub fn effective_chain(&self) -> DetectorChainConfig {
        DetectorChainConfig {
            responsivity_v_per_w: self.hw.responsivity_v_per_w,
            ac_gain: self.hw.gain,
            saturation_w: self.hw.saturation_w,
            ..self.chain
        }
    }

    pub fn detector_sigma_v(&self) -> f64 {
        if self.detector_noise {
            self.noise.sigma_detector_v
        } else {
            0.0
        }
    }

    pub fn source_sigma_v(&self) -> f64 {
        match self.source_noise {
            SourceNoise::Off => 0.0,
            _ => self.noise.source_sigma_v(self.oa_db, self.hw.p_out_w),
        }
    }

    /// Peak-to-peak swing over twice the enabled noise, in dB.
    pub fn analytic_snr_db(&self) -> f64 {
        let swing = self.hw.received_swing_v(self.hw.p_out_w, self.oa_db);
        let sigma = self.detector_sigma_v().hypot(self.source_sigma_v());
        20.0 * (swing / (2.0 * sigma)).log10()
    }

    pub fn validate(&self) -> Result<()> {
        self.hw.validate()?;
        self.noise.validate()?;
        self.effective_chain().validate()?;
        if self.n_packets == 0 {
            return Err(SimError::invalid("n_packets", "must be at least 1".into()));
        }
        if !self.oa_db.is_finite() {
            return Err(SimError::invalid("oa_db", format!("got {}", self.oa_db)));
        }
        if let ThresholdMode::Fixed(v) = self.threshold {
            if !v.is_finite() {
                return Err(SimError::invalid("threshold", format!("got {v}")));
            }
        }
        if self.source_noise == SourceNoise::Flicker {
            FlickerBank::new(1.0, self.flicker_band_hz, self.chain.sample_rate_hz)?;
        }
        Ok(())
    }
}

/// Signal and noise measured at the comparator decision instants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalStats {
    /// Mean noiseless high level minus mean noiseless low level.
    pub swing_v: f64,
    /// Pooled noise standard deviation.
    pub sigma_v: f64,
    pub snr_db: f64,
    pub analytic_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub estimate: PerEstimate,
    pub saturated_packets: u64,
    /// More than 1% of packets drove the detector into its clamp.
    pub saturation_flag: bool,
    pub seed: u64,
    pub stats: SignalStats,
    pub eye: EyeMatrix,
}

/// Serialized form of a run's packet error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerReport {
    pub packets_sent: u64,
    pub packets_errored: u64,
    pub per: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub saturation_flag: bool,
    pub seed: u64,
}

impl From<&SimOutcome> for PerReport {
    fn from(o: &SimOutcome) -> Self {
        Self {
            packets_sent: o.estimate.packets_sent,
            packets_errored: o.estimate.packets_errored,
            per: o.estimate.per,
            ci95_low: o.estimate.ci95_low,
            ci95_high: o.estimate.ci95_high,
            saturation_flag: o.saturation_flag,
            seed: o.seed,
        }
    }
}

struct Context {
    chain: DetectorChainConfig,
    spc: usize,
    p_high_w: f64,
    p_low_w: f64,
    sigma_det: f64,
    white_source: f64,
    flicker: Option<FlickerBank>,
    threshold: ThresholdMode,
    seed: u64,
    eye_packets: u64,
}

#[derive(Default)]
struct PacketResult {
    ok: bool,
    saturated: bool,
    sum_high: f64,
    n_high: u32,
    sum_low: f64,
    n_low: u32,
    noise_sum: f64,
    noise_sq: f64,
    n_noise: u32,
    traces: Vec<Vec<f64>>,
}

impl Context {
    fn new(s: &Scenario) -> Result<Self> {
        let chain = s.effective_chain();
        let mean_w = s.hw.p_out_w * 10f64.powf(-s.oa_db / 10.0);
        let (p_high_w, p_low_w) = levels_from_md(mean_w, s.hw.md)?;
        let source = s.source_sigma_v();
        let flicker = match s.source_noise {
            SourceNoise::Flicker => Some(FlickerBank::new(
                source,
                s.flicker_band_hz,
                chain.sample_rate_hz,
            )?),
            _ => None,
        };
        Ok(Self {
            spc: chain.samples_per_chip(),
            chain,
            p_high_w,
            p_low_w,
            sigma_det: s.detector_sigma_v(),
            white_source: if s.source_noise == SourceNoise::White {
                source
            } else {
                0.0
            },
            flicker,
            threshold: s.threshold,
            seed: s.seed,
            eye_packets: s.eye_packets,
        })
    }

    fn white_sigma(&self) -> f64 {
        self.sigma_det.hypot(self.white_source)
    }

    fn packet(&self, index: u64) -> Result<PacketResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let packet = Packet::new(rng.random());
        let chips = manchester_encode(&packet.to_bits());
        let optical = render_waveform(&chips, self.p_high_w, self.p_low_w, &self.chain)?;
        let out = detector_chain(&optical, &self.chain);
        let clean = out.voltage;

        let eye = index < self.eye_packets;
        let spc = self.spc;
        let preamble_len = PREAMBLE_CHIPS * spc;
        let full_len = if eye { clean.len() } else { preamble_len };
        let white = self.white_sigma();
        let mut flicker = self.flicker.clone();
        if let Some(f) = flicker.as_mut() {
            f.reset(&mut rng);
        }

        let mut noise = Vec::with_capacity(full_len);
        for _ in 0..full_len {
            let mut n = white * rng.sample::<f64, _>(StandardNormal);
            if let Some(f) = flicker.as_mut() {
                n += f.step(&mut rng);
            }
            noise.push(n);
        }

        let threshold = match self.threshold {
            ThresholdMode::Preamble => {
                clean[..preamble_len]
                    .iter()
                    .zip(&noise)
                    .map(|(c, n)| c + n)
                    .sum::<f64>()
                    / preamble_len as f64
            }
            ThresholdMode::Fixed(v) => v,
        };

        let mut r = PacketResult {
            saturated: out.saturated,
            ..PacketResult::default()
        };
        let mut decisions = Vec::with_capacity(FRAME_CHIPS);
        let mut last = full_len - 1;
        for (c, &high) in chips.chips.iter().enumerate() {
            let at = c * spc + spc / 2;
            let n = if at < full_len {
                noise[at]
            } else {
                let mut n = white * rng.sample::<f64, _>(StandardNormal);
                if let Some(f) = flicker.as_mut() {
                    n += f.advance(at - last, &mut rng);
                }
                last = at;
                n
            };
            if high {
                r.sum_high += clean[at];
                r.n_high += 1;
            } else {
                r.sum_low += clean[at];
                r.n_low += 1;
            }
            r.noise_sum += n;
            r.noise_sq += n * n;
            r.n_noise += 1;
            decisions.push(clean[at] + n);
        }

        let received = digitize_with(&decisions, threshold, 1, ComparatorMode::MidSample)?;
        r.ok = matches!(
            FrameSync::new(Slicer::LateHalf).extract(&received),
            Ok(f) if f.preamble_intact && f.sync_chip == PREAMBLE_CHIPS && f.payload == packet.payload
        );

        if eye {
            let span = 4 * spc + 1;
            let noisy: Vec<f64> = clean.iter().zip(&noise).map(|(c, n)| c + n).collect();
            r.traces = (0..)
                .map(|pair| pair * 4 * spc)
                .take_while(|start| start + span <= noisy.len())
                .map(|start| noisy[start..start + span].to_vec())
                .collect();
        }
        Ok(r)
    }
}

/// Runs `n_packets` independent packets. Packet `i` draws from ChaCha8
/// stream `i` of `seed`, so results do not depend on the worker count.
pub fn simulate_transmission(scenario: &Scenario) -> Result<SimOutcome> {
    scenario.validate()?;
    let ctx = Context::new(scenario)?;
    let n_packets = usize::try_from(scenario.n_packets)
        .map_err(|_| SimError::invalid("n_packets", "too large".into()))?;
    let run = || -> Result<Vec<PacketResult>> {
        (0..n_packets)
            .into_par_iter()
            .with_min_len(64)
            .map(|i| ctx.packet(i as u64))
            .collect()
    };
    let results = match scenario.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Pool(e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    let mut errored = 0u64;
    let mut saturated_packets = 0u64;
    let (mut sum_high, mut n_high, mut sum_low, mut n_low) = (0.0, 0u64, 0.0, 0u64);
    let (mut noise_sum, mut noise_sq, mut n_noise) = (0.0, 0.0, 0u64);
    let mut traces = Vec::new();
    for r in results {
        errored += u64::from(!r.ok);
        saturated_packets += u64::from(r.saturated);
        sum_high += r.sum_high;
        n_high += u64::from(r.n_high);
        sum_low += r.sum_low;
        n_low += u64::from(r.n_low);
        noise_sum += r.noise_sum;
        noise_sq += r.noise_sq;
        n_noise += u64::from(r.n_noise);
        traces.extend(r.traces);
    }

    let swing_v = sum_high / n_high as f64 - sum_low / n_low as f64;
    let noise_mean = noise_sum / n_noise as f64;
    let sigma_v = (noise_sq / n_noise as f64 - noise_mean * noise_mean)
        .max(0.0)
        .sqrt();
    let dt_us = 1e6 / ctx.chain.sample_rate_hz;
    let eye = EyeMatrix {
        time_us: (0..=4 * ctx.spc).map(|i| i as f64 * dt_us).collect(),
        traces,
    };
    Ok(SimOutcome {
        estimate: PerEstimate::new(scenario.n_packets, errored)?,
        saturated_packets,
        saturation_flag: saturated_packets * 100 > scenario.n_packets,
        seed: scenario.seed,
        stats: SignalStats {
            swing_v,
            sigma_v,
            snr_db: 20.0 * (swing_v / (2.0 * sigma_v)).log10(),
            analytic_snr_db: scenario.analytic_snr_db(),
        },
        eye,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_link_is_error_free() {
        let s = Scenario::awgn_at_snr(10.0, 2_000, 1).noiseless();
        let o = simulate_transmission(&s).unwrap();
        assert_eq!(o.estimate.packets_errored, 0);
        assert!(!o.saturation_flag);
        assert_eq!(o.stats.sigma_v, 0.0);
        assert_eq!(o.eye.traces.len(), 4 * 35);
        assert_eq!(o.eye.time_us.len(), 129);
    }

    #[test]
    fn awgn_per_near_analytic() {
        let s = Scenario::awgn_at_snr(8.0, 5_000, 3);
        let o = simulate_transmission(&s).unwrap();
        let analytic = crate::link::per_from_snr_db(8.0, 72);
        let se = o.estimate.standard_error_at(analytic);
        assert!(
            (o.estimate.per - analytic).abs() < 4.0 * se,
            "{} vs {analytic}",
            o.estimate.per
        );
        assert_close!(o.stats.snr_db, 8.0, 0.1);
    }

    #[test]
    fn deterministic_across_workers() {
        let mut s = Scenario::new(
            LinkHardware::default(),
            NoiseProfile::default(),
            20.0,
            300,
            77,
        );
        s.hw.md = 0.01;
        s.workers = Some(1);
        let a = simulate_transmission(&s).unwrap();
        s.workers = Some(3);
        let b = simulate_transmission(&s).unwrap();
        assert_eq!(a, b);
        s.seed = 78;
        assert_ne!(simulate_transmission(&s).unwrap().eye, a.eye);
    }

    #[test]
    fn saturation_is_flagged() {
        let s = Scenario::new(LinkHardware::default(), NoiseProfile::default(), 0.0, 50, 1);
        let o = simulate_transmission(&s).unwrap();
        assert!(o.saturation_flag);
        assert_eq!(o.saturated_packets, 50);
    }

    #[test]
    fn rejects_bad_scenarios() {
        let mut s = Scenario::awgn_at_snr(10.0, 0, 1);
        assert!(simulate_transmission(&s).is_err());
        s.n_packets = 10;
        s.source_noise = SourceNoise::Flicker;
        s.flicker_band_hz = (10.0, 1e7);
        assert!(simulate_transmission(&s).is_err());
    }
}
