use super::{ChipStream, CodecError, Result};

/// How the comparator reduces a chip's samples to one decision value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComparatorMode {
    /// Mean of the central half of the chip.
    #[default]
    CentralMean,
    /// The single sample at mid-chip.
    MidSample,
}

impl ComparatorMode {
    /// Sample index range within a chip used for the decision.
    pub fn window(self, samples_per_chip: usize) -> std::ops::Range<usize> {
        match self {
            ComparatorMode::MidSample => {
                let mid = samples_per_chip / 2;
                mid..mid + 1
            }
            ComparatorMode::CentralMean => {
                let width = (samples_per_chip / 2).max(1);
                let start = (samples_per_chip - width) / 2;
                start..start + width
            }
        }
    }
}

/// Central-mean comparator; a value `>= threshold_v` is high.
pub fn digitize(waveform: &[f64], threshold_v: f64, samples_per_chip: usize) -> Result<ChipStream> {
    digitize_with(
        waveform,
        threshold_v,
        samples_per_chip,
        ComparatorMode::CentralMean,
    )
}

pub fn digitize_with(
    waveform: &[f64],
    threshold_v: f64,
    samples_per_chip: usize,
    mode: ComparatorMode,
) -> Result<ChipStream> {
    if samples_per_chip == 0 || waveform.len() % samples_per_chip != 0 {
        return Err(CodecError::Framing(format!(
            "{} samples do not divide into chips of {samples_per_chip}",
            waveform.len()
        )));
    }
    let window = mode.window(samples_per_chip);
    let width = window.len() as f64;
    let chips = waveform
        .chunks_exact(samples_per_chip)
        .map(|chip| chip[window.clone()].iter().sum::<f64>() / width >= threshold_v)
        .collect();
    Ok(ChipStream::new(chips))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::manchester_encode;

    #[test]
    fn windows() {
        assert_eq!(ComparatorMode::CentralMean.window(16), 4..12);
        assert_eq!(ComparatorMode::CentralMean.window(32), 8..24);
        assert_eq!(ComparatorMode::CentralMean.window(1), 0..1);
        assert_eq!(ComparatorMode::MidSample.window(16), 8..9);
    }

    #[test]
    fn constant_inputs() {
        let w = vec![1.0; 64];
        assert!(digitize(&w, 0.0, 16).unwrap().chips.iter().all(|&c| c));
        assert!(digitize(&w, 1.5, 16).unwrap().chips.iter().all(|&c| !c));
        assert!(digitize(&w[..63], 0.0, 16).is_err());
        assert!(digitize(&w, 0.0, 0).is_err());
    }

    #[test]
    fn ideal_waveform_recovers_chips() {
        let bits = [true, false, false, true, true, true, false];
        let chips = manchester_encode(&bits);
        let w: Vec<f64> = chips
            .chips
            .iter()
            .flat_map(|&c| std::iter::repeat(if c { 0.7 } else { -0.7 }).take(16))
            .collect();
        for mode in [ComparatorMode::CentralMean, ComparatorMode::MidSample] {
            assert_eq!(digitize_with(&w, 0.0, 16, mode).unwrap().chips, chips.chips);
        }
    }
}
