use super::{CodecError, Result};

/// Twice the 115.2 kbaud bit rate.
pub const DEFAULT_CHIP_RATE_HZ: f64 = 230_400.0;

/// Line-coded chips, `true` = high.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipStream {
    pub chips: Vec<bool>,
    pub chip_rate_hz: f64,
}

impl ChipStream {
    pub fn new(chips: Vec<bool>) -> Self {
        Self {
            chips,
            chip_rate_hz: DEFAULT_CHIP_RATE_HZ,
        }
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn high_count(&self) -> usize {
        self.chips.iter().filter(|&&c| c).count()
    }
}

/// 1 → (low, high), 0 → (high, low).
pub fn manchester_encode(bits: &[bool]) -> ChipStream {
    ChipStream::new(bits.iter().flat_map(|&b| [!b, b]).collect())
}

/// Inverse of [`manchester_encode`]; equal chip pairs are violations.
pub fn manchester_decode(stream: &ChipStream) -> Result<Vec<bool>> {
    if stream.len() % 2 != 0 {
        return Err(CodecError::Framing(format!(
            "odd chip count {}",
            stream.len()
        )));
    }
    stream
        .chips
        .chunks_exact(2)
        .enumerate()
        .map(|(position, pair)| match (pair[0], pair[1]) {
            (false, true) => Ok(true),
            (true, false) => Ok(false),
            _ => Err(CodecError::Violation { position }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encoding_convention() {
        assert_eq!(manchester_encode(&[true]).chips, [false, true]);
        assert_eq!(
            manchester_encode(&[true, false]).chips,
            [false, true, true, false]
        );
        assert_eq!(manchester_encode(&[]).len(), 0);
    }

    #[test]
    fn decode_errors() {
        let s = ChipStream::new(vec![false, true, true, false]);
        assert_eq!(manchester_decode(&s).unwrap(), [true, false]);
        let bad = ChipStream::new(vec![true, true, false, true]);
        assert!(matches!(
            manchester_decode(&bad),
            Err(CodecError::Violation { position: 0 })
        ));
        let late = ChipStream::new(vec![false, true, false, false]);
        assert!(matches!(
            manchester_decode(&late),
            Err(CodecError::Violation { position: 1 })
        ));
        let odd = ChipStream::new(vec![false, true, true]);
        assert!(matches!(
            manchester_decode(&odd),
            Err(CodecError::Framing(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn round_trip_and_balance(bits in proptest::collection::vec(any::<bool>(), 0..96)) {
            let s = manchester_encode(&bits);
            prop_assert_eq!(s.len(), 2 * bits.len());
            prop_assert_eq!(2 * s.high_count(), s.len());
            prop_assert_eq!(manchester_decode(&s).unwrap(), bits);
        }
    }
}
