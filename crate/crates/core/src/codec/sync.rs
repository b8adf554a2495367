use super::{
    bits_to_bytes, bytes_to_bits, ChipStream, CodecError, Payload, Result, EQUALIZATION,
    PAYLOAD_BYTES, SYNC_WORD,
};

/// How a chip pair is turned into a bit during synchronization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Slicer {
    /// Both chips must form a valid transition; equal pairs are erasures.
    #[default]
    Strict,
    /// The second chip alone decides: high is 1.
    LateHalf,
}

impl Slicer {
    fn bit(self, chips: &[bool], at: usize) -> Option<bool> {
        match self {
            Slicer::Strict => match (chips[at], chips[at + 1]) {
                (false, true) => Some(true),
                (true, false) => Some(false),
                _ => None,
            },
            Slicer::LateHalf => Some(chips[at + 1]),
        }
    }
}

/// A located frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncedFrame {
    pub payload: Payload,
    /// Every equalization bit present before the sync word decoded correctly.
    pub preamble_intact: bool,
    /// Chip index where the sync word starts.
    pub sync_chip: usize,
}

/// Exact-match sync search over every chip offset, so either chip phase locks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameSync {
    pub slicer: Slicer,
}

impl FrameSync {
    pub fn new(slicer: Slicer) -> Self {
        Self { slicer }
    }

    /// First sync match in the stream and the payload that follows it.
    pub fn extract(&self, stream: &ChipStream) -> Result<SyncedFrame> {
        let chips = &stream.chips;
        let sync = bytes_to_bits(&SYNC_WORD);
        let preamble = bytes_to_bits(&EQUALIZATION);
        let payload_bits = 8 * PAYLOAD_BYTES;
        let frame_chips = 2 * (sync.len() + payload_bits);
        if chips.len() < frame_chips {
            return Err(CodecError::SyncLoss);
        }
        let bit = |at: usize| self.slicer.bit(chips, at);

        for start in 0..=chips.len() - frame_chips {
            let locked = sync
                .iter()
                .enumerate()
                .all(|(k, &s)| bit(start + 2 * k) == Some(s));
            if !locked {
                continue;
            }
            let body = start + 2 * sync.len();
            let mut bits = Vec::with_capacity(payload_bits);
            for k in 0..payload_bits {
                let at = body + 2 * k;
                bits.push(bit(at).ok_or(CodecError::Violation { position: at / 2 })?);
            }
            let available = (start / 2).min(preamble.len());
            let preamble_intact =
                (1..=available).all(|j| bit(start - 2 * j) == Some(preamble[preamble.len() - j]));
            let mut payload = [0u8; PAYLOAD_BYTES];
            payload.copy_from_slice(&bits_to_bytes(&bits));
            return Ok(SyncedFrame {
                payload,
                preamble_intact,
                sync_chip: start,
            });
        }
        Err(CodecError::SyncLoss)
    }
}

/// [`FrameSync::extract`] with the strict slicer.
pub fn synchronize_and_extract(stream: &ChipStream) -> Result<SyncedFrame> {
    FrameSync::default().extract(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{build_packet, manchester_encode, Packet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SLICERS: [Slicer; 2] = [Slicer::Strict, Slicer::LateHalf];

    fn encoded(p: &Packet) -> ChipStream {
        manchester_encode(&p.to_bits())
    }

    #[test]
    fn exhaustive_single_byte_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for first in 0..=255u8 {
            for _ in 0..3 {
                let p = build_packet(&[first, rng.random(), rng.random(), rng.random()]).unwrap();
                for slicer in SLICERS {
                    let f = FrameSync::new(slicer).extract(&encoded(&p)).unwrap();
                    assert_eq!(f.payload, p.payload);
                    assert!(f.preamble_intact);
                    assert_eq!(f.sync_chip, 48);
                }
            }
        }
    }

    #[test]
    fn sync_pattern_unique_against_preamble() {
        let header: Vec<u8> = EQUALIZATION.iter().chain(&SYNC_WORD).copied().collect();
        let chips = manchester_encode(&bytes_to_bits(&header)).chips;
        let sync_chips = manchester_encode(&bytes_to_bits(&SYNC_WORD)).chips;
        let hits: Vec<usize> = (0..=chips.len() - sync_chips.len())
            .filter(|&c| chips[c..c + sync_chips.len()] == sync_chips[..])
            .collect();
        assert_eq!(hits, [48]);

        let sync = bytes_to_bits(&SYNC_WORD);
        for slicer in SLICERS {
            let hits: Vec<usize> = (0..=chips.len() - 2 * sync.len())
                .filter(|&c| {
                    (0..sync.len()).all(|k| slicer.bit(&chips, c + 2 * k) == Some(sync[k]))
                })
                .collect();
            assert_eq!(hits, [48], "{slicer:?}");
        }
    }

    #[test]
    fn flipped_sync_bit_loses_lock() {
        let p = build_packet(&[0x11, 0x22, 0x33, 0x44]).unwrap();
        let mut bytes = p.to_bytes();
        bytes[3] ^= 0x10;
        let s = manchester_encode(&bytes_to_bits(&bytes));
        for slicer in SLICERS {
            assert!(matches!(
                FrameSync::new(slicer).extract(&s),
                Err(CodecError::SyncLoss)
            ));
        }
    }

    #[test]
    fn locks_at_any_chip_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..=9usize {
            for _ in 0..20 {
                let p = build_packet(&rng.random::<[u8; 4]>()).unwrap();
                let mut chips: Vec<bool> = (0..k).map(|_| rng.random()).collect();
                chips.extend(encoded(&p).chips);
                let s = ChipStream::new(chips);
                for slicer in SLICERS {
                    let f = FrameSync::new(slicer).extract(&s).unwrap();
                    assert_eq!(f.payload, p.payload, "k={k} {slicer:?}");
                    assert_eq!(f.sync_chip, k + 48);
                }
            }
        }
    }

    #[test]
    fn preamble_damage_is_reported() {
        let p = build_packet(&[1, 2, 3, 4]).unwrap();
        let mut s = encoded(&p);
        s.chips[5] = !s.chips[5];
        let f = FrameSync::new(Slicer::LateHalf).extract(&s).unwrap();
        assert_eq!(f.payload, p.payload);
        assert!(!f.preamble_intact);
    }

    #[test]
    fn strict_payload_violation_is_an_error() {
        let p = build_packet(&[1, 2, 3, 4]).unwrap();
        let mut s = encoded(&p);
        s.chips[100] = !s.chips[100];
        assert!(matches!(
            synchronize_and_extract(&s),
            Err(CodecError::Violation { position: 50 })
        ));
        let f = FrameSync::new(Slicer::LateHalf).extract(&s).unwrap();
        assert_eq!(f.payload, p.payload);
    }

    #[test]
    fn short_stream_is_sync_loss() {
        let s = ChipStream::new(vec![true; 50]);
        assert!(matches!(
            synchronize_and_extract(&s),
            Err(CodecError::SyncLoss)
        ));
    }
}
