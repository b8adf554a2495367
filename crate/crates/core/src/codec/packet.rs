use super::{CodecError, Result};

pub const EQUALIZATION: [u8; 3] = [0xAA, 0xAA, 0xAA];
pub const SYNC_WORD: [u8; 2] = [0xA3, 0x59];
pub const PAYLOAD_BYTES: usize = 4;
pub const PACKET_BYTES: usize = EQUALIZATION.len() + SYNC_WORD.len() + PAYLOAD_BYTES;

pub type Payload = [u8; PAYLOAD_BYTES];

/// Nine-byte frame: equalization, sync, payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Packet {
    pub payload: Payload,
}

impl Packet {
    pub fn new(payload: Payload) -> Self {
        Self { payload }
    }

    pub fn to_bytes(&self) -> [u8; PACKET_BYTES] {
        let mut out = [0u8; PACKET_BYTES];
        out[..3].copy_from_slice(&EQUALIZATION);
        out[3..5].copy_from_slice(&SYNC_WORD);
        out[5..].copy_from_slice(&self.payload);
        out
    }

    pub fn to_bits(&self) -> Vec<bool> {
        bytes_to_bits(&self.to_bytes())
    }
}

pub fn build_packet(payload: &[u8]) -> Result<Packet> {
    let payload: Payload = payload.try_into().map_err(|_| CodecError::PayloadSize {
        expected: PAYLOAD_BYTES,
        got: payload.len(),
    })?;
    Ok(Packet::new(payload))
}

/// MSB first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
        .collect()
}

/// MSB first; a trailing partial byte is dropped.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks_exact(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)))
        .collect()
}
