//! Bit-true packet framing, Manchester line coding, threshold digitization,
//! frame synchronization and packet error counting.
//!
//! Bits are `bool`, most-significant bit first within each byte. Manchester
//! follows IEEE 802.3: a 1 is a low-to-high transition at mid-bit.

mod digitize;
mod io;
mod manchester;
mod packet;
mod per;
mod sync;

pub use digitize::{digitize, digitize_with, ComparatorMode};
pub use io::{read_chips, read_payloads, write_chips, write_payloads};
pub use manchester::{manchester_decode, manchester_encode, ChipStream, DEFAULT_CHIP_RATE_HZ};
pub use packet::{
    bits_to_bytes, build_packet, bytes_to_bits, Packet, Payload, EQUALIZATION, PACKET_BYTES,
    PAYLOAD_BYTES, SYNC_WORD,
};
pub use per::{per_count, PerEstimate};
pub use sync::{synchronize_and_extract, FrameSync, Slicer, SyncedFrame};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("payload must be {expected} bytes, got {got}")]
    PayloadSize { expected: usize, got: usize },
    #[error("framing error: {0}")]
    Framing(String),
    #[error("Manchester violation at chip pair {position}")]
    Violation { position: usize },
    #[error("sync word not found")]
    SyncLoss,
    #[error("equalization preamble corrupted")]
    PreambleCorrupted,
    #[error("{what}: {left} vs {right} entries")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CodecError>;
