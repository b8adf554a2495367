//! Flat binary files: a little-endian `u64` record count, then the records.
//! Chips are one byte each (0 or 1); payloads are four bytes each.

use std::io::{Read, Write};

use super::{ChipStream, CodecError, Payload, Result, PAYLOAD_BYTES};

fn write_header<W: Write>(w: &mut W, count: usize) -> Result<()> {
    w.write_all(&(count as u64).to_le_bytes())?;
    Ok(())
}

fn read_body<R: Read>(r: &mut R, record: usize) -> Result<Vec<u8>> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    let count = usize::try_from(u64::from_le_bytes(header))
        .map_err(|_| CodecError::Framing("record count overflows".into()))?;
    let len = count
        .checked_mul(record)
        .ok_or_else(|| CodecError::Framing("record count overflows".into()))?;
    let mut body = Vec::new();
    r.take(len as u64).read_to_end(&mut body)?;
    if body.len() != len {
        return Err(CodecError::Framing(format!(
            "expected {len} bytes after header, found {}",
            body.len()
        )));
    }
    Ok(body)
}

pub fn write_chips<W: Write>(mut w: W, stream: &ChipStream) -> Result<()> {
    write_header(&mut w, stream.len())?;
    let bytes: Vec<u8> = stream.chips.iter().map(|&c| u8::from(c)).collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_chips<R: Read>(mut r: R) -> Result<ChipStream> {
    let chips = read_body(&mut r, 1)?
        .into_iter()
        .enumerate()
        .map(|(i, b)| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(CodecError::Framing(format!("chip {i} has value {b}"))),
        })
        .collect::<Result<_>>()?;
    Ok(ChipStream::new(chips))
}

pub fn write_payloads<W: Write>(mut w: W, payloads: &[Payload]) -> Result<()> {
    write_header(&mut w, payloads.len())?;
    for p in payloads {
        w.write_all(p)?;
    }
    Ok(())
}

pub fn read_payloads<R: Read>(mut r: R) -> Result<Vec<Payload>> {
    Ok(read_body(&mut r, PAYLOAD_BYTES)?
        .chunks_exact(PAYLOAD_BYTES)
        .map(|c| c.try_into().expect("exact chunk"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{build_packet, manchester_encode};

    #[test]
    fn chips_round_trip() {
        let s = manchester_encode(&build_packet(&[9, 8, 7, 6]).unwrap().to_bits());
        let mut buf = Vec::new();
        write_chips(&mut buf, &s).unwrap();
        assert_eq!(&buf[..8], &144u64.to_le_bytes());
        assert_eq!(buf.len(), 8 + 144);
        assert_eq!(read_chips(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn payloads_round_trip() {
        let ps = vec![[0u8, 1, 2, 3], [0xFF, 0xEE, 0xDD, 0xCC]];
        let mut buf = Vec::new();
        write_payloads(&mut buf, &ps).unwrap();
        assert_eq!(buf.len(), 16);
        assert_eq!(read_payloads(buf.as_slice()).unwrap(), ps);
    }

    #[test]
    fn malformed_files() {
        let mut buf = 3u64.to_le_bytes().to_vec();
        buf.extend([0, 1]);
        assert!(read_chips(buf.as_slice()).is_err());
        let mut buf = 1u64.to_le_bytes().to_vec();
        buf.push(2);
        assert!(read_chips(buf.as_slice()).is_err());
        assert!(read_payloads(&[1u8, 2][..]).is_err());
    }
}
