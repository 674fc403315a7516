//! The OCTT container: `"OCTT"`, version, rows, cols (u32 LE), the entry
//! bytes row-major, then one i64 LE denominator per row.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{CuspMatrix, ZERO_ENTRY};

pub const OCTT_MAGIC: [u8; 4] = *b"OCTT";
pub const OCTT_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum OcttError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("file truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{0} trailing bytes after the denominators")]
    TrailingBytes(u64),
    #[error("invalid entry byte {byte} at offset {offset}")]
    BadEntry { offset: u64, byte: u8 },
    #[error("dimensions {rows} x {cols} overflow")]
    SizeOverflow { rows: u32, cols: u32 },
    #[error("matrix data is inconsistent with its dimensions")]
    Inconsistent,
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn expected_len(rows: u32, cols: u32) -> Option<u64> {
    let cells = (rows as u64).checked_mul(cols as u64)?;
    let dens = (rows as u64).checked_mul(8)?;
    (HEADER_LEN as u64).checked_add(cells)?.checked_add(dens)
}

pub fn write_octt<W: Write>(m: &CuspMatrix, mut w: W) -> Result<(), OcttError> {
    let rows = u32::try_from(m.rows).map_err(|_| OcttError::Inconsistent)?;
    let cols = u32::try_from(m.cols).map_err(|_| OcttError::Inconsistent)?;
    if m.entries.len() != m.rows * m.cols || m.denominators.len() != m.rows {
        return Err(OcttError::Inconsistent);
    }
    w.write_all(&OCTT_MAGIC)?;
    w.write_all(&OCTT_VERSION.to_le_bytes())?;
    w.write_all(&rows.to_le_bytes())?;
    w.write_all(&cols.to_le_bytes())?;
    w.write_all(&m.entries)?;
    for d in &m.denominators {
        w.write_all(&d.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn encode_octt(m: &CuspMatrix) -> Result<Vec<u8>, OcttError> {
    let mut out = Vec::with_capacity(HEADER_LEN + m.entries.len() + 8 * m.rows);
    write_octt(m, &mut out)?;
    Ok(out)
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Parses and validates a complete OCTT byte stream.
pub fn decode_octt(bytes: &[u8]) -> Result<CuspMatrix, OcttError> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != OCTT_MAGIC {
            return Err(OcttError::BadMagic);
        }
        return Err(OcttError::Truncated { expected: HEADER_LEN as u64, found: bytes.len() as u64 });
    }
    if bytes[..4] != OCTT_MAGIC {
        return Err(OcttError::BadMagic);
    }
    let version = u32_at(bytes, 4);
    if version != OCTT_VERSION {
        return Err(OcttError::UnsupportedVersion(version));
    }
    let rows = u32_at(bytes, 8);
    let cols = u32_at(bytes, 12);
    let expected = expected_len(rows, cols).ok_or(OcttError::SizeOverflow { rows, cols })?;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(OcttError::Truncated { expected, found });
    }
    if found > expected {
        return Err(OcttError::TrailingBytes(found - expected));
    }
    let cells = rows as usize * cols as usize;
    let entries = &bytes[HEADER_LEN..HEADER_LEN + cells];
    if let Some(pos) = entries.iter().position(|&b| b > 3 && b != ZERO_ENTRY) {
        return Err(OcttError::BadEntry { offset: (HEADER_LEN + pos) as u64, byte: entries[pos] });
    }
    let denominators =
        bytes[HEADER_LEN + cells..].chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(CuspMatrix { rows: rows as usize, cols: cols as usize, entries: entries.to_vec(), denominators })
}

pub fn write_octt_file(m: &CuspMatrix, path: &Path) -> Result<(), OcttError> {
    write_octt(m, BufWriter::new(File::create(path)?))
}

pub fn read_octt_file(path: &Path) -> Result<CuspMatrix, OcttError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode_octt(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> CuspMatrix {
        CuspMatrix { rows: 2, cols: 3, entries: vec![0, 1, 255, 3, 2, 0], denominators: vec![65536, -256] }
    }

    #[test]
    fn round_trip_and_layout() {
        let bytes = encode_octt(&tiny()).unwrap();
        assert_eq!(&bytes[..4], b"OCTT");
        assert_eq!(&bytes[4..16], &[1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(&bytes[16..22], &[0, 1, 255, 3, 2, 0]);
        assert_eq!(&bytes[22..30], &65536i64.to_le_bytes());
        assert_eq!(bytes.len(), 38);
        assert_eq!(decode_octt(&bytes).unwrap(), tiny());
    }

    #[test]
    fn rejects_malformed() {
        let good = encode_octt(&tiny()).unwrap();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decode_octt(&bad), Err(OcttError::BadMagic)));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(decode_octt(&bad), Err(OcttError::UnsupportedVersion(2))));
        assert!(matches!(decode_octt(&good[..good.len() - 1]), Err(OcttError::Truncated { .. })));
        let mut long = good.clone();
        long.push(0);
        assert!(matches!(decode_octt(&long), Err(OcttError::TrailingBytes(1))));
        let mut bad = good.clone();
        bad[17] = 7;
        assert!(matches!(decode_octt(&bad), Err(OcttError::BadEntry { offset: 17, byte: 7 })));
        let mut huge = good[..16].to_vec();
        huge[8..16].copy_from_slice(&[255; 8]);
        assert!(matches!(decode_octt(&huge), Err(OcttError::SizeOverflow { .. })));
        huge[8..16].copy_from_slice(&[0, 0, 1, 0, 0, 0, 1, 0]);
        assert!(matches!(decode_octt(&huge), Err(OcttError::Truncated { .. })));
        assert!(matches!(decode_octt(b"OC"), Err(OcttError::Truncated { .. })));
    }
}
