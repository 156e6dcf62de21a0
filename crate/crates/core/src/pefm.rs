//! The PEFM field-map file and its CSV export.
//!
//! Little-endian layout: magic `PEFM`, `u32` version (1), `u32` quantity
//! code, `u32` range count, `u32` height count, `f64` x0, dx, z0, dz, then
//! one block of `n_height` `f32` values per range, ground first.

use std::io::Write;
use std::path::Path;

use crate::error::{PeError, Result};
use crate::postprocess::{CoverageMap, Quantity};

pub const MAGIC: &[u8; 4] = b"PEFM";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 * 4 + 4 * 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PefmHeader {
    pub version: u32,
    pub quantity: Quantity,
    pub n_range: u32,
    pub n_height: u32,
    pub x0: f64,
    pub dx: f64,
    pub z0: f64,
    pub dz: f64,
}

impl PefmHeader {
    pub fn of(map: &CoverageMap) -> Result<Self> {
        let count = |n: usize, what: &str| {
            u32::try_from(n).map_err(|_| PeError::Format(format!("{what} count {n} does not fit the format")))
        };
        Ok(Self {
            version: VERSION,
            quantity: map.quantity,
            n_range: count(map.n_range, "range")?,
            n_height: count(map.n_height, "height")?,
            x0: map.x0,
            dx: map.dx,
            z0: map.z0,
            dz: map.dz,
        })
    }

    fn body_len(&self) -> usize {
        self.n_range as usize * self.n_height as usize * 4
    }
}

pub fn encode(map: &CoverageMap) -> Result<Vec<u8>> {
    let h = PefmHeader::of(map)?;
    if map.values.len() != map.n_range * map.n_height {
        return Err(PeError::LengthMismatch { expected: map.n_range * map.n_height, actual: map.values.len() });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + h.body_len());
    out.extend_from_slice(MAGIC);
    for v in [h.version, h.quantity.code(), h.n_range, h.n_height] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in [h.x0, h.dx, h.z0, h.dz] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &v in &map.values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_header(bytes: &[u8]) -> Result<PefmHeader> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(PeError::Format("not a PEFM file".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(PeError::Format(format!("truncated PEFM header ({} bytes)", bytes.len())));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != VERSION {
        return Err(PeError::Format(format!("unsupported PEFM version {version}")));
    }
    let code = u32_at(8);
    let quantity = Quantity::from_code(code).ok_or_else(|| PeError::Format(format!("unknown quantity code {code}")))?;
    Ok(PefmHeader {
        version,
        quantity,
        n_range: u32_at(12),
        n_height: u32_at(16),
        x0: f64_at(20),
        dx: f64_at(28),
        z0: f64_at(36),
        dz: f64_at(44),
    })
}

pub fn decode(bytes: &[u8]) -> Result<CoverageMap> {
    let h = decode_header(bytes)?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != h.body_len() {
        return Err(PeError::Format(format!(
            "truncated PEFM body: expected {} bytes, found {}",
            h.body_len(),
            body.len()
        )));
    }
    let values = body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64).collect();
    Ok(CoverageMap {
        quantity: h.quantity,
        x0: h.x0,
        dx: h.dx,
        z0: h.z0,
        dz: h.dz,
        n_range: h.n_range as usize,
        n_height: h.n_height as usize,
        values,
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| PeError::Io(e.error))?;
    Ok(())
}

pub fn write_file(path: &Path, map: &CoverageMap) -> Result<()> {
    write_atomic(path, &encode(map)?)
}

pub fn read_file(path: &Path) -> Result<CoverageMap> {
    decode(&std::fs::read(path)?)
}

/// CSV with header `range_m,height_m,value_db`, range-major, values `%.4f`.
pub fn export_csv<W: Write>(map: &CoverageMap, mut out: W) -> Result<()> {
    writeln!(out, "range_m,height_m,value_db")?;
    for i in 0..map.n_range {
        let x = map.range(i);
        for (j, v) in map.column(i).iter().enumerate() {
            writeln!(out, "{},{},{:.4}", x, map.height(j), v)?;
        }
    }
    Ok(())
}

/// Human-readable header listing.
pub fn describe(h: &PefmHeader) -> String {
    format!(
        "format: PEFM v{}\nquantity: {} ({})\nn_range: {}\nn_height: {}\nx0_m: {}\ndx_m: {}\nz0_m: {}\ndz_m: {}\n",
        h.version,
        h.quantity.name(),
        h.quantity.code(),
        h.n_range,
        h.n_height,
        h.x0,
        h.dx,
        h.z0,
        h.dz
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> CoverageMap {
        CoverageMap {
            quantity: Quantity::PropagationFactor,
            x0: 0.0,
            dx: 100.0,
            z0: 0.0,
            dz: 0.5,
            n_range: 2,
            n_height: 2,
            values: vec![-999.0, 1.25, -3.5, 6.0206],
        }
    }

    #[test]
    fn layout_is_fixed() {
        let bytes = encode(&map()).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 16);
        assert_eq!(&bytes[..4], b"PEFM");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &2u32.to_le_bytes());
        assert_eq!(&bytes[28..36], &100f64.to_le_bytes());
        assert_eq!(&bytes[HEADER_LEN..HEADER_LEN + 4], &(-999f32).to_le_bytes());
    }

    #[test]
    fn round_trip() {
        let m = map();
        let back = decode(&encode(&m).unwrap()).unwrap();
        assert_eq!(back.n_range, 2);
        for (a, b) in back.values.iter().zip(&m.values) {
            assert!((a - b).abs() < 1e-4);
        }
        assert_eq!(encode(&back).unwrap(), encode(&m).unwrap());
    }

    #[test]
    fn corrupt_and_truncated_inputs() {
        let mut bytes = encode(&map()).unwrap();
        let e = decode(&bytes[..bytes.len() - 1]).unwrap_err();
        assert!(e.to_string().contains("truncated"));
        assert!(decode(&bytes[..10]).is_err());
        bytes[0] = b'X';
        assert_eq!(decode(&bytes).unwrap_err().to_string(), "not a PEFM file");
        let mut v2 = encode(&map()).unwrap();
        v2[4] = 2;
        assert!(decode(&v2).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn csv_rows() {
        let mut out = Vec::new();
        export_csv(&map(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "range_m,height_m,value_db");
        assert_eq!(lines[1], "0,0,-999.0000");
        assert_eq!(lines[2], "0,0.5,1.2500");
        assert_eq!(lines[4], "100,0.5,6.0206");
    }

    #[test]
    fn atomic_write_leaves_nothing_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("no/such/dir/out.pefm");
        assert!(write_file(&missing, &map()).is_err());
        let ok = dir.path().join("out.pefm");
        write_file(&ok, &map()).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(read_file(&ok).unwrap().n_height, 2);
    }
}
