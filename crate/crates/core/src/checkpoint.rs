//! Binary coefficient dumps with a JSON sidecar.
//!
//! Layout of the `.bin` file, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `FRTHCKPT` |
//! | 4     | format version (u32) |
//! | 4, 4  | `nx`, `ny` (u32) |
//! | 4     | fields per point (u32, always 3) |
//! | 8     | point count (u64) |
//! | 8     | payload length in bytes (u64) |
//! | ...   | per point: `t`, then `u`, `v`, `θ` coefficients row-major (f64) |
//!
//! The sidecar records the basis, point count, format version and the
//! SHA-256 of the binary file.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spectral::{BasisDims, BasisSpec, SpectralField, StateVector};

pub const MAGIC: &[u8; 8] = b"FRTHCKPT";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 + 4 + 4 + 8 + 8;
const FIELDS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format_version: u32,
    pub basis: BasisDims,
    pub points: usize,
    pub sha256: String,
    /// Free-form description of the dump (cloud schedule, run time, ...).
    #[serde(default)]
    pub meta: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// `<stem>.bin` and `<stem>.json`; the stem may itself contain dots.
pub fn dump_paths(stem: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = stem.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".bin"), with(".json"))
}

/// Encode states sharing one basis.
pub fn encode_states(states: &[StateVector]) -> Result<Vec<u8>> {
    let Some(first) = states.first() else {
        return Err(Error::invalid("nothing to encode"));
    };
    let basis = first.basis();
    for s in states {
        basis.check_same(s.basis())?;
    }
    let per_point = 1 + 3 * basis.len();
    let payload = states.len() * per_point * 8;
    let mut out = Vec::with_capacity(HEADER_LEN + payload);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(basis.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(basis.ny() as u32).to_le_bytes());
    out.extend_from_slice(&FIELDS.to_le_bytes());
    out.extend_from_slice(&(states.len() as u64).to_le_bytes());
    out.extend_from_slice(&(payload as u64).to_le_bytes());
    for s in states {
        out.extend_from_slice(&s.t.to_le_bytes());
        for f in [&s.u, &s.v, &s.theta] {
            for c in f.coeffs().iter() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Decode a dump; the header must match `basis`.
pub fn decode_states(bytes: &[u8], basis: &Arc<BasisSpec>) -> Result<Vec<StateVector>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Integrity(format!(
            "file has {} bytes, shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Integrity("bad magic".into()));
    }
    let version = read_u32(bytes, 8);
    if version != FORMAT_VERSION {
        return Err(Error::Integrity(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let (nx, ny) = (read_u32(bytes, 12) as usize, read_u32(bytes, 16) as usize);
    let fields = read_u32(bytes, 20);
    let count = read_u64(bytes, 24);
    let payload = read_u64(bytes, 32);
    if fields != FIELDS {
        return Err(Error::Integrity(format!(
            "{fields} fields per point, expected {FIELDS}"
        )));
    }
    let per_point = 1 + 3 * nx * ny;
    let expected = count
        .checked_mul(per_point as u64)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::Integrity("point count overflows".into()))?;
    if payload != expected || (bytes.len() - HEADER_LEN) as u64 != payload {
        return Err(Error::Integrity(format!(
            "length field says {payload} bytes, header implies {expected}, file holds {}",
            bytes.len() - HEADER_LEN
        )));
    }
    if (nx, ny) != (basis.nx(), basis.ny()) {
        return Err(Error::BasisMismatch(format!(
            "dump has {nx}×{ny} modes, basis has {}×{}",
            basis.nx(),
            basis.ny()
        )));
    }
    let mut at = HEADER_LEN;
    let field = |at: &mut usize| -> Result<SpectralField> {
        let v: Vec<f64> = (0..nx * ny).map(|i| read_f64(bytes, *at + 8 * i)).collect();
        *at += 8 * nx * ny;
        let a = Array2::from_shape_vec((nx, ny), v).expect("shape checked");
        SpectralField::from_coeffs(basis, a).map_err(|e| Error::Integrity(e.to_string()))
    };
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let t = read_f64(bytes, at);
        at += 8;
        let u = field(&mut at)?;
        let v = field(&mut at)?;
        let theta = field(&mut at)?;
        out.push(StateVector { u, v, theta, t });
    }
    Ok(out)
}

/// Write `<stem>.bin` and `<stem>.json`.
pub fn save_states(
    stem: &Path,
    states: &[StateVector],
    meta: serde_json::Value,
) -> Result<Sidecar> {
    let bytes = encode_states(states)?;
    let (bin, json) = dump_paths(stem);
    let sidecar = Sidecar {
        format_version: FORMAT_VERSION,
        basis: BasisDims::from(&**states[0].basis()),
        points: states.len(),
        sha256: sha256_hex(&bytes),
        meta,
    };
    fs::write(&bin, &bytes)?;
    fs::write(&json, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok(sidecar)
}

/// Read a dump written by [`save_states`], checking hash, version and basis.
pub fn load_states(stem: &Path, basis: &Arc<BasisSpec>) -> Result<(Vec<StateVector>, Sidecar)> {
    let (bin, json) = dump_paths(stem);
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(&json)?)
        .map_err(|e| Error::Integrity(format!("unreadable sidecar {}: {e}", json.display())))?;
    if sidecar.format_version != FORMAT_VERSION {
        return Err(Error::Integrity(format!(
            "sidecar format version {}, expected {FORMAT_VERSION}",
            sidecar.format_version
        )));
    }
    let dims = BasisDims::from(&**basis);
    if sidecar.basis != dims {
        return Err(Error::BasisMismatch(format!(
            "dump basis {:?}, requested {:?}",
            sidecar.basis, dims
        )));
    }
    let bytes = fs::read(&bin)?;
    let digest = sha256_hex(&bytes);
    if digest != sidecar.sha256 {
        return Err(Error::Integrity(format!(
            "checksum mismatch for {}",
            bin.display()
        )));
    }
    let states = decode_states(&bytes, basis)?;
    if states.len() != sidecar.points {
        return Err(Error::Integrity(format!(
            "sidecar lists {} points, file has {}",
            sidecar.points,
            states.len()
        )));
    }
    Ok((states, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_basis;
    use std::f64::consts::PI;

    fn sample(basis: &Arc<BasisSpec>) -> Vec<StateVector> {
        (0..3)
            .map(|i| {
                let mut s = StateVector::zeros(basis);
                s.u.coeffs_mut()[[0, 1]] = 1.0 / (i as f64 + 3.0);
                s.theta.coeffs_mut()[[1, 0]] = -0.1 * i as f64;
                s.t = 0.1 * i as f64;
                s
            })
            .collect()
    }

    #[test]
    fn encode_decode_round_trip() {
        let b = build_basis(4, 3, PI, PI).unwrap();
        let states = sample(&b);
        let bytes = encode_states(&states).unwrap();
        let back = decode_states(&bytes, &b).unwrap();
        assert_eq!(encode_states(&back).unwrap(), bytes);
        assert_eq!(back[2].t, states[2].t);
    }

    #[test]
    fn truncated_and_corrupt_rejected() {
        let b = build_basis(4, 3, PI, PI).unwrap();
        let bytes = encode_states(&sample(&b)).unwrap();
        assert!(matches!(
            decode_states(&bytes[..bytes.len() - 8], &b),
            Err(Error::Integrity(_))
        ));
        let mut bad = bytes.clone();
        bad[32] ^= 0x40;
        assert!(matches!(decode_states(&bad, &b), Err(Error::Integrity(_))));
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(matches!(decode_states(&bad, &b), Err(Error::Integrity(_))));
    }

    #[test]
    fn other_resolution_rejected() {
        let b = build_basis(4, 3, PI, PI).unwrap();
        let bytes = encode_states(&sample(&b)).unwrap();
        let other = build_basis(4, 4, PI, PI).unwrap();
        assert!(matches!(
            decode_states(&bytes, &other),
            Err(Error::BasisMismatch(_))
        ));
    }
}
