//! Binary field files: a 16-byte header (`LPWSPECFIELD` + u32 version),
//! then little-endian `u32` dim, N, components, then `(re, im)` pairs of
//! `f64`, component-major, each component in row-major physical order.
//! A JSON sidecar carries the same grid metadata in readable form.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 12] = b"LPWSPECFIELD";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub points: usize,
    pub components: usize,
    pub layout: String,
}

impl Sidecar {
    pub fn for_field(f: &SpectralField) -> Self {
        Self {
            format: String::from_utf8_lossy(MAGIC).into_owned(),
            version: VERSION,
            dim: f.grid().dim(),
            points: f.grid().points(),
            components: f.components(),
            layout: "component-major, row-major physical samples, f64 (re, im) little-endian".into(),
        }
    }
}

/// `<path>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode_field(f: &SpectralField) -> Vec<u8> {
    let phys = f.physical();
    let mut out = Vec::with_capacity(28 + 16 * phys.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [f.grid().dim(), f.grid().points(), f.components()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for z in phys.iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("four bytes"))
}

pub fn decode_field(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < 28 || &bytes[..12] != MAGIC {
        return Err(Error::Format("missing field file header".into()));
    }
    let version = read_u32(bytes, 12);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported field file version {version}")));
    }
    let (dim, points, comps) = (
        read_u32(bytes, 16) as usize,
        read_u32(bytes, 20) as usize,
        read_u32(bytes, 24) as usize,
    );
    let grid = GridSpec::new(dim, points)?;
    let expected = 28 + 16 * comps * grid.len();
    if comps == 0 || bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload holds {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let values = bytes[28..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("eight bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("eight bytes")),
            )
        })
        .collect();
    SpectralField::from_physical(grid, comps, values)
}

/// Write the binary file and its JSON sidecar.
pub fn write_field(path: &Path, f: &SpectralField) -> Result<()> {
    fs::File::create(path)?.write_all(&encode_field(f))?;
    let meta = serde_json::to_string_pretty(&Sidecar::for_field(f))?;
    fs::write(sidecar_path(path), meta + "\n")?;
    Ok(())
}

/// Read a binary field file; the sidecar, when present, must agree.
pub fn read_field(path: &Path) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let f = decode_field(&bytes)?;
    let side = sidecar_path(path);
    if side.exists() {
        let meta: Sidecar = serde_json::from_str(&fs::read_to_string(side)?)?;
        let want = Sidecar::for_field(&f);
        if (meta.dim, meta.points, meta.components) != (want.dim, want.points, want.components) {
            return Err(Error::Format("sidecar disagrees with the binary header".into()));
        }
    }
    Ok(f)
}
