//! File formats: k-space header plus raw data, 16-bit PGM, CSV tables.
//! Every file is written to a temporary sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Image, KSpace};
use crate::error::{Error, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let name = path.file_name().ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row and LF line endings.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, csv_string(header, rows).as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSpaceHeader {
    pub version: u32,
    pub channels: usize,
    pub nx: usize,
    pub ny: usize,
    pub dtype: String,
    pub layout: String,
    /// Raw data file name, relative to the header.
    pub data: String,
}

const DTYPE: &str = "complex128-le";
const LAYOUT: &str = "channel-major row-major";

/// Writes `<stem>.json` and `<stem>.raw` into `dir`; returns the header path.
pub fn write_kspace(dir: &Path, stem: &str, k: &KSpace) -> Result<PathBuf> {
    let data_name = format!("{stem}.raw");
    let mut raw = Vec::with_capacity(k.channels() * k.nx * k.ny * 16);
    for ch in &k.data {
        if ch.len() != k.nx * k.ny {
            return Err(Error::DimensionMismatch { expected: k.nx * k.ny, got: ch.len() });
        }
        for z in ch {
            raw.extend_from_slice(&z.re.to_le_bytes());
            raw.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    write_atomic(&dir.join(&data_name), &raw)?;
    let header = KSpaceHeader {
        version: 1,
        channels: k.channels(),
        nx: k.nx,
        ny: k.ny,
        dtype: DTYPE.into(),
        layout: LAYOUT.into(),
        data: data_name,
    };
    let path = dir.join(format!("{stem}.json"));
    write_json(&path, &header)?;
    Ok(path)
}

pub fn read_kspace(header_path: &Path) -> Result<KSpace> {
    let header: KSpaceHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    if header.dtype != DTYPE || header.layout != LAYOUT {
        return Err(Error::Format(format!("unsupported dtype/layout {:?}/{:?}", header.dtype, header.layout)));
    }
    let dir = header_path.parent().unwrap_or(Path::new("."));
    let raw = fs::read(dir.join(&header.data))?;
    let n = header.nx * header.ny;
    if raw.len() != header.channels * n * 16 {
        return Err(Error::Format(format!("expected {} bytes of k-space data, found {}", header.channels * n * 16, raw.len())));
    }
    let vals: Vec<f64> = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
    let data = vals
        .chunks_exact(2 * n)
        .map(|ch| ch.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
        .collect();
    Ok(KSpace { nx: header.nx, ny: header.ny, data })
}

/// Binary 16-bit PGM, scaled so the image maximum maps to 65535.
pub fn pgm_bytes(img: &Image) -> Vec<u8> {
    let max = img.pixels.iter().copied().filter(|p| p.is_finite()).fold(0.0, f64::max);
    let mut out = format!("P5\n{} {}\n65535\n", img.nx, img.ny).into_bytes();
    for &p in &img.pixels {
        let v = if max > 0.0 { (p.max(0.0) / max * 65535.0).round() as u16 } else { 0 };
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

pub fn write_pgm(path: &Path, img: &Image) -> Result<()> {
    write_atomic(path, &pgm_bytes(img))
}

/// Little-endian `f64` pixels, row-major.
pub fn write_raw_f64(path: &Path, img: &Image) -> Result<()> {
    let bytes: Vec<u8> = img.pixels.iter().flat_map(|p| p.to_le_bytes()).collect();
    write_atomic(path, &bytes)
}

/// Parses a 16-bit PGM; pixel values are returned in `[0, 1]`.
pub fn read_pgm(path: &Path) -> Result<Image> {
    let bytes = fs::read(path)?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM field {s:?}")));
    if fields[0] != "P5" {
        return Err(Error::Format("not a binary PGM".into()));
    }
    let (nx, ny, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval < 256 || bytes.len() < pos + 2 * nx * ny {
        return Err(Error::Format("expected 16-bit PGM data".into()));
    }
    let pixels = bytes[pos..pos + 2 * nx * ny]
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 / maxval as f64)
        .collect();
    Ok(Image { nx, ny, pixels })
}
