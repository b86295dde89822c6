//! Binary dataset files and the text manifest tying a clean/corrupt pair.
//!
//! A stack file is the magic `RDAE1`, `u32` pixel count `P`, `u32` column
//! count `Q`, a `u8` signature kind, a `u8` role, `Q` column records
//! (`u16` interval, `u16` realisation, `u8` wall class) and `P·Q`
//! little-endian `f64` values in column-major order.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::{ColumnMeta, ImageStack, PairedDataset, SignatureKind, WallClass};
use crate::error::{Error, Result};

const MAGIC: &[u8; 5] = b"RDAE1";

/// Whether a stack holds clean targets or corrupt inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackRole {
    Clean,
    Corrupt,
}

impl StackRole {
    fn tag(self) -> u8 {
        match self {
            StackRole::Clean => 0,
            StackRole::Corrupt => 1,
        }
    }

    fn from_tag(t: u8) -> Option<Self> {
        match t {
            0 => Some(StackRole::Clean),
            1 => Some(StackRole::Corrupt),
            _ => None,
        }
    }
}

/// Little-endian reader over a byte slice; running short is a format error.
pub(crate) struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(Error::Format(format!(
                "truncated: wanted {n} bytes at offset {}, {} available",
                self.pos,
                self.bytes.len() - self.pos
            )));
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| Error::Format("value count overflows".into()))?;
        let raw = self.take(len)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

/// Writes one stack. Image shape is not stored; see [`save_dataset`].
pub fn write_stack(stack: &ImageStack, role: StackRole, mut w: impl Write) -> Result<()> {
    let (p, q) = stack.data().shape();
    let p32 = u32::try_from(p).map_err(|_| Error::Format("too many pixels".into()))?;
    let q32 = u32::try_from(q).map_err(|_| Error::Format("too many columns".into()))?;
    let mut buf = Vec::with_capacity(16 + 5 * q + 8 * p * q);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&p32.to_le_bytes());
    buf.extend_from_slice(&q32.to_le_bytes());
    buf.push(stack.kind().tag());
    buf.push(role.tag());
    for m in stack.columns() {
        buf.extend_from_slice(&m.interval.to_le_bytes());
        buf.extend_from_slice(&m.realization.to_le_bytes());
        buf.push(m.wall.tag());
    }
    for v in stack.data().iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads one stack. Square pixel counts are given a square shape, anything
/// else a single column; [`load_dataset`] restores the real shape.
pub fn read_stack(mut r: impl Read) -> Result<(ImageStack, StackRole)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut cur = Cursor::new(&bytes);
    if cur.take(MAGIC.len())? != MAGIC {
        return Err(Error::Format("bad dataset magic".into()));
    }
    let p = cur.u32()? as usize;
    let q = cur.u32()? as usize;
    let kind = SignatureKind::from_tag(cur.u8()?).ok_or_else(|| Error::Format("unknown signature kind".into()))?;
    let role = StackRole::from_tag(cur.u8()?).ok_or_else(|| Error::Format("unknown stack role".into()))?;
    let mut columns = Vec::with_capacity(q.min(1 << 20));
    for _ in 0..q {
        let interval = cur.u16()?;
        let realization = cur.u16()?;
        let wall = WallClass::from_tag(cur.u8()?).ok_or_else(|| Error::Format("unknown wall class".into()))?;
        columns.push(ColumnMeta {
            interval,
            realization,
            wall,
        });
    }
    let count = p
        .checked_mul(q)
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let values = cur.f64s(count)?;
    if !cur.is_empty() {
        return Err(Error::Format("trailing bytes after dataset".into()));
    }
    let side = (p as f64).sqrt().round() as usize;
    let (rows, cols) = if side * side == p { (side, side) } else { (p, 1) };
    let stack = ImageStack::new(DMatrix::from_vec(p, q, values), rows, cols, kind, columns)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok((stack, role))
}

fn sibling(manifest: &Path, suffix: &str) -> (PathBuf, String) {
    let stem = manifest
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let name = format!("{stem}.{suffix}.rdae");
    (manifest.with_file_name(&name), name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `<stem>.clean.rdae`, `<stem>.corrupt.rdae` and the manifest.
pub fn save_dataset(pair: &PairedDataset, manifest: &Path) -> Result<()> {
    let (clean_path, clean_name) = sibling(manifest, "clean");
    let (corrupt_path, corrupt_name) = sibling(manifest, "corrupt");
    let mut buf = Vec::new();
    write_stack(&pair.clean, StackRole::Clean, &mut buf)?;
    write_atomic(&clean_path, &buf)?;
    buf.clear();
    write_stack(&pair.corrupt, StackRole::Corrupt, &mut buf)?;
    write_atomic(&corrupt_path, &buf)?;
    let (rows, cols) = pair.clean.image_shape();
    let seeds: Vec<String> = pair.seeds.iter().map(u64::to_string).collect();
    let text = format!(
        "clean = {clean_name}\ncorrupt = {corrupt_name}\nimage_rows = {rows}\nimage_cols = {cols}\nconfig_hash = {}\nseeds = {}\n",
        pair.config_hash,
        seeds.join(",")
    );
    write_atomic(manifest, text.as_bytes())
}

/// Loads a pair written by [`save_dataset`]. Nothing is returned unless both
/// files parse and agree with each other and the manifest.
pub fn load_dataset(manifest: &Path) -> Result<PairedDataset> {
    let text = fs::read_to_string(manifest)?;
    let mut fields = std::collections::HashMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("manifest line without '=': {line}")))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Format(format!("manifest lacks {k}")))
    };
    let dim = |k: &str| -> Result<usize> {
        get(k)?
            .parse()
            .map_err(|_| Error::Format(format!("manifest {k} is not a count")))
    };
    let rows = dim("image_rows")?;
    let cols = dim("image_cols")?;
    let dir = manifest.parent().unwrap_or(Path::new(""));
    let load = |name: String, want: StackRole| -> Result<ImageStack> {
        let (s, role) = read_stack(fs::File::open(dir.join(&name))?)?;
        if role != want {
            return Err(Error::Format(format!("{name} has role {role:?}, expected {want:?}")));
        }
        if rows * cols != s.pixels() {
            return Err(Error::Format(format!(
                "{name} has {} pixels, manifest says {rows}x{cols}",
                s.pixels()
            )));
        }
        let kind = s.kind();
        let columns = s.columns().to_vec();
        ImageStack::new(s.into_data(), rows, cols, kind, columns).map_err(|e| Error::Format(e.to_string()))
    };
    let clean = load(get("clean")?, StackRole::Clean)?;
    let corrupt = load(get("corrupt")?, StackRole::Corrupt)?;
    if clean.data().shape() != corrupt.data().shape() {
        return Err(Error::Format("clean and corrupt stacks differ in shape".into()));
    }
    let seeds = match fields.get("seeds").map(String::as_str) {
        None | Some("") => Vec::new(),
        Some(list) => list
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| Error::Format(format!("manifest seed {v:?} is not a u64"))))
            .collect::<Result<_>>()?,
    };
    Ok(PairedDataset {
        clean,
        corrupt,
        config_hash: get("config_hash")?,
        seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack() -> ImageStack {
        let data = DMatrix::from_fn(4, 3, |r, c| (r + 4 * c) as f64 / 12.0);
        let columns = (0..3)
            .map(|j| ColumnMeta {
                interval: j,
                realization: 7,
                wall: WallClass::LowConductivity,
            })
            .collect();
        ImageStack::new(data, 2, 2, SignatureKind::Spectrogram, columns).unwrap()
    }

    #[test]
    fn stack_round_trip_is_bitwise() {
        let s = stack();
        let mut buf = Vec::new();
        write_stack(&s, StackRole::Corrupt, &mut buf).unwrap();
        assert_eq!(buf.len(), 5 + 4 + 4 + 2 + 3 * 5 + 12 * 8);
        let (back, role) = read_stack(buf.as_slice()).unwrap();
        assert_eq!(role, StackRole::Corrupt);
        assert_eq!(back, s);
    }

    #[test]
    fn truncation_and_trailing_bytes_are_rejected() {
        let mut buf = Vec::new();
        write_stack(&stack(), StackRole::Clean, &mut buf).unwrap();
        for cut in [0, 3, 10, 20, buf.len() - 1] {
            assert!(matches!(read_stack(&buf[..cut]), Err(Error::Format(_))), "cut {cut}");
        }
        buf.push(0);
        assert!(matches!(read_stack(buf.as_slice()), Err(Error::Format(_))));
    }
}
