//! Binary field snapshots.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `HYLABSNP` |
//! | 2 | format version (`u16`, currently 1) |
//! | 1 | dtype tag: 1 = `f64`, 2 = complex `f64` pairs `(re, im)` |
//! | 1 | number of dimensions `d` |
//! | 8·d | dimensions (`u64`), slowest-varying first |
//! | 4 | length `m` of the metadata block (`u32`) |
//! | m | UTF-8 JSON metadata (axes, quantity, units, time) |
//! | … | payload, row-major, little-endian `f64` |

use std::io::{Read, Write};
use std::path::Path;

use hylab::C64;
use serde::{Deserialize, Serialize};

pub const MAGIC: &[u8; 8] = b"HYLABSNP";
pub const SNAPSHOT_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DType {
    F64 = 1,
    C128 = 2,
}

/// One axis: `coordinate(k) = origin + k·spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub origin: f64,
    pub spacing: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub quantity: String,
    pub unit: String,
    pub t: f64,
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dims: Vec<usize>,
    pub meta: SnapshotMeta,
    pub payload: Payload,
}

impl Snapshot {
    pub fn real(dims: Vec<usize>, meta: SnapshotMeta, values: Vec<f64>) -> Self {
        assert_eq!(dims.iter().product::<usize>(), values.len(), "snapshot dims do not match the payload");
        Self { dims, meta, payload: Payload::Real(values) }
    }

    pub fn complex(dims: Vec<usize>, meta: SnapshotMeta, values: Vec<C64>) -> Self {
        assert_eq!(dims.iter().product::<usize>(), values.len(), "snapshot dims do not match the payload");
        Self { dims, meta, payload: Payload::Complex(values) }
    }

    pub fn dtype(&self) -> DType {
        match self.payload {
            Payload::Real(_) => DType::F64,
            Payload::Complex(_) => DType::C128,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let meta = serde_json::to_vec(&self.meta).expect("metadata serializes");
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        out.push(self.dtype() as u8);
        out.push(u8::try_from(self.dims.len()).expect("at most 255 dimensions"));
        for &d in &self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        out.extend_from_slice(&u32::try_from(meta.len()).expect("metadata under 4 GiB").to_le_bytes());
        out.extend_from_slice(&meta);
        match &self.payload {
            Payload::Real(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            Payload::Complex(v) => v.iter().for_each(|z| {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, String> {
        let mut r = bytes;
        let mut take = |n: usize| -> Result<Vec<u8>, String> {
            let mut buf = vec![0; n];
            r.read_exact(&mut buf).map_err(|_| "truncated snapshot".to_string())?;
            Ok(buf)
        };
        if take(8)? != MAGIC {
            return Err("not a hylab snapshot".into());
        }
        let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
        if version != SNAPSHOT_VERSION {
            return Err(format!("unsupported snapshot version {version}"));
        }
        let dtype = take(1)?[0];
        let ndim = take(1)?[0] as usize;
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            dims.push(u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize);
        }
        let mlen = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let meta: SnapshotMeta = serde_json::from_slice(&take(mlen)?).map_err(|e| e.to_string())?;
        let count: usize = dims.iter().product();
        let f = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
        let payload = match dtype {
            1 => Payload::Real(take(8 * count)?.chunks_exact(8).map(f).collect()),
            2 => {
                Payload::Complex(take(16 * count)?.chunks_exact(16).map(|c| C64::new(f(&c[..8]), f(&c[8..]))).collect())
            }
            t => return Err(format!("unknown dtype tag {t}")),
        };
        Ok(Self { dims, meta, payload })
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
        Self::from_bytes(&bytes)
    }
}
