//! Versioned little-endian binary files.
//!
//! Every file starts with the magic bytes `RDX1`, a `u16` format version and
//! a one-byte kind tag. Lengths are `u64`, ids and offsets `u32`, reals
//! `f64`.

use std::path::Path;

use rankaccess_core::epsample::EpsSample;
use rankaccess_core::hier::{Adjacency, HierIndex, UpperLayer};
use rankaccess_core::kthlevel2d::{LevelParts, LevelStructure2D, Swap};
use rankaccess_core::srr::{KdNode, KdTree, KdTreeParts};
use rankaccess_core::Dataset;

use crate::error::{data, BenchError, Result};

pub const MAGIC: &[u8; 4] = b"RDX1";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Dataset = 1,
    KdTree = 2,
    Hier = 3,
    Levels2D = 4,
    Sample = 5,
}

impl Kind {
    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            1 => Kind::Dataset,
            2 => Kind::KdTree,
            3 => Kind::Hier,
            4 => Kind::Levels2D,
            5 => Kind::Sample,
            other => return Err(data(format!("unknown file kind {other}"))),
        })
    }
}

/// Any stored object.
#[derive(Debug, Clone, PartialEq)]
pub enum Stored {
    Dataset(Dataset),
    KdTree(KdTree),
    Hier(HierIndex),
    Levels2D(LevelStructure2D),
    Sample(EpsSample),
}

impl Stored {
    pub fn kind(&self) -> Kind {
        match self {
            Stored::Dataset(_) => Kind::Dataset,
            Stored::KdTree(_) => Kind::KdTree,
            Stored::Hier(_) => Kind::Hier,
            Stored::Levels2D(_) => Kind::Levels2D,
            Stored::Sample(_) => Kind::Sample,
        }
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32s(&mut self, vs: &[u32]) {
        self.len(vs.len());
        vs.iter().for_each(|&v| self.u32(v));
    }
    fn f64s(&mut self, vs: &[f64]) {
        self.len(vs.len());
        vs.iter().for_each(|&v| self.f64(v));
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.buf.len() < k {
            return Err(data("file is truncated"));
        }
        let (head, tail) = self.buf.split_at(k);
        self.buf = tail;
        Ok(head)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// A length, rejected when `width`-byte items of that count cannot fit.
    fn len(&mut self, width: usize) -> Result<usize> {
        let v = self.u64()?;
        if v.saturating_mul(width as u64) > self.buf.len() as u64 {
            return Err(data("file is truncated"));
        }
        Ok(v as usize)
    }
    fn u32s(&mut self) -> Result<Vec<u32>> {
        let k = self.len(4)?;
        (0..k).map(|_| self.u32()).collect()
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let k = self.len(8)?;
        (0..k).map(|_| self.f64()).collect()
    }
}

pub fn encode(obj: &Stored) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(MAGIC);
    w.u16(VERSION);
    w.u8(obj.kind() as u8);
    match obj {
        Stored::Dataset(d) => {
            w.len(d.dim());
            w.f64s(d.raw());
        }
        Stored::KdTree(t) => {
            let parts = t.clone().into_parts();
            w.len(parts.dim);
            w.u32s(&parts.perm);
            w.len(parts.nodes.len());
            for node in &parts.nodes {
                for v in [node.start, node.end, node.left, node.right] {
                    w.u32(v);
                }
            }
            w.f64s(&parts.bounds);
        }
        Stored::Hier(h) => {
            w.len(h.dim());
            w.len(h.len());
            w.len(h.decay());
            w.u64(h.seed());
            w.len(h.upper_layers().len());
            for layer in h.upper_layers() {
                w.u32s(&layer.ids);
                w.u32s(&layer.children.offsets);
                w.u32s(&layer.children.items);
                w.f64s(&layer.centers);
                w.f64s(&layer.radii);
                w.u32s(&layer.area_sizes);
            }
        }
        Stored::Levels2D(s) => {
            let parts = s.clone().into_parts();
            w.f64s(&parts.coords);
            w.u32s(&parts.initial);
            w.len(parts.swaps.len());
            for list in &parts.swaps {
                w.len(list.len());
                for sw in list {
                    w.f64(sw.angle);
                    w.u32(sw.seq);
                    w.u32(sw.upper);
                    w.u32(sw.lower);
                }
            }
        }
        Stored::Sample(s) => {
            w.len(s.source_n);
            w.f64(s.epsilon);
            w.f64(s.phi);
            w.u64(s.seed);
            w.u32s(s.ids());
        }
    }
    w.0
}

pub fn decode(bytes: &[u8]) -> Result<Stored> {
    let mut r = Reader { buf: bytes };
    if r.take(4).ok() != Some(MAGIC.as_slice()) {
        return Err(data("not an index file (bad magic bytes)"));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(data(format!("unsupported format version {version}")));
    }
    let obj = match Kind::from_byte(r.u8()?)? {
        Kind::Dataset => {
            let dim = r.len(0)?;
            Stored::Dataset(Dataset::new(dim, r.f64s()?)?)
        }
        Kind::KdTree => {
            let dim = r.len(0)?;
            let perm = r.u32s()?;
            let count = r.len(16)?;
            let nodes = (0..count)
                .map(|_| {
                    Ok(KdNode {
                        start: r.u32()?,
                        end: r.u32()?,
                        left: r.u32()?,
                        right: r.u32()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let bounds = r.f64s()?;
            Stored::KdTree(KdTree::from_parts(KdTreeParts {
                dim,
                perm,
                nodes,
                bounds,
            })?)
        }
        Kind::Hier => {
            let dim = r.len(0)?;
            let n = r.len(0)?;
            let decay = r.len(0)?;
            let seed = r.u64()?;
            let layers = r.len(1)?;
            let mut upper = Vec::with_capacity(layers);
            for _ in 0..layers {
                upper.push(UpperLayer {
                    ids: r.u32s()?,
                    children: Adjacency {
                        offsets: r.u32s()?,
                        items: r.u32s()?,
                    },
                    centers: r.f64s()?,
                    radii: r.f64s()?,
                    area_sizes: r.u32s()?,
                });
            }
            Stored::Hier(HierIndex::from_parts(dim, n, decay, seed, upper)?)
        }
        Kind::Levels2D => {
            let coords = r.f64s()?;
            let initial = r.u32s()?;
            let lists = r.len(8)?;
            let mut swaps = Vec::with_capacity(lists);
            for _ in 0..lists {
                let k = r.len(20)?;
                let list = (0..k)
                    .map(|_| {
                        Ok(Swap {
                            angle: r.f64()?,
                            seq: r.u32()?,
                            upper: r.u32()?,
                            lower: r.u32()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                swaps.push(list);
            }
            Stored::Levels2D(LevelStructure2D::from_parts(LevelParts {
                coords,
                initial,
                swaps,
            })?)
        }
        Kind::Sample => {
            let source_n = r.len(0)?;
            let epsilon = r.f64()?;
            let phi = r.f64()?;
            let seed = r.u64()?;
            let ids = r.u32s()?;
            Stored::Sample(EpsSample::from_ids(ids, epsilon, phi, source_n, seed)?)
        }
    };
    if !r.buf.is_empty() {
        return Err(data("trailing bytes after stored object"));
    }
    Ok(obj)
}

pub fn save(path: &Path, obj: &Stored) -> Result<usize> {
    let bytes = encode(obj);
    std::fs::write(path, &bytes).map_err(|e| BenchError::io(path, e))?;
    Ok(bytes.len())
}

pub fn load(path: &Path) -> Result<Stored> {
    let bytes = std::fs::read(path).map_err(|e| BenchError::io(path, e))?;
    decode(&bytes)
}

/// Loads a dataset from a `.csv` file (all columns, as is) or a stored
/// dataset file.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return Ok(crate::ingest::load_csv(path, &[], crate::ingest::Normalization::None)?.data);
    }
    match load(path)? {
        Stored::Dataset(d) => Ok(d),
        other => Err(data(format!(
            "{} holds a {:?}, not a dataset",
            path.display(),
            other.kind()
        ))),
    }
}
