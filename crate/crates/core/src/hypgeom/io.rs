//! Grid and field serialization.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic      4 bytes  "HGRD"
//! version    u32      1
//! dim        u32
//! shape      dim x u64
//! origin     dim x f64
//! h          f64
//! runs       u64      number of mask runs
//! run        runs x (kind u8, length u64)   node kinds in storage order
//! payload    f64 per masked node, storage order
//! ```
//!
//! Storage order has axis 0 varying fastest. Node kinds are coded
//! 0 = outside, 1 = interior, 2 = boundary.

use std::io::Write;

use super::geometry::GeometryField;
use super::grid::{GraphGrid, NodeKind};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"HGRD";
const VERSION: u32 = 1;

pub fn encode_binary(grid: &GraphGrid) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for &s in grid.shape() {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for &o in grid.origin() {
        out.extend_from_slice(&o.to_le_bytes());
    }
    out.extend_from_slice(&grid.h().to_le_bytes());
    let mut runs: Vec<(NodeKind, u64)> = Vec::new();
    for &k in grid.kinds() {
        match runs.last_mut() {
            Some((last, len)) if *last == k => *len += 1,
            _ => runs.push((k, 1)),
        }
    }
    out.extend_from_slice(&(runs.len() as u64).to_le_bytes());
    for (k, len) in runs {
        out.push(k as u8);
        out.extend_from_slice(&len.to_le_bytes());
    }
    for (k, &v) in grid.kinds().iter().zip(grid.heights()) {
        if k.is_masked() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format(format!("truncated grid data at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
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
}

pub fn decode_binary(bytes: &[u8]) -> Result<GraphGrid> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic, expected HGRD".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported grid version {version}")));
    }
    let dim = r.u32()? as usize;
    if !(2..=3).contains(&dim) {
        return Err(Error::Format(format!("unsupported dimension {dim}")));
    }
    let shape = (0..dim)
        .map(|_| r.u64().map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let origin = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let h = r.f64()?;
    let len = shape
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::Format("grid shape overflows".into()))?;
    let runs = r.u64()?;
    let mut kinds = Vec::with_capacity(len);
    for _ in 0..runs {
        let code = r.u8()?;
        let kind = NodeKind::from_code(code)
            .ok_or_else(|| Error::Format(format!("unknown node kind {code}")))?;
        let n = r.u64()? as usize;
        if kinds.len() + n > len {
            return Err(Error::Format("mask runs exceed node count".into()));
        }
        kinds.extend(std::iter::repeat_n(kind, n));
    }
    if kinds.len() != len {
        return Err(Error::Format(format!(
            "mask runs cover {} of {len} nodes",
            kinds.len()
        )));
    }
    let mut u = vec![0.0; len];
    for (k, v) in kinds.iter().zip(u.iter_mut()) {
        if k.is_masked() {
            *v = r.f64()?;
        }
    }
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    GraphGrid::new(dim, shape, origin, h, kinds, u)
}

fn kind_name(k: NodeKind) -> &'static str {
    match k {
        NodeKind::Outside => "outside",
        NodeKind::Interior => "interior",
        NodeKind::Boundary => "boundary",
    }
}

fn coord_header(dim: usize) -> String {
    (1..=dim).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",")
}

/// CSV with one row per masked node: `x1,…,xn,kind,u`.
pub fn write_grid_csv(grid: &GraphGrid, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{},kind,u", coord_header(grid.dim()))?;
    for i in 0..grid.len() {
        if !grid.is_masked(i) {
            continue;
        }
        let c = grid.coords(i);
        let xs: Vec<String> = c.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{},{},{:e}", xs.join(","), kind_name(grid.kind(i)), grid.height(i))?;
    }
    Ok(())
}

/// CSV with one row per node with geometry: coordinates, kind, `u`,
/// `ν^{n+1}` and the descending principal curvatures.
pub fn write_curvature_csv(grid: &GraphGrid, field: &GeometryField, mut out: impl Write) -> std::io::Result<()> {
    let n = grid.dim();
    let kappa_cols: Vec<String> = (1..=n).map(|k| format!("kappa{k}")).collect();
    writeln!(out, "{},kind,u,nu,{}", coord_header(n), kappa_cols.join(","))?;
    for i in 0..grid.len() {
        let Some(g) = field.get(i) else { continue };
        let xs: Vec<String> = grid.coords(i).iter().map(|v| format!("{v:e}")).collect();
        let ks: Vec<String> = g.kappa.iter().map(|v| format!("{v:e}")).collect();
        writeln!(
            out,
            "{},{},{:e},{:e},{}",
            xs.join(","),
            kind_name(grid.kind(i)),
            g.u,
            g.nu,
            ks.join(",")
        )?;
    }
    Ok(())
}

/// Pixel `(row, col)` of a node in the heatmap: column follows axis 0,
/// rows run from the largest axis-1 index down. Three-dimensional grids
/// are rendered through their middle axis-2 slice.
pub fn heatmap_pixel(grid: &GraphGrid, i: usize) -> Option<(usize, usize)> {
    let mi = grid.multi_index(i);
    if grid.dim() == 3 && mi[2] != grid.shape()[2] / 2 {
        return None;
    }
    Some((grid.shape()[1] - 1 - mi[1], mi[0]))
}

/// 8-bit binary PGM of a per-node field. Values on masked nodes (those
/// with `Some` finite value) are scaled linearly so min maps to 0 and max to
/// 255; a constant field maps to 255. Everything else is 0.
pub fn encode_pgm(grid: &GraphGrid, field: &[Option<f64>]) -> Vec<u8> {
    let (width, height) = (grid.shape()[0], grid.shape()[1]);
    let mut pixels = vec![0u8; width * height];
    let values: Vec<(usize, f64)> = (0..grid.len())
        .filter_map(|i| match field.get(i).copied().flatten() {
            Some(v) if v.is_finite() && grid.is_masked(i) => heatmap_pixel(grid, i).map(|_| (i, v)),
            _ => None,
        })
        .collect();
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    for &(i, v) in &values {
        let (row, col) = heatmap_pixel(grid, i).expect("filtered above");
        let level = if max > min {
            ((v - min) / (max - min) * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            255
        };
        pixels[row * width + col] = level;
    }
    let (min, max) = if values.is_empty() { (0.0, 0.0) } else { (min, max) };
    let mut out = format!("P5\n# min={min:e} max={max:e}\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    out
}
