//! Binary snapshots.
//!
//! Layout, little-endian: `b"RWL1"`, `n1: u32`, `n2: u32`, then `x1_min`,
//! `x1_max`, `t`, `gamma`, `k0` as `f64`, then the row-major planes
//! `rho`, `rho v1`, `rho v2`. Files carrying derived planes continue with
//! `b"XPLN"`, a `u32` plane count, the plane names (`u16` length + UTF-8),
//! and the extra planes in the same order. Readers of plain snapshots stop
//! after the third plane.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::FlowField;
use crate::error::{Error, Result};
use crate::gas::PolytropicGas;
use crate::grid::Grid;

const MAGIC: &[u8; 4] = b"RWL1";
const EXT: &[u8; 4] = b"XPLN";

#[derive(Debug, Clone, PartialEq)]
pub struct NamedPlane {
    pub name: String,
    pub data: Vec<f64>,
}

pub fn write_snapshot(path: &Path, field: &FlowField) -> Result<()> {
    write_planes(path, field, &[])
}

pub fn write_planes(path: &Path, field: &FlowField, extra: &[NamedPlane]) -> Result<()> {
    let g = &field.grid;
    for p in extra {
        if p.data.len() != g.len() {
            return Err(Error::GridMismatch(format!("plane '{}' has {} values, grid has {}", p.name, p.data.len(), g.len())));
        }
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(g.n1 as u32).to_le_bytes())?;
    w.write_all(&(g.n2 as u32).to_le_bytes())?;
    for v in [g.x1_min, g.x1_max, field.time, field.gas.gamma(), field.gas.k0()] {
        w.write_all(&v.to_le_bytes())?;
    }
    for plane in [&field.rho, &field.m1, &field.m2] {
        write_f64s(&mut w, plane)?;
    }
    if !extra.is_empty() {
        w.write_all(EXT)?;
        w.write_all(&(extra.len() as u32).to_le_bytes())?;
        for p in extra {
            let name = p.name.as_bytes();
            w.write_all(&(name.len() as u16).to_le_bytes())?;
            w.write_all(name)?;
        }
        for p in extra {
            write_f64s(&mut w, &p.data)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_f64s(w: &mut impl Write, xs: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(xs.len() * 8);
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Format { path: self.path.to_path_buf(), msg: format!("truncated at byte {}", self.pos) });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn plane(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n * 8)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn fail(&self, msg: impl Into<String>) -> Error {
        Error::Format { path: self.path.to_path_buf(), msg: msg.into() }
    }
}

pub fn read_snapshot(path: &Path) -> Result<FlowField> {
    Ok(read_planes(path)?.0)
}

pub fn read_planes(path: &Path) -> Result<(FlowField, Vec<NamedPlane>)> {
    let bytes = fs::read(path)?;
    let mut c = Cursor { bytes: &bytes, pos: 0, path };
    if c.take(4)? != MAGIC {
        return Err(c.fail("bad magic"));
    }
    let (n1, n2) = (c.u32()? as usize, c.u32()? as usize);
    let (x1_min, x1_max, time, gamma, k0) = (c.f64()?, c.f64()?, c.f64()?, c.f64()?, c.f64()?);
    let grid = Grid::new(n1, n2, x1_min, x1_max).map_err(|e| c.fail(e.to_string()))?;
    let gas = PolytropicGas::new(gamma, k0).map_err(|e| c.fail(e.to_string()))?;
    let n = grid.len();
    let field = FlowField { time, grid, gas, rho: c.plane(n)?, m1: c.plane(n)?, m2: c.plane(n)? };
    let mut extra = Vec::new();
    if c.pos < bytes.len() {
        if c.take(4)? != EXT {
            return Err(c.fail("unknown trailer"));
        }
        let count = c.u32()? as usize;
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let len = c.u16()? as usize;
            let raw = c.take(len)?;
            names.push(String::from_utf8(raw.to_vec()).map_err(|_| c.fail("plane name is not UTF-8"))?);
        }
        for name in names {
            extra.push(NamedPlane { name, data: c.plane(n)? });
        }
        if c.pos != bytes.len() {
            return Err(c.fail("trailing bytes"));
        }
    }
    Ok((field, extra))
}
