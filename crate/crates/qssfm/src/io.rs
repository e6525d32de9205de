//! Artifact formats: the binary field file, CSV exports for plotting, the
//! flat key-value manifest, and the cost/error report writers.
//!
//! Binary field layout (all little-endian): 8-byte magic `CFLD0001`, u32
//! ndim, per-axis u64 shape, per-axis f64 lengths, per-axis f64 origins, one
//! representation byte (0 = position, 1 = spectral), then N interleaved
//! (re, im) f64 pairs in index order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::diagnostics::ErrorReport;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, Representation};
use crate::hybrid::CostReport;
use crate::qsim::GateCostSnapshot;

const FIELD_MAGIC: &[u8; 8] = b"CFLD0001";

pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    let g = field.grid();
    w.write_all(&(g.ndim() as u32).to_le_bytes())?;
    for &n in g.shape() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for &l in g.lengths() {
        w.write_all(&l.to_le_bytes())?;
    }
    for &o in g.origins() {
        w.write_all(&o.to_le_bytes())?;
    }
    let tag: u8 = match field.representation() {
        Representation::Position => 0,
        Representation::Spectral => 1,
    };
    w.write_all(&[tag])?;
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

struct Cursor<R: Read> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.inner.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.inner.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    fn f64(&mut self) -> Result<f64> {
        let mut b = [0u8; 8];
        self.inner.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }

    fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.inner.read_exact(&mut b)?;
        Ok(b[0])
    }
}

pub fn read_field(path: &Path) -> Result<ComplexField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Format(format!("{}: bad magic", path.display())));
    }
    let mut c = Cursor { inner: r };
    let ndim = c.u32()? as usize;
    if ndim == 0 || ndim > 2 {
        return Err(Error::Format(format!("{}: ndim = {ndim}", path.display())));
    }
    let shape: Vec<usize> = (0..ndim)
        .map(|_| c.u64().map(|v| v as usize))
        .collect::<Result<_>>()?;
    let lengths: Vec<f64> = (0..ndim).map(|_| c.f64()).collect::<Result<_>>()?;
    let origins: Vec<f64> = (0..ndim).map(|_| c.f64()).collect::<Result<_>>()?;
    let representation = match c.u8()? {
        0 => Representation::Position,
        1 => Representation::Spectral,
        t => return Err(Error::Format(format!("{}: representation tag {t}", path.display()))),
    };
    let grid = Grid::new(&shape, &lengths, &origins)?;
    let mut values = Vec::with_capacity(grid.total_points());
    for _ in 0..grid.total_points() {
        let re = c.f64()?;
        let im = c.f64()?;
        values.push(Complex64::new(re, im));
    }
    ComplexField::new(grid, values, representation)
}

/// CSV export for plotting: index coordinates, physical coordinates, re, im,
/// and the density.
pub fn write_field_csv(path: &Path, field: &ComplexField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let g = field.grid();
    match g.ndim() {
        1 => {
            writeln!(w, "i,x,re,im,density")?;
            for (i, v) in field.values().iter().enumerate() {
                writeln!(
                    w,
                    "{},{:?},{:?},{:?},{:?}",
                    i,
                    g.coordinate(0, i),
                    v.re,
                    v.im,
                    v.norm_sqr()
                )?;
            }
        }
        _ => {
            writeln!(w, "ix,iy,x,y,re,im,density")?;
            for (flat, v) in field.values().iter().enumerate() {
                let m = g.multi_index(flat);
                writeln!(
                    w,
                    "{},{},{:?},{:?},{:?},{:?},{:?}",
                    m[0],
                    m[1],
                    g.coordinate(0, m[0]),
                    g.coordinate(1, m[1]),
                    v.re,
                    v.im,
                    v.norm_sqr()
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// CSV export of a scalar field keyed by grid coordinates.
pub fn write_scalar_csv(path: &Path, grid: &Grid, name: &str, values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match grid.ndim() {
        1 => {
            writeln!(w, "i,x,{name}")?;
            for (i, v) in values.iter().enumerate() {
                writeln!(w, "{},{:?},{:?}", i, grid.coordinate(0, i), v)?;
            }
        }
        _ => {
            writeln!(w, "ix,iy,x,y,{name}")?;
            for (flat, v) in values.iter().enumerate() {
                let m = grid.multi_index(flat);
                writeln!(
                    w,
                    "{},{},{:?},{:?},{:?}",
                    m[0],
                    m[1],
                    grid.coordinate(0, m[0]),
                    grid.coordinate(1, m[1]),
                    v
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Write a manifest: sorted `key = value` lines, one per entry.
pub fn write_manifest(path: &Path, entries: &BTreeMap<String, String>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (k, v) in entries {
        writeln!(w, "{k} = {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Parse a flat key-value text file; `#` starts a comment, blank lines skip.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_manifest(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse_key_values(&text)
}

/// Structured text report of the gate-cost counters.
pub fn write_ledger_report(path: &Path, snapshot: &GateCostSnapshot) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "qft_count = {}", snapshot.qft_count)?;
    writeln!(w, "diag_kinetic_count = {}", snapshot.diag_kinetic_count)?;
    writeln!(w, "diag_potential_count = {}", snapshot.diag_potential_count)?;
    writeln!(w, "basic_gate_units = {}", snapshot.basic_gate_units)?;
    writeln!(w, "circuit_depth_units = {}", snapshot.circuit_depth_units)?;
    w.flush()?;
    Ok(())
}

/// Cost report: structured text summary plus a per-step CSV.
pub fn write_cost_report(dir: &Path, report: &CostReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(dir.join("cost_report.txt"))?);
    writeln!(w, "total_shots = {}", report.total_shots)?;
    writeln!(w, "total_repreparations = {}", report.total_repreparations)?;
    writeln!(w, "cumulative_depth_units = {}", report.cumulative_depth_units)?;
    writeln!(w, "predicted_runtime_units = {:?}", report.predicted_runtime_units)?;
    w.flush()?;

    let mut c = BufWriter::new(File::create(dir.join("cost_steps.csv"))?);
    writeln!(c, "step,shots,depth_units,repreparations")?;
    for row in &report.per_step {
        writeln!(
            c,
            "{},{},{},{}",
            row.step, row.shots, row.depth_units, row.repreparations
        )?;
    }
    c.flush()?;

    let mut n = BufWriter::new(File::create(dir.join("recon_norms.csv"))?);
    writeln!(n, "step,recon_norm")?;
    for row in &report.per_step {
        writeln!(n, "{},{:?}", row.step, row.recon_norm)?;
    }
    n.flush()?;
    Ok(())
}

/// Error report: structured text with the per-snapshot series.
pub fn write_error_report(path: &Path, report: &ErrorReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "relative_l2_density_error = {:?}", report.relative_l2_density_error)?;
    writeln!(w, "max_pointwise_density_error = {:?}", report.max_pointwise_density_error)?;
    writeln!(w, "norm_deficit = {:?}", report.norm_deficit)?;
    writeln!(w, "snapshots = {}", report.snapshots.len())?;
    for s in &report.snapshots {
        writeln!(
            w,
            "t = {:?}: rel_l2 = {:?}, max_pointwise = {:?}, norm_deficit_ref = {:?}, norm_deficit_test = {:?}",
            s.time,
            s.relative_l2_density_error,
            s.max_pointwise_density_error,
            s.norm_deficit_reference,
            s.norm_deficit_test
        )?;
    }
    w.flush()?;
    Ok(())
}
