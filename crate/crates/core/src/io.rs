//! Run artifacts: norm time series as CSV, JSON run reports, raw field snapshots and
//! bound-state tables.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, C64};
use crate::nonlinearity::Nonlinearity;
use crate::serde_ext::{fmt_f64, parse_f64};
use crate::solitons::BoundState;

pub const CSV_HEADER: &str = "t,norm_id,p,q,value";

/// One row of a norm time series; `q` is empty for isotropic norms.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub norm_id: String,
    pub p: f64,
    pub q: Option<f64>,
    pub value: f64,
}

impl NormRow {
    pub fn new(t: f64, norm_id: &str, p: f64, q: Option<f64>, value: f64) -> Self {
        NormRow { t, norm_id: norm_id.into(), p, q, value }
    }
}

pub fn write_norm_csv<W: Write>(out: W, rows: &[NormRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        let q = r.q.map(fmt_f64).unwrap_or_default();
        w.write_record([fmt_f64(r.t), r.norm_id.clone(), fmt_f64(r.p), q, fmt_f64(r.value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_norm_csv<R: Read>(input: R) -> Result<Vec<NormRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Format(format!("CSV header `{}`, expected `{CSV_HEADER}`", header.join(","))));
    }
    let num = |s: &str, line: usize| parse_f64(s).ok_or_else(|| Error::Format(format!("row {line}: bad number `{s}`")));
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != 5 {
            return Err(Error::Format(format!("row {}: {} fields", k + 1, rec.len())));
        }
        let q = if rec[3].is_empty() { None } else { Some(num(&rec[3], k + 1)?) };
        rows.push(NormRow { t: num(&rec[0], k + 1)?, norm_id: rec[1].to_string(), p: num(&rec[2], k + 1)?, q, value: num(&rec[4], k + 1)? });
    }
    Ok(rows)
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

/// JSON run report. The named keys are always present (null when a run has no such quantity).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub subcommand: String,
    /// Seconds since the Unix epoch; the only field that differs between identical runs.
    pub timestamp: u64,
    pub seed: u64,
    pub config: Value,
    pub plan: Value,
    pub grid: Value,
    pub schedule: Value,
    pub lambda_hat: Option<f64>,
    pub c1_hat: Option<f64>,
    pub contraction_factors: Value,
    pub residuals: Value,
    pub wraparound: Option<f64>,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(subcommand: &str, seed: u64, config: Value) -> Self {
        let timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        RunReport { subcommand: subcommand.into(), timestamp, seed, config, ..Default::default() }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        serde_json::from_reader(BufReader::new(File::open(path)?)).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

pub const NLSF_MAGIC: &[u8; 4] = b"NLSF";
pub const NLSF_VERSION: u32 = 1;

/// Header: magic, `u32` version, `u32` dim, `u32` N per axis, `f64` L per axis, `f64` t;
/// then interleaved real/imaginary `f64` samples in index order. All little-endian.
pub fn write_field<W: Write>(mut out: W, u: &Field) -> Result<()> {
    out.write_all(NLSF_MAGIC)?;
    out.write_all(&NLSF_VERSION.to_le_bytes())?;
    out.write_all(&(u.grid.dim() as u32).to_le_bytes())?;
    for &n in &u.grid.n {
        out.write_all(&(n as u32).to_le_bytes())?;
    }
    for &l in &u.grid.half_width {
        out.write_all(&l.to_le_bytes())?;
    }
    out.write_all(&u.t.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * u.data.len());
    for z in &u.data {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut input: R) -> Result<Field> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(|_| Error::Format("truncated NLSF header".into()))?;
    if &magic != NLSF_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut u32_buf = [0u8; 4];
    let mut f64_buf = [0u8; 8];
    let mut next_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u32_buf).map_err(|_| Error::Format("truncated NLSF header".into()))?;
        Ok(u32::from_le_bytes(u32_buf))
    };
    let version = next_u32(&mut input)?;
    if version != NLSF_VERSION {
        return Err(Error::Format(format!("unsupported NLSF version {version}")));
    }
    let dim = next_u32(&mut input)? as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::Format(format!("NLSF dimension {dim}")));
    }
    let n = (0..dim).map(|_| next_u32(&mut input).map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let mut next_f64 = |r: &mut R| -> Result<f64> {
        r.read_exact(&mut f64_buf).map_err(|_| Error::Format("truncated NLSF header".into()))?;
        Ok(f64::from_le_bytes(f64_buf))
    };
    let half_width = (0..dim).map(|_| next_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let t = next_f64(&mut input)?;
    let grid = Grid::new(n, half_width).map_err(|e| Error::Format(e.to_string()))?;
    let mut raw = vec![0u8; 16 * grid.len()];
    input.read_exact(&mut raw).map_err(|_| Error::Format("truncated NLSF samples".into()))?;
    let data = raw
        .chunks_exact(16)
        .map(|c| C64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
        .collect();
    Field::new(&grid, t, data)
}

pub const TABLE_VERSION: u32 = 1;

/// Versioned text table: `key=value` header lines, then `r,phi` rows with 17 significant digits.
pub fn write_bound_state<W: Write>(mut out: W, bs: &BoundState) -> Result<()> {
    let r = bs.radii();
    writeln!(out, "# bound-state table v{TABLE_VERSION}")?;
    writeln!(out, "dim={}", bs.dim)?;
    writeln!(out, "omega={}", fmt_f64(bs.omega))?;
    writeln!(out, "alpha1={}", fmt_f64(bs.nl.alpha1))?;
    writeln!(out, "alpha2={}", fmt_f64(bs.nl.alpha2))?;
    writeln!(out, "c={}", fmt_f64(bs.nl.c))?;
    writeln!(out, "n_samples={}", bs.phi.len())?;
    writeln!(out, "r,phi")?;
    for (ri, pi) in r.iter().zip(&bs.phi) {
        writeln!(out, "{},{}", fmt_f64(*ri), fmt_f64(*pi))?;
    }
    Ok(())
}

pub fn read_bound_state<R: Read>(input: R) -> Result<BoundState> {
    let mut lines = BufReader::new(input).lines();
    let mut next = || -> Result<String> {
        lines.next().ok_or_else(|| Error::Format("truncated bound-state table".into()))?.map_err(Error::from)
    };
    let first = next()?;
    if first.trim() != format!("# bound-state table v{TABLE_VERSION}") {
        return Err(Error::Format(format!("unknown table header `{first}`")));
    }
    let mut field = |key: &str| -> Result<String> {
        let line = next()?;
        match line.split_once('=') {
            Some((k, v)) if k.trim() == key => Ok(v.trim().to_string()),
            _ => Err(Error::Format(format!("expected `{key}=`, found `{line}`"))),
        }
    };
    let num = |s: String| parse_f64(&s).ok_or_else(|| Error::Format(format!("bad number `{s}`")));
    let dim: usize = field("dim")?.parse().map_err(|_| Error::Format("bad dim".into()))?;
    let omega = num(field("omega")?)?;
    let alpha1 = num(field("alpha1")?)?;
    let alpha2 = num(field("alpha2")?)?;
    let c = num(field("c")?)?;
    let n: usize = field("n_samples")?.parse().map_err(|_| Error::Format("bad n_samples".into()))?;
    if next()?.trim() != "r,phi" {
        return Err(Error::Format("missing `r,phi` column line".into()));
    }
    let mut r = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for k in 0..n {
        let line = next()?;
        let (a, b) = line.split_once(',').ok_or_else(|| Error::Format(format!("row {k}: `{line}`")))?;
        r.push(num(a.to_string())?);
        phi.push(num(b.to_string())?);
    }
    let nl = Nonlinearity::new(alpha1, alpha2, c, dim).map_err(|e| Error::Format(e.to_string()))?;
    BoundState::from_table(&nl, dim, omega, &r, &phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            NormRow::new(0.0, "L2", 2.0, None, 1.5),
            NormRow::new(0.1, "Linfx1", f64::INFINITY, Some(2.0), 1.0 / 3.0),
        ];
        let mut buf = Vec::new();
        write_norm_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,norm_id,p,q,value\n"));
        assert!(text.contains("inf,2.0000000000000000e0,3.3333333333333331e-1\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_norm_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn csv_schema_errors() {
        assert!(read_norm_csv("t,id,p,q,value\n".as_bytes()).is_err());
        assert!(read_norm_csv("t,norm_id,p,q,value\n0,L2,x,,1\n".as_bytes()).is_err());
    }

    #[test]
    fn field_round_trip() {
        let g = Grid::new(vec![4, 8], vec![1.0, 2.5]).unwrap();
        let u = Field::from_fn(&g, 0.75, |x| C64::new(x[0], -x[1]));
        let mut buf = Vec::new();
        write_field(&mut buf, &u).unwrap();
        assert_eq!(&buf[..4], b"NLSF");
        assert_eq!(buf.len(), 4 + 4 + 4 + 2 * 4 + 2 * 8 + 8 + 16 * 32);
        let v = read_field(buf.as_slice()).unwrap();
        assert_eq!(v.grid, u.grid);
        assert_eq!((v.t, v.data), (u.t, u.data));
    }

    #[test]
    fn field_corrupt_header() {
        assert!(read_field(&b"NLSX\x01\0\0\0"[..]).is_err());
        assert!(read_field(&b"NLSF\x01\0\0\0\x01\0\0\0"[..]).is_err());
    }

    #[test]
    fn bound_state_round_trip() {
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let bs = BoundState::solve(&nl, 1, 1.0, 1e-8).unwrap();
        let mut buf = Vec::new();
        write_bound_state(&mut buf, &bs).unwrap();
        let back = read_bound_state(buf.as_slice()).unwrap();
        assert_eq!(back.phi, bs.phi);
        assert_eq!(back.dr, bs.dr);
        assert!((back.value(1.3) - bs.value(1.3)).abs() < 1e-15);
    }
}
