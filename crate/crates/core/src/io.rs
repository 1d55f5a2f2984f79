//! CSV/JSON artifacts with a metadata header, and little-endian binary dumps.
//!
//! Jost dump (`JOST`, version 1):
//! ```text
//! [u8; 4]  magic "JOST"
//! u32      version
//! u64      n_x, n_tau
//! f64      x[n_x], tau[n_tau]
//! f64 pair m_plus(x_i, tau_k)  for i in 0..n_x, k in 0..n_tau   (re, im)
//! f64 pair m_minus(x_i, tau_k) same order
//! ```
//! Kernel dump (`KERN`, version 1):
//! ```text
//! [u8; 4]  magic "KERN"
//! u32      version
//! u64      n
//! f64      scale, calibration
//! u32      provenance (0 free, 1 perturbed, 2 leading, 3 remainder)
//! f64      x_min, x_max
//! f64 pair K(x_i, y_j) row-major                                 (re, im)
//! ```

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::jost::{JostField, Side};
use crate::kernels::{KernelMatrix, Provenance};
use crate::C64;
use ndarray::Array2;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const JOST_MAGIC: &[u8; 4] = b"JOST";
pub const KERN_MAGIC: &[u8; 4] = b"KERN";
pub const DUMP_VERSION: u32 = 1;

/// Written as `# key=value` lines ahead of every CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Metadata {
    pub command: String,
    pub config_sha256: String,
    pub calibration: f64,
    pub grid: Option<SpatialGrid>,
    pub seed: u64,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("# command={}", self.command),
            format!("# config_sha256={}", self.config_sha256),
            format!("# calibration={:e}", self.calibration),
        ];
        if let Some(g) = &self.grid {
            out.push(format!("# grid=[{}, {}] n={} h={:e}", g.x_min(), g.x_max(), g.len(), g.h()));
        }
        out.push(format!("# seed={}", self.seed));
        out.extend(self.extra.iter().map(|(k, v)| format!("# {k}={v}")));
        out
    }
}

pub fn write_csv<T: Serialize>(path: &Path, meta: &Metadata, rows: &[T]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    for l in meta.lines() {
        writeln!(f, "{l}")?;
    }
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// The file with its `#` lines removed.
pub fn csv_body(path: &Path) -> Result<String> {
    let s = std::fs::read_to_string(path)?;
    Ok(s.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect())
}

/// Two columns `x, V` with a header row.
pub fn read_potential_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows: Vec<(f64, f64)> = read_csv(path)?;
    Ok(rows.into_iter().unzip())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

fn put_f64s(w: &mut impl Write, v: &[f64]) -> Result<()> {
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn put_c64(w: &mut impl Write, z: C64) -> Result<()> {
    w.write_all(&z.re.to_le_bytes())?;
    w.write_all(&z.im.to_le_bytes())?;
    Ok(())
}

struct Cursor<R: Read>(R);

impl<R: Read> Cursor<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b)?;
        Ok(b)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
    fn c64(&mut self) -> Result<C64> {
        Ok(C64::new(self.f64()?, self.f64()?))
    }
    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        let m: [u8; 4] = self.bytes()?;
        if &m != magic {
            return Err(Error::Config(format!("bad magic {:?}, expected {:?}", m, magic)));
        }
        let v = self.u32()?;
        if v != DUMP_VERSION {
            return Err(Error::Config(format!("unsupported dump version {v}")));
        }
        Ok(())
    }
}

pub fn write_jost_dump(path: &Path, field: &JostField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let xs = field.grid().nodes();
    let taus = field.freq().taus();
    w.write_all(JOST_MAGIC)?;
    w.write_all(&DUMP_VERSION.to_le_bytes())?;
    w.write_all(&(xs.len() as u64).to_le_bytes())?;
    w.write_all(&(taus.len() as u64).to_le_bytes())?;
    put_f64s(&mut w, &xs)?;
    put_f64s(&mut w, taus)?;
    for side in [Side::Plus, Side::Minus] {
        for i in 0..xs.len() {
            for k in 0..taus.len() {
                put_c64(&mut w, field.m(side, i, k))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Contents of a Jost dump; tables are indexed `(x, τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JostDump {
    pub x: Vec<f64>,
    pub tau: Vec<f64>,
    pub m_plus: Array2<C64>,
    pub m_minus: Array2<C64>,
}

pub fn read_jost_dump(path: &Path) -> Result<JostDump> {
    let mut r = Cursor(BufReader::new(File::open(path)?));
    r.header(JOST_MAGIC)?;
    let nx = r.u64()? as usize;
    let nt = r.u64()? as usize;
    let x = r.f64s(nx)?;
    let tau = r.f64s(nt)?;
    let mut tables = [Array2::zeros((nx, nt)), Array2::zeros((nx, nt))];
    for t in tables.iter_mut() {
        for i in 0..nx {
            for k in 0..nt {
                t[[i, k]] = r.c64()?;
            }
        }
    }
    let [m_plus, m_minus] = tables;
    Ok(JostDump { x, tau, m_plus, m_minus })
}

pub fn write_kernel_dump(path: &Path, k: &KernelMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(KERN_MAGIC)?;
    w.write_all(&DUMP_VERSION.to_le_bytes())?;
    w.write_all(&(k.n() as u64).to_le_bytes())?;
    put_f64s(&mut w, &[k.scale, k.calibration])?;
    w.write_all(&k.provenance.code().to_le_bytes())?;
    put_f64s(&mut w, &[k.grid.x_min(), k.grid.x_max()])?;
    for z in k.entries.iter() {
        put_c64(&mut w, *z)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_kernel_dump(path: &Path) -> Result<KernelMatrix> {
    let mut r = Cursor(BufReader::new(File::open(path)?));
    r.header(KERN_MAGIC)?;
    let n = r.u64()? as usize;
    let scale = r.f64()?;
    let calibration = r.f64()?;
    let code = r.u32()?;
    let provenance = Provenance::from_code(code).ok_or_else(|| Error::Config(format!("unknown provenance {code}")))?;
    let grid = SpatialGrid::new(r.f64()?, r.f64()?, n)?;
    let mut entries = Array2::zeros((n, n));
    for z in entries.iter_mut() {
        *z = r.c64()?;
    }
    Ok(KernelMatrix { scale, provenance, calibration, grid, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Row {
        a: f64,
        b: String,
    }

    #[test]
    fn csv_round_trip_skips_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let meta = Metadata { command: "x".into(), seed: 5, ..Default::default() }.with("note", "y");
        let rows = vec![Row { a: 1.5, b: "u".into() }, Row { a: -2.0, b: "v".into() }];
        write_csv(&p, &meta, &rows).unwrap();
        assert_eq!(read_csv::<Row>(&p).unwrap(), rows);
        let body = csv_body(&p).unwrap();
        assert!(body.starts_with("a,b\n"));
        assert!(std::fs::read_to_string(&p).unwrap().contains("# seed=5"));
    }

    #[test]
    fn bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("k.bin");
        std::fs::write(&p, b"NOPE\x01\0\0\0").unwrap();
        assert!(matches!(read_kernel_dump(&p), Err(Error::Config(_))));
    }
}
