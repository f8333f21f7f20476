//! Artifact serialization: the binary state/operator container, Husimi CSV
//! grids, and deterministic JSON reports.
//!
//! Binary container layout (little-endian throughout):
//!   magic "QCAT0001" (8 bytes)
//!   kind: u8 (0 = state, 1 = operator)
//!   d: u32
//!   N: u64
//!   kappa: 2d × f64
//!   len: u64 (number of complex entries; dim for states, dim² row-major for
//!        operators)
//!   payload: len × (f64 re, f64 im)

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};

use crate::error::{QcatError, Result};
use crate::linalg::C;
use crate::spectra::MeasureGrid;
use crate::torus::{QuantumTorus, TorusOperator, TorusState};

const MAGIC: &[u8; 8] = b"QCAT0001";
const KIND_STATE: u8 = 0;
const KIND_OPERATOR: u8 = 1;

/// Either payload of the container.
#[derive(Debug, Clone)]
pub enum Payload {
    State(TorusState),
    Operator(TorusOperator),
}

fn write_header<W: Write>(w: &mut W, kind: u8, qt: &QuantumTorus, len: u64) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u8(kind)?;
    w.write_u32::<LittleEndian>(qt.d as u32)?;
    w.write_u64::<LittleEndian>(qt.n)?;
    for k in &qt.kappa {
        w.write_f64::<LittleEndian>(*k)?;
    }
    w.write_u64::<LittleEndian>(len)?;
    Ok(())
}

pub fn write_state(path: &Path, psi: &TorusState) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, KIND_STATE, &psi.qt, psi.coeffs.len() as u64)?;
    for z in psi.coeffs.iter() {
        w.write_f64::<LittleEndian>(z.re)?;
        w.write_f64::<LittleEndian>(z.im)?;
    }
    Ok(())
}

pub fn write_operator(path: &Path, op: &TorusOperator) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let len = (op.matrix.nrows() * op.matrix.ncols()) as u64;
    write_header(&mut w, KIND_OPERATOR, &op.qt, len)?;
    for z in op.matrix.iter() {
        // ndarray default iteration is row-major
        w.write_f64::<LittleEndian>(z.re)?;
        w.write_f64::<LittleEndian>(z.im)?;
    }
    Ok(())
}

pub fn read_container(path: &Path) -> Result<Payload> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(QcatError::Format(format!(
            "{}: bad magic (not a qcat container)",
            path.display()
        )));
    }
    let kind = r.read_u8()?;
    let d = r.read_u32::<LittleEndian>()? as usize;
    let n = r.read_u64::<LittleEndian>()?;
    if d == 0 || d > 8 {
        return Err(QcatError::Format(format!("implausible dimension d = {d}")));
    }
    let mut kappa = vec![0.0f64; 2 * d];
    for k in kappa.iter_mut() {
        *k = r.read_f64::<LittleEndian>()?;
    }
    let qt = QuantumTorus::new(n, d, kappa)?;
    let len = r.read_u64::<LittleEndian>()? as usize;
    let dim = qt.dim();
    let expected = match kind {
        KIND_STATE => dim,
        KIND_OPERATOR => dim * dim,
        other => {
            return Err(QcatError::Format(format!("unknown container kind {other}")));
        }
    };
    if len != expected {
        return Err(QcatError::Format(format!(
            "payload length {len} does not match kind/dimension (expected {expected})"
        )));
    }
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        data.push(C::new(re, im));
    }
    Ok(match kind {
        KIND_STATE => Payload::State(TorusState {
            coeffs: Array1::from_vec(data),
            qt,
        }),
        _ => Payload::Operator(TorusOperator {
            matrix: Array2::from_shape_vec((dim, dim), data)
                .map_err(|e| QcatError::Format(e.to_string()))?,
            qt,
        }),
    })
}

/// Husimi grid as CSV: a header row `d,N,resolution`, then the density values
/// row-major, one grid row per line.
pub fn write_husimi_csv(path: &Path, qt: &QuantumTorus, grid: &MeasureGrid) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{},{},{}", qt.d, qt.n, grid.resolution)?;
    let res = grid.resolution;
    let rows = grid.density.len() / res;
    for i in 0..rows {
        let line: Vec<String> = grid.density[i * res..(i + 1) * res]
            .iter()
            .map(|v| format!("{v:.17e}"))
            .collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_husimi_csv(path: &Path) -> Result<(usize, u64, MeasureGrid)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| QcatError::Format("empty husimi csv".into()))?;
    let parts: Vec<&str> = header.split(',').collect();
    if parts.len() != 3 {
        return Err(QcatError::Format("husimi header must be d,N,resolution".into()));
    }
    let d: usize = parts[0]
        .trim()
        .parse()
        .map_err(|_| QcatError::Format("bad d in husimi header".into()))?;
    let n: u64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| QcatError::Format("bad N in husimi header".into()))?;
    let res: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| QcatError::Format("bad resolution in husimi header".into()))?;
    let mut density = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| QcatError::Format(format!("bad density value '{tok}'")))?;
            density.push(v);
        }
    }
    let expected = res.pow(2 * d as u32);
    if density.len() != expected {
        return Err(QcatError::Format(format!(
            "husimi grid has {} values, expected {expected}",
            density.len()
        )));
    }
    let total: f64 = density.iter().sum::<f64>() / expected as f64;
    Ok((
        d,
        n,
        MeasureGrid {
            resolution: res,
            d,
            density,
            total,
        },
    ))
}

/// Serialize a report as pretty JSON (serde_json emits shortest-roundtrip
/// floats, which are byte-deterministic and carry full f64 precision).
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| QcatError::Format(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::translation;

    fn tmpdir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("qcat-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn state_roundtrip_is_exact() {
        let qt = QuantumTorus::new(7, 1, vec![0.3, 1.1]).unwrap();
        let psi = TorusState {
            coeffs: Array1::from_shape_fn(7, |j| C::new(j as f64 + 0.25, -(j as f64) * 0.5)),
            qt: qt.clone(),
        };
        let path = tmpdir().join("state.qcat");
        write_state(&path, &psi).unwrap();
        match read_container(&path).unwrap() {
            Payload::State(back) => {
                assert_eq!(back.qt.n, 7);
                assert_eq!(back.qt.d, 1);
                assert!(back
                    .coeffs
                    .iter()
                    .zip(psi.coeffs.iter())
                    .all(|(a, b)| a == b));
                assert!((back.qt.kappa[0] - 0.3).abs() < 1e-15);
            }
            _ => panic!("expected a state payload"),
        }
    }

    #[test]
    fn operator_roundtrip_is_exact() {
        let qt = QuantumTorus::new(5, 1, vec![0.0, 0.0]).unwrap();
        let op = translation(&qt, &[1, 2]).unwrap();
        let path = tmpdir().join("op.qcat");
        write_operator(&path, &op).unwrap();
        match read_container(&path).unwrap() {
            Payload::Operator(back) => {
                assert!(back
                    .matrix
                    .iter()
                    .zip(op.matrix.iter())
                    .all(|(a, b)| a == b));
            }
            _ => panic!("expected an operator payload"),
        }
    }

    #[test]
    fn container_rejects_garbage() {
        let path = tmpdir().join("junk.bin");
        std::fs::write(&path, b"not a container at all").unwrap();
        assert!(matches!(
            read_container(&path),
            Err(QcatError::Format(_)) | Err(QcatError::Io(_))
        ));
    }

    #[test]
    fn husimi_csv_roundtrip() {
        let qt = QuantumTorus::new(4, 1, vec![0.0, 0.0]).unwrap();
        let res = 3usize;
        let density: Vec<f64> = (0..res * res).map(|i| (i as f64) / 36.0).collect();
        let total = density.iter().sum::<f64>() / (res * res) as f64;
        let grid = MeasureGrid {
            resolution: res,
            d: 1,
            density: density.clone(),
            total,
        };
        let path = tmpdir().join("husimi.csv");
        write_husimi_csv(&path, &qt, &grid).unwrap();
        let (d, n, back) = read_husimi_csv(&path).unwrap();
        assert_eq!((d, n), (1, 4));
        assert_eq!(back.resolution, res);
        for (a, b) in back.density.iter().zip(density.iter()) {
            assert!((a - b).abs() < 1e-16);
        }
    }
}
