//! Matrix serialization: column-major CSV and a small binary format.
//!
//! CSV: one line per column, entries formatted with Rust's shortest
//! round-trip notation, so read(write(M)) == M bitwise.
//!
//! Binary: two little-endian u64 dims (rows, cols) followed by the entries
//! as little-endian f64, column-major.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn write_csv<W: Write>(mut w: W, m: &DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        let fields: Vec<String> = m.column(j).iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<DMatrix<f64>> {
    let reader = BufReader::new(r);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let col = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = columns.first() {
            if col.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} entries, got {}",
                    lineno + 1,
                    first.len(),
                    col.len()
                )));
            }
        }
        columns.push(col);
    }
    if columns.is_empty() {
        return Err(Error::Parse("empty matrix file".into()));
    }
    let rows = columns[0].len();
    let cols = columns.len();
    Ok(DMatrix::from_fn(rows, cols, |i, j| columns[j][i]))
}

pub fn write_binary<W: Write>(mut w: W, m: &DMatrix<f64>) -> Result<()> {
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for v in m.iter() {
        // nalgebra stores column-major, so iteration order is the format order.
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<DMatrix<f64>> {
    let mut dim = [0u8; 8];
    r.read_exact(&mut dim)?;
    let rows = u64::from_le_bytes(dim) as usize;
    r.read_exact(&mut dim)?;
    let cols = u64::from_le_bytes(dim) as usize;
    if rows == 0 || cols == 0 || rows.saturating_mul(cols) > (1 << 28) {
        return Err(Error::Parse(format!("implausible dims {rows}×{cols}")));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 8];
    for _ in 0..rows * cols {
        r.read_exact(&mut buf)?;
        data.push(f64::from_le_bytes(buf));
    }
    Ok(DMatrix::from_vec(rows, cols, data))
}

pub fn write_csv_path(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_csv(std::fs::File::create(path)?, m)
}

pub fn read_csv_path(path: &Path) -> Result<DMatrix<f64>> {
    read_csv(std::fs::File::open(path)?)
}

pub fn write_binary_path(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_binary(std::fs::File::create(path)?, m)
}

pub fn read_binary_path(path: &Path) -> Result<DMatrix<f64>> {
    read_binary(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_and_binary_round_trip(
            rows in 1..6usize,
            cols in 1..6usize,
            seed in any::<u64>(),
        ) {
            use rand::Rng;
            let mut rng = crate::rng::master(seed);
            let m = DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2e3 - 1e3);

            let mut csv = Vec::new();
            write_csv(&mut csv, &m).unwrap();
            let back = read_csv(csv.as_slice()).unwrap();
            prop_assert_eq!(&m, &back);

            let mut bin = Vec::new();
            write_binary(&mut bin, &m).unwrap();
            let back = read_binary(bin.as_slice()).unwrap();
            prop_assert_eq!(m, back);
        }
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(read_csv("1.0,2.0\n3.0\n".as_bytes()).is_err());
    }
}
