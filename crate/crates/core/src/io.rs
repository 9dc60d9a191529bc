//! Grid file formats.
//!
//! CSV: header `x,y,z,t,re,im,mask`, one row per sample in storage order,
//! floats with 17 significant digits.
//!
//! Raw binary (all little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 16    | magic `PBGF0001` followed by eight zero bytes |
//! | 32    | origin, 4 × f64 |
//! | 32    | spacing, 4 × f64 |
//! | 32    | counts, 4 × u64 |
//! | 1     | slice mode (0 full4d, 1 fixed_time_3d, 2 axis_profile_1d) |
//! | 16·n  | values as interleaved (re, im) f64 pairs |
//! | ⌈n/8⌉ | mask bits, LSB first, zero padded |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FieldGrid, GridMetadata, GridSpec, OutputFormat, SliceMode};

pub const MAGIC: [u8; 16] = *b"PBGF0001\0\0\0\0\0\0\0\0";
pub const CSV_HEADER: &str = "x,y,z,t,re,im,mask";

pub fn write_csv<W: Write>(grid: &FieldGrid, mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for (i, (v, &m)) in grid.values.iter().zip(&grid.mask).enumerate() {
        let p = grid.spec.coords(i);
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            p[0],
            p[1],
            p[2],
            p[3],
            v.re,
            v.im,
            u8::from(m)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub coords: [f64; 4],
    pub value: Complex64,
    pub mask: bool,
}

pub fn read_csv_rows<R: BufRead>(r: R) -> Result<Vec<CsvRow>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != CSV_HEADER {
        return Err(Error::Format(format!("expected header `{CSV_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Format(format!("row {}: expected 7 fields", n + 1)));
        }
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .parse()
                .map_err(|_| Error::Format(format!("row {}: bad number `{}`", n + 1, fields[k])))
        };
        let mask = match fields[6] {
            "0" => false,
            "1" => true,
            other => return Err(Error::Format(format!("row {}: bad mask `{other}`", n + 1))),
        };
        rows.push(CsvRow {
            coords: [num(0)?, num(1)?, num(2)?, num(3)?],
            value: Complex64::new(num(4)?, num(5)?),
            mask,
        });
    }
    Ok(rows)
}

/// Rebuilds a grid from CSV rows laid out per `spec`.
pub fn read_csv<R: BufRead>(r: R, spec: GridSpec) -> Result<FieldGrid> {
    let rows = read_csv_rows(r)?;
    if rows.len() as u128 != spec.len() {
        return Err(Error::Format(format!(
            "{} rows for a grid of {} samples",
            rows.len(),
            spec.len()
        )));
    }
    Ok(FieldGrid {
        spec,
        values: rows.iter().map(|r| r.value).collect(),
        mask: rows.iter().map(|r| r.mask).collect(),
        metadata: GridMetadata::default(),
    })
}

pub fn write_binary<W: Write>(grid: &FieldGrid, mut w: W) -> Result<()> {
    w.write_all(&MAGIC)?;
    for v in grid.spec.origin.iter().chain(&grid.spec.spacing) {
        w.write_all(&v.to_le_bytes())?;
    }
    for c in &grid.spec.counts {
        w.write_all(&c.to_le_bytes())?;
    }
    w.write_all(&[grid.spec.slice_mode.code()])?;
    for v in &grid.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    let mut packed = vec![0u8; grid.mask.len().div_ceil(8)];
    for (i, _) in grid.mask.iter().enumerate().filter(|(_, &m)| m) {
        packed[i / 8] |= 1 << (i % 8);
    }
    w.write_all(&packed)?;
    w.flush()?;
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(buf)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<FieldGrid> {
    if take::<16, _>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut origin = [0.0; 4];
    let mut spacing = [0.0; 4];
    let mut counts = [0u64; 4];
    for v in origin.iter_mut().chain(spacing.iter_mut()) {
        *v = f64::from_le_bytes(take(&mut r)?);
    }
    for c in counts.iter_mut() {
        *c = u64::from_le_bytes(take(&mut r)?);
    }
    let [code] = take::<1, _>(&mut r)?;
    let slice_mode =
        SliceMode::from_code(code).ok_or_else(|| Error::Format(format!("slice mode {code}")))?;
    let spec = GridSpec {
        origin,
        spacing,
        counts,
        slice_mode,
    };
    let n = usize::try_from(spec.len())
        .map_err(|_| Error::Format("sample count overflows usize".into()))?;
    let mut values = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        let re = f64::from_le_bytes(take(&mut r)?);
        let im = f64::from_le_bytes(take(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    let mut packed = vec![0u8; n.div_ceil(8)];
    r.read_exact(&mut packed)
        .map_err(|e| Error::Format(format!("truncated mask: {e}")))?;
    let mask = (0..n).map(|i| packed[i / 8] >> (i % 8) & 1 == 1).collect();
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", rest.len())));
    }
    Ok(FieldGrid {
        spec,
        values,
        mask,
        metadata: GridMetadata::default(),
    })
}

/// Path of the JSON metadata written next to a grid file.
pub fn metadata_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the grid in `format` plus its metadata sidecar.
pub fn write_output(grid: &FieldGrid, path: &Path, format: OutputFormat) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(grid, file)?,
        OutputFormat::RawBinary => write_binary(grid, file)?,
    }
    let meta = serde_json::to_string_pretty(&grid.metadata)?;
    std::fs::write(metadata_path(path), meta + "\n")?;
    Ok(())
}

pub fn read_binary_file(path: &Path) -> Result<FieldGrid> {
    read_binary(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldGrid {
        let spec = GridSpec {
            origin: [0.5, -1.0, 2.0, 0.0],
            spacing: [0.1, 0.2, 0.3, 1.0 / 3.0],
            counts: [3, 1, 1, 3],
            slice_mode: SliceMode::Full4d,
        };
        let values = (0..9)
            .map(|k| Complex64::new(1.0 / (k as f64 + 0.7), -(k as f64).sqrt() * 1e-5))
            .collect();
        let mut mask = vec![false; 9];
        mask[4] = true;
        FieldGrid {
            spec,
            values,
            mask,
            metadata: GridMetadata::default(),
        }
    }

    #[test]
    fn binary_layout() {
        let g = sample();
        let mut buf = Vec::new();
        write_binary(&g, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 32 + 32 + 32 + 1 + 9 * 16 + 2);
        assert_eq!(&buf[..8], b"PBGF0001");
        assert_eq!(buf[112], 0);
        assert_eq!(&buf[buf.len() - 2..], &[0b0001_0000, 0]);
        let back = read_binary(&buf[..]).unwrap();
        assert!(back.bit_eq(&g));
    }

    #[test]
    fn binary_rejects_garbage() {
        assert!(read_binary(&b"PBGF0002\0\0\0\0\0\0\0\0"[..]).is_err());
        let mut buf = Vec::new();
        write_binary(&sample(), &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
        buf.push(0);
        assert!(read_binary(&buf[..]).is_err());
    }

    #[test]
    fn csv_format() {
        let g = sample();
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("5.0000000000000000e-1,-1.0000000000000000e0,2.0000000000000000e0,0.0000000000000000e0,1.4285714285714286e0,-0.0000000000000000e0,0")
        );
        assert_eq!(text.lines().count(), 10);
        let back = read_csv(&buf[..], g.spec).unwrap();
        assert!(back.bit_eq(&g));
    }

    #[test]
    fn single_point_csv_has_one_row() {
        let g = FieldGrid {
            spec: GridSpec::point([0.0; 4]),
            values: vec![Complex64::new(1.0, 2.0)],
            mask: vec![false],
            metadata: GridMetadata::default(),
        };
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(read_csv_rows(&b"a,b\n"[..]).is_err());
        let bad_mask = format!("{CSV_HEADER}\n0,0,0,0,1,1,2\n");
        assert!(read_csv_rows(bad_mask.as_bytes()).is_err());
    }
}
