//! On-disk formats. Every writer goes through a temporary file in the
//! target directory followed by a rename.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::imaging::IndicatorField;
use crate::spectra::ComplexMatrix;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// `complex-matrix rows cols`, then one row per line of `re:im` entries with
/// 17 significant digits.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut s = format!("complex-matrix {} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m.get(r, c);
            if c > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.16e}:{:.16e}", z.re, z.im);
        }
        s.push('\n');
    }
    s
}

pub fn parse_matrix(text: &str) -> std::result::Result<ComplexMatrix, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match fields.as_slice() {
        ["complex-matrix", r, c] => (
            r.parse::<usize>()
                .map_err(|_| format!("bad row count '{r}'"))?,
            c.parse::<usize>()
                .map_err(|_| format!("bad column count '{c}'"))?,
        ),
        _ => return Err(format!("malformed header '{header}'")),
    };
    let mut entries = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| format!("row {r}: missing (expected {rows} rows, found {r})"))?;
        let before = entries.len();
        for tok in line.split_whitespace() {
            let (re, im) = tok
                .split_once(':')
                .ok_or_else(|| format!("row {r}: entry '{tok}' is not re:im"))?;
            let re: f64 = re
                .parse()
                .map_err(|_| format!("row {r}: bad number '{re}'"))?;
            let im: f64 = im
                .parse()
                .map_err(|_| format!("row {r}: bad number '{im}'"))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(format!("row {r}: non-finite entry '{tok}'"));
            }
            entries.push(Complex64::new(re, im));
        }
        let got = entries.len() - before;
        if got != cols {
            return Err(format!("row {r}: expected {cols} entries, found {got}"));
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(format!("trailing data after {rows} rows"));
    }
    ComplexMatrix::from_row_major(rows, cols, entries).map_err(|e| e.to_string())
}

pub fn write_matrix(m: &ComplexMatrix, path: &Path) -> Result<()> {
    write_atomic(path, format_matrix(m).as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&read_text(path)?).map_err(|message| Error::Format {
        path: path.to_path_buf(),
        message,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:.16e}"))
}

/// `#` metadata lines, the `x,y,w` header, then one row per grid point.
pub fn format_field_csv(fld: &IndicatorField) -> String {
    let m = &fld.metadata;
    let mut s = String::new();
    let _ = writeln!(s, "# filter = {}", m.filter);
    let _ = writeln!(s, "# alpha = {}", opt(m.alpha));
    let _ = writeln!(s, "# beta = {}", opt(m.beta));
    let _ = writeln!(s, "# delta = {:.16e}", m.delta);
    let _ = writeln!(s, "# seed = {}", m.seed);
    let _ = writeln!(s, "# k = {:.16e}", m.k);
    s.push_str("x,y,w\n");
    for (z, w) in fld.grid.points().zip(&fld.values) {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", z[0], z[1], w);
    }
    s
}

/// Reads the `# key = value` comment block of a field CSV.
pub fn parse_csv_metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map_while(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub fn write_field_csv(fld: &IndicatorField, path: &Path) -> Result<()> {
    write_atomic(path, format_field_csv(fld).as_bytes())
}

/// Binary greymap; rows run from `y_max` down to `y_min`.
pub fn pgm_bytes(fld: &IndicatorField) -> Vec<u8> {
    let g = &fld.grid;
    let mut out = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    out.reserve(g.len());
    for iy in (0..g.ny).rev() {
        for ix in 0..g.nx {
            let v = fld.values[iy * g.nx + ix];
            let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
            out.push((255.0 * v).round() as u8);
        }
    }
    out
}

pub fn write_pgm(fld: &IndicatorField, path: &Path) -> Result<()> {
    write_atomic(path, &pgm_bytes(fld))
}
