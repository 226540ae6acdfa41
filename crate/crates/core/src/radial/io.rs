use serde::Serialize;
use std::io::Write;
use std::path::Path;

use super::field::{ComplexField, RealField};
use super::grid::Stretch;
use crate::error::Result;

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct FieldHeader {
    n: usize,
    r_max: f64,
    stretch: Stretch,
    complex: bool,
}

fn write_header(path: &Path, n: usize, r_max: f64, stretch: Stretch, complex: bool) -> Result<()> {
    let head = FieldHeader { n, r_max, stretch, complex };
    let json = serde_json::to_string_pretty(&head).expect("header serializes");
    std::fs::write(path.with_extension("json"), json)?;
    Ok(())
}

/// Writes `r,value` rows and a JSON header next to the CSV.
pub fn write_real_csv(path: &Path, f: &RealField) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "r,value")?;
    for (r, v) in f.grid().nodes().iter().zip(f.values()) {
        writeln!(out, "{},{}", fmt17(*r), fmt17(*v))?;
    }
    out.flush()?;
    let g = f.grid();
    write_header(path, g.n(), g.r_max(), g.stretch(), false)
}

pub fn write_complex_csv(path: &Path, f: &ComplexField) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "r,value,imag")?;
    for (r, v) in f.grid().nodes().iter().zip(f.values()) {
        writeln!(out, "{},{},{}", fmt17(*r), fmt17(v.re), fmt17(v.im))?;
    }
    out.flush()?;
    let g = f.grid();
    write_header(path, g.n(), g.r_max(), g.stretch(), true)
}

/// Reads the `value` (and optional `imag`) columns of a field CSV.
/// Radii, real parts and optional imaginary parts.
pub type FieldColumns = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

pub fn read_field_csv(path: &Path) -> Result<FieldColumns> {
    let text = std::fs::read_to_string(path)?;
    let mut r = Vec::new();
    let mut re = Vec::new();
    let mut im = Vec::new();
    let mut complex = false;
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            complex = line.split(',').count() == 3;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| crate::error::Error::Config(format!("{}: {e}", path.display())))
        };
        r.push(parse(cols[0])?);
        re.push(parse(cols[1])?);
        if complex {
            im.push(parse(cols[2])?);
        }
    }
    Ok((r, re, complex.then_some(im)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::make_grid;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid(32, 60.0, Stretch::default()).unwrap();
        let f = RealField::from_fn(&g, |r| (1.0 / 3.0) * (-r).exp());
        let p = dir.path().join("f.csv");
        write_real_csv(&p, &f).unwrap();
        let (r, v, im) = read_field_csv(&p).unwrap();
        assert!(im.is_none());
        assert_eq!(r, g.nodes());
        assert_eq!(v, f.values());
        assert!(p.with_extension("json").exists());
    }
}
