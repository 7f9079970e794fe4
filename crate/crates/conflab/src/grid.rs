//! Plot-ready CSV slices.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use conflab_core::boundary::bk_of_field;
use conflab_core::conformal::sigma_k_curvature;
use conflab_core::fields::ScalarField;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Quantity;
use crate::error::{CliError, CliResult};

/// A square 2-D slice: coordinates `axes` vary over `[lo, hi]` with
/// `resolution` points each, the rest are taken from `base`.
#[derive(Debug, Clone)]
pub struct Slice {
    pub axes: (usize, usize),
    pub lo: f64,
    pub hi: f64,
    pub resolution: usize,
    pub base: Vec<f64>,
}

impl Slice {
    fn coordinate(&self, i: usize) -> f64 {
        if self.resolution == 1 {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.resolution - 1) as f64
    }

    fn point(&self, i: usize, j: usize) -> Vec<f64> {
        let mut x = self.base.clone();
        x[self.axes.0] = self.coordinate(i);
        x[self.axes.1] = self.coordinate(j);
        x
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub rows: usize,
    pub min: f64,
    pub max: f64,
}

impl GridSummary {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

fn validate(u: &dyn ScalarField, quantity: Quantity, k: usize, s: &Slice) -> CliResult<()> {
    let n = u.dim();
    let (a, b) = s.axes;
    if a == b || a >= n || b >= n {
        return Err(CliError::usage(format!("axes must be two distinct coordinates in 1..={n}")));
    }
    if s.base.len() != n {
        return Err(CliError::usage(format!("base point needs {n} coordinates")));
    }
    if s.resolution == 0 || !(s.lo.is_finite() && s.hi.is_finite()) {
        return Err(CliError::usage("grid needs a finite range and at least one point per axis"));
    }
    match quantity {
        Quantity::U => {}
        Quantity::SigmaK if k == 0 || k > n => {
            return Err(CliError::usage(format!("sigma-k needs 1 <= k <= {n}")));
        }
        Quantity::SigmaK => {}
        Quantity::BkBoundary => {
            crate::input::require_nk(n, k)?;
            if a == n - 1 || b == n - 1 || s.base[n - 1] != 0.0 {
                return Err(CliError::usage("bk-boundary is only defined on x_n = 0: vary tangential axes and keep x_n = 0"));
            }
        }
    }
    Ok(())
}

fn evaluate(u: &dyn ScalarField, quantity: Quantity, k: usize, x: &[f64]) -> conflab_core::Result<f64> {
    match quantity {
        Quantity::U => u.value(x),
        Quantity::SigmaK => sigma_k_curvature(u, x, k),
        Quantity::BkBoundary => bk_of_field(u, x, k),
    }
}

/// Writes `x1,..,xn,value` rows, first axis outermost, and returns the
/// row count and value range. Rows are computed in parallel and written in
/// order.
pub fn emit_grid(u: &dyn ScalarField, quantity: Quantity, k: usize, slice: &Slice, path: &Path) -> CliResult<GridSummary> {
    validate(u, quantity, k, slice)?;
    let rows: Vec<Vec<(Vec<f64>, f64)>> = (0..slice.resolution)
        .into_par_iter()
        .map(|i| {
            (0..slice.resolution)
                .map(|j| {
                    let x = slice.point(i, j);
                    let v = evaluate(u, quantity, k, &x)?;
                    Ok((x, v))
                })
                .collect::<conflab_core::Result<Vec<_>>>()
        })
        .collect::<conflab_core::Result<Vec<_>>>()?;

    let io_err = |source: std::io::Error| CliError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        other => CliError::Serialize(format!("{other:?}")),
    };
    let n = u.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(csv_err)?;

    let mut summary = GridSummary { rows: 0, min: f64::INFINITY, max: f64::NEG_INFINITY };
    for (x, v) in rows.into_iter().flatten() {
        let rec: Vec<String> = x.iter().chain(std::iter::once(&v)).map(|c| c.to_string()).collect();
        w.write_record(&rec).map_err(csv_err)?;
        summary.rows += 1;
        summary.min = summary.min.min(v);
        summary.max = summary.max.max(v);
    }
    w.flush().map_err(io_err)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use conflab_core::fields::parse_field;

    #[test]
    fn rows_are_row_major_with_header() {
        let u = parse_field("1 + x1 + 10*x2", 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let s = Slice { axes: (0, 1), lo: 0.0, hi: 1.0, resolution: 3, base: vec![0.0; 3] };
        let sum = emit_grid(&*u, Quantity::U, 1, &s, &path).unwrap();
        assert_eq!(sum.rows, 9);
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,x3,value");
        assert_eq!(lines[1], "0,0,0,1");
        assert_eq!(lines[2], "0,0.5,0,6");
        assert_eq!(lines[4], "0.5,0,0,1.5");
        assert_eq!((sum.min, sum.max), (1.0, 12.0));
    }

    #[test]
    fn boundary_quantity_rejects_normal_axis() {
        let u = parse_field("1", 4).unwrap();
        let s = Slice { axes: (0, 3), lo: 0.0, hi: 1.0, resolution: 2, base: vec![0.0; 4] };
        let err = emit_grid(&*u, Quantity::BkBoundary, 2, &s, Path::new("/nonexistent/x.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
