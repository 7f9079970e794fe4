//! Parsing of matrix, point, field and grid arguments.

use conflab_core::fields::{bubble_field, parse_field, BubbleParams, Field};
use conflab_core::mobius::GridSpec;
use conflab_core::symfun::SymMatrix;

use crate::args::{FieldArgs, GridArgs};
use crate::error::{CliError, CliResult};

pub fn parse_numbers(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| CliError::usage(format!("not a number: {t:?}")))
        })
        .collect()
}

/// A point with exactly `n` coordinates.
pub fn parse_point(s: &str, n: usize) -> CliResult<Vec<f64>> {
    let p = parse_numbers(s)?;
    if p.len() != n {
        return Err(CliError::usage(format!("point {s:?} has {} coordinates, expected {n}", p.len())));
    }
    Ok(p)
}

/// Points separated by `;`.
pub fn parse_points(s: &str, n: usize) -> CliResult<Vec<Vec<f64>>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(|t| parse_point(t, n)).collect()
}

/// `"cI"` (e.g. `2I`, `-0.5I`) or a row-major upper triangle. `dim` may be
/// omitted for the triangle form, in which case it is inferred.
pub fn parse_matrix(s: &str, dim: Option<usize>) -> CliResult<SymMatrix> {
    let t = s.trim();
    if let Some(c) = t.strip_suffix('I').or_else(|| t.strip_suffix('i')) {
        let c = if c.is_empty() { 1.0 } else { c.parse::<f64>().map_err(|_| CliError::usage(format!("bad identity multiple {c:?}")))? };
        let d = dim.ok_or_else(|| CliError::usage("the cI form needs a dimension"))?;
        if d == 0 {
            return Err(CliError::usage("matrix dimension must be at least 1"));
        }
        return Ok(SymMatrix::scaled_identity(d, c));
    }
    let upper = parse_numbers(t)?;
    let d = match dim {
        Some(d) => d,
        None => {
            let d = ((((8 * upper.len() + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
            if d * (d + 1) / 2 != upper.len() {
                return Err(CliError::usage(format!("{} entries is not an upper triangle", upper.len())));
            }
            d
        }
    };
    SymMatrix::from_upper(d, upper).map_err(|e| CliError::usage(e.to_string()))
}

/// Exit-2 guard for commands that involve `B_k`.
pub fn require_nk(n: usize, k: usize) -> CliResult<()> {
    if k == 0 || n < 2 * k {
        return Err(CliError::usage(format!("B_k needs k >= 1 and n >= 2k, got n={n}, k={k}")));
    }
    Ok(())
}

pub fn require_k(n: usize, k: usize) -> CliResult<()> {
    if k == 0 || k > n {
        return Err(CliError::usage(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

pub fn bubble_params(n: usize, b: f64, center: &str) -> CliResult<BubbleParams> {
    Ok(BubbleParams::new(n, b, parse_point(center, n)?)?)
}

pub enum FieldSource {
    Bubble(BubbleParams),
    Expr(String),
}

pub struct ParsedField {
    pub field: Field,
    pub source: FieldSource,
}

impl ParsedField {
    pub fn bubble(&self) -> Option<&BubbleParams> {
        match &self.source {
            FieldSource::Bubble(p) => Some(p),
            FieldSource::Expr(_) => None,
        }
    }
}

pub fn build_field(a: &FieldArgs) -> CliResult<ParsedField> {
    if a.n < 2 {
        return Err(CliError::usage("--n must be at least 2"));
    }
    field_from_parts(a.n, a.expr.as_deref(), a.b, a.center.as_deref())
}

pub fn field_from_parts(n: usize, expr: Option<&str>, b: Option<f64>, center: Option<&str>) -> CliResult<ParsedField> {
    match (expr, b, center) {
        (Some(src), None, None) => Ok(ParsedField { field: parse_field(src, n)?, source: FieldSource::Expr(src.to_string()) }),
        (None, Some(b), Some(c)) => {
            let p = bubble_params(n, b, c)?;
            Ok(ParsedField { field: bubble_field(&p)?, source: FieldSource::Bubble(p) })
        }
        _ => Err(CliError::usage("give a field with either --expr or --b and --center")),
    }
}

/// Inline JSON or `@path`.
pub fn parse_grid(a: &GridArgs, n: usize) -> CliResult<GridSpec> {
    let Some(spec) = a.grid.as_deref() else {
        return Ok(GridSpec::default_for(n));
    };
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read grid file {path}: {e}")))?,
        None => spec.to_string(),
    };
    let g: GridSpec = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad grid spec: {e}")))?;
    g.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_forms() {
        let m = parse_matrix("2I", Some(3)).unwrap();
        assert_eq!(m, SymMatrix::scaled_identity(3, 2.0));
        assert_eq!(parse_matrix("-0.5I", Some(2)).unwrap().get(1, 1), -0.5);
        let m = parse_matrix("1,2,3", None).unwrap();
        assert_eq!((m.dim(), m.get(1, 0)), (2, 2.0));
        assert!(parse_matrix("1,2", None).is_err());
        assert!(parse_matrix("2I", None).is_err());
        assert!(parse_matrix("1,2,3", Some(3)).is_err());
    }

    #[test]
    fn points_and_guards() {
        assert_eq!(parse_points("0,0;1,-2", 2).unwrap(), vec![vec![0.0, 0.0], vec![1.0, -2.0]]);
        assert!(parse_point("1,2", 3).is_err());
        assert!(require_nk(3, 2).is_err() && require_nk(4, 2).is_ok());
    }

    #[test]
    fn grid_json_rejects_unknown_keys() {
        let g = GridArgs { grid: Some(r#"{"shells":8,"r_far_factor":100.0,"angular":16,"seed":3}"#.into()) };
        assert_eq!(parse_grid(&g, 4).unwrap().shells, 8);
        let bad = GridArgs { grid: Some(r#"{"shells":8,"r_far_factor":100.0,"angular":16,"seed":3,"x":1}"#.into()) };
        assert!(parse_grid(&bad, 4).is_err());
    }
}
