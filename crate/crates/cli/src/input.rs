//! Files, points and grids from the command line.

use std::path::Path;

use folia_core::geometry::parse;
use folia_core::pointwise::parse_point;
use folia_core::poly::{parse_rational, rational_to_f64, Rational};
use folia_core::SingularSubalgebroid;

use crate::CliError;

pub fn load(path: &Path) -> Result<SingularSubalgebroid, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    parse(&src).map_err(|e| CliError(format!("{}:{e}", path.display())))
}

pub fn point(s: &str, n: usize) -> Result<Vec<Rational>, CliError> {
    let p = parse_point(s)?;
    if p.len() != n {
        return Err(CliError(format!("point `{s}` has {} coordinates, expected {n}", p.len())));
    }
    Ok(p)
}

pub fn float_point(s: &str, n: usize) -> Result<Vec<f64>, CliError> {
    Ok(point(s, n)?.iter().map(rational_to_f64).collect())
}

/// Comma-separated rationals of any length.
pub fn values(s: &str) -> Result<Vec<Rational>, CliError> {
    Ok(parse_point(s)?)
}

/// `lo:hi:n` on each of `dim` axes, exact.
pub fn grid(spec: &str, dim: usize) -> Result<Vec<Vec<Rational>>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError(format!("grid `{spec}` is not of the form lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parse_rational(parts[0]).ok_or_else(bad)?;
    let hi = parse_rational(parts[1]).ok_or_else(bad)?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(CliError("grid needs at least one point per axis".into()));
    }
    let axis: Vec<Rational> = if n == 1 {
        vec![lo]
    } else {
        let step = (&hi - &lo) / Rational::from_integer((n as i64 - 1).into());
        (0..n).map(|i| &lo + &step * Rational::from_integer((i as i64).into())).collect()
    };
    Ok(product(&axis, dim))
}

pub fn product<T: Clone>(axis: &[T], dim: usize) -> Vec<Vec<T>> {
    let mut pts = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    pts
}

/// Points from `--point` flags, else from the grid spec.
pub fn points(flags: &[String], grid_spec: Option<&str>, dim: usize) -> Result<Vec<Vec<Rational>>, CliError> {
    if !flags.is_empty() {
        return flags.iter().map(|s| point(s, dim)).collect();
    }
    match grid_spec {
        Some(g) => grid(g, dim),
        None => Err(CliError("give --point or --grid".into())),
    }
}
