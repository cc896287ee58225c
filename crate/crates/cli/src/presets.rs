//! Named initial-data and exponent presets, and CSV field files.
//!
//! Initial data:
//! - `gaussian:A,w[,c...]`: `A exp(-|x - c|^2 / w^2)`; one center value is
//!   broadcast to every axis
//! - `gaussian-mass:M,w[,c...]`: the same profile normalized to mass `M`
//! - `two-bump:A,w,d`: two Gaussians at `x_0 = -d/2` and `x_0 = d/2`
//! - `random-bandlimited:seed,cutoff[,A]`: seeded band-limited field, max `A`
//! - `csv:path`: columns are the coordinates followed by the value
//!
//! Exponents:
//! - `constant:p`
//! - `gauss-bump:a+b*exp(-r2/s)` (`b` and `/s` optional) with `p_inf = a`
//! - `step:lo,hi`: `lo` for `x_0 < 0`, `hi` otherwise
//! - `csv:path`

use crate::error::{config, Result};
use fkslab_core::random::{band_limited, seeded};
use fkslab_core::varlebesgue::{Domain, ExponentField, Interval};
use fkslab_core::{Field, Grid};
use std::path::Path;

fn numbers(spec: &str, args: &str, min: usize, max: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| config(format!("preset '{spec}': arguments must be numbers")))?;
    if values.len() < min || values.len() > max {
        return Err(config(format!(
            "preset '{spec}': expected {min} to {max} arguments, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn centers(spec: &str, rest: &[f64], dim: usize) -> Result<Vec<f64>> {
    match rest.len() {
        0 => Ok(vec![0.0; dim]),
        1 => Ok(vec![rest[0]; dim]),
        n if n == dim => Ok(rest.to_vec()),
        n => Err(config(format!("preset '{spec}': {n} center values for dimension {dim}"))),
    }
}

fn gaussian(grid: Grid, amplitude: f64, width: f64, center: &[f64]) -> Field {
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
        amplitude * (-r2 / (width * width)).exp()
    })
}

/// Builds the initial density named by `spec`.
pub fn initial_data(spec: &str, grid: Grid, base_dir: &Path) -> Result<Field> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let dim = grid.dim();
    let field = match name {
        "gaussian" | "gaussian-mass" => {
            let v = numbers(spec, args, 2, 2 + dim)?;
            if !(v[1] > 0.0) {
                return Err(config(format!("preset '{spec}': width must be positive")));
            }
            let c = centers(spec, &v[2..], dim)?;
            let amplitude = if name == "gaussian" {
                v[0]
            } else {
                v[0] / (std::f64::consts::PI * v[1] * v[1]).powf(dim as f64 / 2.0)
            };
            gaussian(grid, amplitude, v[1], &c)
        }
        "two-bump" => {
            let v = numbers(spec, args, 3, 3)?;
            if !(v[1] > 0.0) {
                return Err(config(format!("preset '{spec}': width must be positive")));
            }
            let mut left = vec![0.0; dim];
            let mut right = vec![0.0; dim];
            left[0] = -0.5 * v[2];
            right[0] = 0.5 * v[2];
            let a = gaussian(grid, v[0], v[1], &left);
            let b = gaussian(grid, v[0], v[1], &right);
            a.zip_with(&b, |x, y| x + y)?
        }
        "random-bandlimited" => {
            let v = numbers(spec, args, 2, 3)?;
            if v[0] < 0.0 || v[0].fract() != 0.0 || v[1] < 1.0 || v[1].fract() != 0.0 {
                return Err(config(format!(
                    "preset '{spec}': seed and cutoff must be non-negative integers, cutoff >= 1"
                )));
            }
            let amplitude = v.get(2).copied().unwrap_or(1.0);
            band_limited(grid, v[1] as usize, &mut seeded(v[0] as u64)).scaled(amplitude)
        }
        "csv" => Field::new(grid, read_grid_csv(&base_dir.join(args), grid)?)?,
        _ => return Err(config(format!("unknown initial-data preset '{spec}'"))),
    };
    field.check_finite()?;
    Ok(field)
}

fn parse_bump(spec: &str, body: &str) -> Result<(f64, f64, f64)> {
    let bad = || config(format!("exponent preset '{spec}': expected a+b*exp(-r2/s)"));
    let (base, rest) = body.split_once('+').ok_or_else(bad)?;
    let base: f64 = base.trim().parse().map_err(|_| bad())?;
    let (amp, call) = match rest.split_once('*') {
        Some((a, c)) => (a.trim().parse::<f64>().map_err(|_| bad())?, c.trim()),
        None => (1.0, rest.trim()),
    };
    let inner = call
        .strip_prefix("exp(-r2")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(bad)?;
    let scale = if inner.is_empty() {
        1.0
    } else {
        inner
            .strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?
    };
    if !(scale > 0.0) {
        return Err(bad());
    }
    Ok((base, amp, scale))
}

/// Builds the exponent named by `spec` on `domain`.
pub fn exponent(spec: &str, domain: Domain, base_dir: &Path) -> Result<ExponentField> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let field = match name {
        "constant" => {
            let v = numbers(spec, args, 1, 1)?;
            ExponentField::constant(domain, v[0])
        }
        "gauss-bump" => {
            let (a, b, s) = parse_bump(spec, args)?;
            ExponentField::from_fn(domain, Some(a), |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                a + b * (-r2 / s).exp()
            })
        }
        "step" => {
            let v = numbers(spec, args, 2, 2)?;
            ExponentField::from_fn(domain, None, |x| if x[0] < 0.0 { v[0] } else { v[1] })
        }
        "csv" => match domain {
            Domain::Grid(g) => ExponentField::new(domain, read_grid_csv(&base_dir.join(args), g)?, None),
            Domain::Interval(_) => {
                return Err(config(format!("exponent preset '{spec}': csv exponents need a grid domain")))
            }
        },
        _ => return Err(config(format!("unknown exponent preset '{spec}'"))),
    };
    field.map_err(|e| config(format!("exponent preset '{spec}': {e}")))
}

/// Exponent `q(.)` on `[0, t]` sampled at the midpoints of `cells` cells.
/// Besides the spatial presets, `linear:a,b` ramps from `a` at 0 to `b` at `t`.
pub fn time_exponent(spec: &str, t: f64, cells: usize) -> Result<ExponentField> {
    let interval = Interval::new(0.0, t, cells)?;
    let domain = Domain::Interval(interval);
    if let Some(args) = spec.strip_prefix("linear:") {
        let v = numbers(spec, args, 2, 2)?;
        return ExponentField::from_fn(domain, None, |x| v[0] + (v[1] - v[0]) * x[0] / t)
            .map_err(|e| config(format!("time exponent '{spec}': {e}")));
    }
    match spec.split_once(':').map(|(n, _)| n) {
        Some("constant") => exponent(spec, domain, Path::new("")),
        _ => Err(config(format!(
            "time exponent '{spec}' must be constant:q or linear:a,b"
        ))),
    }
}

/// Reads `x[,y[,z]],value` rows and places them on the grid. Every grid
/// point must appear exactly once.
fn read_grid_csv(path: &Path, grid: Grid) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config(format!("cannot read field file {}: {e}", path.display())))?;
    let dim = grid.dim();
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    let h = grid.spacing();
    let n = grid.points_per_dim();
    for (i, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| config(format!("{}: line {}: non-numeric entry", path.display(), i + 1)))?;
        if cols.len() != dim + 1 {
            return Err(config(format!(
                "{}: line {}: expected {} columns, got {}",
                path.display(),
                i + 1,
                dim + 1,
                cols.len()
            )));
        }
        let mut multi = [0usize; 3];
        for axis in 0..dim {
            let pos = (cols[axis] + grid.half_width()) / h;
            let idx = pos.round();
            if (pos - idx).abs() > 1e-6 || idx < 0.0 || idx >= n as f64 {
                return Err(config(format!(
                    "{}: line {}: coordinate {} is not a grid point",
                    path.display(),
                    i + 1,
                    cols[axis]
                )));
            }
            multi[axis] = idx as usize;
        }
        let flat = grid.flat_index(&multi[..dim]);
        if seen[flat] {
            return Err(config(format!("{}: line {}: duplicate grid point", path.display(), i + 1)));
        }
        seen[flat] = true;
        values[flat] = cols[dim];
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(config(format!(
            "{}: grid point {:?} is missing",
            path.display(),
            &grid.point(missing)[..dim]
        )));
    }
    Ok(values)
}
