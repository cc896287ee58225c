//! Fourier-multiplier operators on periodic fields.
//!
//! Every operator here is a multiplier whose symbol is either real and even in
//! `k` or imaginary and odd. Odd symbols vanish on the unpaired Nyquist index so
//! real fields stay real.

use crate::error::{domain, Result};
use crate::grid::{Field, Grid, SpectralField, MAX_DIM};
use num_complex::Complex64;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn imag(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

pub fn norm_sq(k: &[f64; MAX_DIM]) -> f64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis < grid.dim() {
        Ok(())
    } else {
        Err(domain(format!(
            "axis {axis} out of range for a {}-dimensional grid",
            grid.dim()
        )))
    }
}

/// Symbol `|k|^alpha`.
pub fn fractional_symbol(k: &[f64; MAX_DIM], alpha: f64) -> f64 {
    let ksq = norm_sq(k);
    if ksq == 0.0 {
        0.0
    } else {
        ksq.powf(0.5 * alpha)
    }
}

/// Symbol `exp(-t |k|^alpha)` of the fractional heat semigroup.
pub fn heat_symbol(k: &[f64; MAX_DIM], t: f64, alpha: f64) -> f64 {
    (-t * fractional_symbol(k, alpha)).exp()
}

/// True if any axis mode exceeds `N/3` (removed by the 2/3 rule).
pub fn is_aliased(grid: &Grid, m: &[i64; MAX_DIM]) -> bool {
    let cutoff = (grid.points_per_dim() / 3) as i64;
    m[..grid.dim()].iter().any(|mj| mj.abs() > cutoff)
}

/// Symbol `i k_axis`, zero on the Nyquist index of that axis.
pub fn derivative_symbol(grid: &Grid, k: &[f64; MAX_DIM], m: &[i64; MAX_DIM], axis: usize) -> Complex64 {
    if grid.is_nyquist(m[axis], axis) {
        Complex64::new(0.0, 0.0)
    } else {
        imag(k[axis])
    }
}

pub fn fractional_laplacian(f: &Field, alpha: f64) -> Result<Field> {
    f.check_finite()?;
    check_alpha(alpha)?;
    let mut s = f.forward();
    s.apply(|k, _| real(fractional_symbol(k, alpha)));
    Ok(s.inverse())
}

pub fn heat_propagate(f: &Field, t: f64, alpha: f64) -> Result<Field> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("propagation time must be >= 0, got {t}")));
    }
    check_alpha(alpha)?;
    f.check_finite()?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let mut s = f.forward();
    heat_propagate_spectral(&mut s, t, alpha);
    Ok(s.inverse())
}

pub fn heat_propagate_spectral(s: &mut SpectralField, t: f64, alpha: f64) {
    s.apply(|k, _| real(heat_symbol(k, t, alpha)));
}

/// `v = grad (-Laplacian)^{-1} u`, symbol `i k_j / |k|^2` with the zero mode
/// gauged to zero (the mean of `u` is dropped).
pub fn grad_inv_laplacian(u: &Field) -> Result<Vec<Field>> {
    u.check_finite()?;
    let s = u.forward();
    Ok(grad_inv_laplacian_spectral(&s)
        .iter()
        .map(SpectralField::inverse)
        .collect())
}

pub fn grad_inv_laplacian_spectral(s: &SpectralField) -> Vec<SpectralField> {
    let grid = *s.grid();
    (0..grid.dim())
        .map(|axis| {
            s.map_symbol(|k, m| {
                let ksq = norm_sq(k);
                if ksq == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    derivative_symbol(&grid, k, m, axis) / ksq
                }
            })
        })
        .collect()
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &[Field]) -> Result<Field> {
    let spectra: Vec<SpectralField> = v.iter().map(Field::forward).collect();
    Ok(divergence_spectral(&spectra)?.inverse())
}

pub fn divergence_spectral(v: &[SpectralField]) -> Result<SpectralField> {
    let grid = *v[0].grid();
    if v.len() != grid.dim() {
        return Err(domain(format!(
            "vector field has {} components on a {}-dimensional grid",
            v.len(),
            grid.dim()
        )));
    }
    let mut out = SpectralField::zeros(grid);
    for (axis, component) in v.iter().enumerate() {
        grid.check_same(component.grid())?;
        let d = component.map_symbol(|k, m| derivative_symbol(&grid, k, m, axis));
        out.add_scaled(&d, 1.0);
    }
    Ok(out)
}

pub fn partial_derivative(f: &Field, axis: usize) -> Result<Field> {
    let grid = *f.grid();
    check_axis(&grid, axis)?;
    let mut s = f.forward();
    s.apply(|k, m| derivative_symbol(&grid, k, m, axis));
    Ok(s.inverse())
}

/// Riesz transform along `axis` (zero-based), symbol `-i k_j / |k|`.
pub fn riesz_transform(f: &Field, axis: usize) -> Result<Field> {
    let grid = *f.grid();
    check_axis(&grid, axis)?;
    f.check_finite()?;
    let mut s = f.forward();
    s.apply(|k, m| {
        let knorm = norm_sq(k).sqrt();
        if knorm == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -derivative_symbol(&grid, k, m, axis) / knorm
        }
    });
    Ok(s.inverse())
}

/// 2/3-rule truncation: zero every mode with some `|m_j| > N/3`.
pub fn dealias(f: &Field) -> Field {
    let mut s = f.forward();
    dealias_spectral(&mut s);
    s.inverse()
}

pub fn dealias_spectral(s: &mut SpectralField) {
    let grid = *s.grid();
    s.apply(|_, m| if is_aliased(&grid, m) { real(0.0) } else { real(1.0) });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn fractional_laplacian_unit_mode_is_fixed() {
        // L = pi gives integer wavenumbers; cos(x) has |k| = 1.
        let g = Grid::new(2, PI, 32).unwrap();
        let f = Field::from_fn(g, |x| x[0].cos());
        for alpha in [0.3, 1.0, 1.5, 2.0] {
            let out = fractional_laplacian(&f, alpha).unwrap();
            assert!(max_diff(&out, &f) < 1e-12);
        }
    }

    #[test]
    fn fractional_laplacian_sin3() {
        let g = Grid::new(1, PI, 64).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).sin());
        let out = fractional_laplacian(&f, 1.5).unwrap();
        let expect = f.scaled(3f64.powf(1.5));
        assert!(max_diff(&out, &expect) <= 1e-10);
    }

    #[test]
    fn fractional_laplacian_kills_constants_and_rejects_bad_input() {
        let g = Grid::new(1, 1.0, 16).unwrap();
        let out = fractional_laplacian(&Field::constant(g, 3.0), 1.2).unwrap();
        assert!(out.max_abs() < 1e-14);
        assert!(fractional_laplacian(&Field::constant(g, 1.0), 2.5).is_err());
        let mut bad = Field::zeros(g);
        bad.values_mut()[0] = f64::INFINITY;
        assert!(fractional_laplacian(&bad, 1.0).is_err());
    }

    #[test]
    fn heat_identity_and_single_mode() {
        let g = Grid::new(2, PI, 32).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * x[0] + x[1]).cos());
        assert_eq!(heat_propagate(&f, 0.0, 1.5).unwrap(), f);
        let t = 0.3;
        let factor = (-t * 5f64.powf(0.75)).exp();
        let out = heat_propagate(&f, t, 1.5).unwrap();
        assert!(max_diff(&out, &f.scaled(factor)) < 1e-12);
        assert!(heat_propagate(&f, -1.0, 1.5).is_err());
    }

    #[test]
    fn heat_gaussian_matches_closed_form() {
        // alpha = 2: a Gaussian of variance s^2 per axis spreads to s^2 + 2t.
        let g = Grid::new(1, 20.0, 512).unwrap();
        let s2 = 0.5;
        let t = 0.1;
        let gaussian = |var: f64, x: f64| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        let f = Field::from_fn(g, |x| gaussian(s2, x[0]));
        let expect = Field::from_fn(g, |x| gaussian(s2 + 2.0 * t, x[0]));
        let out = heat_propagate(&f, t, 2.0).unwrap();
        assert!(max_diff(&out, &expect) <= 1e-6 * expect.max_abs());
    }

    #[test]
    fn grad_inv_laplacian_single_mode() {
        let g = Grid::new(2, PI, 32).unwrap();
        let (k0, k1) = (2.0, 1.0);
        let u = Field::from_fn(g, |x| (k0 * x[0] + k1 * x[1]).cos());
        let v = grad_inv_laplacian(&u).unwrap();
        let ksq = k0 * k0 + k1 * k1;
        let e0 = Field::from_fn(g, |x| -(k0 / ksq) * (k0 * x[0] + k1 * x[1]).sin());
        let e1 = Field::from_fn(g, |x| -(k1 / ksq) * (k0 * x[0] + k1 * x[1]).sin());
        assert!(max_diff(&v[0], &e0) < 1e-12);
        assert!(max_diff(&v[1], &e1) < 1e-12);

        let zero = grad_inv_laplacian(&Field::constant(g, 4.0)).unwrap();
        assert!(zero.iter().all(|c| c.max_abs() < 1e-14));
    }

    #[test]
    fn riesz_single_mode_and_axis_error() {
        let g = Grid::new(2, PI, 32).unwrap();
        let (k0, k1) = (3.0, 4.0);
        let f = Field::from_fn(g, |x| (k0 * x[0] + k1 * x[1]).sin());
        let r0 = riesz_transform(&f, 0).unwrap();
        let e0 = Field::from_fn(g, |x| -(k0 / 5.0) * (k0 * x[0] + k1 * x[1]).cos());
        assert!(max_diff(&r0, &e0) < 1e-12);
        assert!(riesz_transform(&f, 2).is_err());
        assert!(riesz_transform(&Field::constant(g, 1.0), 1).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn dealias_examples() {
        let g = Grid::new(1, PI, 64).unwrap();
        let band = Field::from_fn(g, |x| (5.0 * x[0]).cos() + (21.0 * x[0]).sin());
        assert!(max_diff(&dealias(&band), &band) < 1e-12);
        let high = Field::from_fn(g, |x| (31.0 * x[0]).cos());
        assert!(dealias(&high).max_abs() < 1e-12);
    }
}
