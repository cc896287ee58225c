use crate::error::{domain, Result};
use crate::grid::{Field, Grid, SpectralField, MAX_DIM};
use crate::spectral::{dealias, dealias_spectral, grad_inv_laplacian, is_aliased, norm_sq};
use num_complex::Complex64;

/// Wavevector with the unpaired Nyquist component zeroed, the convention of
/// every odd symbol in the crate.
pub(crate) fn odd_wavevector(grid: &Grid, flat: usize) -> [f64; MAX_DIM] {
    let mut k = grid.wavevector(flat);
    let m = grid.modes(flat);
    for axis in 0..grid.dim() {
        if grid.is_nyquist(m[axis], axis) {
            k[axis] = 0.0;
        }
    }
    k
}

fn products(v: &[Field]) -> Vec<Vec<Field>> {
    let dim = v.len();
    let grid = *v[0].grid();
    let half_sq: Vec<f64> = (0..grid.len())
        .map(|i| 0.5 * v.iter().map(|c| c.values()[i] * c.values()[i]).sum::<f64>())
        .collect();
    let mut out: Vec<Vec<Field>> = vec![Vec::with_capacity(dim); dim];
    for i in 0..dim {
        for j in 0..dim {
            if j < i {
                let mirror = out[j][i].clone();
                out[i].push(mirror);
                continue;
            }
            let values = (0..grid.len())
                .map(|p| {
                    let vv = v[i].values()[p] * v[j].values()[p];
                    if i == j {
                        vv - half_sq[p]
                    } else {
                        vv
                    }
                })
                .collect();
            out[i].push(Field::new(grid, values).expect("same grid"));
        }
    }
    out
}

/// `M = v (x) v - |v|^2 I / 2`, entry `[i][j]`.
///
/// With `dealias` the components are truncated by the 2/3 rule before the
/// product and each entry is truncated again afterwards.
pub fn nonlinear_flux(v: &[Field], dealias_on: bool) -> Result<Vec<Vec<Field>>> {
    let grid = *v
        .first()
        .ok_or_else(|| domain("flux of an empty vector field"))?
        .grid();
    if v.len() != grid.dim() {
        return Err(domain(format!(
            "vector field has {} components on a {}-dimensional grid",
            v.len(),
            grid.dim()
        )));
    }
    for c in v {
        grid.check_same(c.grid())?;
        c.check_finite()?;
    }
    if !dealias_on {
        return Ok(products(v));
    }
    let truncated: Vec<Field> = v.iter().map(dealias).collect();
    Ok(products(&truncated)
        .into_iter()
        .map(|row| row.iter().map(dealias).collect())
        .collect())
}

fn product_field(a: &Field, b: &Field) -> Field {
    a.zip_with(b, |x, y| x * y).expect("same grid")
}

/// Relative L2 residual of `u grad(-Lap)^{-1} u = -div(v (x) v - |v|^2 I / 2)`
/// with `v = grad(-Lap)^{-1} u`, both sides dealiased.
pub fn symmetric_structure_residual(u: &Field) -> Result<f64> {
    u.check_finite()?;
    let grid = *u.grid();
    let u = dealias(&u.map(|x| x - u.mean()));
    let v = grad_inv_laplacian(&u)?;
    let flux = nonlinear_flux(&v, true)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..grid.dim() {
        let lhs = dealias(&product_field(&u, &dealias(&v[i])));
        let mut rhs = SpectralField::zeros(grid);
        for (j, entry) in flux[i].iter().enumerate() {
            let d = entry.forward().map_symbol(|k, m| {
                if grid.is_nyquist(m[j], j) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -k[j])
                }
            });
            rhs.add_scaled(&d, 1.0);
        }
        let rhs = rhs.inverse();
        num += lhs.zip_with(&rhs, |a, b| (a - b) * (a - b))?.integral();
        den += lhs.map(|a| a * a).integral();
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

/// Fourier-side nonlinearity of the reduced system,
/// `R (x) R div M(v)`: component `i` is `-k_i (k . w) / |k|^2` with
/// `w_j = sum_l i k_l M_jl`.
pub(crate) fn reduced_nonlinearity(v_hat: &[SpectralField], dealias_on: bool) -> Vec<SpectralField> {
    let grid = *v_hat[0].grid();
    let dim = grid.dim();
    let v: Vec<Field> = v_hat
        .iter()
        .map(|s| {
            let mut s = s.clone();
            if dealias_on {
                dealias_spectral(&mut s);
            }
            s.inverse()
        })
        .collect();
    let flux = products(&v);
    let flux_hat: Vec<Vec<SpectralField>> = flux
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let mut s = e.forward();
                    if dealias_on {
                        dealias_spectral(&mut s);
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; dim];
    for flat in 0..grid.len() {
        let ksq = norm_sq(&grid.wavevector(flat));
        if ksq == 0.0 {
            continue;
        }
        if dealias_on && is_aliased(&grid, &grid.modes(flat)) {
            continue;
        }
        let k = odd_wavevector(&grid, flat);
        let mut k_dot_w = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            let mut w = Complex64::new(0.0, 0.0);
            for (l, entry) in flux_hat[j].iter().enumerate() {
                w += Complex64::new(0.0, k[l]) * entry.coeffs()[flat];
            }
            k_dot_w += k[j] * w;
        }
        for (i, comp) in out.iter_mut().enumerate() {
            comp[flat] = -k[i] * k_dot_w / ksq;
        }
    }
    out.into_iter()
        .map(|c| SpectralField::from_coeffs(grid, c).expect("same grid"))
        .collect()
}

/// Fourier side of `-div(u v)` with `v = grad(-Lap)^{-1} u`.
pub(crate) fn transport_term(u_hat: &SpectralField, dealias_on: bool) -> SpectralField {
    let grid = *u_hat.grid();
    let mut u_hat = u_hat.clone();
    if dealias_on {
        dealias_spectral(&mut u_hat);
    }
    let u = u_hat.inverse();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for axis in 0..grid.dim() {
        let v_axis = u_hat
            .map_symbol(|k, m| {
                let ksq = norm_sq(k);
                if ksq == 0.0 || grid.is_nyquist(m[axis], axis) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k[axis] / ksq)
                }
            })
            .inverse();
        let mut flux = product_field(&u, &v_axis).forward();
        if dealias_on {
            dealias_spectral(&mut flux);
        }
        for (flat, o) in out.iter_mut().enumerate() {
            let k = odd_wavevector(&grid, flat);
            *o -= Complex64::new(0.0, k[axis]) * flux.coeffs()[flat];
        }
    }
    SpectralField::from_coeffs(grid, out).expect("same grid")
}

/// Projection `k (k . v) / |k|^2` onto gradient fields.
pub(crate) fn curl_free_projection(v_hat: &mut [SpectralField]) {
    let grid = *v_hat[0].grid();
    let dim = grid.dim();
    for flat in 0..grid.len() {
        let k = odd_wavevector(&grid, flat);
        let ksq: f64 = k[..dim].iter().map(|x| x * x).sum();
        if ksq == 0.0 {
            v_hat.iter_mut().for_each(|c| c.coeffs_mut()[flat] = Complex64::new(0.0, 0.0));
            continue;
        }
        let dot: Complex64 = (0..dim).map(|j| k[j] * v_hat[j].coeffs()[flat]).sum();
        for (j, c) in v_hat.iter_mut().enumerate() {
            c.coeffs_mut()[flat] = k[j] * dot / ksq;
        }
    }
}

/// Largest `|k_i v_j - k_j v_i|` relative to the largest coefficient.
pub fn curl_defect(v: &[Field]) -> f64 {
    let spectra: Vec<SpectralField> = v.iter().map(Field::forward).collect();
    let grid = *v[0].grid();
    let dim = grid.dim();
    let scale = spectra
        .iter()
        .flat_map(|s| s.coeffs().iter())
        .fold(0.0f64, |m, c| m.max(c.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for flat in 0..grid.len() {
        let k = odd_wavevector(&grid, flat);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let d = k[i] * spectra[j].coeffs()[flat] - k[j] * spectra[i].coeffs()[flat];
                worst = worst.max(d.norm());
            }
        }
    }
    let kmax = grid.wavenumber(grid.points_per_dim() as i64 / 2);
    worst / (scale * kmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{band_limited, seeded};
    use std::f64::consts::PI;

    #[test]
    fn flux_examples() {
        let g = Grid::new(2, PI, 16).unwrap();
        let zero = vec![Field::zeros(g), Field::zeros(g)];
        let m = nonlinear_flux(&zero, true).unwrap();
        assert!(m.iter().flatten().all(|e| e.max_abs() == 0.0));
        let v = vec![Field::constant(g, 1.0), Field::zeros(g)];
        let m = nonlinear_flux(&v, false).unwrap();
        assert!(m[0][0].values().iter().all(|&x| x == 0.5));
        assert!(m[1][1].values().iter().all(|&x| x == -0.5));
        assert!(m[0][1].max_abs() == 0.0);
        let v = vec![band_limited(g, 3, &mut seeded(1)), band_limited(g, 3, &mut seeded(2))];
        let m = nonlinear_flux(&v, true).unwrap();
        assert_eq!(m[0][1], m[1][0]);
    }

    #[test]
    fn structure_identity_single_mode_and_zero() {
        let g = Grid::new(2, PI, 64).unwrap();
        assert_eq!(symmetric_structure_residual(&Field::zeros(g)).unwrap(), 0.0);
        let u = Field::from_fn(g, |x| (2.0 * x[0] + 3.0 * x[1]).cos());
        assert!(symmetric_structure_residual(&u).unwrap() < 1e-10);
    }

    #[test]
    fn reduced_term_matches_transport() {
        // -div(R (x) R div M) must equal -div(u v) for a mean-zero u.
        let g = Grid::new(2, PI, 64).unwrap();
        let u = band_limited(g, 10, &mut seeded(9));
        let u = u.map(|x| x - u.mean());
        let u_hat = u.forward();
        let v_hat = crate::spectral::grad_inv_laplacian_spectral(&u_hat);
        let n = reduced_nonlinearity(&v_hat, true);
        let mut minus_div = crate::spectral::divergence_spectral(&n).unwrap();
        minus_div.coeffs_mut().iter_mut().for_each(|c| *c = -*c);
        let direct = transport_term(&u_hat, true);
        let a = minus_div.inverse();
        let b = direct.inverse();
        let diff = a.zip_with(&b, |x, y| x - y).unwrap().max_abs();
        assert!(diff < 1e-12 * b.max_abs(), "{diff}");
    }
}
