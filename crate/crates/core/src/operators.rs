//! Maximal function, Riesz potential and the empirical operator checks built on
//! them.

use crate::error::{domain, precondition, Error, Result};
use crate::grid::{Field, Grid, SpectralField};
use crate::quadrature::gauss_legendre;
use crate::spectral::{fractional_symbol, heat_propagate, heat_symbol, norm_sq};
use crate::varlebesgue::{classical_norm, luxemburg_norm, mixed_norm, ExponentField};
use num_complex::Complex64;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

thread_local! {
    static BALLS: RefCell<Option<(Grid, Vec<Vec<f64>>)>> = const { RefCell::new(None) };
}

/// Largest grid (in points) whose ball spectra are kept in the cache.
const BALL_CACHE_LIMIT: usize = 1 << 16;

fn periodic_offset(grid: &Grid, i: usize) -> f64 {
    let n = grid.points_per_dim();
    let j = if i > n / 2 { i as f64 - n as f64 } else { i as f64 };
    j * grid.spacing()
}

/// Spectra of normalized indicators of the discrete balls of radius
/// `0, h, 2h, ..., L` about the origin index, wrapping periodically.
fn ball_spectra(grid: &Grid) -> Vec<Vec<f64>> {
    let h = grid.spacing();
    let radii = grid.points_per_dim() / 2;
    let dist: Vec<f64> = (0..grid.len())
        .map(|flat| {
            let idx = grid.multi_index(flat);
            idx[..grid.dim()]
                .iter()
                .map(|&i| periodic_offset(grid, i).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    (0..=radii)
        .map(|j| {
            let rho = j as f64 * h * (1.0 + 1e-12);
            let count = dist.iter().filter(|&&d| d <= rho).count() as f64;
            let indicator = Field::new(
                *grid,
                dist.iter().map(|&d| if d <= rho { 1.0 / count } else { 0.0 }).collect(),
            )
            .expect("indicator matches grid");
            // The ball is symmetric about the origin, so its spectrum is real.
            indicator.forward().coeffs().iter().map(|c| c.re).collect()
        })
        .collect()
}

fn with_balls<T>(grid: &Grid, f: impl FnOnce(&[Vec<f64>]) -> T) -> T {
    if grid.len() > BALL_CACHE_LIMIT {
        return f(&ball_spectra(grid));
    }
    BALLS.with(|cell| {
        let mut cache = cell.borrow_mut();
        if cache.as_ref().map(|(g, _)| g != grid).unwrap_or(true) {
            *cache = Some((*grid, ball_spectra(grid)));
        }
        f(&cache.as_ref().expect("cache filled").1)
    })
}

/// Centered discrete maximal function: sup over ball radii `{0, h, ..., L}` of
/// the average of `|f|`. Radius zero is the single cell, so `M f >= |f|`.
pub fn maximal_function(f: &Field) -> Result<Field> {
    f.check_finite()?;
    let grid = *f.grid();
    let spectrum = f.abs().forward();
    Ok(with_balls(&grid, |balls| {
        let mut best = f.abs().into_values();
        for ball in &balls[1..] {
            let coeffs: Vec<Complex64> = spectrum.coeffs().iter().zip(ball).map(|(c, b)| c * b).collect();
            let avg = SpectralField::from_coeffs(grid, coeffs)
                .expect("same grid")
                .inverse();
            for (m, a) in best.iter_mut().zip(avg.values()) {
                *m = m.max(*a);
            }
        }
        Field::new(grid, best).expect("same grid")
    }))
}

fn check_beta(grid: &Grid, beta: f64) -> Result<()> {
    let n = grid.dim() as f64;
    if beta.is_finite() && beta > 0.0 && beta < n {
        Ok(())
    } else {
        Err(domain(format!("beta must lie in (0, {n}), got {beta}")))
    }
}

/// `C(beta, n) = Gamma((n-beta)/2) / (pi^{n/2} 2^beta Gamma(beta/2))`.
pub fn riesz_constant(beta: f64, dim: usize) -> f64 {
    let n = dim as f64;
    libm::tgamma((n - beta) / 2.0) / (PI.powf(n / 2.0) * 2f64.powf(beta) * libm::tgamma(beta / 2.0))
}

/// Riesz potential as the multiplier `|k|^{-beta}` with the zero mode dropped.
pub fn riesz_potential(f: &Field, beta: f64) -> Result<Field> {
    check_beta(f.grid(), beta)?;
    f.check_finite()?;
    let mut s = f.forward();
    s.apply(|k, _| {
        let ksq = norm_sq(k);
        if ksq == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(ksq.powf(-0.5 * beta), 0.0)
        }
    });
    Ok(s.inverse())
}

/// Direct quadrature of `C(beta,n) int f(y) |x - y|^{beta - n} dy` at the
/// given points for a function supported in the ball of radius `support`
/// about the origin, summed over the image shell `m in {-1, 0, 1}^n`.
///
/// Polar coordinates about each image of `x` with `s = rho^beta` remove the
/// kernel singularity: the radial integrand becomes `f(x + s^{1/beta} theta) / beta`.
/// Images with `2 <= |m|_inf <= FAR_IMAGES` are added as point masses at the
/// centroid; their neglected multipole terms are far below the shell error.
pub fn riesz_potential_oracle(
    f: impl Fn(&[f64]) -> f64,
    support: f64,
    grid: &Grid,
    beta: f64,
    points: &[[f64; 3]],
    angular_nodes: usize,
    radial_nodes: usize,
) -> Result<Vec<f64>> {
    check_beta(grid, beta)?;
    let dim = grid.dim();
    let period = 2.0 * grid.half_width();
    let (gl_x, gl_w) = gauss_legendre(radial_nodes);
    let directions = sphere_rule(dim, angular_nodes);
    let images: Vec<[f64; 3]> = image_shell(dim, period);
    let c = riesz_constant(beta, dim);
    let cell = grid.cell_volume();
    let mut mass = 0.0;
    let mut centroid = [0.0; 3];
    for flat in 0..grid.len() {
        let y = grid.point(flat);
        let v = f(&y[..dim]) * cell;
        mass += v;
        for j in 0..dim {
            centroid[j] += v * y[j];
        }
    }
    if mass != 0.0 {
        centroid.iter_mut().for_each(|v| *v /= mass);
    }
    let far = far_images(dim, period);
    Ok(points
        .iter()
        .map(|x| {
            let far_field: f64 = far
                .iter()
                .map(|shift| {
                    let r2: f64 = (0..dim).map(|j| (x[j] + shift[j] - centroid[j]).powi(2)).sum();
                    mass * r2.powf(0.5 * (beta - dim as f64))
                })
                .sum();
            let mut total = beta * far_field;
            for shift in &images {
                let center: Vec<f64> = (0..dim).map(|j| x[j] + shift[j]).collect();
                let dist = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                let rho_lo = (dist - support).max(0.0);
                let rho_hi = dist + support;
                let (s_lo, s_hi) = (rho_lo.powf(beta), rho_hi.powf(beta));
                let half = 0.5 * (s_hi - s_lo);
                let mid = 0.5 * (s_hi + s_lo);
                let mut y = [0.0; 3];
                for (theta, w_theta) in &directions {
                    let mut line = 0.0;
                    for (xi, wi) in gl_x.iter().zip(&gl_w) {
                        let rho = (mid + half * xi).powf(1.0 / beta);
                        for j in 0..dim {
                            y[j] = center[j] - rho * theta[j];
                        }
                        line += wi * f(&y[..dim]);
                    }
                    total += w_theta * line * half;
                }
            }
            c * total / beta
        })
        .collect())
}

const FAR_IMAGES: i32 = 16;

fn far_images(dim: usize, period: f64) -> Vec<[f64; 3]> {
    let span = |active: bool| if active { -FAR_IMAGES..=FAR_IMAGES } else { 0..=0 };
    let mut out = Vec::new();
    for a in span(true) {
        for b in span(dim >= 2) {
            for c in span(dim >= 3) {
                if a.abs().max(b.abs()).max(c.abs()) >= 2 {
                    out.push([a as f64 * period, b as f64 * period, c as f64 * period]);
                }
            }
        }
    }
    out
}

fn image_shell(dim: usize, period: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    let range: &[i32] = &[-1, 0, 1];
    for &a in range {
        for &b in if dim >= 2 { range } else { &[0] } {
            for &c in if dim >= 3 { range } else { &[0] } {
                out.push([a as f64 * period, b as f64 * period, c as f64 * period]);
            }
        }
    }
    out
}

/// Unit-sphere quadrature: two points in 1-D, trapezoid on the circle, and
/// Gauss-Legendre in `cos(theta)` times trapezoid in `phi` on the 2-sphere.
fn sphere_rule(dim: usize, nodes: usize) -> Vec<([f64; 3], f64)> {
    match dim {
        1 => vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
        2 => (0..nodes)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / nodes as f64;
                ([a.cos(), a.sin(), 0.0], 2.0 * PI / nodes as f64)
            })
            .collect(),
        _ => {
            let (zs, ws) = gauss_legendre(nodes / 2);
            let mut out = Vec::new();
            for (z, wz) in zs.iter().zip(&ws) {
                let ring = (1.0 - z * z).sqrt();
                for i in 0..nodes {
                    let a = 2.0 * PI * i as f64 / nodes as f64;
                    out.push(([ring * a.cos(), ring * a.sin(), *z], wz * 2.0 * PI / nodes as f64));
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlsOutcome {
    pub ratio: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub q_minus: f64,
    pub q_plus: f64,
}

/// `||I_beta f||_{q(.)} / max{||f||_{p(.)}, ||f||_r}` with
/// `q(.) = n p(.) / (n - beta r)`.
pub fn verify_hls(f: &Field, p: &ExponentField, r: f64, beta: f64, tol: f64) -> Result<HlsOutcome> {
    let n = f.grid().dim() as f64;
    if !(r > 1.0 && r.is_finite()) {
        return Err(precondition(format!("need 1 < r < inf, got {r}")));
    }
    let limit = (n / p.p_plus()).min(n / r);
    if !(beta > 0.0 && beta < limit) {
        return Err(precondition(format!(
            "need 0 < beta < min(n/p+, n/r) = {limit}, got beta = {beta}"
        )));
    }
    let q = p.map(|pv| n * pv / (n - beta * r))?;
    let potential = riesz_potential(f, beta)?;
    let lhs = luxemburg_norm(&potential, &q, tol)?.value;
    let rhs = mixed_norm(f, p, r, tol)?;
    Ok(HlsOutcome {
        ratio: if rhs == 0.0 { 0.0 } else { lhs / rhs },
        lhs,
        rhs,
        q_minus: q.p_minus(),
        q_plus: q.p_plus(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantOutcome {
    pub violations: usize,
    /// Largest `|G_t * f| - M f` relative to `max |f|` (negative when it holds everywhere).
    pub max_excess: f64,
}

/// Pointwise `|G_t * f| <= M f + slack max|f|`.
pub fn verify_radial_majorant(f: &Field, alpha: f64, t: f64, slack: f64) -> Result<MajorantOutcome> {
    let maximal = maximal_function(f)?;
    radial_majorant_against(f, &maximal, alpha, t, slack)
}

/// [`verify_radial_majorant`] with `M f` supplied, for sweeps over `(alpha, t)`.
pub fn radial_majorant_against(
    f: &Field,
    maximal: &Field,
    alpha: f64,
    t: f64,
    slack: f64,
) -> Result<MajorantOutcome> {
    f.grid().check_same(maximal.grid())?;
    let smoothed = heat_propagate(f, t, alpha)?;
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for (g, m) in smoothed.values().iter().zip(maximal.values()) {
        let excess = (g.abs() - m) / scale;
        max_excess = max_excess.max(excess);
        if excess > slack {
            violations += 1;
        }
    }
    Ok(MajorantOutcome {
        violations,
        max_excess,
    })
}

/// Periodic kernel of `Lambda^nu e^{-t Lambda^alpha}` sampled on the grid,
/// centered at the origin index (unit mass when `nu = 0`).
pub fn sampled_kernel(grid: Grid, t: f64, alpha: f64, nu: f64) -> Field {
    let shift = grid.half_width();
    let scale = grid.len() as f64 / grid.measure();
    let coeffs = (0..grid.len())
        .map(|flat| {
            let k = grid.wavevector(flat);
            // Move the kernel center from x = -L to x = 0: phase e^{-i k . L}.
            let phase: f64 = -k[..grid.dim()].iter().map(|kj| kj * shift).sum::<f64>();
            let amp = scale * heat_symbol(&k, t, alpha) * if nu == 0.0 { 1.0 } else { fractional_symbol(&k, nu) };
            Complex64::from_polar(amp, phase)
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs).expect("length matches grid").inverse()
}

/// Largest boundary-face magnitude relative to the field maximum.
pub fn wrap_contamination(f: &Field) -> f64 {
    let grid = f.grid();
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let edge = (0..grid.len())
        .filter(|&flat| grid.multi_index(flat)[..grid.dim()].contains(&0))
        .map(|flat| f.values()[flat].abs())
        .fold(0.0, f64::max);
    edge / peak
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayStudy {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub nu: f64,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub predicted: f64,
    pub contamination: f64,
}

impl DecayStudy {
    pub fn relative_error(&self) -> f64 {
        if self.predicted == 0.0 {
            self.slope.abs()
        } else {
            (self.slope / self.predicted - 1.0).abs()
        }
    }
}

/// Predicted exponent `-nu/alpha - (n/alpha)(1/p - 1/q)`.
pub fn predicted_decay_exponent(dim: usize, alpha: f64, p: f64, q: f64, nu: f64) -> f64 {
    let inv = |v: f64| if v.is_infinite() { 0.0 } else { 1.0 / v };
    -nu / alpha - dim as f64 / alpha * (inv(p) - inv(q))
}

/// Fitted decay exponent of `||Lambda^nu G_t * f_t||_q / ||f_t||_p` over
/// `t in [t0, 10 t0]`.
///
/// The data family `f_t = G_{t/2}` is self-similar at the scale of the
/// propagator, so the ratio is a pure power of `t` on R^n and the fit measures
/// the sharp exponent. The study is rejected when either field reaches the box
/// boundary above `wrap_tol` of its peak.
pub fn verify_lplq_decay(
    grid: Grid,
    p: f64,
    q: f64,
    alpha: f64,
    with_derivative: bool,
    t0: f64,
    samples: usize,
    wrap_tol: f64,
) -> Result<DecayStudy> {
    if !(1.0 <= p && p <= q) {
        return Err(precondition(format!("need 1 <= p <= q, got p = {p}, q = {q}")));
    }
    if !(t0 > 0.0) || samples < 2 {
        return Err(precondition("need t0 > 0 and at least two time samples"));
    }
    let nu = if with_derivative { 1.0 } else { 0.0 };
    let mut times = Vec::with_capacity(samples);
    let mut ratios = Vec::with_capacity(samples);
    let mut contamination = 0.0f64;
    for i in 0..samples {
        let t = t0 * 10f64.powf(i as f64 / (samples - 1) as f64);
        let data = sampled_kernel(grid, 0.5 * t, alpha, 0.0);
        let out = sampled_kernel(grid, t, alpha, nu);
        contamination = contamination.max(wrap_contamination(&data)).max(wrap_contamination(&out));
        let ratio = classical_norm(&out, q)? / classical_norm(&data, p)?;
        times.push(t);
        ratios.push(ratio);
    }
    if contamination > wrap_tol {
        return Err(Error::ExperimentInvalid(format!(
            "boundary contamination {contamination:.3e} exceeds {wrap_tol:.1e}; enlarge the box or shorten the time window"
        )));
    }
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    Ok(DecayStudy {
        p,
        q,
        alpha,
        nu,
        slope: fit_slope(&lx, &ly),
        predicted: predicted_decay_exponent(grid.dim(), alpha, p, q, nu),
        times,
        ratios,
        contamination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{band_limited, seeded};

    #[test]
    fn maximal_of_constant_and_pointwise_bound() {
        let g = Grid::new(2, 1.0, 16).unwrap();
        let m = maximal_function(&Field::constant(g, 2.5)).unwrap();
        assert!(m.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        let f = band_limited(g, 3, &mut seeded(2));
        let m = maximal_function(&f).unwrap();
        assert!(m.values().iter().zip(f.values()).all(|(a, b)| *a >= b.abs()));
    }

    #[test]
    fn maximal_indicator_profile() {
        let g = Grid::new(2, 8.0, 128).unwrap();
        let rho = 1.0;
        let chi = Field::from_fn(g, |x| if x[0] * x[0] + x[1] * x[1] <= rho * rho { 1.0 } else { 0.0 });
        let m = maximal_function(&chi).unwrap();
        for d in [2.0 * rho, 4.0 * rho] {
            let flat = g.flat_index(&[64 + (d / g.spacing()) as usize, 64]);
            let expect = (rho / (d + rho)).powi(2);
            assert!(m.values()[flat] / expect < 2.0 && expect / m.values()[flat] < 2.0);
        }
    }

    #[test]
    fn riesz_single_mode_and_small_beta() {
        let g = Grid::new(2, PI, 32).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0] + 4.0 * x[1]).cos());
        let out = riesz_potential(&f, 0.7).unwrap();
        let expect = f.scaled(5f64.powf(-0.7));
        assert!(out.zip_with(&expect, |a, b| a - b).unwrap().max_abs() < 1e-12);
        assert!(riesz_potential(&f, 2.0).is_err());
        let h = band_limited(g, 5, &mut seeded(4));
        let h = h.map(|v| v - h.mean());
        let out = riesz_potential(&h, 1e-3).unwrap();
        assert!(out.zip_with(&h, |a, b| a - b).unwrap().max_abs() <= 1e-2 * h.max_abs());
    }

    #[test]
    fn lplq_gaussian_slope() {
        let g = Grid::new(2, PI, 128).unwrap();
        let s = verify_lplq_decay(g, 1.0, f64::INFINITY, 2.0, false, 0.01, 5, 1e-6).unwrap();
        assert!((s.slope + 1.0).abs() < 1e-6, "{s:?}");
    }
}
