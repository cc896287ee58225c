//! Radial evaluation of the fractional heat kernel `G_t = F^{-1} e^{-t|xi|^alpha}`
//! on R^n, its gradient, and the Duhamel time-integral constant.
//!
//! In radial form
//!   n = 1: G(r) = (1/pi)     int_0^K cos(kr) e^{-tk^a} dk
//!   n = 2: G(r) = (1/2pi)    int_0^K J0(kr) k e^{-tk^a} dk
//!   n = 3: G(r) = (1/2pi^2)  int_0^K sin(kr)/(kr) k^2 e^{-tk^a} dk
//! with `K = (37/t)^{1/a}` so that the dropped tail is below `e^{-37}`.

use crate::error::{domain, Result};
use crate::quadrature::{gauss_legendre, integrate, integrate_panels, QuadOptions};
use serde::Serialize;
use std::f64::consts::PI;

const CUTOFF_EXPONENT: f64 = 37.0;

fn check_args(t: f64, alpha: f64, dim: usize) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("kernel time must be positive, got {t}")));
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(1..=3).contains(&dim) {
        return Err(domain(format!("kernel dimension must be 1, 2 or 3, got {dim}")));
    }
    Ok(())
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Spherical Bessel `j1(z) = sin z / z^2 - cos z / z`.
fn spherical_j1(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        z / 3.0 * (1.0 - z2 / 10.0 + z2 * z2 / 280.0)
    } else {
        z.sin() / (z * z) - z.cos() / z
    }
}

fn radial_prefactor(dim: usize) -> f64 {
    match dim {
        1 => 1.0 / PI,
        2 => 1.0 / (2.0 * PI),
        _ => 1.0 / (2.0 * PI * PI),
    }
}

/// Oscillatory integral `int_0^K weight(k) e^{-t k^alpha} dk` split at the
/// zeros of the radial weight and at the scale `t^{-1/alpha}`.
fn radial_integral(weight: impl Fn(f64) -> f64, r: f64, t: f64, alpha: f64, dim: usize) -> Result<f64> {
    let cutoff = (CUTOFF_EXPONENT / t).powf(1.0 / alpha);
    let scale = t.powf(-1.0 / alpha);
    let mut breaks = vec![0.0];
    let mut b = scale / 64.0;
    while b < cutoff {
        breaks.push(b);
        b *= 2.0;
    }
    if r > 0.0 {
        // Half-period panels resolve every oscillation of the weight.
        let step = PI / r;
        let count = (cutoff / step).floor() as usize;
        breaks.extend((1..=count).map(|j| j as f64 * step));
    }
    breaks.push(cutoff);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * cutoff);
    let panels = breaks.len();
    let magnitude = scale.powi(dim as i32 + 1);
    let opts = QuadOptions {
        abs_tol: 1e-16 * magnitude * (panels as f64).max(16.0),
        rel_tol: 1e-13,
        max_intervals: 8 * panels + 4000,
    };
    let f = |k: f64| weight(k) * (-t * k.powf(alpha)).exp();
    Ok(integrate_panels(f, &breaks, opts)?.value)
}

/// `G^alpha_t(r)` on R^dim.
pub fn heat_kernel_eval(r: f64, t: f64, alpha: f64, dim: usize) -> Result<f64> {
    check_args(t, alpha, dim)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("radius must be finite and >= 0, got {r}")));
    }
    let integral = match dim {
        1 => radial_integral(|k| (k * r).cos(), r, t, alpha, dim)?,
        2 => radial_integral(|k| libm::j0(k * r) * k, r, t, alpha, dim)?,
        _ => radial_integral(|k| sinc(k * r) * k * k, r, t, alpha, dim)?,
    };
    Ok(radial_prefactor(dim) * integral)
}

/// Radial derivative `dG/dr`; `|grad G| = |dG/dr|` by symmetry.
pub fn heat_kernel_radial_derivative(r: f64, t: f64, alpha: f64, dim: usize) -> Result<f64> {
    check_args(t, alpha, dim)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let integral = match dim {
        1 => radial_integral(|k| k * (k * r).sin(), r, t, alpha, dim)?,
        2 => radial_integral(|k| k * k * libm::j1(k * r), r, t, alpha, dim)?,
        _ => radial_integral(|k| k * k * k * spherical_j1(k * r), r, t, alpha, dim)?,
    };
    Ok(-radial_prefactor(dim) * integral)
}

/// Gaussian closed form of the `alpha = 2` kernel.
pub fn gaussian_kernel(r: f64, t: f64, dim: usize) -> f64 {
    (4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-r * r / (4.0 * t)).exp()
}

/// Poisson closed form of the `alpha = 1` kernel.
pub fn poisson_kernel(r: f64, t: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let c = libm::tgamma((n + 1.0) / 2.0) / PI.powf((n + 1.0) / 2.0);
    c * t / (t * t + r * r).powf((n + 1.0) / 2.0)
}

/// Coefficient `c_j` of the large-distance expansion
/// `G_1(r) ~ sum_j c_j r^{-n - j alpha}`.
pub fn tail_coefficient(j: usize, alpha: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let ja = j as f64 * alpha;
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    let factorial: f64 = (1..=j).map(|i| i as f64).product();
    sign / factorial * 2f64.powf(ja) * libm::tgamma(ja / 2.0 + 1.0) * libm::tgamma((ja + n) / 2.0) * (PI * ja / 2.0).sin()
        / PI.powf(n / 2.0 + 1.0)
}

fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Radial samples of `G^alpha_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelProfile {
    pub alpha: f64,
    pub dim: usize,
    pub t: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl KernelProfile {
    pub fn build(alpha: f64, dim: usize, t: f64, radii: &[f64]) -> Result<Self> {
        let values = radii
            .iter()
            .map(|&r| heat_kernel_eval(r, t, alpha, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha,
            dim,
            t,
            radii: radii.to_vec(),
            values,
        })
    }

    /// Evenly spaced radii on `[0, r_max]`.
    pub fn uniform(alpha: f64, dim: usize, t: f64, r_max: f64, count: usize) -> Result<Self> {
        let radii: Vec<f64> = (0..count)
            .map(|i| r_max * i as f64 / (count.max(2) - 1) as f64)
            .collect();
        Self::build(alpha, dim, t, &radii)
    }

    /// Positive wherever the value is resolved above round-off.
    pub fn is_positive(&self, floor: f64) -> bool {
        let peak = self.values.iter().copied().fold(0.0, f64::max);
        self.values.iter().all(|&g| g > -floor * peak)
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        let peak = self.values.iter().copied().fold(0.0, f64::max);
        self.values.windows(2).all(|w| w[1] <= w[0] + slack * peak)
    }

    /// `int_{R^n} G` by log-radial Gauss-Legendre up to `40 t^{1/alpha}`, plus
    /// the analytic tail of the large-distance expansion beyond it.
    pub fn mass(alpha: f64, dim: usize, t: f64) -> Result<f64> {
        check_args(t, alpha, dim)?;
        let scale = t.powf(1.0 / alpha);
        let n = dim as f64;
        let omega = sphere_area(dim);
        let r_min = 1e-4 * scale;
        let r_max = if alpha == 2.0 { 12.0 * scale } else { 40.0 * scale };
        let (nodes, weights) = gauss_legendre(16);
        let (u0, u1) = (r_min.ln(), r_max.ln());
        let panels = ((u1 - u0) / (10f64.ln() / 4.0)).ceil() as usize;
        let width = (u1 - u0) / panels as f64;
        let mut body = 0.0;
        for p in 0..panels {
            let a = u0 + p as f64 * width;
            for (x, w) in nodes.iter().zip(&weights) {
                let u = a + 0.5 * width * (x + 1.0);
                let r = u.exp();
                body += 0.5 * width * w * r.powf(n) * heat_kernel_eval(r, t, alpha, dim)?;
            }
        }
        let core = heat_kernel_eval(0.0, t, alpha, dim)? * r_min.powf(n) / n;
        let tail: f64 = if alpha == 2.0 {
            0.0
        } else {
            (1..=6)
                .map(|j| {
                    let ja = j as f64 * alpha;
                    tail_coefficient(j, alpha, dim) * t.powi(j as i32) * r_max.powf(-ja) / ja
                })
                .sum()
        };
        Ok(omega * (core + body + tail))
    }
}

/// Deterministic low-discrepancy sample of `(t, r)` pairs with
/// `t in [1e-2, 10]` and `r / t^{1/alpha} in [1e-2, 1e2]`.
pub fn gradient_samples(alpha: f64, budget: usize) -> Vec<(f64, f64)> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    (0..budget)
        .map(|i| {
            let s = 10f64.powf(-2.0 + 4.0 * (i as f64 + 0.5) / budget as f64);
            let t = 10f64.powf(-2.0 + 3.0 * ((i as f64 * golden) % 1.0));
            (t, s * t.powf(1.0 / alpha))
        })
        .collect()
}

/// `sup |grad G_t(x)| (t^{1/alpha} + |x|)^{n+1}` over [`gradient_samples`].
pub fn fit_gradient_bound(alpha: f64, dim: usize, sample_budget: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for (t, r) in gradient_samples(alpha, sample_budget) {
        let g = heat_kernel_radial_derivative(r, t, alpha, dim)?.abs();
        best = best.max(g * (t.powf(1.0 / alpha) + r).powi(dim as i32 + 1));
    }
    Ok(best)
}

fn check_duhamel(dim: usize, alpha: f64) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(domain(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha < dim as f64 + 1.0) {
        return Err(domain(format!("need 0 < alpha < n + 1, got alpha = {alpha}")));
    }
    Ok(())
}

/// `int_0^inf (1 + tau^{1/alpha})^{-(n+1)} d tau`.
///
/// With `tau = s^alpha`, `s = x/(1-x)` the integral becomes
/// `alpha int_0^1 x^{alpha-1} (1-x)^{n-alpha} dx`.
pub fn duhamel_constant(dim: usize, alpha: f64) -> Result<f64> {
    check_duhamel(dim, alpha)?;
    let n = dim as f64;
    let f = |x: f64| alpha * x.powf(alpha - 1.0) * (1.0 - x).powf(n - alpha);
    Ok(integrate(f, 0.0, 1.0, QuadOptions::default())?.value)
}

/// Relative deviation of `int_0^inf (s^{1/alpha} + a)^{-(n+1)} ds` from
/// `C a^{-(n+1-alpha)}` for each `a`, integrating in `s` directly.
pub fn duhamel_scaling_defects(dim: usize, alpha: f64, scales: &[f64]) -> Result<Vec<f64>> {
    let c = duhamel_constant(dim, alpha)?;
    let n = dim as f64;
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    scales
        .iter()
        .map(|&a| {
            if !(a > 0.0) {
                return Err(domain(format!("scale must be positive, got {a}")));
            }
            let f = |s: f64| (s.powf(1.0 / alpha) + a).powf(-(n + 1.0));
            // Split at s = a^alpha and fold the infinite part onto (0, 1].
            let pivot = a.powf(alpha);
            let near = integrate(f, 0.0, pivot, opts)?.value;
            let far = integrate(|w: f64| if w == 0.0 { 0.0 } else { f(pivot / w) * pivot / (w * w) }, 0.0, 1.0, opts)?.value;
            let exact = c * a.powf(-(n + 1.0 - alpha));
            Ok(((near + far) / exact - 1.0).abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_form() {
        for dim in 1..=3 {
            for t in [0.05f64, 1.0] {
                for r in [0.0, t.sqrt(), 4.0 * t.sqrt()] {
                    let q = heat_kernel_eval(r, t, 2.0, dim).unwrap();
                    let exact = (4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-r * r / (4.0 * t)).exp();
                    assert!((q / exact - 1.0).abs() < 1e-8, "dim {dim} t {t} r {r}: {q} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn poisson_closed_form() {
        for dim in 1..=3 {
            let n = dim as f64;
            let c = libm::tgamma((n + 1.0) / 2.0) / PI.powf((n + 1.0) / 2.0);
            for (t, r) in [(0.3, 0.0), (0.3, 1.0), (1.0, 2.5)] {
                let q = heat_kernel_eval(r, t, 1.0, dim).unwrap();
                let exact = c * t / (t * t + r * r).powf((n + 1.0) / 2.0);
                assert!((q / exact - 1.0).abs() < 1e-6, "dim {dim}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn rejects_bad_time() {
        assert!(heat_kernel_eval(1.0, 0.0, 1.5, 2).is_err());
        assert!(heat_kernel_eval(1.0, -1.0, 1.5, 2).is_err());
    }

    #[test]
    fn gradient_matches_gaussian_derivative() {
        let t = 0.5;
        for dim in 1..=3 {
            for r in [0.3, 1.0, 2.0] {
                let q = heat_kernel_radial_derivative(r, t, 2.0, dim).unwrap();
                let g = (4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-r * r / (4.0 * t)).exp();
                let exact = -r / (2.0 * t) * g;
                assert!((q / exact - 1.0).abs() < 1e-7, "dim {dim} r {r}: {q} vs {exact}");
            }
        }
        assert_eq!(heat_kernel_radial_derivative(0.0, t, 1.5, 2).unwrap(), 0.0);
    }

    #[test]
    fn tail_expansion_matches_poisson() {
        // 1/(pi (1 + r^2)) = (1/pi)(r^-2 - r^-4 + ...)
        assert!((tail_coefficient(1, 1.0, 1) - 1.0 / PI).abs() < 1e-15);
        assert!(tail_coefficient(2, 1.0, 1).abs() < 1e-15);
        assert!((tail_coefficient(3, 1.0, 1) + 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn mass_is_one() {
        for (alpha, dim) in [(2.0, 2), (1.5, 2), (1.2, 1), (1.8, 3)] {
            let m = KernelProfile::mass(alpha, dim, 0.7).unwrap();
            assert!((m - 1.0).abs() < 1e-6, "alpha {alpha} dim {dim}: {m}");
        }
    }

    #[test]
    fn duhamel_constant_examples() {
        assert!((duhamel_constant(2, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((duhamel_constant(3, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let d = duhamel_scaling_defects(2, 1.5, &[0.5, 1.0, 2.0]).unwrap();
        assert!(d.iter().all(|e| *e < 1e-8), "{d:?}");
    }
}
