//! Seeded random test data: band-limited fields and smooth exponents.

use crate::error::Result;
use crate::grid::{Field, Grid, SpectralField};
use crate::varlebesgue::{Domain, ExponentField, Signal};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real field whose modes satisfy `|m_j| <= cutoff`, scaled to unit max.
pub fn band_limited(grid: Grid, cutoff: usize, rng: &mut impl Rng) -> Field {
    let mut s = SpectralField::zeros(grid);
    let cutoff = cutoff as i64;
    for flat in 0..grid.len() {
        let m = grid.modes(flat);
        if m[..grid.dim()].iter().all(|mj| mj.abs() <= cutoff) {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            s.coeffs_mut()[flat] = Complex64::new(re, im);
        }
    }
    let f = s.inverse();
    let peak = f.max_abs();
    if peak > 0.0 {
        f.scaled(1.0 / peak)
    } else {
        f
    }
}

/// Band-limited zero-mean variant (the zero mode is removed).
pub fn band_limited_mean_zero(grid: Grid, cutoff: usize, rng: &mut impl Rng) -> Field {
    let f = band_limited(grid, cutoff, rng);
    let mean = f.mean();
    f.map(|v| v - mean)
}

/// Random smooth samples on any domain, scaled to unit max.
pub fn smooth_signal(domain: Domain, cutoff: usize, rng: &mut impl Rng) -> Signal {
    match domain {
        Domain::Grid(g) => Signal::new(domain, band_limited(g, cutoff, rng).into_values())
            .expect("band-limited field matches its grid"),
        Domain::Interval(iv) => {
            let coeffs: Vec<(f64, f64)> = (0..=cutoff)
                .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let omega = 2.0 * std::f64::consts::PI / iv.length;
            let raw = Signal::from_fn(domain, |x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, (a, b))| {
                        let phase = omega * j as f64 * (x[0] - iv.start);
                        a * phase.cos() + b * phase.sin()
                    })
                    .sum()
            });
            let peak = raw.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                raw.map(|v| v / peak)
            } else {
                raw
            }
        }
    }
}

/// Smooth exponent with values in `[lo, hi]`.
pub fn smooth_exponent(domain: Domain, lo: f64, hi: f64, rng: &mut impl Rng) -> Result<ExponentField> {
    let shape = smooth_signal(domain, 2, rng);
    let values = shape
        .values()
        .iter()
        .map(|s| lo + (hi - lo) * 0.5 * (1.0 + s))
        .collect();
    ExponentField::new(domain, values, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_limited_is_band_limited_and_deterministic() {
        let g = Grid::new(2, 1.0, 32).unwrap();
        let a = band_limited(g, 5, &mut seeded(7));
        let b = band_limited(g, 5, &mut seeded(7));
        assert_eq!(a, b);
        let s = a.forward();
        let scale = s.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        for flat in 0..g.len() {
            let m = g.modes(flat);
            if m[0].abs() > 5 || m[1].abs() > 5 {
                assert!(s.coeffs()[flat].norm() < 1e-12 * scale);
            }
        }
        assert!((a.max_abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponent_in_range() {
        let g = Grid::new(1, 1.0, 64).unwrap();
        let p = smooth_exponent(Domain::Grid(g), 1.5, 3.0, &mut seeded(1)).unwrap();
        assert!(p.p_minus() >= 1.5 - 1e-12 && p.p_plus() <= 3.0 + 1e-12);
    }
}
