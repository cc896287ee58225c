//! Periodic box discretization of R^n and the sampled fields living on it.
//!
//! The box is `[-L, L)^dim` sampled at `x_j = -L + i h`, `h = 2L / N`. Fourier
//! modes use the wavenumber convention `k = (pi / L) m` with the integer mode
//! `m` in `[-N/2, N/2)`.

use crate::error::{domain, Error, Result};
use crate::fft::{self, Direction};
use num_complex::Complex64;
use serde::Serialize;

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points_per_dim: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points_per_dim: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(domain(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(domain(format!("half width must be positive, got {half_width}")));
        }
        if points_per_dim < 16 || !points_per_dim.is_power_of_two() {
            return Err(domain(format!(
                "points per dimension must be a power of two >= 16, got {points_per_dim}"
            )));
        }
        let limit = match dim {
            1 => 1 << 16,
            2 => 512,
            _ => 128,
        };
        if points_per_dim > limit {
            return Err(domain(format!(
                "{points_per_dim} points per dimension exceeds the limit {limit} for dim {dim}"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            points_per_dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_dim as f64
    }

    /// Total number of samples, `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of a single cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Lebesgue measure of the box, `(2L)^dim`.
    pub fn measure(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Per-axis sample indices of a flat index.
    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let n = self.points_per_dim;
        let mut out = [0usize; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let n = self.points_per_dim;
        multi[..self.dim].iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Physical position of a sample; unused axes are zero.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Signed integer mode of an FFT index.
    pub fn mode_of(&self, i: usize) -> i64 {
        let n = self.points_per_dim;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn modes(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut m = [0i64; MAX_DIM];
        for axis in 0..self.dim {
            m[axis] = self.mode_of(idx[axis]);
        }
        m
    }

    pub fn wavenumber(&self, mode: i64) -> f64 {
        std::f64::consts::PI * mode as f64 / self.half_width
    }

    pub fn wavevector(&self, flat: usize) -> [f64; MAX_DIM] {
        let m = self.modes(flat);
        let mut k = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(m[axis]);
        }
        k
    }

    /// True when the mode sits on the unpaired Nyquist index of `axis`.
    pub fn is_nyquist(&self, mode: i64, _axis: usize) -> bool {
        mode == -(self.points_per_dim as i64 / 2)
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(domain(format!("grid mismatch: {self:?} vs {other:?}")))
        }
    }
}

/// Real-valued samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|flat| f(&grid.point(flat)[..grid.dim()]))
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidField(format!(
                "non-finite value {} at sample {i}",
                self.values[i]
            ))),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Midpoint-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Classical `L^p` norm with midpoint quadrature; `p = inf` gives the grid max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (sum * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v * v).sum();
        (sum * self.grid.cell_volume()).sqrt()
    }

    pub fn forward(&self) -> SpectralField {
        SpectralField::forward(self)
    }
}

/// Pointwise Euclidean magnitude of a vector field.
pub fn magnitude(components: &[Field]) -> Field {
    let grid = *components[0].grid();
    let values = (0..grid.len())
        .map(|i| {
            components
                .iter()
                .map(|c| c.values[i] * c.values[i])
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Field { grid, values }
}

/// Discrete Fourier coefficients (unnormalized forward DFT) of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn forward(field: &Field) -> Self {
        let grid = field.grid;
        let mut coeffs: Vec<Complex64> = field
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft::transform(&mut coeffs, grid.points_per_dim, grid.dim, Direction::Forward);
        Self { grid, coeffs }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(domain("coefficient count does not match grid"));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Inverse transform returning the complex samples.
    pub fn inverse_complex(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        fft::transform(&mut data, self.grid.points_per_dim, self.grid.dim, Direction::Inverse);
        data
    }

    /// Inverse transform keeping the real part.
    pub fn inverse(&self) -> Field {
        let data = self.inverse_complex();
        Field {
            grid: self.grid,
            values: data.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Largest imaginary part of the inverse transform relative to the largest
    /// modulus; zero for an exactly conjugate-symmetric spectrum.
    pub fn imag_residue(&self) -> f64 {
        let data = self.inverse_complex();
        let scale = data.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        data.iter().fold(0.0f64, |m, c| m.max(c.im.abs())) / scale
    }

    /// Multiply each coefficient by `symbol(k, m)`.
    pub fn apply(&mut self, symbol: impl Fn(&[f64; MAX_DIM], &[i64; MAX_DIM]) -> Complex64) {
        let grid = self.grid;
        for (flat, c) in self.coeffs.iter_mut().enumerate() {
            let m = grid.modes(flat);
            let k = grid.wavevector(flat);
            *c *= symbol(&k, &m);
        }
    }

    pub fn map_symbol(&self, symbol: impl Fn(&[f64; MAX_DIM], &[i64; MAX_DIM]) -> Complex64) -> Self {
        let mut out = self.clone();
        out.apply(symbol);
        out
    }

    /// Discrete `L^2` norm of the represented field via Parseval.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (sum * self.grid.cell_volume() / self.grid.len() as f64).sqrt()
    }

    pub fn add_scaled(&mut self, other: &SpectralField, c: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * c;
        }
    }

    /// Largest violation of `c(-m) = conj(c(m))` over modes with a partner.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let grid = self.grid;
        let n = grid.points_per_dim;
        let mut worst = 0.0f64;
        for flat in 0..grid.len() {
            let idx = grid.multi_index(flat);
            let mut mirror = [0usize; MAX_DIM];
            for axis in 0..grid.dim {
                mirror[axis] = (n - idx[axis]) % n;
            }
            let partner = grid.flat_index(&mirror);
            let defect = (self.coeffs[flat] - self.coeffs[partner].conj()).norm();
            worst = worst.max(defect);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0, 1.0, 32).is_err());
        assert!(Grid::new(4, 1.0, 32).is_err());
        assert!(Grid::new(2, -1.0, 32).is_err());
        assert!(Grid::new(2, 1.0, 24).is_err());
        assert!(Grid::new(2, 1.0, 8).is_err());
        assert!(Grid::new(3, 1.0, 256).is_err());
        let g = Grid::new(2, std::f64::consts::PI, 32).unwrap();
        assert_eq!(g.len(), 1024);
        assert!((g.spacing() - std::f64::consts::PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn wavenumbers_follow_convention() {
        let g = Grid::new(1, 2.0, 16).unwrap();
        let modes: Vec<i64> = (0..16).map(|i| g.mode_of(i)).collect();
        assert_eq!(modes[0], 0);
        assert_eq!(modes[7], 7);
        assert_eq!(modes[8], -8);
        assert_eq!(modes[15], -1);
        assert!((g.wavenumber(1) - std::f64::consts::PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(3, 1.0, 16).unwrap();
        for flat in [0, 1, 17, 300, 4095] {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
    }

    #[test]
    fn transform_round_trip() {
        let g = Grid::new(2, 3.0, 32).unwrap();
        let f = Field::from_fn(g, |x| (x[0] * 1.3).sin() * (-x[1] * x[1]).exp() + 0.2 * x[0]);
        let back = f.forward().inverse();
        let scale = f.max_abs();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn forward_of_real_field_is_conjugate_symmetric() {
        let g = Grid::new(3, 1.0, 16).unwrap();
        let f = Field::from_fn(g, |x| (x[0] + 2.0 * x[1]).cos() + x[2] * x[0]);
        let s = f.forward();
        let scale = s.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        assert!(s.conjugate_symmetry_defect() <= 1e-12 * scale);
    }

    #[test]
    fn parseval() {
        let g = Grid::new(2, 1.5, 32).unwrap();
        let f = Field::from_fn(g, |x| (x[0] * 2.0).cos() + (x[1]).sin() * 0.5);
        let spectral = f.forward().l2_norm();
        assert!((spectral - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn non_finite_detected() {
        let g = Grid::new(1, 1.0, 16).unwrap();
        let mut f = Field::zeros(g);
        f.values_mut()[3] = f64::NAN;
        assert!(matches!(f.check_finite(), Err(Error::InvalidField(_))));
    }
}
