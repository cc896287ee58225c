use crate::error::{precondition, Result};
use crate::grid::{magnitude, Field, SpectralField};
use crate::spectral::{divergence, grad_inv_laplacian};
use crate::varlebesgue::{mixed_norm, yt_norm_from_slice_norms, ExponentField};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Field,
    pub v: Vec<Field>,
}

/// One stored step of a u-solver run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub mass: f64,
    pub min_u: f64,
    pub max_abs_u: f64,
    pub tail_fraction: f64,
    /// `|| -div v - (u - mean u) || / || u - mean u ||` with `v` recomputed from `u`.
    pub reduction_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupThresholds {
    pub growth_factor: f64,
    pub tail_fraction: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        Self {
            growth_factor: 50.0,
            tail_fraction: 0.1,
        }
    }
}

/// Energy fraction of the nonzero modes in the top octave `max_j |m_j| > N/4`.
pub fn tail_fraction(s: &SpectralField) -> f64 {
    let grid = *s.grid();
    let quarter = (grid.points_per_dim() / 4) as i64;
    let mut top = 0.0;
    let mut total = 0.0;
    for (flat, c) in s.coeffs().iter().enumerate() {
        let m = grid.modes(flat);
        let m = &m[..grid.dim()];
        if m.iter().all(|&x| x == 0) {
            continue;
        }
        let e = c.norm_sqr();
        total += e;
        if m.iter().any(|x| x.abs() > quarter) {
            top += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        top / total
    }
}

/// Raised when `max|u|` grows past `growth_factor` times its initial value
/// while the top-octave energy exceeds `tail_fraction`, or when the state is
/// no longer finite.
pub fn blowup_monitor(record: &StepRecord, initial_max: f64, thresholds: &BlowupThresholds) -> bool {
    if !(record.max_abs_u.is_finite() && record.tail_fraction.is_finite()) {
        return true;
    }
    record.max_abs_u > thresholds.growth_factor * initial_max && record.tail_fraction > thresholds.tail_fraction
}

/// Relative defect of `-div grad(-Lap)^{-1} u = u - mean u`.
pub fn reduction_defect(u: &Field) -> Result<f64> {
    let v = grad_inv_laplacian(u)?;
    let minus_div = divergence(&v)?.scaled(-1.0);
    let mean = u.mean();
    let centered = u.map(|x| x - mean);
    let scale = centered.l2_norm();
    let diff = minus_div.zip_with(&centered, |a, b| a - b)?.l2_norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

pub(crate) fn record(t: f64, u_hat: &SpectralField, u: &Field) -> Result<StepRecord> {
    Ok(StepRecord {
        t,
        mass: u.integral(),
        min_u: u.min(),
        max_abs_u: u.max_abs(),
        tail_fraction: tail_fraction(u_hat),
        reduction_defect: reduction_defect(u)?,
    })
}

/// `r = n / (alpha - 1)`, the classical exponent of the mixed space.
pub fn critical_exponent(dim: usize, alpha: f64) -> f64 {
    dim as f64 / (alpha - 1.0)
}

/// Mixed norm of `grad(-Lap)^{-1} u0` in `L^{p(.)} cap L^r`, `r = n/(alpha-1)`.
/// Requires `n / (2 (alpha - 1)) > 1`.
pub fn smallness_lhs(u0: &Field, p: &ExponentField, alpha: f64, tol: f64) -> Result<f64> {
    let r = critical_exponent(u0.grid().dim(), alpha);
    if !(r > 2.0 && r.is_finite()) {
        return Err(precondition(format!(
            "need n / (alpha - 1) > 2, got n = {}, alpha = {alpha} (r = {r})",
            u0.grid().dim()
        )));
    }
    smallness_value(u0, p, alpha, tol)
}

/// [`smallness_lhs`] without the hypothesis check, for sweeps that include
/// the borderline case `r = 2`.
pub fn smallness_value(u0: &Field, p: &ExponentField, alpha: f64, tol: f64) -> Result<f64> {
    let r = critical_exponent(u0.grid().dim(), alpha);
    let v = grad_inv_laplacian(u0)?;
    mixed_norm(&magnitude(&v), p, r, tol)
}

/// Mixed norm of a single vector field slice.
pub fn slice_mixed_norm(v: &[Field], p: &ExponentField, r: f64, tol: f64) -> Result<f64> {
    mixed_norm(&magnitude(v), p, r, tol)
}

/// X-norm surrogate: sup over stored slices of `|v(t, x)|` pointwise, then
/// the mixed norm in space.
pub fn x_norm(slices: &[Vec<Field>], p: &ExponentField, r: f64, tol: f64) -> Result<f64> {
    let first = slices.first().ok_or_else(|| precondition("no stored slices"))?;
    let mut sup = magnitude(first);
    for s in &slices[1..] {
        let m = magnitude(s);
        sup = sup.zip_with(&m, f64::max)?;
    }
    mixed_norm(&sup, p, r, tol)
}

/// `||v||_{Y_T}`: the spatial `L^p` norm of `|v|` per slice, then the
/// Luxemburg norm in time with `q(.)` sampled one value per slice.
pub fn yt_of_slices(slices: &[Vec<Field>], q: &ExponentField, p: f64, tol: f64) -> Result<f64> {
    let norms: Vec<f64> = slices.iter().map(|s| magnitude(s).lp_norm(p)).collect();
    yt_norm_from_slice_norms(&norms, q, tol)
}
