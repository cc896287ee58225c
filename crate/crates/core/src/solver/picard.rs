//! Fixed-point iteration of the integral form of the reduced system
//! `v(t) = E(t) v0 + int_0^t E(t - s) R (x) R div M(v(s)) ds`.

use super::config::SolverConfig;
use super::diagnostics::State;
use super::flux::{curl_free_projection, reduced_nonlinearity};
use crate::error::{domain, Result};
use crate::grid::{Field, SpectralField};
use crate::spectral::{divergence_spectral, fractional_symbol};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Iterate index at which the increment became non-finite or exceeded
    /// `1e8` times the linear part.
    pub diverged_at: Option<usize>,
    /// Sup-in-time L2 increment of each iteration.
    pub increments: Vec<f64>,
    /// Successive increment ratios.
    pub ratios: Vec<f64>,
    /// `sup_t ||E(t) v0||_2`.
    pub linear_sup: f64,
}

impl PicardDiagnostics {
    /// Largest ratio among the first `count` ratios whose increments are
    /// still above `floor` times the linear part (round-off excluded).
    pub fn max_ratio_above(&self, floor: f64, count: usize) -> Option<(f64, usize)> {
        let usable: Vec<f64> = self
            .ratios
            .iter()
            .zip(self.increments.iter().skip(1))
            .take_while(|(_, inc)| **inc > floor * self.linear_sup)
            .map(|(r, _)| *r)
            .take(count)
            .collect();
        if usable.is_empty() {
            None
        } else {
            Some((usable.iter().copied().fold(0.0, f64::max), usable.len()))
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardRun {
    pub states: Vec<State>,
    pub diagnostics: PicardDiagnostics,
}

const DIVERGENCE_FACTOR: f64 = 1e8;

fn vector_l2(v: &[SpectralField]) -> f64 {
    v.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
}

fn difference_l2(a: &[SpectralField], b: &[SpectralField]) -> f64 {
    let grid = a[0].grid();
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            x.coeffs()
                .iter()
                .zip(y.coeffs())
                .map(|(p, q)| (p - q).norm_sqr())
                .sum::<f64>()
        })
        .sum();
    (sum * grid.cell_volume() / grid.len() as f64).sqrt()
}

fn to_state(t: f64, v_hat: &[SpectralField], mean: f64) -> Result<State> {
    let u = divergence_spectral(v_hat)?.inverse().map(|x| mean - x);
    Ok(State {
        t,
        u,
        v: v_hat.iter().map(SpectralField::inverse).collect(),
    })
}

/// Picard iteration on the dt mesh with a composite trapezoid Duhamel term.
///
/// The first iterate is the linear part. Every update is projected back onto
/// gradient fields. Budget exhaustion is reported as non-converged, not as an
/// error.
pub fn picard_solve(v0: &[Field], cfg: &SolverConfig) -> Result<PicardRun> {
    cfg.validate()?;
    let grid = cfg.grid;
    if v0.len() != grid.dim() {
        return Err(domain(format!(
            "initial field has {} components on a {}-dimensional grid",
            v0.len(),
            grid.dim()
        )));
    }
    for c in v0 {
        grid.check_same(c.grid())?;
        c.check_finite()?;
    }
    let steps = cfg.steps();
    let dt = cfg.dt;
    let lambda: Vec<f64> = (0..grid.len())
        .map(|flat| fractional_symbol(&grid.wavevector(flat), cfg.alpha) - cfg.mean_density)
        .collect();
    let step_factor: Vec<f64> = lambda.iter().map(|l| (-dt * l).exp()).collect();

    let mut v0_hat: Vec<SpectralField> = v0.iter().map(Field::forward).collect();
    curl_free_projection(&mut v0_hat);
    let linear_at = |n: usize| -> Vec<SpectralField> {
        let t = cfg.time(n);
        v0_hat
            .iter()
            .map(|c| {
                let coeffs = c
                    .coeffs()
                    .iter()
                    .zip(&lambda)
                    .map(|(z, l)| z * (-t * l).exp())
                    .collect();
                SpectralField::from_coeffs(grid, coeffs).expect("same grid")
            })
            .collect()
    };

    let mut iterate: Vec<Vec<SpectralField>> = (0..=steps).map(linear_at).collect();
    let linear_sup = iterate.iter().map(|v| vector_l2(v)).fold(0.0, f64::max);
    let mut diag = PicardDiagnostics {
        iterations: 0,
        converged: false,
        diverged_at: None,
        increments: Vec::new(),
        ratios: Vec::new(),
        linear_sup,
    };

    for m in 1..=cfg.picard_max_iters {
        diag.iterations = m;
        let mut first: Option<Vec<SpectralField>> = None;
        let mut acc: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; grid.dim()];
        let mut increment = 0.0f64;
        for n in 0..=steps {
            let nl = if cfg.nonlinear {
                reduced_nonlinearity(&iterate[n], cfg.dealias)
            } else {
                vec![SpectralField::zeros(grid); grid.dim()]
            };
            let t = cfg.time(n);
            for (a, c) in acc.iter_mut().zip(&nl) {
                for ((ai, ci), f) in a.iter_mut().zip(c.coeffs()).zip(&step_factor) {
                    *ai = if n == 0 { *ci } else { *ai * f + ci };
                }
            }
            let n0 = first.get_or_insert_with(|| nl.clone());
            let mut next = linear_at(n);
            if n > 0 {
                for (j, comp) in next.iter_mut().enumerate() {
                    for (flat, z) in comp.coeffs_mut().iter_mut().enumerate() {
                        let decay0 = (-t * lambda[flat]).exp();
                        let duhamel = acc[j][flat] - 0.5 * decay0 * n0[j].coeffs()[flat] - 0.5 * nl[j].coeffs()[flat];
                        *z += dt * duhamel;
                    }
                }
            }
            curl_free_projection(&mut next);
            increment = increment.max(difference_l2(&next, &iterate[n]));
            iterate[n] = next;
        }
        diag.increments.push(increment);
        if let [.., prev, last] = diag.increments[..] {
            diag.ratios.push(if prev == 0.0 { 0.0 } else { last / prev });
        }
        if !increment.is_finite() || increment > DIVERGENCE_FACTOR * linear_sup.max(f64::MIN_POSITIVE) {
            diag.diverged_at = Some(m);
            break;
        }
        if increment <= cfg.picard_tol * linear_sup {
            diag.converged = true;
            break;
        }
    }

    let states = if diag.diverged_at.is_some() {
        Vec::new()
    } else {
        (0..=steps)
            .filter(|&n| cfg.is_stored(n))
            .map(|n| to_state(cfg.time(n), &iterate[n], cfg.mean_density))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(PicardRun {
        states,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::spectral::{grad_inv_laplacian, heat_propagate};

    fn gaussian_v(g: Grid, amp: f64) -> Vec<Field> {
        let u = Field::from_fn(g, |x| amp * (-(x[0] * x[0] + x[1] * x[1])).exp());
        let u = u.map(|x| x - u.mean());
        grad_inv_laplacian(&u).unwrap()
    }

    #[test]
    fn zero_data_converges_immediately() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let cfg = SolverConfig::new(1.5, g, 0.1, 0.5).unwrap();
        let run = picard_solve(&[Field::zeros(g), Field::zeros(g)], &cfg).unwrap();
        assert!(run.diagnostics.converged);
        assert_eq!(run.diagnostics.iterations, 1);
        assert!(run.states.iter().all(|s| s.v.iter().all(|c| c.max_abs() == 0.0)));
    }

    #[test]
    fn linear_flow_matches_heat_propagation() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let mut cfg = SolverConfig::new(1.5, g, 0.1, 0.5).unwrap();
        cfg.nonlinear = false;
        let v0 = gaussian_v(g, 1.0);
        let run = picard_solve(&v0, &cfg).unwrap();
        let last = run.states.last().unwrap();
        for (c, c0) in last.v.iter().zip(&v0) {
            let expect = heat_propagate(c0, 0.5, 1.5).unwrap();
            let err = c.zip_with(&expect, |a, b| a - b).unwrap().max_abs();
            assert!(err < 1e-12 * expect.max_abs().max(1e-300));
        }
    }

    #[test]
    fn small_data_contracts() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let cfg = SolverConfig::new(1.5, g, 0.05, 0.5).unwrap();
        let run = picard_solve(&gaussian_v(g, 0.5), &cfg).unwrap();
        assert!(run.diagnostics.converged, "{:?}", run.diagnostics);
        let (ratio, used) = run.diagnostics.max_ratio_above(1e-13, 10).unwrap();
        assert!(ratio < 0.5 && used >= 3, "{:?}", run.diagnostics);
    }
}
