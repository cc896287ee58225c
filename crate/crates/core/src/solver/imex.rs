//! Integrating-factor midpoint march for `u_t + Lambda^alpha u + div(u v) = 0`.

use super::config::SolverConfig;
use super::diagnostics::{blowup_monitor, record, reduction_defect, tail_fraction, BlowupThresholds, State, StepRecord};
use super::flux::transport_term;
use crate::error::{domain, Result};
use crate::grid::{magnitude, Field, SpectralField};
use crate::spectral::{fractional_symbol, grad_inv_laplacian};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct ImexRun {
    pub states: Vec<State>,
    pub records: Vec<StepRecord>,
    /// Time of the step at which the monitor fired.
    pub blowup_time: Option<f64>,
    /// Largest `dt max|v| / h` seen along the run.
    pub max_cfl: f64,
}

impl ImexRun {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("initial state is always stored")
    }

    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.records[0].mass;
        self.records
            .iter()
            .map(|r| (r.mass - m0).abs() / m0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

fn multiply(s: &SpectralField, factor: &[f64]) -> SpectralField {
    let coeffs: Vec<Complex64> = s.coeffs().iter().zip(factor).map(|(c, f)| c * f).collect();
    SpectralField::from_coeffs(*s.grid(), coeffs).expect("same grid")
}

fn state(t: f64, u: Field) -> Result<State> {
    let v = grad_inv_laplacian(&u)?;
    Ok(State { t, u, v })
}

/// Advances `u0` to `cfg.t_final`. The march stops early, keeping the partial
/// trajectory, once the blow-up monitor fires.
pub fn evolve_u(u0: &Field, cfg: &SolverConfig, thresholds: &BlowupThresholds) -> Result<ImexRun> {
    cfg.validate()?;
    let grid = cfg.grid;
    grid.check_same(u0.grid())?;
    u0.check_finite()?;
    let dt = cfg.dt;
    let symbol: Vec<f64> = (0..grid.len())
        .map(|flat| fractional_symbol(&grid.wavevector(flat), cfg.alpha))
        .collect();
    let full: Vec<f64> = symbol.iter().map(|s| (-dt * s).exp()).collect();
    let half: Vec<f64> = symbol.iter().map(|s| (-0.5 * dt * s).exp()).collect();
    let nonlinear = |s: &SpectralField| {
        if cfg.nonlinear {
            transport_term(s, cfg.dealias)
        } else {
            SpectralField::zeros(grid)
        }
    };
    let cfl = |u: &Field| -> Result<f64> {
        let v = grad_inv_laplacian(u)?;
        Ok(dt * magnitude(&v).max_abs() / grid.spacing())
    };

    // Nyquist planes carry no divergence under the odd-symbol convention, so
    // they are removed once to keep u and v = grad(-Lap)^{-1} u consistent.
    let mut u_hat = u0.forward().map_symbol(|_, m| {
        if (0..grid.dim()).any(|axis| grid.is_nyquist(m[axis], axis)) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    let mut u = u_hat.inverse();
    let first = record(0.0, &u_hat, &u)?;
    let initial_max = first.max_abs_u;
    let mut run = ImexRun {
        states: vec![state(0.0, u.clone())?],
        records: vec![first],
        blowup_time: None,
        max_cfl: cfl(&u)?,
    };

    for n in 1..=cfg.steps() {
        let t = cfg.time(n);
        let mut predictor = nonlinear(&u_hat);
        predictor.coeffs_mut().iter_mut().for_each(|c| *c *= 0.5 * dt);
        predictor.add_scaled(&u_hat, 1.0);
        let mid = multiply(&predictor, &half);
        let mut next = multiply(&u_hat, &full);
        next.add_scaled(&multiply(&nonlinear(&mid), &half), dt);
        u_hat = next;
        u = u_hat.inverse();

        let stored = cfg.is_stored(n);
        let rec = if stored {
            record(t, &u_hat, &u)?
        } else {
            StepRecord {
                t,
                mass: u.integral(),
                min_u: u.min(),
                max_abs_u: u.max_abs(),
                tail_fraction: tail_fraction(&u_hat),
                reduction_defect: f64::NAN,
            }
        };
        let flagged = blowup_monitor(&rec, initial_max, thresholds);
        if rec.max_abs_u.is_finite() {
            run.max_cfl = run.max_cfl.max(cfl(&u)?);
        }
        if stored || flagged {
            if stored {
                run.records.push(rec);
            } else {
                // keep the flagged step visible even off the stride
                run.records.push(StepRecord {
                    reduction_defect: if rec.max_abs_u.is_finite() {
                        reduction_defect(&u)?
                    } else {
                        f64::NAN
                    },
                    ..rec
                });
            }
            if u.check_finite().is_ok() {
                run.states.push(state(t, u.clone())?);
            }
        }
        if flagged {
            run.blowup_time = Some(t);
            break;
        }
    }
    if run.states.is_empty() {
        return Err(domain("no finite state was produced"));
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::spectral::heat_propagate;

    fn gaussian(g: Grid, amp: f64, width: f64) -> Field {
        Field::from_fn(g, |x| amp * (-(x[0] * x[0] + x[1] * x[1]) / (width * width)).exp())
    }

    #[test]
    fn constant_is_stationary() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let cfg = SolverConfig::new(1.5, g, 0.05, 0.5).unwrap();
        let run = evolve_u(&Field::constant(g, 0.7), &cfg, &BlowupThresholds::default()).unwrap();
        let u = &run.final_state().u;
        assert!(u.values().iter().all(|x| (x - 0.7).abs() < 1e-14));
    }

    #[test]
    fn linear_flow_decays_like_heat_propagation() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let mut cfg = SolverConfig::new(1.5, g, 0.05, 0.5).unwrap();
        cfg.nonlinear = false;
        let u0 = gaussian(g, 1.0, 1.0);
        let run = evolve_u(&u0, &cfg, &BlowupThresholds::default()).unwrap();
        let maxes: Vec<f64> = run.records.iter().map(|r| r.max_abs_u).collect();
        assert!(maxes.windows(2).all(|w| w[1] <= w[0]));
        let expect = heat_propagate(&u0, 0.5, 1.5).unwrap();
        let err = run.final_state().u.zip_with(&expect, |a, b| a - b).unwrap().max_abs();
        assert!(err < 1e-12);
        assert!(run.blowup_time.is_none());
    }

    #[test]
    fn mass_and_reduction_hold_on_small_data() {
        let g = Grid::new(2, 4.0, 64).unwrap();
        let cfg = SolverConfig::new(2.0, g, 0.01, 1.0).unwrap();
        let run = evolve_u(&gaussian(g, 0.5, 1.0), &cfg, &BlowupThresholds::default()).unwrap();
        assert_eq!(run.records.len(), 101);
        assert!(run.max_mass_drift() < 1e-12);
        let worst = run.records.iter().map(|r| r.reduction_defect).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn second_order_in_time() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let u0 = gaussian(g, 2.0, 1.0);
        let finals: Vec<Field> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dt| {
                let cfg = SolverConfig::new(1.5, g, dt, 0.2).unwrap();
                evolve_u(&u0, &cfg, &BlowupThresholds::default())
                    .unwrap()
                    .final_state()
                    .u
                    .clone()
            })
            .collect();
        let e1 = finals[0].zip_with(&finals[1], |a, b| a - b).unwrap().l2_norm();
        let e2 = finals[1].zip_with(&finals[2], |a, b| a - b).unwrap().l2_norm();
        let order = (e1 / e2).log2();
        assert!(order > 1.8, "order {order}");
    }
}
