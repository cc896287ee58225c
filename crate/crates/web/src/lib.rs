//! Browser bindings: kernel profiles, the step-exponent Luxemburg norm and a
//! live 2d run of the u-solver.

use fkslab_core::kernels::KernelProfile;
use fkslab_core::solver::{evolve_u, BlowupThresholds, SolverConfig};
use fkslab_core::varlebesgue::{luxemburg_norm, Domain, ExponentField, Interval, Signal, DEFAULT_TOL};
use fkslab_core::{Field, Grid, Result};
use wasm_bindgen::prelude::*;

fn js(e: fkslab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[r_0, G(r_0), g(r_0), r_1, ...]` with `g` the Gaussian of the same
/// `L^1` mass and second moment scale `t^{1/alpha}`.
pub fn profile(alpha: f64, dim: usize, t: f64, r_max: f64, count: usize) -> Result<Vec<f64>> {
    let p = KernelProfile::uniform(alpha, dim, t, r_max, count)?;
    let gauss = KernelProfile::uniform(2.0, dim, t.powf(2.0 / alpha), r_max, count)?;
    Ok(p.radii
        .iter()
        .zip(&p.values)
        .zip(&gauss.values)
        .flat_map(|((&r, &g), &h)| [r, g, h])
        .collect())
}

#[wasm_bindgen]
pub fn kernel_profile(alpha: f64, dim: usize, t: f64, r_max: f64, count: usize) -> std::result::Result<Vec<f64>, JsError> {
    profile(alpha, dim, t, r_max, count).map_err(js)
}

/// `|| a 1_[0,1) + b 1_[1,2] ||` with exponent `p` on `[0, 1)` and `q` on `[1, 2]`.
pub fn step_norm(p: f64, q: f64, a: f64, b: f64, cells: usize) -> Result<f64> {
    let domain = Domain::Interval(Interval::new(0.0, 2.0, cells)?);
    let exponent = ExponentField::from_fn(domain, None, |x| if x[0] < 1.0 { p } else { q })?;
    let f = Signal::from_fn(domain, |x| if x[0] < 1.0 { a } else { b });
    Ok(luxemburg_norm(&f, &exponent, DEFAULT_TOL)?.value)
}

#[wasm_bindgen]
pub fn luxemburg_step(p: f64, q: f64, a: f64, b: f64, cells: usize) -> std::result::Result<f64, JsError> {
    step_norm(p, q, a, b, cells).map_err(js)
}

/// Gaussian bump on the 2d torus `[-4, 4)^2`, advanced in chunks of `dt`.
#[wasm_bindgen]
pub struct KsDemo {
    cfg: SolverConfig,
    u: Field,
    initial_max: f64,
    time: f64,
    blown_up: bool,
}

impl KsDemo {
    pub fn build(alpha: f64, points: usize, amplitude: f64) -> Result<Self> {
        let grid = Grid::new(2, 4.0, points)?;
        let u = Field::from_fn(grid, |x| amplitude * (-(x[0] * x[0] + x[1] * x[1]) / 0.5).exp());
        let mut cfg = SolverConfig::new(alpha, grid, 0.002, 0.002)?;
        cfg.mean_density = u.mean();
        Ok(Self {
            cfg,
            initial_max: u.max_abs(),
            u,
            time: 0.0,
            blown_up: false,
        })
    }

    pub fn advance(&mut self, steps: usize) -> Result<()> {
        if self.blown_up || steps == 0 {
            return Ok(());
        }
        self.cfg.t_final = self.cfg.dt * steps as f64;
        self.cfg.stride = steps;
        let run = evolve_u(&self.u, &self.cfg, &BlowupThresholds::default())?;
        let last = run.final_state();
        self.time += last.t;
        self.u = last.u.clone();
        let growth = BlowupThresholds::default().growth_factor;
        self.blown_up = run.blowup_time.is_some()
            || !self.u.max_abs().is_finite()
            || self.u.max_abs() > growth * self.initial_max;
        Ok(())
    }
}

#[wasm_bindgen]
impl KsDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(alpha: f64, points: usize, amplitude: f64) -> std::result::Result<KsDemo, JsError> {
        Self::build(alpha, points, amplitude).map_err(js)
    }

    pub fn step(&mut self, steps: usize) -> std::result::Result<(), JsError> {
        self.advance(steps).map_err(js)
    }

    pub fn points(&self) -> usize {
        self.cfg.grid.points_per_dim()
    }

    pub fn density(&self) -> Vec<f64> {
        self.u.values().to_vec()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs()
    }

    pub fn mass(&self) -> f64 {
        self.u.integral()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn blown_up(&self) -> bool {
        self.blown_up
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_profile_matches_itself() {
        let v = profile(2.0, 2, 0.5, 3.0, 16).unwrap();
        assert_eq!(v.len(), 48);
        for row in v.chunks(3) {
            assert!((row[1] - row[2]).abs() <= 1e-12 * row[2].max(1e-300));
        }
    }

    #[test]
    fn step_norm_recovers_golden_ratio() {
        let v = step_norm(1.0, 2.0, 1.0, 1.0, 200).unwrap();
        assert!((v - 0.5 * (1.0 + 5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn demo_conserves_mass() {
        let mut demo = KsDemo::build(1.5, 32, 1.0).unwrap();
        let m0 = demo.mass();
        demo.advance(20).unwrap();
        assert!((demo.mass() - m0).abs() <= 1e-10 * m0);
        assert!((demo.time() - 0.04).abs() < 1e-12);
        assert!(!demo.blown_up());
    }

    #[test]
    fn bad_alpha_is_an_error() {
        assert!(KsDemo::build(0.5, 32, 1.0).is_err());
        assert!(step_norm(0.5, 2.0, 1.0, 1.0, 20).is_err());
    }
}
