use crate::error::{Error, Result};
use crate::grid::Grid;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Picard,
    Imex,
    Both,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(Scheme::Picard),
            "imex" => Ok(Scheme::Imex),
            "both" => Ok(Scheme::Both),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected picard, imex or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub alpha: f64,
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub picard_max_iters: usize,
    pub picard_tol: f64,
    pub dealias: bool,
    pub seed: u64,
    /// Store every `stride`-th step (the first and last are always kept).
    pub stride: usize,
    /// Switch for the quadratic term; off gives the linear flow.
    pub nonlinear: bool,
    /// Mean density of `u` on the torus; it enters the reduced system as the
    /// growth term `+ mean * v` because `div v = -(u - mean)`.
    pub mean_density: f64,
}

impl SolverConfig {
    pub fn new(alpha: f64, grid: Grid, dt: f64, t_final: f64) -> Result<Self> {
        let cfg = Self {
            alpha,
            grid,
            dt,
            t_final,
            scheme: Scheme::Both,
            picard_max_iters: 60,
            picard_tol: 1e-12,
            dealias: true,
            seed: 0,
            stride: 1,
            nonlinear: true,
            mean_density: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::Config(format!("alpha must lie in (1, 2], got {}", self.alpha)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!("T must be positive, got {}", self.t_final)));
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "T / dt = {ratio} is not an integer number of steps"
            )));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::Config("picard_max_iters must be at least 1".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Config(format!("picard_tol must be positive, got {}", self.picard_tol)));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if !self.mean_density.is_finite() {
            return Err(Error::Config("mean density must be finite".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub(crate) fn is_stored(&self, step: usize) -> bool {
        step.is_multiple_of(self.stride) || step == self.steps()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let g = Grid::new(2, 1.0, 16).unwrap();
        assert!(SolverConfig::new(1.5, g, 0.1, 1.0).is_ok());
        assert!(SolverConfig::new(1.0, g, 0.1, 1.0).is_err());
        assert!(SolverConfig::new(1.5, g, 0.3, 1.0).is_err());
        assert_eq!(SolverConfig::new(1.5, g, 0.01, 1.0).unwrap().steps(), 100);
        assert!("imex".parse::<Scheme>().is_ok());
        assert!("rk4".parse::<Scheme>().is_err());
    }
}
