use crate::error::{self, domain, Result};
use crate::grid::{Field, Grid, MAX_DIM};
use serde::Serialize;

/// Uniform midpoint mesh of `[start, start + length)`, used for time axes and
/// one-dimensional test intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub start: f64,
    pub length: f64,
    pub cells: usize,
}

impl Interval {
    pub fn new(start: f64, length: f64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(domain("interval mesh must have at least one cell"));
        }
        if !(length.is_finite() && length > 0.0 && start.is_finite()) {
            return Err(domain(format!("invalid interval [{start}, {start} + {length})")));
        }
        Ok(Self {
            start,
            length,
            cells,
        })
    }

    pub fn width(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.start + (i as f64 + 0.5) * self.width()
    }
}

/// Where a sampled function lives: a periodic grid or a 1-D midpoint mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Domain {
    Grid(Grid),
    Interval(Interval),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::Grid(g) => g.len(),
            Domain::Interval(i) => i.cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Grid(g) => g.dim(),
            Domain::Interval(_) => 1,
        }
    }

    /// Quadrature weight of each sample.
    pub fn weight(&self) -> f64 {
        match self {
            Domain::Grid(g) => g.cell_volume(),
            Domain::Interval(i) => i.width(),
        }
    }

    pub fn measure(&self) -> f64 {
        self.weight() * self.len() as f64
    }

    pub fn point(&self, i: usize) -> [f64; MAX_DIM] {
        match self {
            Domain::Grid(g) => g.point(i),
            Domain::Interval(iv) => [iv.midpoint(i), 0.0, 0.0],
        }
    }
}

/// Anything that can be integrated sample-by-sample on a [`Domain`].
pub trait Samples {
    fn domain(&self) -> Domain;
    fn samples(&self) -> &[f64];
}

impl Samples for Field {
    fn domain(&self) -> Domain {
        Domain::Grid(*self.grid())
    }

    fn samples(&self) -> &[f64] {
        self.values()
    }
}

/// A plain sampled function on any domain (time signals, interval data).
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    domain: Domain,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(domain_mismatch(values.len(), domain.len()));
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: Domain, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = domain.dim();
        let values = (0..domain.len()).map(|i| f(&domain.point(i)[..dim])).collect();
        Self { domain, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl Samples for Signal {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn samples(&self) -> &[f64] {
        &self.values
    }
}

fn domain_mismatch(got: usize, want: usize) -> crate::Error {
    domain(format!("{got} samples supplied for a mesh of {want}"))
}

/// A variable exponent `p(.)` sampled on a domain, with `1 <= p- <= p+ < inf`.
///
/// Exponents equal to one are admitted (they appear in closed-form examples);
/// operations that need `p- > 1`, such as the conjugate, check it themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    domain: Domain,
    values: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
    p_infinity: Option<f64>,
}

impl ExponentField {
    pub fn new(domain: Domain, values: Vec<f64>, p_infinity: Option<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(domain_mismatch(values.len(), domain.len()));
        }
        if let Some(bad) = values.iter().find(|p| !(p.is_finite() && **p >= 1.0)) {
            return Err(error::domain(format!("exponent values must be finite and >= 1, found {bad}")));
        }
        if let Some(p) = p_infinity {
            if !(p.is_finite() && p >= 1.0) {
                return Err(error::domain(format!("p_infinity must be finite and >= 1, got {p}")));
            }
        }
        let p_minus = values.iter().copied().fold(f64::INFINITY, f64::min);
        let p_plus = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            domain,
            values,
            p_minus,
            p_plus,
            p_infinity,
        })
    }

    pub fn constant(domain: Domain, p: f64) -> Result<Self> {
        Self::new(domain, vec![p; domain.len()], Some(p))
    }

    pub fn from_fn(domain: Domain, p_infinity: Option<f64>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let dim = domain.dim();
        let values = (0..domain.len()).map(|i| f(&domain.point(i)[..dim])).collect();
        Self::new(domain, values, p_infinity)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn p_infinity(&self) -> Option<f64> {
        self.p_infinity
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.domain,
            self.values.iter().map(|&p| f(p)).collect(),
            self.p_infinity.map(&f),
        )
    }

    /// Pointwise conjugate `p' = p / (p - 1)`.
    pub fn conjugate(&self) -> Result<Self> {
        conjugate_exponent(self)
    }

    /// `1/q = 1/p1 + 1/p2` pointwise.
    pub fn harmonic_sum(p1: &Self, p2: &Self) -> Result<Self> {
        if p1.domain != p2.domain {
            return Err(domain("exponents live on different meshes"));
        }
        let values = p1
            .values
            .iter()
            .zip(&p2.values)
            .map(|(a, b)| 1.0 / (1.0 / a + 1.0 / b))
            .collect();
        let p_inf = match (p1.p_infinity, p2.p_infinity) {
            (Some(a), Some(b)) => Some(1.0 / (1.0 / a + 1.0 / b)),
            _ => None,
        };
        // The harmonic sum may legitimately drop below one; such exponents are
        // rejected here because the norm engine needs p >= 1.
        Self::new(p1.domain, values, p_inf)
    }

    pub(crate) fn check_domain(&self, other: &Domain) -> Result<()> {
        if &self.domain == other {
            Ok(())
        } else {
            Err(domain("function and exponent are sampled on different meshes"))
        }
    }
}

pub fn conjugate_exponent(p: &ExponentField) -> Result<ExponentField> {
    if p.p_minus <= 1.0 {
        return Err(domain("conjugate exponent is unbounded where p = 1"));
    }
    let conj = |q: f64| q / (q - 1.0);
    let values = p.values.iter().map(|&q| conj(q)).collect();
    let p_inf = match p.p_infinity {
        Some(q) if q > 1.0 => Some(conj(q)),
        _ => None,
    };
    ExponentField::new(p.domain, values, p_inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> Domain {
        Domain::Interval(Interval::new(0.0, 1.0, 10).unwrap())
    }

    #[test]
    fn extremes_are_sample_extremes() {
        let p = ExponentField::from_fn(interval(), None, |x| 2.0 + x[0]).unwrap();
        assert!((p.p_minus() - 2.05).abs() < 1e-15);
        assert!((p.p_plus() - 2.95).abs() < 1e-15);
    }

    #[test]
    fn rejects_exponents_below_one() {
        assert!(ExponentField::constant(interval(), 0.5).is_err());
        assert!(ExponentField::constant(interval(), f64::INFINITY).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let two = ExponentField::constant(interval(), 2.0).unwrap();
        assert!(two.conjugate().unwrap().values().iter().all(|&q| q == 2.0));
        let four = ExponentField::constant(interval(), 4.0).unwrap();
        assert!(four
            .conjugate()
            .unwrap()
            .values()
            .iter()
            .all(|&q| (q - 4.0 / 3.0).abs() < 1e-15));
        let one = ExponentField::constant(interval(), 1.0).unwrap();
        assert!(one.conjugate().is_err());
    }

    #[test]
    fn conjugate_swaps_extremes() {
        let p = ExponentField::from_fn(interval(), Some(2.0), |x| 1.5 + 3.0 * x[0]).unwrap();
        let q = p.conjugate().unwrap();
        let conj = |a: f64| a / (a - 1.0);
        assert!((q.p_minus() - conj(p.p_plus())).abs() < 1e-14);
        assert!((q.p_plus() - conj(p.p_minus())).abs() < 1e-14);
    }
}
