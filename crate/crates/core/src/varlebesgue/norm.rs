use super::exponent::{Domain, ExponentField, Interval, Samples, Signal};
use crate::error::{domain, precondition, Error, Result};
use crate::grid::Field;
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 400;

/// Outcome of a Luxemburg-norm bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    /// `|modular(f / value) - 1|` at the returned value.
    pub achieved: f64,
}

/// `rho_p(f) = sum |f_i|^{p_i} w`.
pub fn modular<S: Samples + ?Sized>(f: &S, p: &ExponentField) -> Result<f64> {
    p.check_domain(&f.domain())?;
    Ok(ScaledModular::new(f.samples(), p).at(1.0))
}

/// Classical `L^p` norm of sampled data; `p = inf` is the sample max.
pub fn classical_norm<S: Samples + ?Sized>(f: &S, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(domain(format!("classical norm needs p >= 1, got {p}")));
    }
    let values = f.samples();
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let sum: f64 = values.iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * f.domain().weight()).powf(1.0 / p))
}

/// Precomputed `ln|f_i|` so that `lambda -> rho(f / lambda)` costs one `exp`
/// per nonzero sample.
struct ScaledModular {
    logs: Vec<(f64, f64)>,
    weight: f64,
}

impl ScaledModular {
    fn new(values: &[f64], p: &ExponentField) -> Self {
        let logs = values
            .iter()
            .zip(p.values())
            .filter(|(v, _)| **v != 0.0)
            .map(|(v, &q)| (v.abs().ln(), q))
            .collect();
        Self {
            logs,
            weight: p.domain().weight(),
        }
    }

    fn is_zero(&self) -> bool {
        self.logs.is_empty()
    }

    fn at(&self, lambda: f64) -> f64 {
        let ln_lambda = lambda.ln();
        self.logs
            .iter()
            .map(|&(lf, q)| (q * (lf - ln_lambda)).exp())
            .sum::<f64>()
            * self.weight
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-6 {
        Ok(())
    } else {
        Err(domain(format!("tolerance must lie in (0, 1e-6], got {tol}")))
    }
}

/// Luxemburg norm `inf { lambda > 0 : rho(f / lambda) <= 1 }` by bisection.
pub fn luxemburg_norm<S: Samples + ?Sized>(f: &S, p: &ExponentField, tol: f64) -> Result<NormResult> {
    luxemburg_impl(f, p, tol, None)
}

/// Same as [`luxemburg_norm`], also returning every `(lambda, rho(f/lambda))`
/// probed during bracketing and bisection.
pub fn luxemburg_norm_traced<S: Samples + ?Sized>(
    f: &S,
    p: &ExponentField,
    tol: f64,
) -> Result<(NormResult, Vec<(f64, f64)>)> {
    let mut trace = Vec::new();
    let result = luxemburg_impl(f, p, tol, Some(&mut trace))?;
    Ok((result, trace))
}

fn luxemburg_impl<S: Samples + ?Sized>(
    f: &S,
    p: &ExponentField,
    tol: f64,
    mut trace: Option<&mut Vec<(f64, f64)>>,
) -> Result<NormResult> {
    check_tol(tol)?;
    p.check_domain(&f.domain())?;
    if let Some(bad) = f.samples().iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidField(format!("non-finite sample {bad}")));
    }
    let rho = ScaledModular::new(f.samples(), p);
    if rho.is_zero() {
        return Ok(NormResult {
            value: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
            achieved: 0.0,
        });
    }
    let mut probe = |lambda: f64| {
        let m = rho.at(lambda);
        if let Some(t) = trace.as_deref_mut() {
            t.push((lambda, m));
        }
        m
    };

    let base = rho.at(1.0).powf(1.0 / p.p_minus());
    let (mut lo, mut hi) = (0.5 * base, 2.0 * base);
    let mut iterations = 0;
    while probe(lo) <= 1.0 {
        lo *= 0.5;
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::Numeric("could not bracket the Luxemburg norm from below".into()));
        }
    }
    while probe(hi) > 1.0 {
        hi *= 2.0;
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::Numeric("could not bracket the Luxemburg norm from above".into()));
        }
    }

    loop {
        let mid = 0.5 * (lo + hi);
        let m = probe(mid);
        iterations += 1;
        let achieved = (m - 1.0).abs();
        let collapsed = hi - lo <= 4.0 * f64::EPSILON * hi;
        if achieved <= tol || collapsed || iterations >= MAX_ITERATIONS {
            return Ok(NormResult {
                value: mid,
                iterations,
                bracket: (lo, hi),
                achieved,
            });
        }
        if m > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Mixed norm `max { ||f||_{p(.)}, ||f||_r }`.
pub fn mixed_norm<S: Samples + ?Sized>(f: &S, p: &ExponentField, r: f64, tol: f64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(domain(format!("mixed norm needs 1 < r < inf, got {r}")));
    }
    let variable = luxemburg_norm(f, p, tol)?.value;
    let classical = classical_norm(f, r)?;
    Ok(variable.max(classical))
}

/// Time-variable norm: classical `L^p` in space per slice, then Luxemburg in
/// time with exponent `q(.)` sampled on the time mesh (one slice per cell).
pub fn yt_norm(slices: &[Field], q: &ExponentField, p: f64, tol: f64) -> Result<f64> {
    if slices.is_empty() {
        return Err(domain("empty time mesh"));
    }
    if !(p > 1.0) {
        return Err(domain(format!("spatial exponent must exceed 1, got {p}")));
    }
    let norms: Vec<f64> = slices.iter().map(|s| s.lp_norm(p)).collect();
    yt_norm_from_slice_norms(&norms, q, tol)
}

pub fn yt_norm_from_slice_norms(norms: &[f64], q: &ExponentField, tol: f64) -> Result<f64> {
    if norms.is_empty() {
        return Err(domain("empty time mesh"));
    }
    let mesh = match q.domain() {
        Domain::Interval(iv) => iv,
        Domain::Grid(_) => return Err(domain("time exponent must live on an interval mesh")),
    };
    let signal = Signal::new(Domain::Interval(mesh), norms.to_vec())?;
    Ok(luxemburg_norm(&signal, q, tol)?.value)
}

/// `||1||_{L^{q(.)}(0,T)}` and the bound `2 max{T^{1/q-}, T^{1/q+}}`.
pub fn unit_time_norm(q: &ExponentField, tol: f64) -> Result<(f64, f64)> {
    let mesh: Interval = match q.domain() {
        Domain::Interval(iv) => iv,
        Domain::Grid(_) => return Err(precondition("time exponent must live on an interval mesh")),
    };
    let ones = Signal::new(Domain::Interval(mesh), vec![1.0; mesh.cells])?;
    let norm = luxemburg_norm(&ones, q, tol)?.value;
    let t = mesh.length;
    let bound = 2.0 * t.powf(1.0 / q.p_minus()).max(t.powf(1.0 / q.p_plus()));
    Ok((norm, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn interval(length: f64, cells: usize) -> Domain {
        Domain::Interval(Interval::new(0.0, length, cells).unwrap())
    }

    #[test]
    fn modular_examples() {
        let d = interval(2.0, 100);
        let p = ExponentField::from_fn(d, None, |x| 1.0 + x[0]).unwrap();
        let zero = Signal::new(d, vec![0.0; 100]).unwrap();
        assert_eq!(modular(&zero, &p).unwrap(), 0.0);
        // indicator of [0.5, 1.5): measure 1
        let chi = Signal::from_fn(d, |x| if (0.5..1.5).contains(&x[0]) { 1.0 } else { 0.0 });
        assert!((modular(&chi, &p).unwrap() - 1.0).abs() < 1e-12);
        // p = 2 with int f^2 = 4
        let two = ExponentField::constant(d, 2.0).unwrap();
        let f = Signal::new(d, vec![2f64.sqrt(); 100]).unwrap();
        assert!((modular(&f, &two).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mesh_mismatch_is_domain_error() {
        let p = ExponentField::constant(interval(1.0, 10), 2.0).unwrap();
        let f = Signal::new(interval(1.0, 20), vec![1.0; 20]).unwrap();
        assert!(matches!(modular(&f, &p), Err(Error::Domain(_))));
        let g = Grid::new(1, 0.5, 16).unwrap();
        assert!(modular(&Field::constant(g, 1.0), &p).is_err());
    }

    #[test]
    fn step_exponent_golden_ratio() {
        // p = 1 on [0,1], p = 2 on (1,2], f = 1: 1/lambda + 1/lambda^2 = 1.
        let d = interval(2.0, 64);
        let p = ExponentField::from_fn(d, None, |x| if x[0] <= 1.0 { 1.0 } else { 2.0 }).unwrap();
        let f = Signal::new(d, vec![1.0; 64]).unwrap();
        let r = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap();
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        assert!((r.value - golden).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn constant_exponent_indicator_closed_form() {
        let d = interval(3.0, 300);
        let chi = Signal::from_fn(d, |x| if x[0] < 1.2 { 2.5 } else { 0.0 });
        for p in [1.5, 2.0, 3.0, 7.0] {
            let e = ExponentField::constant(d, p).unwrap();
            let r = luxemburg_norm(&chi, &e, DEFAULT_TOL).unwrap();
            let expect = 2.5 * 1.2f64.powf(1.0 / p);
            assert!((r.value - expect).abs() <= DEFAULT_TOL * (1.0 + expect));
        }
    }

    #[test]
    fn zero_function_short_circuits() {
        let d = interval(1.0, 8);
        let p = ExponentField::constant(d, 3.0).unwrap();
        let r = luxemburg_norm(&Signal::new(d, vec![0.0; 8]).unwrap(), &p, DEFAULT_TOL).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn tolerance_range_enforced() {
        let d = interval(1.0, 8);
        let p = ExponentField::constant(d, 3.0).unwrap();
        let f = Signal::new(d, vec![1.0; 8]).unwrap();
        assert!(luxemburg_norm(&f, &p, 1e-3).is_err());
        assert!(luxemburg_norm(&f, &p, 0.0).is_err());
    }

    #[test]
    fn yt_norm_examples() {
        let g = Grid::new(1, 1.0, 16).unwrap();
        let t = 2.0;
        let q = ExponentField::constant(interval(t, 40), 3.0).unwrap();
        let zero: Vec<Field> = (0..40).map(|_| Field::zeros(g)).collect();
        assert_eq!(yt_norm(&zero, &q, 2.0, DEFAULT_TOL).unwrap(), 0.0);
        // slice norm c = ||3||_{L^2(box)} = 3 sqrt(2)
        let slices: Vec<Field> = (0..40).map(|_| Field::constant(g, 3.0)).collect();
        let c = 3.0 * 2f64.sqrt();
        let got = yt_norm(&slices, &q, 2.0, DEFAULT_TOL).unwrap();
        assert!((got - c * t.powf(1.0 / 3.0)).abs() < 1e-9);
        assert!(yt_norm(&[], &q, 2.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn mixed_norm_examples() {
        let d = interval(1.0, 50);
        let p = ExponentField::from_fn(d, None, |x| 2.0 + x[0]).unwrap();
        let zero = Signal::new(d, vec![0.0; 50]).unwrap();
        assert_eq!(mixed_norm(&zero, &p, 3.0, DEFAULT_TOL).unwrap(), 0.0);
        let f = Signal::from_fn(d, |x| 1.0 + 5.0 * x[0]);
        let m = mixed_norm(&f, &p, 3.0, DEFAULT_TOL).unwrap();
        assert!(m >= luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap().value);
        assert!(m >= classical_norm(&f, 3.0).unwrap());
        let three = ExponentField::constant(d, 3.0).unwrap();
        let m3 = mixed_norm(&f, &three, 3.0, DEFAULT_TOL).unwrap();
        assert!((m3 - classical_norm(&f, 3.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn unit_time_norm_bound() {
        for t in [0.3, 1.0, 4.0] {
            let q = ExponentField::from_fn(interval(t, 200), None, |x| 2.5 + (x[0] * 3.0).sin()).unwrap();
            let (norm, bound) = unit_time_norm(&q, DEFAULT_TOL).unwrap();
            assert!(norm <= bound);
        }
    }
}
