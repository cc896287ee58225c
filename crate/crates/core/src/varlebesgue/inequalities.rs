//! Empirical checks of the Hölder, duality and embedding inequalities, and the
//! log-Hölder moduli of an exponent.

use super::exponent::{Domain, ExponentField, Samples, Signal};
use super::norm::{classical_norm, luxemburg_norm};
use crate::error::{precondition, Result};
use crate::random::smooth_signal;
use rand::Rng;
use serde::Serialize;

fn product<S: Samples + ?Sized, T: Samples + ?Sized>(f: &S, g: &T) -> Result<Signal> {
    Signal::new(
        f.domain(),
        f.samples().iter().zip(g.samples()).map(|(a, b)| a * b).collect(),
    )
}

fn pairing(f: &[f64], g: &[f64], weight: f64) -> f64 {
    f.iter().zip(g).map(|(a, b)| (a * b).abs()).sum::<f64>() * weight
}

/// `||fg||_p / (||f||_{p1} ||g||_{p2})` with `1/p = 1/p1 + 1/p2`.
pub fn verify_holder<S: Samples + ?Sized, T: Samples + ?Sized>(
    f: &S,
    g: &T,
    p1: &ExponentField,
    p2: &ExponentField,
    tol: f64,
) -> Result<f64> {
    if f.domain() != g.domain() {
        return Err(crate::error::domain("f and g are sampled on different meshes"));
    }
    let p = ExponentField::harmonic_sum(p1, p2)?;
    let nf = luxemburg_norm(f, p1, tol)?.value;
    let ng = luxemburg_norm(g, p2, tol)?.value;
    if nf == 0.0 || ng == 0.0 {
        return Ok(0.0);
    }
    let fg = product(f, g)?;
    Ok(luxemburg_norm(&fg, &p, tol)?.value / (nf * ng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityOutcome {
    pub norm: f64,
    /// Best pairing found (the near-extremizer is always among the candidates).
    pub best: f64,
    /// Largest pairing over all candidates, compared against `2 ||f||`.
    pub max: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Samples `trials` random `g` with `||g||_{p'} = 1` plus the near-extremizer
/// `|f / ||f|| |^{p-1}` and checks `||f||/2 <= sup int |fg| <= 2 ||f||`.
///
/// The lower bound is a one-sided certificate: it only inspects the candidates
/// that were drawn.
pub fn verify_duality<S: Samples + ?Sized>(
    f: &S,
    p: &ExponentField,
    trials: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<DualityOutcome> {
    if trials < 100 {
        return Err(precondition(format!("duality check needs at least 100 trials, got {trials}")));
    }
    let domain = f.domain();
    p.check_domain(&domain)?;
    let conj = p.conjugate()?;
    let norm = luxemburg_norm(f, p, tol)?.value;
    if norm == 0.0 {
        return Ok(DualityOutcome {
            norm,
            best: 0.0,
            max: 0.0,
            lower_ok: true,
            upper_ok: true,
        });
    }
    let weight = domain.weight();
    let extremizer: Vec<f64> = f
        .samples()
        .iter()
        .zip(p.values())
        .map(|(v, q)| (v.abs() / norm).powf(q - 1.0))
        .collect();
    let mut best = pairing(f.samples(), &extremizer, weight);
    let mut max = best;
    let cutoff = match domain {
        Domain::Grid(g) => (g.points_per_dim() / 8).max(1),
        Domain::Interval(iv) => (iv.cells / 8).max(1),
    };
    for _ in 0..trials {
        let g = smooth_signal(domain, rng.random_range(1..=cutoff), rng);
        let ng = luxemburg_norm(&g, &conj, tol)?.value;
        if ng == 0.0 {
            continue;
        }
        let value = pairing(f.samples(), g.values(), weight) / ng;
        best = best.max(value);
        max = max.max(value);
    }
    Ok(DualityOutcome {
        norm,
        best,
        max,
        lower_ok: best >= 0.5 * norm * (1.0 - tol),
        upper_ok: max <= 2.0 * norm * (1.0 + tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingOutcome {
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `||f||_{p1} <= (1 + |Omega|) ||f||_{p2}` for `p1 <= p2` on a bounded domain.
pub fn verify_embedding<S: Samples + ?Sized>(
    f: &S,
    p1: &ExponentField,
    p2: &ExponentField,
    tol: f64,
) -> Result<EmbeddingOutcome> {
    if p1.domain() != p2.domain() {
        return Err(crate::error::domain("exponents live on different meshes"));
    }
    if let Some(i) = p1.values().iter().zip(p2.values()).position(|(a, b)| a > b) {
        return Err(precondition(format!(
            "embedding needs p1 <= p2 pointwise; sample {i} has p1 = {} > p2 = {}",
            p1.values()[i],
            p2.values()[i]
        )));
    }
    let bound = 1.0 + f.domain().measure();
    let small = luxemburg_norm(f, p1, tol)?.value;
    let large = luxemburg_norm(f, p2, tol)?.value;
    let ratio = if large == 0.0 { 0.0 } else { small / large };
    Ok(EmbeddingOutcome {
        ratio,
        bound,
        holds: ratio <= bound * (1.0 + tol),
    })
}

/// Empirical constant `||f||_p / ||f||_{pbar(.)}` for a classical exponent
/// `p <= pbar-`, the whole-box variant of the embedding.
pub fn embedding_constant<S: Samples + ?Sized>(f: &S, p: f64, pbar: &ExponentField, tol: f64) -> Result<f64> {
    if p > pbar.p_minus() {
        return Err(precondition(format!(
            "classical exponent {p} exceeds the variable minimum {}",
            pbar.p_minus()
        )));
    }
    let variable = luxemburg_norm(f, pbar, tol)?.value;
    if variable == 0.0 {
        return Ok(0.0);
    }
    Ok(classical_norm(f, p)? / variable)
}

/// Sup of the two log-Hölder ratios over all sampled pairs / points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogHolder {
    pub local: f64,
    pub decay: Option<f64>,
}

impl LogHolder {
    /// Both constants stay within 10% when the same exponent is resampled on a
    /// mesh twice as fine.
    pub fn stable_under_refinement(&self, fine: &LogHolder) -> bool {
        let close = |a: f64, b: f64| {
            if a == 0.0 {
                b == 0.0
            } else {
                (b / a - 1.0).abs() <= 0.1
            }
        };
        close(self.local, fine.local)
            && match (self.decay, fine.decay) {
                (Some(a), Some(b)) => close(a, b),
                _ => true,
            }
    }
}

pub fn check_log_holder(p: &ExponentField) -> LogHolder {
    let domain = p.domain();
    let dim = domain.dim();
    let points: Vec<[f64; 3]> = (0..domain.len()).map(|i| domain.point(i)).collect();
    let inv: Vec<f64> = p.values().iter().map(|q| 1.0 / q).collect();
    let dist = |a: &[f64; 3], b: &[f64; 3]| {
        a[..dim]
            .iter()
            .zip(&b[..dim])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut local = 0.0f64;
    if !p.is_constant() {
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let diff = (inv[i] - inv[j]).abs();
                if diff == 0.0 {
                    continue;
                }
                let r = dist(&points[i], &points[j]);
                local = local.max(diff * (std::f64::consts::E + 1.0 / r).ln());
            }
        }
    }
    let decay = p.p_infinity().map(|p_inf| {
        let origin = [0.0; 3];
        points
            .iter()
            .zip(&inv)
            .map(|(x, q)| (q - 1.0 / p_inf).abs() * (std::f64::consts::E + dist(x, &origin)).ln())
            .fold(0.0f64, f64::max)
    });
    LogHolder { local, decay }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::random::seeded;
    use crate::varlebesgue::exponent::Interval;
    use crate::varlebesgue::DEFAULT_TOL;

    fn interval(length: f64, cells: usize) -> Domain {
        Domain::Interval(Interval::new(0.0, length, cells).unwrap())
    }

    #[test]
    fn holder_disjoint_and_indicator() {
        let d = interval(2.0, 200);
        let f = Signal::from_fn(d, |x| if x[0] < 1.0 { 1.0 } else { 0.0 });
        let g = Signal::from_fn(d, |x| if x[0] >= 1.0 { 1.0 } else { 0.0 });
        let p = ExponentField::constant(d, 3.0).unwrap();
        assert_eq!(verify_holder(&f, &g, &p, &p, DEFAULT_TOL).unwrap(), 0.0);
        let r = verify_holder(&f, &f, &p, &p, DEFAULT_TOL).unwrap();
        assert!((r - 1.0).abs() < 1e-9, "{r}");
    }

    #[test]
    fn duality_l2_extremizer_is_exact() {
        let d = interval(1.0, 128);
        let f = Signal::from_fn(d, |x| (6.0 * x[0]).sin() + 0.3);
        let p = ExponentField::constant(d, 2.0).unwrap();
        let out = verify_duality(&f, &p, 100, &mut seeded(3), DEFAULT_TOL).unwrap();
        assert!(out.lower_ok && out.upper_ok);
        assert!((out.best - out.norm).abs() < 1e-9 * out.norm);
    }

    #[test]
    fn duality_step_exponent_and_zero() {
        let d = interval(2.0, 128);
        let p = ExponentField::from_fn(d, None, |x| if x[0] <= 1.0 { 1.2 } else { 2.0 }).unwrap();
        let f = Signal::new(d, vec![1.0; 128]).unwrap();
        let out = verify_duality(&f, &p, 100, &mut seeded(5), DEFAULT_TOL).unwrap();
        assert!(out.lower_ok && out.upper_ok);
        let zero = Signal::new(d, vec![0.0; 128]).unwrap();
        let out = verify_duality(&zero, &p, 100, &mut seeded(5), DEFAULT_TOL).unwrap();
        assert!(out.lower_ok && out.upper_ok);
        assert!(verify_duality(&f, &p, 10, &mut seeded(5), DEFAULT_TOL).is_err());
    }

    #[test]
    fn embedding_examples() {
        let d = interval(1.0, 64);
        let one = ExponentField::constant(d, 1.0).unwrap();
        let two = ExponentField::constant(d, 2.0).unwrap();
        let f = Signal::new(d, vec![1.0; 64]).unwrap();
        let out = verify_embedding(&f, &one, &two, DEFAULT_TOL).unwrap();
        assert!((out.ratio - 1.0).abs() < 1e-9 && out.bound == 2.0 && out.holds);
        let same = verify_embedding(&f, &two, &two, DEFAULT_TOL).unwrap();
        assert!(same.ratio <= 1.0 + 1e-9);
        assert!(matches!(
            verify_embedding(&f, &two, &one, DEFAULT_TOL),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn log_holder_constant_smooth_and_jump() {
        let coarse = Grid::new(1, 4.0, 64).unwrap();
        let fine = Grid::new(1, 4.0, 128).unwrap();
        let c = ExponentField::constant(Domain::Grid(coarse), 2.0).unwrap();
        assert_eq!(
            check_log_holder(&c),
            LogHolder {
                local: 0.0,
                decay: Some(0.0)
            }
        );
        let bump = |g: Grid| {
            ExponentField::from_fn(Domain::Grid(g), Some(2.0), |x| 2.0 + (-x[0] * x[0]).exp()).unwrap()
        };
        let a = check_log_holder(&bump(coarse));
        let b = check_log_holder(&bump(fine));
        assert!(a.local > 0.0 && a.decay.unwrap() > 0.0);
        assert!(a.stable_under_refinement(&b), "{a:?} {b:?}");
        let jump = |g: Grid| {
            ExponentField::from_fn(Domain::Grid(g), None, |x| if x[0] < 0.01 { 2.0 } else { 3.0 }).unwrap()
        };
        let a = check_log_holder(&jump(coarse));
        let b = check_log_holder(&jump(fine));
        assert!(!a.stable_under_refinement(&b), "{a:?} {b:?}");
    }
}
