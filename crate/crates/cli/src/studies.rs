//! Multi-run studies shared by the verification suites and the experiments.

use crate::error::Result;
use crate::report::{Check, Table};
use fkslab_core::operators::{verify_lplq_decay, DecayStudy};
use fkslab_core::solver::{evolve_u, picard_solve, smallness_value, BlowupThresholds, SolverConfig};
use fkslab_core::spectral::grad_inv_laplacian;
use fkslab_core::varlebesgue::{ExponentField, DEFAULT_TOL};
use fkslab_core::{Field, Grid};
use serde::Serialize;

/// `amp * exp(-|x|^2 / width^2)`.
pub fn gaussian(grid: Grid, amp: f64, width: f64) -> Field {
    Field::from_fn(grid, |x| {
        amp * (-x.iter().map(|c| c * c).sum::<f64>() / (width * width)).exp()
    })
}

fn pair_label(p: f64, q: f64, nu: f64) -> String {
    let show = |v: f64| if v.is_infinite() { "inf".to_string() } else { format!("{v}") };
    format!("p{}-q{}-nu{}", show(p), show(q), nu)
}

/// Default first time of the decay window: the top mode is damped to
/// `resolution` by the data kernel `G_{t0/2}`.
pub fn decay_t0(grid: Grid, alpha: f64, resolution: f64) -> f64 {
    let k_max = std::f64::consts::PI * (grid.points_per_dim() / 2) as f64 / grid.half_width();
    2.0 * (1.0 / resolution).ln() / k_max.powf(alpha)
}

/// Fitted decay slopes for each pair and derivative order. Slopes with a
/// nonzero prediction are checked to 5 % relative, zero predictions to 0.02
/// absolute.
#[allow(clippy::too_many_arguments)]
pub fn decay_checks(
    grid: Grid,
    alpha: f64,
    pairs: &[(f64, f64)],
    derivative: &[bool],
    samples: usize,
    wrap_tol: f64,
    resolution: f64,
    t0: Option<f64>,
) -> Result<(Vec<Check>, Vec<DecayStudy>)> {
    let t0 = t0.unwrap_or_else(|| decay_t0(grid, alpha, resolution));
    let mut checks = Vec::new();
    let mut studies = Vec::new();
    for &(p, q) in pairs {
        for &nu in derivative {
            let study = verify_lplq_decay(grid, p, q, alpha, nu, t0, samples, wrap_tol)?;
            let id = format!("lplq-decay-slope-alpha{alpha}-{}", pair_label(p, q, study.nu));
            let check = if study.predicted == 0.0 {
                Check::abs_within(id, study.slope, 0.0, 0.02)
            } else {
                Check::rel_within(id, study.slope, study.predicted, 0.05)
            };
            checks.push(
                check
                    .param("p", p)
                    .param("q", q)
                    .param("nu", study.nu)
                    .param("alpha", alpha)
                    .param("dim", grid.dim())
                    .param("points", grid.points_per_dim())
                    .param("t0", t0)
                    .param("contamination", study.contamination),
            );
            studies.push(study);
        }
    }
    Ok((checks, studies))
}

pub fn decay_table(studies: &[DecayStudy]) -> Table {
    let mut table = Table::new("decay", &["p", "q", "alpha", "nu", "t", "ratio"]);
    for s in studies {
        for (t, r) in s.times.iter().zip(&s.ratios) {
            table.push(vec![s.p.into(), s.q.into(), s.alpha.into(), s.nu.into(), (*t).into(), (*r).into()]);
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub steps: Vec<f64>,
    /// Relative L2 distance between the two final densities per step size.
    pub distances: Vec<f64>,
    /// `log2` of the last distance ratio.
    pub order: f64,
    pub picard_iterations: Vec<usize>,
}

/// Final densities of the Picard and IMEX solvers at each step size.
pub fn cross_validation(grid: Grid, alpha: f64, u0: &Field, t_final: f64, steps: &[f64]) -> Result<CrossValidation> {
    let v0 = grad_inv_laplacian(u0)?;
    let mut distances = Vec::new();
    let mut iterations = Vec::new();
    for &dt in steps {
        let mut cfg = SolverConfig::new(alpha, grid, dt, t_final)?;
        cfg.mean_density = u0.mean();
        cfg.stride = cfg.steps();
        let imex = evolve_u(u0, &cfg, &BlowupThresholds::default())?;
        let picard = picard_solve(&v0, &cfg)?;
        iterations.push(picard.diagnostics.iterations);
        let distance = match picard.states.last() {
            Some(last) if picard.diagnostics.converged => {
                let a = &imex.final_state().u;
                last.u.zip_with(a, |x, y| x - y)?.l2_norm() / a.l2_norm()
            }
            _ => f64::INFINITY,
        };
        distances.push(distance);
    }
    let order = match distances[..] {
        [.., a, b] => (a / b).log2(),
        _ => f64::NAN,
    };
    Ok(CrossValidation {
        steps: steps.to_vec(),
        distances,
        order,
        picard_iterations: iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionStudy {
    /// Bisected largest amplitude whose iteration converges in budget.
    pub threshold: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// `sup_t ||E(t) v0|| / ||v0||`.
    pub c1: f64,
    /// First Duhamel increment over the squared linear part.
    pub c2: f64,
    /// `1 / (4 C1 C2 ||v0||)` for the unit-amplitude datum.
    pub estimate: f64,
    pub small_ratio: f64,
    pub small_ratios: Vec<f64>,
    pub small_ratio_count: usize,
    pub large_diverged: bool,
    pub large_diverged_at: Option<usize>,
}

fn vector_l2(v: &[Field]) -> f64 {
    v.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
}

/// Amplitude threshold of the Picard iteration for the mean-zero datum
/// `a (e^{-|x|^2} - mean)`, bisected to 0.2 %, plus runs at 0.1 and 100
/// times the threshold.
pub fn contraction_study(grid: Grid, alpha: f64, dt: f64, t_final: f64, budget: usize) -> Result<ContractionStudy> {
    let shape = gaussian(grid, 1.0, 1.0);
    let shape = shape.map(|x| x - shape.mean());
    let unit = grad_inv_laplacian(&shape)?;
    let mut cfg = SolverConfig::new(alpha, grid, dt, t_final)?;
    cfg.picard_max_iters = budget;
    cfg.stride = cfg.steps();
    let scaled = |a: f64| -> Vec<Field> { unit.iter().map(|c| c.scaled(a)).collect() };
    let mut evaluations = 0usize;
    let mut converges = |a: f64| -> Result<bool> {
        evaluations += 1;
        Ok(picard_solve(&scaled(a), &cfg)?.diagnostics.converged)
    };

    let (mut lo, mut hi) = (1.0, 1.0);
    if converges(1.0)? {
        while converges(2.0 * hi)? {
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        lo = hi;
        hi *= 2.0;
    } else {
        loop {
            lo *= 0.5;
            if converges(lo)? || lo < 1e-6 {
                break;
            }
        }
        hi = 2.0 * lo;
    }
    while (hi - lo) > 2e-3 * lo {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = lo;

    let mut small_cfg = cfg.clone();
    small_cfg.picard_tol = 1e-14;
    let small = picard_solve(&scaled(0.1 * threshold), &small_cfg)?.diagnostics;
    let (small_ratio, small_ratio_count) = small.max_ratio_above(1e-12, usize::MAX).unwrap_or((f64::NAN, 0));
    let usable = small.ratios[..small_ratio_count].to_vec();
    let norm0 = vector_l2(&scaled(0.1 * threshold));
    let c1 = small.linear_sup / norm0;
    let c2 = small.increments[0] / small.linear_sup.powi(2);
    let estimate = 1.0 / (4.0 * c1 * c2 * vector_l2(&unit));

    let large = picard_solve(&scaled(100.0 * threshold), &cfg)?.diagnostics;
    Ok(ContractionStudy {
        threshold,
        bracket: (lo, hi),
        evaluations,
        c1,
        c2,
        estimate,
        small_ratio,
        small_ratios: usable,
        small_ratio_count,
        large_diverged: large.diverged_at.is_some(),
        large_diverged_at: large.diverged_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Decay,
    Blowup,
    Inconclusive,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Decay => "decay",
            Outcome::Blowup => "blowup",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyRow {
    pub amplitude: f64,
    pub smallness: f64,
    pub outcome: Outcome,
    pub max_u0: f64,
    pub max_ut: f64,
    pub blowup_time: Option<f64>,
    pub mass_drift: f64,
    pub min_u: f64,
    pub max_cfl: f64,
}

/// One u-solver run per amplitude factor of `base`, sorted by the smallness
/// functional.
pub fn dichotomy(
    base: &Field,
    p: &ExponentField,
    cfg: &SolverConfig,
    thresholds: &BlowupThresholds,
    amplitudes: &[f64],
) -> Result<Vec<DichotomyRow>> {
    let mut rows = Vec::with_capacity(amplitudes.len());
    for &a in amplitudes {
        let u0 = base.scaled(a);
        let smallness = smallness_value(&u0, p, cfg.alpha, DEFAULT_TOL)?;
        let run = evolve_u(&u0, cfg, thresholds)?;
        let max_u0 = run.records[0].max_abs_u;
        let last = run.records.last().expect("initial record");
        let outcome = if run.blowup_time.is_some() {
            Outcome::Blowup
        } else if last.max_abs_u <= max_u0 {
            Outcome::Decay
        } else {
            Outcome::Inconclusive
        };
        rows.push(DichotomyRow {
            amplitude: a,
            smallness,
            outcome,
            max_u0,
            max_ut: last.max_abs_u,
            blowup_time: run.blowup_time,
            mass_drift: run.max_mass_drift(),
            min_u: run.records.iter().map(|r| r.min_u).fold(f64::INFINITY, f64::min),
            max_cfl: run.max_cfl,
        });
    }
    rows.sort_by(|a, b| a.smallness.total_cmp(&b.smallness));
    Ok(rows)
}

/// Pairs ordered by smallness where the smaller datum blows up and the
/// larger one decays.
pub fn inversions(rows: &[DichotomyRow]) -> usize {
    let mut count = 0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.outcome == Outcome::Blowup && b.outcome == Outcome::Decay {
                count += 1;
            }
        }
    }
    count
}

pub fn dichotomy_checks(rows: &[DichotomyRow], alpha: f64) -> Vec<Check> {
    let has = |o: Outcome| rows.iter().any(|r| r.outcome == o);
    let inconclusive = rows.iter().filter(|r| r.outcome == Outcome::Inconclusive).count();
    let drift = rows
        .iter()
        .filter(|r| r.outcome != Outcome::Blowup)
        .map(|r| r.mass_drift)
        .fold(0.0, f64::max);
    let outcomes: Vec<&str> = rows.iter().map(|r| r.outcome.name()).collect();
    vec![
        Check::at_most(format!("dichotomy-monotone-alpha{alpha}"), inversions(rows) as f64, 0.0)
            .param("alpha", alpha)
            .param("outcomes_by_smallness", &outcomes),
        Check::at_least(
            format!("dichotomy-both-outcomes-alpha{alpha}"),
            if has(Outcome::Decay) && has(Outcome::Blowup) { 1.0 } else { 0.0 },
            1.0,
        )
        .param("alpha", alpha),
        Check::recorded(format!("dichotomy-inconclusive-alpha{alpha}"), inconclusive as f64).param("alpha", alpha),
        Check::at_most(format!("dichotomy-mass-drift-alpha{alpha}"), drift, 1e-8).param("alpha", alpha),
    ]
}

pub fn dichotomy_table(rows: &[DichotomyRow]) -> Table {
    let mut table = Table::new(
        "dichotomy",
        &[
            "amplitude",
            "smallness_lhs",
            "outcome",
            "max_u0",
            "max_uT",
            "blowup_time",
            "mass_drift",
            "min_u",
            "max_cfl",
        ],
    );
    for r in rows {
        table.push(vec![
            r.amplitude.into(),
            r.smallness.into(),
            r.outcome.name().into(),
            r.max_u0.into(),
            r.max_ut.into(),
            r.blowup_time.into(),
            r.mass_drift.into(),
            r.min_u.into(),
            r.max_cfl.into(),
        ]);
    }
    table
}
