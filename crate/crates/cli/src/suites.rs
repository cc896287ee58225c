//! Estimate-verification suites. Each check function is deterministic given
//! its parameters and seed.

use crate::config::Suite;
use crate::error::Result;
use crate::report::{Check, Report};
use crate::studies::{contraction_study, cross_validation, decay_checks, gaussian, ContractionStudy};
use fkslab_core::kernels::{
    duhamel_constant, duhamel_scaling_defects, fit_gradient_bound, gaussian_kernel, heat_kernel_eval,
    poisson_kernel, KernelProfile,
};
use fkslab_core::operators::{
    maximal_function, radial_majorant_against, riesz_potential, riesz_potential_oracle, verify_hls,
};
use fkslab_core::random::{band_limited, band_limited_mean_zero, seeded, smooth_exponent, smooth_signal, LabRng};
use fkslab_core::solver::{
    critical_exponent, evolve_u, nonlinear_flux, picard_solve, slice_mixed_norm, smallness_value,
    symmetric_structure_residual, BlowupThresholds, SolverConfig,
};
use fkslab_core::spectral::{grad_inv_laplacian, heat_propagate};
use fkslab_core::varlebesgue::{
    check_log_holder, classical_norm, embedding_constant, luxemburg_norm, mixed_norm, modular, unit_time_norm,
    verify_duality, verify_embedding, verify_holder, yt_norm_from_slice_norms, Domain, ExponentField, Interval,
    Signal, DEFAULT_TOL,
};
use fkslab_core::{Field, Grid};
use rand::Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub dim: usize,
    pub alpha: f64,
    pub points: usize,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            dim: 2,
            alpha: 1.5,
            points: 128,
            seed: 0,
        }
    }
}

impl SuiteParams {
    /// Resolution for the randomized norm trials, capped so one trial grid
    /// has at most about 4096 points.
    fn trial_points(&self, cap_2d: usize) -> usize {
        let cap = match self.dim {
            1 => cap_2d * cap_2d,
            2 => cap_2d,
            _ => 16,
        };
        self.points.min(cap).max(16)
    }

    fn rng(&self, salt: u64) -> LabRng {
        seeded(self.seed.wrapping_mul(1_000_003).wrapping_add(salt))
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn constant(domain: Domain, p: f64) -> Result<ExponentField> {
    Ok(ExponentField::constant(domain, p)?)
}

fn gauss_bump(domain: Domain) -> Result<ExponentField> {
    Ok(ExponentField::from_fn(domain, Some(2.0), |x| {
        2.0 + (-x.iter().map(|c| c * c).sum::<f64>()).exp()
    })?)
}

// ---------------------------------------------------------------- varlebesgue

/// Luxemburg bisection against the classical norm for constant exponents.
pub fn luxemburg_classical(params: &SuiteParams) -> Result<Check> {
    let grid = Grid::new(params.dim, 1.0, params.trial_points(64))?;
    let mut rng = params.rng(1);
    let mut worst = 0.0f64;
    let exponents = [1.5, 2.0, 3.0, 7.0];
    for _ in 0..100 {
        let cutoff = rng.random_range(1..=6);
        let f = band_limited(grid, cutoff, &mut rng);
        for &p in &exponents {
            let lux = luxemburg_norm(&f, &constant(Domain::Grid(grid), p)?, DEFAULT_TOL)?.value;
            let classical = classical_norm(&f, p)?;
            worst = worst.max((lux - classical).abs() / classical);
        }
    }
    Ok(Check::at_most("luxemburg-classical-agreement", worst, 1e-9)
        .param("fields", 100)
        .param("exponents", exponents)
        .param("points", grid.points_per_dim())
        .seed(params.seed))
}

/// `p = 1` on `[0, 1]`, `p = 2` on `(1, 2]`, `f = 1`: `1/l + 1/l^2 = 1`.
pub fn luxemburg_step() -> Result<Check> {
    let domain = Domain::Interval(Interval::new(0.0, 2.0, 2000)?);
    let p = ExponentField::from_fn(domain, None, |x| if x[0] <= 1.0 { 1.0 } else { 2.0 })?;
    let f = Signal::from_fn(domain, |_| 1.0);
    let value = luxemburg_norm(&f, &p, DEFAULT_TOL)?.value;
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    Ok(Check::rel_within("luxemburg-step-golden-ratio", value, golden, 1e-9).param("cells", 2000))
}

/// Homogeneity and the bisection certificate on variable exponents.
pub fn luxemburg_axioms(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 1.0, params.trial_points(32))?;
    let domain = Domain::Grid(grid);
    let mut rng = params.rng(2);
    let mut homogeneity = 0.0f64;
    let mut certificate = 0.0f64;
    let mut triangle = f64::NEG_INFINITY;
    for _ in 0..20 {
        let p = smooth_exponent(domain, 1.5, 4.0, &mut rng)?;
        let f = band_limited(grid, rng.random_range(1..=4), &mut rng);
        let g = band_limited(grid, rng.random_range(1..=4), &mut rng);
        let c = rng.random_range(0.2..5.0) * if rng.random_range(0.0..1.0) < 0.5 { -1.0 } else { 1.0 };
        let nf = luxemburg_norm(&f, &p, DEFAULT_TOL)?;
        let ng = luxemburg_norm(&g, &p, DEFAULT_TOL)?.value;
        let ncf = luxemburg_norm(&f.scaled(c), &p, DEFAULT_TOL)?.value;
        homogeneity = homogeneity.max((ncf / (c.abs() * nf.value) - 1.0).abs());
        certificate = certificate.max((modular(&f.scaled(1.0 / nf.value), &p)? - 1.0).abs());
        let sum = f.zip_with(&g, |a, b| a + b)?;
        let nsum = luxemburg_norm(&sum, &p, DEFAULT_TOL)?.value;
        triangle = triangle.max(nsum - nf.value - ng);
    }
    Ok(vec![
        Check::at_most("luxemburg-homogeneity", homogeneity, 2.0 * DEFAULT_TOL)
            .param("trials", 20)
            .seed(params.seed),
        Check::at_most("luxemburg-bisection-certificate", certificate, DEFAULT_TOL)
            .param("trials", 20)
            .seed(params.seed),
        Check::at_most("luxemburg-triangle", triangle, 4.0 * DEFAULT_TOL)
            .param("trials", 20)
            .seed(params.seed),
    ])
}

pub fn mixed_norm_nesting(params: &SuiteParams) -> Result<Check> {
    let grid = Grid::new(params.dim, 1.0, params.trial_points(32))?;
    let domain = Domain::Grid(grid);
    let mut rng = params.rng(3);
    let mut violations = 0usize;
    for _ in 0..20 {
        let p = smooth_exponent(domain, 1.5, 4.0, &mut rng)?;
        let r = rng.random_range(1.5..6.0);
        let f = band_limited(grid, 3, &mut rng);
        let m = mixed_norm(&f, &p, r, DEFAULT_TOL)?;
        if m < luxemburg_norm(&f, &p, DEFAULT_TOL)?.value || m < classical_norm(&f, r)? {
            violations += 1;
        }
    }
    Ok(Check::at_most("mixed-norm-nesting", violations as f64, 0.0)
        .param("trials", 20)
        .seed(params.seed))
}

/// Hölder ratios over random pairs with smooth exponents, plus the indicator
/// case where the ratio is exactly one.
pub fn holder(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 1.0, params.trial_points(32))?;
    let domain = Domain::Grid(grid);
    let mut rng = params.rng(4);
    let mut worst = 0.0f64;
    let trials = 1000;
    for _ in 0..trials {
        let p1 = smooth_exponent(domain, 2.2, 6.0, &mut rng)?;
        let p2 = smooth_exponent(domain, 2.2, 6.0, &mut rng)?;
        let f = band_limited(grid, rng.random_range(1..=4), &mut rng);
        let g = band_limited(grid, rng.random_range(1..=4), &mut rng);
        worst = worst.max(verify_holder(&f, &g, &p1, &p2, DEFAULT_TOL)?);
    }
    let chi = Field::from_fn(grid, |x| if x[0] < 0.25 { 1.0 } else { 0.0 });
    let p = constant(domain, 3.0)?;
    let exact = verify_holder(&chi, &chi, &p, &p, DEFAULT_TOL)?;
    Ok(vec![
        Check::at_most("holder-ratio", worst, 2.0)
            .param("trials", trials)
            .param("points", grid.points_per_dim())
            .seed(params.seed),
        Check::rel_within("holder-indicator-exact", exact, 1.0, 1e-8).param("p", 3.0),
    ])
}

/// Duality sandwich on random `(f, p)` pairs over an interval mesh.
pub fn duality(params: &SuiteParams, pairs: usize) -> Result<Vec<Check>> {
    let domain = Domain::Interval(Interval::new(0.0, 2.0, 128)?);
    let mut rng = params.rng(5);
    let mut upper_violations = 0usize;
    let mut lower_violations = 0usize;
    let mut max_ratio = 0.0f64;
    let mut min_best = f64::INFINITY;
    for _ in 0..pairs {
        let p = smooth_exponent(domain, 1.2, 4.0, &mut rng)?;
        let f = smooth_signal(domain, rng.random_range(1..=8), &mut rng);
        let out = verify_duality(&f, &p, 100, &mut rng, DEFAULT_TOL)?;
        if !out.upper_ok {
            upper_violations += 1;
        }
        if !out.lower_ok {
            lower_violations += 1;
        }
        if out.norm > 0.0 {
            max_ratio = max_ratio.max(out.max / out.norm);
            min_best = min_best.min(out.best / out.norm);
        }
    }
    Ok(vec![
        Check::at_most("duality-upper", upper_violations as f64, 0.0)
            .param("pairs", pairs)
            .param("candidates_per_pair", 101)
            .param("largest_pairing_over_norm", max_ratio)
            .seed(params.seed),
        Check::at_most("duality-lower", lower_violations as f64, 0.0)
            .param("pairs", pairs)
            .param("smallest_best_pairing_over_norm", min_best)
            .seed(params.seed)
            .note("one-sided certificate: only the drawn candidates and the near-extremizer are inspected"),
    ])
}

/// Bounded-domain embedding with constant `1 + |Omega|` on a box of measure 4,
/// and the recorded whole-box constant.
pub fn embedding(params: &SuiteParams) -> Result<Vec<Check>> {
    let half = 0.5 * 4f64.powf(1.0 / params.dim as f64);
    let grid = Grid::new(params.dim, half, params.trial_points(32))?;
    let domain = Domain::Grid(grid);
    let mut rng = params.rng(6);
    let mut worst = 0.0f64;
    let trials = 500;
    for _ in 0..trials {
        let p1 = smooth_exponent(domain, 1.2, 3.0, &mut rng)?;
        let gap = smooth_exponent(domain, 1.0, 4.0, &mut rng)?;
        let p2 = ExponentField::new(
            domain,
            p1.values().iter().zip(gap.values()).map(|(a, g)| a.max(a + g - 1.0)).collect(),
            None,
        )?;
        let f = band_limited(grid, rng.random_range(1..=4), &mut rng);
        worst = worst.max(verify_embedding(&f, &p1, &p2, DEFAULT_TOL)?.ratio);
    }
    let big = Grid::new(params.dim, 4.0, params.trial_points(32))?;
    let pbar = gauss_bump(Domain::Grid(big))?;
    let mut constant_max = 0.0f64;
    for _ in 0..50 {
        let f = band_limited(big, rng.random_range(1..=4), &mut rng);
        constant_max = constant_max.max(embedding_constant(&f, 2.0, &pbar, DEFAULT_TOL)?);
    }
    Ok(vec![
        Check::at_most("embedding-bounded-domain", worst, 1.0 + domain.measure())
            .param("trials", trials)
            .param("measure", domain.measure())
            .seed(params.seed),
        Check::recorded("embedding-whole-box-constant", constant_max)
            .param("p", 2.0)
            .param("pbar", "gauss-bump:2+exp(-r2)")
            .param("trials", 50)
            .seed(params.seed),
    ])
}

/// Log-Hölder constants of a smooth bump (stable) and a jump (drifting)
/// under refinement.
pub fn log_holder(params: &SuiteParams) -> Result<Vec<Check>> {
    let coarse_n = match params.dim {
        1 => 256,
        2 => 64,
        _ => 16,
    };
    let grids = [
        Grid::new(params.dim, 4.0, coarse_n)?,
        Grid::new(params.dim, 4.0, 2 * coarse_n)?,
    ];
    let bump: Vec<_> = grids
        .iter()
        .map(|g| gauss_bump(Domain::Grid(*g)).map(|p| check_log_holder(&p)))
        .collect::<Result<_>>()?;
    let jump: Vec<_> = grids
        .iter()
        .map(|g| {
            ExponentField::from_fn(Domain::Grid(*g), None, |x| if x[0] < 0.0 { 2.0 } else { 3.0 })
                .map(|p| check_log_holder(&p))
        })
        .collect::<std::result::Result<_, _>>()?;
    let decay_ratio = match (bump[0].decay, bump[1].decay) {
        (Some(a), Some(b)) if a > 0.0 => b / a,
        _ => f64::NAN,
    };
    Ok(vec![
        Check::rel_within("log-holder-local-stable", bump[1].local / bump[0].local, 1.0, 0.1)
            .param("exponent", "gauss-bump:2+exp(-r2)")
            .param("coarse_points", coarse_n)
            .param("coarse", bump[0].local)
            .param("fine", bump[1].local),
        Check::rel_within("log-holder-decay-stable", decay_ratio, 1.0, 0.1)
            .param("exponent", "gauss-bump:2+exp(-r2)")
            .param("coarse_points", coarse_n),
        Check::at_least("log-holder-jump-flagged", jump[1].local / jump[0].local, 1.1)
            .param("exponent", "step:2,3")
            .param("coarse_points", coarse_n)
            .note("ratio above 1.1 means the constant is not stable under refinement"),
    ])
}

/// `||1||_{L^{q(.)}(0,T)} <= 2 max{T^{1/q-}, T^{1/q+}}` and the constant-`q`
/// closed form of the time norm.
pub fn time_norms(params: &SuiteParams) -> Result<Vec<Check>> {
    let mut rng = params.rng(7);
    let mut worst = 0.0f64;
    for t in [0.25, 1.0, 4.0] {
        let domain = Domain::Interval(Interval::new(0.0, t, 256)?);
        for _ in 0..10 {
            let q = smooth_exponent(domain, 1.5, 5.0, &mut rng)?;
            let (norm, bound) = unit_time_norm(&q, DEFAULT_TOL)?;
            worst = worst.max(norm / bound);
        }
    }
    let t = 2.0;
    let c = 0.7;
    let domain = Domain::Interval(Interval::new(0.0, t, 64)?);
    let yt = yt_norm_from_slice_norms(&[c; 64], &constant(domain, 3.0)?, DEFAULT_TOL)?;
    Ok(vec![
        Check::at_most("unit-time-norm-bound", worst, 1.0)
            .param("horizons", [0.25, 1.0, 4.0])
            .param("trials_per_horizon", 10)
            .seed(params.seed)
            .note("measured is the norm divided by the bound"),
        Check::rel_within("yt-norm-constant", yt, c * t.powf(1.0 / 3.0), 1e-9)
            .param("q", 3.0)
            .param("T", t),
    ])
}

pub fn varlebesgue_suite(params: &SuiteParams) -> Result<Vec<Check>> {
    let mut checks = vec![luxemburg_classical(params)?, luxemburg_step()?];
    checks.extend(luxemburg_axioms(params)?);
    checks.push(mixed_norm_nesting(params)?);
    checks.extend(holder(params)?);
    checks.extend(duality(params, 200)?);
    checks.extend(embedding(params)?);
    checks.extend(log_holder(params)?);
    checks.extend(time_norms(params)?);
    Ok(checks)
}

// -------------------------------------------------------------------- kernels

/// Gaussian and Poisson closed forms at 20 sampled `(t, r)` each, and the
/// self-similarity identity at 20 more.
pub fn kernel_closed_forms(params: &SuiteParams) -> Result<Vec<Check>> {
    let dim = params.dim;
    let mut rng = params.rng(8);
    let mut gauss = 0.0f64;
    let mut poisson = 0.0f64;
    let mut similarity = 0.0f64;
    for _ in 0..20 {
        let t = 10f64.powf(rng.random_range(-1.3..0.7));
        let r = rng.random_range(0.0..4.0) * t.sqrt();
        let q = heat_kernel_eval(r, t, 2.0, dim)?;
        gauss = gauss.max((q / gaussian_kernel(r, t, dim) - 1.0).abs());

        let t = 10f64.powf(rng.random_range(-1.0..0.5));
        let r = rng.random_range(0.0..3.0) * t;
        let q = heat_kernel_eval(r, t, 1.0, dim)?;
        poisson = poisson.max((q / poisson_kernel(r, t, dim) - 1.0).abs());

        let a = params.alpha;
        let t = 10f64.powf(rng.random_range(-2.0..1.0));
        let r = rng.random_range(0.0..3.0) * t.powf(1.0 / a);
        let direct = heat_kernel_eval(r, t, a, dim)?;
        let scaled = t.powf(-(dim as f64) / a) * heat_kernel_eval(r * t.powf(-1.0 / a), 1.0, a, dim)?;
        similarity = similarity.max((direct / scaled - 1.0).abs());
    }
    Ok(vec![
        Check::at_most("kernel-gaussian-closed-form", gauss, 1e-8)
            .param("dim", dim)
            .param("samples", 20)
            .seed(params.seed),
        Check::at_most("kernel-poisson-closed-form", poisson, 1e-6)
            .param("dim", dim)
            .param("samples", 20)
            .seed(params.seed),
        Check::at_most("kernel-self-similarity", similarity, 1e-8)
            .param("dim", dim)
            .param("alpha", params.alpha)
            .param("samples", 20)
            .seed(params.seed),
    ])
}

const KERNEL_ALPHAS: [f64; 5] = [1.0, 1.2, 1.5, 1.8, 2.0];

/// Unit mass, positivity and radial monotonicity of the kernel.
pub fn kernel_profile_checks(params: &SuiteParams) -> Result<Vec<Check>> {
    let dim = params.dim;
    let mut alphas = KERNEL_ALPHAS.to_vec();
    if !alphas.contains(&params.alpha) {
        alphas.push(params.alpha);
    }
    let mut mass_err = 0.0f64;
    let mut shape_failures = 0usize;
    for &a in &alphas {
        for t in [0.1, 1.0] {
            mass_err = mass_err.max((KernelProfile::mass(a, dim, t)? - 1.0).abs());
            let profile = KernelProfile::uniform(a, dim, t, 10.0 * t.powf(1.0 / a), 60)?;
            if !(profile.is_positive(1e-12) && profile.is_nonincreasing(1e-12)) {
                shape_failures += 1;
            }
        }
    }
    Ok(vec![
        Check::at_most("kernel-mass", mass_err, 1e-6)
            .param("dim", dim)
            .param("alphas", &alphas)
            .param("times", [0.1, 1.0]),
        Check::at_most("kernel-positive-decreasing", shape_failures as f64, 0.0)
            .param("dim", dim)
            .param("alphas", &alphas)
            .param("times", [0.1, 1.0]),
    ])
}

pub fn gradient_bound(params: &SuiteParams) -> Result<Vec<Check>> {
    let base = fit_gradient_bound(params.alpha, params.dim, 200)?;
    let doubled = fit_gradient_bound(params.alpha, params.dim, 400)?;
    Ok(vec![
        Check::recorded("kernel-gradient-constant", doubled)
            .param("alpha", params.alpha)
            .param("dim", params.dim)
            .param("samples", 400),
        Check::rel_within("kernel-gradient-constant-stable", doubled / base, 1.0, 0.1)
            .param("alpha", params.alpha)
            .param("dim", params.dim)
            .param("samples", [200, 400]),
    ])
}

pub fn duhamel(params: &SuiteParams) -> Result<Vec<Check>> {
    let c2 = duhamel_constant(2, 2.0)?;
    let c3 = duhamel_constant(3, 2.0)?;
    let scales = [0.5, 1.0, 2.0];
    // the s-integrand is only integrable at infinity from dim 2 on for alpha up to 2
    let dim = params.dim.max(2);
    let defects = duhamel_scaling_defects(dim, params.alpha, &scales)?;
    let by_dim: Vec<f64> = (2..=3)
        .map(|n| duhamel_constant(n, params.alpha))
        .collect::<std::result::Result<_, _>>()?;
    let monotone = by_dim.windows(2).all(|w| w[1] < w[0]);
    Ok(vec![
        Check::abs_within("duhamel-constant-2d", c2, 1.0, 1e-8).param("alpha", 2.0),
        Check::abs_within("duhamel-constant-3d", c3, 1.0 / 3.0, 1e-8).param("alpha", 2.0),
        Check::at_most("duhamel-scaling-identity", max_of(defects), 1e-8)
            .param("dim", dim)
            .param("alpha", params.alpha)
            .param("scales", scales),
        Check::at_least("duhamel-constant-decreasing-in-dim", if monotone { 1.0 } else { 0.0 }, 1.0)
            .param("alpha", params.alpha)
            .param("constants", &by_dim),
    ])
}

/// Maximal operator: variable-exponent bound, pointwise lower bound,
/// sublinearity and the 2-D indicator profile.
pub fn maximal(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 4.0, params.trial_points(64))?;
    let p = gauss_bump(Domain::Grid(grid))?;
    let mut rng = params.rng(9);
    let mut ratio = 0.0f64;
    let mut lower = f64::INFINITY;
    for _ in 0..200 {
        let f = band_limited(grid, rng.random_range(1..=4), &mut rng);
        let m = maximal_function(&f)?;
        ratio = ratio.max(luxemburg_norm(&m, &p, DEFAULT_TOL)?.value / luxemburg_norm(&f, &p, DEFAULT_TOL)?.value);
        lower = lower.min(
            m.values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| a - b.abs())
                .fold(f64::INFINITY, f64::min),
        );
    }
    let mut sublinear = f64::NEG_INFINITY;
    for _ in 0..20 {
        let f = band_limited(grid, 3, &mut rng);
        let g = band_limited(grid, 3, &mut rng);
        let mf = maximal_function(&f)?;
        let mg = maximal_function(&g)?;
        let msum = maximal_function(&f.zip_with(&g, |a, b| a + b)?)?;
        for i in 0..grid.len() {
            sublinear = sublinear.max(msum.values()[i] - mf.values()[i] - mg.values()[i]);
        }
    }
    let g2 = Grid::new(2, 8.0, 128)?;
    let rho = 1.0;
    let chi = Field::from_fn(g2, |x| if x[0] * x[0] + x[1] * x[1] <= rho * rho { 1.0 } else { 0.0 });
    let m = maximal_function(&chi)?;
    let mut profile = 0.0f64;
    for d in [2.0 * rho, 4.0 * rho] {
        let flat = g2.flat_index(&[64 + (d / g2.spacing()) as usize, 64]);
        let expect = (rho / (d + rho)).powi(2);
        let got = m.values()[flat];
        profile = profile.max((got / expect).max(expect / got));
    }
    Ok(vec![
        Check::at_most("maximal-variable-bound", ratio, 10.0)
            .param("fields", 200)
            .param("exponent", "gauss-bump:2+exp(-r2)")
            .param("points", grid.points_per_dim())
            .seed(params.seed)
            .note("measured is the empirical constant"),
        Check::at_least("maximal-pointwise-lower-bound", lower, 0.0).seed(params.seed),
        Check::at_most("maximal-sublinear", sublinear, 1e-12).param("pairs", 20).seed(params.seed),
        Check::at_most("maximal-indicator-profile", profile, 2.0)
            .param("radius", rho)
            .param("distances", [2.0 * rho, 4.0 * rho])
            .note("measured is the worst factor between the profile and (rho/(|x|+rho))^2"),
    ])
}

/// `|G_t * f| <= M f` on random fields; needs `h <= 1/32` (see the notes).
pub fn radial_majorant(params: &SuiteParams) -> Result<Check> {
    let grid = Grid::new(params.dim, 4.0, params.points)?;
    let mut rng = params.rng(10);
    let mut violations = 0usize;
    let mut excess = f64::NEG_INFINITY;
    let alphas = [1.2, 1.5, 2.0];
    let times = [0.01, 0.1, 1.0];
    for _ in 0..100 {
        let f = band_limited(grid, 4, &mut rng);
        let m = maximal_function(&f)?;
        for &a in &alphas {
            for &t in &times {
                let out = radial_majorant_against(&f, &m, a, t, 1e-8)?;
                violations += out.violations;
                excess = excess.max(out.max_excess);
            }
        }
    }
    Ok(Check::at_most("radial-majorant", violations as f64, 0.0)
        .param("fields", 100)
        .param("alphas", alphas)
        .param("times", times)
        .param("slack", 1e-8)
        .param("points", params.points)
        .param("largest_excess", excess)
        .seed(params.seed))
}

fn bump(x: &[f64]) -> f64 {
    let r2 = x.iter().map(|c| c * c).sum::<f64>() / 4.0;
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Riesz multiplier against direct quadrature (2-D), and the `beta -> 0` limit.
pub fn riesz(params: &SuiteParams) -> Result<Vec<Check>> {
    let beta = (params.alpha - 1.0).clamp(0.1, 1.0);
    let grid = Grid::new(2, 8.0, 128)?;
    let f = Field::from_fn(grid, bump);
    let multiplier = riesz_potential(&f, beta)?;
    let mut points = Vec::new();
    let mut index_of = Vec::new();
    for flat in 0..grid.len() {
        let m = grid.multi_index(flat);
        if m[0] % 8 == 0 && m[1] % 8 == 0 {
            points.push(grid.point(flat));
            index_of.push(flat);
        }
    }
    let oracle = riesz_potential_oracle(bump, 2.0, &grid, beta, &points, 256, 48)?;
    let a: Vec<f64> = index_of.iter().map(|&i| multiplier.values()[i]).collect();
    let mean_a = a.iter().sum::<f64>() / a.len() as f64;
    let mean_o = oracle.iter().sum::<f64>() / oracle.len() as f64;
    let num: f64 = a
        .iter()
        .zip(&oracle)
        .map(|(x, y)| ((x - mean_a) - (y - mean_o)).powi(2))
        .sum();
    let den: f64 = oracle.iter().map(|y| (y - mean_o).powi(2)).sum();

    let small = Grid::new(params.dim, PI, params.trial_points(32))?;
    let h = band_limited_mean_zero(small, 2, &mut params.rng(11));
    let out = riesz_potential(&h, 1e-3)?;
    let deviation = out.zip_with(&h, |x, y| x - y)?.max_abs() / h.max_abs();
    Ok(vec![
        Check::at_most("riesz-multiplier-vs-quadrature", (num / den).sqrt(), 1e-3)
            .param("beta", beta)
            .param("points", points.len())
            .param("half_width", 8.0)
            .note("both sides mean-subtracted over the evaluation points"),
        Check::at_most("riesz-small-beta-limit", deviation, 1e-3)
            .param("beta", 1e-3)
            .param("cutoff", 2)
            .seed(params.seed)
            .note("sup deviation relative to max |f|"),
    ])
}

/// Mixed HLS ratio at two resolutions, and the exponent arithmetic.
pub fn hls(params: &SuiteParams) -> Result<Vec<Check>> {
    let n = params.dim as f64;
    let r = 2.0;
    let coarse_n = params.trial_points(64);
    let ratio_at = |points: usize, beta: f64| -> Result<f64> {
        let grid = Grid::new(params.dim, 4.0, points)?;
        let p = gauss_bump(Domain::Grid(grid))?;
        let f = gaussian(grid, 1.0, 1.0);
        Ok(verify_hls(&f, &p, r, beta, DEFAULT_TOL)?.ratio)
    };
    let limit = (n / 3.0).min(n / r);
    let beta = if params.alpha - 1.0 < limit {
        params.alpha - 1.0
    } else {
        0.5 * limit
    };
    let coarse = ratio_at(coarse_n, beta)?;
    let fine = ratio_at(2 * coarse_n, beta)?;

    let grid = Grid::new(params.dim, 4.0, coarse_n)?;
    let p = 1.5;
    let beta_c = 0.5 * (n / p).min(n / p);
    let out = verify_hls(&gaussian(grid, 1.0, 1.0), &constant(Domain::Grid(grid), p)?, p, beta_c, DEFAULT_TOL)?;
    Ok(vec![
        Check::rel_within("hls-mixed-stable", fine / coarse, 1.0, 0.15)
            .param("beta", beta)
            .param("r", r)
            .param("points", [coarse_n, 2 * coarse_n])
            .param("ratio_coarse", coarse)
            .param("ratio_fine", fine),
        Check::abs_within("hls-classical-exponent", out.q_minus, n * p / (n - beta_c * p), 1e-12)
            .param("p", p)
            .param("beta", beta_c),
    ])
}

pub fn decay_slopes(params: &SuiteParams) -> Result<Vec<Check>> {
    // wrap contamination stays below 1e-2 over a decade of t from N = 256 on
    let points = if params.dim <= 2 { params.points.max(256) } else { params.points };
    let grid = Grid::new(params.dim, PI, points)?;
    let pairs = [(1.0, 2.0), (1.0, f64::INFINITY), (2.0, f64::INFINITY), (2.0, 2.0)];
    let (checks, _) = decay_checks(grid, params.alpha, &pairs, &[false, true], 11, 1e-2, 1e-6, None)?;
    Ok(checks)
}

pub fn kernels_suite(params: &SuiteParams) -> Result<Vec<Check>> {
    let mut checks = kernel_closed_forms(params)?;
    checks.extend(kernel_profile_checks(params)?);
    checks.extend(gradient_bound(params)?);
    checks.extend(duhamel(params)?);
    checks.extend(maximal(params)?);
    checks.push(radial_majorant(params)?);
    checks.extend(riesz(params)?);
    checks.extend(hls(params)?);
    checks.extend(decay_slopes(params)?);
    Ok(checks)
}

// --------------------------------------------------------------------- solver

pub fn structure_identity(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, PI, params.points)?;
    let mut rng = params.rng(12);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let u = band_limited(grid, params.points / 4, &mut rng);
        worst = worst.max(symmetric_structure_residual(&u)?);
    }
    let single = Field::from_fn(grid, |x| (2.0 * x[0] + x.get(1).map_or(0.0, |y| 3.0 * y)).cos());
    let v: Vec<Field> = (0..params.dim).map(|_| band_limited(grid, 6, &mut rng)).collect();
    let m = nonlinear_flux(&v, true)?;
    let sq: Field = v
        .iter()
        .map(|c| c.map(|x| x * x))
        .reduce(|a, b| a.zip_with(&b, |x, y| x + y).expect("same grid"))
        .expect("at least one component");
    let trace = (0..params.dim)
        .map(|i| m[i][i].clone())
        .reduce(|a, b| a.zip_with(&b, |x, y| x + y).expect("same grid"))
        .expect("at least one component");
    let expected = fkslab_core::spectral::dealias(&sq.scaled(1.0 - params.dim as f64 / 2.0));
    let trace_defect = trace.zip_with(&expected, |a, b| a - b)?.max_abs() / sq.max_abs();
    let symmetric = (0..params.dim).all(|i| (0..params.dim).all(|j| m[i][j] == m[j][i]));
    Ok(vec![
        Check::at_most("structure-identity-random", worst, 1e-8)
            .param("fields", 50)
            .param("cutoff", params.points / 4)
            .param("points", params.points)
            .seed(params.seed),
        Check::at_most("structure-identity-single-mode", symmetric_structure_residual(&single)?, 1e-10),
        Check::at_most("flux-trace", trace_defect, 1e-12).seed(params.seed),
        Check::at_least("flux-symmetry", if symmetric { 1.0 } else { 0.0 }, 1.0),
    ])
}

fn small_gaussian(grid: Grid) -> Field {
    gaussian(grid, 0.5, 1.0)
}

/// Mass, reduction consistency and positivity along u-solver runs.
pub fn conservation(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 4.0, params.points)?;
    let mut checks = Vec::new();
    let mut reduction = 0.0f64;
    let mut positivity = f64::INFINITY;
    for alpha in [1.5, 2.0] {
        let cfg = SolverConfig::new(alpha, grid, 0.01, 1.0)?;
        let run = evolve_u(&small_gaussian(grid), &cfg, &BlowupThresholds::default())?;
        checks.push(
            Check::at_most(format!("mass-conservation-alpha-{alpha}"), run.max_mass_drift(), 1e-8)
                .param("alpha", alpha)
                .param("dt", 0.01)
                .param("T", 1.0)
                .param("blowup", run.blowup_time.is_some()),
        );
        reduction = reduction.max(max_of(run.records.iter().map(|r| r.reduction_defect)));
        for r in &run.records {
            positivity = positivity.min(r.min_u / r.max_abs_u);
        }
    }
    checks.push(
        Check::at_most("reduction-consistency", reduction, 1e-10)
            .param("alphas", [1.5, 2.0])
            .note("relative L2 defect of -div v = u - mean u with v recomputed from u"),
    );
    checks.push(
        Check::at_least("positivity", positivity, -1e-6)
            .param("alphas", [1.5, 2.0])
            .note("measured is min over the run of min u / max u"),
    );
    Ok(checks)
}

/// Linear flow, zero data, stationary constants and the quiet monitor.
pub fn trivial_dynamics(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 4.0, params.points.min(64))?;
    let alpha = params.alpha;
    let u0 = small_gaussian(grid);
    let v0 = grad_inv_laplacian(&u0)?;
    let mut cfg = SolverConfig::new(alpha, grid, 0.05, 0.5)?;
    cfg.nonlinear = false;
    let run = picard_solve(&v0, &cfg)?;
    let last = run.states.last().expect("stored final state");
    let mut linear_err = 0.0f64;
    for (c, c0) in last.v.iter().zip(&v0) {
        let expect = heat_propagate(c0, cfg.t_final, alpha)?;
        linear_err = linear_err.max(c.zip_with(&expect, |a, b| a - b)?.max_abs() / expect.max_abs());
    }
    let zero: Vec<Field> = (0..params.dim).map(|_| Field::zeros(grid)).collect();
    let nonlin = SolverConfig::new(alpha, grid, 0.05, 0.5)?;
    let zero_run = picard_solve(&zero, &nonlin)?;

    let constant_run = evolve_u(&Field::constant(grid, 0.7), &nonlin, &BlowupThresholds::default())?;
    let drift = constant_run.final_state().u.map(|x| x - 0.7).max_abs();

    let heat = evolve_u(&gaussian(grid, 5.0, 0.5), &cfg, &BlowupThresholds::default())?;
    let maxes: Vec<f64> = heat.records.iter().map(|r| r.max_abs_u).collect();
    let monotone = maxes.windows(2).all(|w| w[1] <= w[0]);

    // X-norm surrogate decays: mixed norm at t > 0 never exceeds t = 0.
    let r = critical_exponent(params.dim, alpha);
    let mut checks = vec![
        Check::at_most("picard-linear-flow", linear_err, 1e-12).param("alpha", alpha),
        Check::abs_within("picard-zero-data", zero_run.diagnostics.iterations as f64, 1.0, 0.0)
            .param("converged", zero_run.diagnostics.converged),
        Check::at_most("imex-constant-stationary", drift, 1e-12),
        Check::at_least(
            "imex-linear-flow-monotone",
            if monotone && heat.blowup_time.is_none() { 1.0 } else { 0.0 },
            1.0,
        )
        .note("max |u| nonincreasing and the monitor stays quiet"),
    ];
    if r > 1.0 && r.is_finite() {
        let p = gauss_bump(Domain::Grid(grid))?;
        let norms: Vec<f64> = run
            .states
            .iter()
            .map(|s| slice_mixed_norm(&s.v, &p, r, DEFAULT_TOL))
            .collect::<std::result::Result<_, _>>()?;
        let excess = max_of(norms.iter().skip(1).map(|n| n - norms[0]));
        checks.push(
            Check::at_most("linear-decay-monotone", excess, 1e-10)
                .param("r", r)
                .param("exponent", "gauss-bump:2+exp(-r2)"),
        );
    }
    Ok(checks)
}

pub fn smallness(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 4.0, params.points.min(64))?;
    let r = critical_exponent(params.dim, params.alpha);
    let mut checks = vec![Check::abs_within(
        "smallness-critical-exponent",
        r,
        params.dim as f64 / (params.alpha - 1.0),
        0.0,
    )
    .param("dim", params.dim)
    .param("alpha", params.alpha)];
    if r > 1.0 && r.is_finite() {
        let p = gauss_bump(Domain::Grid(grid))?;
        let u = gaussian(grid, 1.0, 1.0);
        let a = smallness_value(&u, &p, params.alpha, DEFAULT_TOL)?;
        let b = smallness_value(&u.scaled(3.0), &p, params.alpha, DEFAULT_TOL)?;
        let zero = smallness_value(&Field::zeros(grid), &p, params.alpha, DEFAULT_TOL)?;
        checks.push(Check::rel_within("smallness-homogeneity", b, 3.0 * a, 2.0 * DEFAULT_TOL).param("scale", 3.0));
        checks.push(Check::abs_within("smallness-zero", zero, 0.0, 0.0));
    }
    Ok(checks)
}

pub fn cross_validation_checks(params: &SuiteParams) -> Result<Vec<Check>> {
    let grid = Grid::new(params.dim, 4.0, params.points)?;
    let cv = cross_validation(grid, params.alpha, &small_gaussian(grid), 1.0, &[0.05, 0.025, 0.0125])?;
    let finest = *cv.distances.last().expect("three step sizes");
    Ok(vec![
        Check::at_most("picard-imex-distance", finest, 1e-4)
            .param("alpha", params.alpha)
            .param("dt", cv.steps.last().copied())
            .param("T", 1.0),
        Check::at_least("picard-imex-order", cv.order, 1.8)
            .param("dts", &cv.steps)
            .param("distances", &cv.distances),
    ])
}

pub fn contraction_checks(study: &ContractionStudy) -> Vec<Check> {
    vec![
        Check::recorded("picard-threshold-amplitude", study.threshold)
            .param("bracket", [study.bracket.0, study.bracket.1])
            .param("evaluations", study.evaluations)
            .note("largest amplitude whose iteration converges within the budget"),
        Check::recorded("picard-threshold-estimate", study.estimate)
            .param("c1", study.c1)
            .param("c2", study.c2)
            .note("1/(4 C1 C2) in amplitude units, sup-in-time L2 surrogate for the X-norm"),
        Check::at_most("picard-contraction-small", study.small_ratio, 0.5)
            .param("amplitude", study.threshold * 0.1)
            .param("ratios", &study.small_ratios),
        Check::at_least("picard-contraction-length", study.small_ratio_count as f64, 5.0)
            .param("amplitude", study.threshold * 0.1),
        Check::at_least("picard-divergence-large", if study.large_diverged { 1.0 } else { 0.0 }, 1.0)
            .param("amplitude", study.threshold * 100.0)
            .param("diverged_at", study.large_diverged_at),
    ]
}

pub fn solver_suite(params: &SuiteParams) -> Result<Vec<Check>> {
    let mut checks = structure_identity(params)?;
    checks.extend(trivial_dynamics(params)?);
    checks.extend(smallness(params)?);
    checks.extend(conservation(params)?);
    checks.extend(cross_validation_checks(params)?);
    let grid = Grid::new(params.dim, 4.0, params.points)?;
    let study = contraction_study(grid, params.alpha, 0.05, 0.5, 60)?;
    checks.extend(contraction_checks(&study));
    Ok(checks)
}

/// Runs the selected suites into one report.
pub fn run_suites(suite: Suite, params: &SuiteParams, id: &str) -> Result<Report> {
    let mut report = Report::new(id, "verify-estimates");
    report.env("suite", suite.name());
    report.env("dim", params.dim);
    report.env("alpha", params.alpha);
    report.env("points", params.points);
    report.env("seed", params.seed);
    report.env("norm_tolerance", DEFAULT_TOL);
    if suite.includes(Suite::Varlebesgue) {
        report.extend(varlebesgue_suite(params)?);
    }
    if suite.includes(Suite::Kernels) {
        report.extend(kernels_suite(params)?);
    }
    if suite.includes(Suite::Solver) {
        report.extend(solver_suite(params)?);
    }
    let mut table = crate::report::Table::new(
        "checks",
        &["id", "measured", "predicted", "relation", "tolerance", "pass"],
    );
    for c in &report.checks {
        table.push(vec![
            c.id.clone().into(),
            c.measured.into(),
            c.predicted.into(),
            serde_json::to_value(c.relation)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default()
                .into(),
            c.tolerance.into(),
            c.pass.into(),
        ]);
    }
    report.table(table);
    Ok(report)
}
