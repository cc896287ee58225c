use fkslab_core::operators::maximal_function;
use fkslab_core::spectral::{divergence, grad_inv_laplacian, heat_propagate};
use fkslab_core::varlebesgue::{luxemburg_norm, modular, verify_holder, Domain, ExponentField, DEFAULT_TOL};
use fkslab_core::{Field, Grid};
use proptest::prelude::*;

const N: usize = 16;

fn grid() -> Grid {
    Grid::new(2, 2.0, N).unwrap()
}

fn field() -> impl Strategy<Value = Field> {
    prop::collection::vec(-3.0f64..3.0, N * N).prop_map(|v| Field::new(grid(), v).unwrap())
}

fn exponent() -> impl Strategy<Value = ExponentField> {
    exponent_above(1.2)
}

fn exponent_above(floor: f64) -> impl Strategy<Value = ExponentField> {
    (floor..4.0, 0.0f64..3.0, 0.3f64..2.0).prop_map(|(lo, bump, width)| {
        ExponentField::from_fn(Domain::Grid(grid()), Some(lo), |x| {
            lo + bump * (-(x[0] * x[0] + x[1] * x[1]) / (width * width)).exp()
        })
        .unwrap()
    })
}

fn max_diff(a: &Field, b: &Field) -> f64 {
    a.zip_with(b, |x, y| x - y).unwrap().max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_round_trip(f in field()) {
        let back = f.forward().inverse();
        prop_assert!(max_diff(&f, &back) <= 1e-13 * f.max_abs().max(1.0));
    }

    #[test]
    fn heat_semigroup_law(f in field(), s in 0.01f64..0.5, t in 0.01f64..0.5, alpha in 1.05f64..2.0) {
        let two_step = heat_propagate(&heat_propagate(&f, s, alpha).unwrap(), t, alpha).unwrap();
        let one_step = heat_propagate(&f, s + t, alpha).unwrap();
        prop_assert!(max_diff(&two_step, &one_step) <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn heat_flow_preserves_mean_and_contracts_l2(f in field(), t in 0.01f64..1.0, alpha in 1.05f64..2.0) {
        let g = heat_propagate(&f, t, alpha).unwrap();
        prop_assert!((g.mean() - f.mean()).abs() <= 1e-12 * f.max_abs().max(1.0));
        prop_assert!(g.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn inverse_gradient_reduces_to_mean_free_density(f in field()) {
        // Nyquist planes are invisible to odd derivatives, so they are removed first.
        let nyquist = (N / 2) as i64;
        let keep = |drop_mean: bool| {
            move |_: &[f64; 3], m: &[i64; 3]| {
                let off = m[0].abs() == nyquist || m[1].abs() == nyquist || (drop_mean && m[0] == 0 && m[1] == 0);
                num_complex::Complex64::new(if off { 0.0 } else { 1.0 }, 0.0)
            }
        };
        let filtered = f.forward().map_symbol(keep(false)).inverse();
        let target = f.forward().map_symbol(keep(true)).inverse();
        let v = grad_inv_laplacian(&filtered).unwrap();
        let u = divergence(&v).unwrap().map(|x| -x);
        prop_assert!(max_diff(&u, &target) <= 1e-11 * f.max_abs().max(1.0));
    }

    #[test]
    fn luxemburg_homogeneous(f in field(), p in exponent(), c in 0.1f64..10.0) {
        let a = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap().value;
        let b = luxemburg_norm(&f.scaled(-c), &p, DEFAULT_TOL).unwrap().value;
        prop_assert!((b / (c * a) - 1.0).abs() <= 4.0 * DEFAULT_TOL);
    }

    #[test]
    fn luxemburg_triangle(f in field(), g in field(), p in exponent()) {
        let sum = f.zip_with(&g, |a, b| a + b).unwrap();
        let lhs = luxemburg_norm(&sum, &p, DEFAULT_TOL).unwrap().value;
        let rhs = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap().value + luxemburg_norm(&g, &p, DEFAULT_TOL).unwrap().value;
        prop_assert!(lhs <= rhs * (1.0 + 4.0 * DEFAULT_TOL));
    }

    #[test]
    fn luxemburg_unit_modular(f in field(), p in exponent()) {
        let n = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap();
        prop_assume!(n.value > 0.0);
        let rho = modular(&f.scaled(1.0 / n.value), &p).unwrap();
        prop_assert!((rho - 1.0).abs() <= 1e-8, "rho {}", rho);
    }

    #[test]
    fn luxemburg_lattice_property(f in field(), shrink in 0.0f64..1.0, p in exponent()) {
        let g = f.map(|x| x * shrink);
        let a = luxemburg_norm(&g, &p, DEFAULT_TOL).unwrap().value;
        let b = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap().value;
        prop_assert!(a <= b * (1.0 + 4.0 * DEFAULT_TOL));
    }

    #[test]
    fn holder_ratio_at_most_two(f in field(), g in field(), p1 in exponent_above(2.0), p2 in exponent_above(2.0)) {
        prop_assume!(f.max_abs() > 0.0 && g.max_abs() > 0.0);
        let ratio = verify_holder(&f, &g, &p1, &p2, DEFAULT_TOL).unwrap();
        prop_assert!(ratio <= 2.0, "ratio {}", ratio);
    }

    #[test]
    fn maximal_function_is_sublinear_and_dominating(f in field(), g in field()) {
        let mf = maximal_function(&f).unwrap();
        let mg = maximal_function(&g).unwrap();
        let msum = maximal_function(&f.zip_with(&g, |a, b| a + b).unwrap()).unwrap();
        for i in 0..f.values().len() {
            prop_assert!(msum.values()[i] <= mf.values()[i] + mg.values()[i] + 1e-12);
            prop_assert!(mf.values()[i] >= f.values()[i].abs());
        }
    }
}
