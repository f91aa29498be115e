use super::*;
use crate::quad::{integrate_box, Range, Scheme};
use proptest::prelude::*;

type C = Complex<f64>;

fn q() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

fn g(center: f64, width: f64) -> RapidityVector<f64> {
    RapidityVector::gaussian(center, width, C::new(1.0, 0.0), 0.0).unwrap()
}

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Independent Gauss–Legendre oracle for `∫ f′(x) e^{i k x} dx` on a fine
/// fixed grid.
fn fourier_oracle(f: &TestFunction1D<f64>, k: C, lo: f64, hi: f64) -> C {
    let spec = QuadratureSpec { points_per_dim: 4096, scheme: Scheme::GaussLegendre, max_refinements: 2, ..q() };
    integrate_box(&[Range::Interval(lo, hi)], |x: &[f64]| (C::new(0.0, 1.0) * k * x[0]).exp() * f.derivative(x[0]), &spec)
        .unwrap()
        .value
}

#[test]
fn translation_by_zero_is_identity() {
    let psi = g(0.3, 0.7);
    let t = act_translation(&psi, 0.0);
    for th in [-2.0, 0.0, 1.5] {
        assert!(close(t.at(th), psi.at(th), 1e-15));
    }
}

#[test]
fn translations_compose() {
    let psi = g(0.0, 1.0);
    let a = act_translation(&act_translation(&psi, 1.0), 2.0);
    let b = act_translation(&psi, 3.0);
    for th in [-1.0, 0.0, 0.5, 2.0] {
        assert!(close(a.at(th), b.at(th), 1e-12));
    }
}

#[test]
fn borchers_commutation() {
    let psi = g(0.2, 0.8);
    for (x, t) in [(1.3, 0.1), (0.7, -0.2), (2.0, 0.05)] {
        let lhs = act_modular(&act_translation(&act_modular(&psi, -t), x), t);
        let rhs = act_translation(&psi, (-2.0 * std::f64::consts::PI * t).exp() * x);
        for th in [-1.5, -0.3, 0.0, 0.9, 2.2] {
            assert!(close(lhs.at(th), rhs.at(th), 1e-12), "x={x} t={t} th={th}");
        }
    }
}

#[test]
fn modular_flow_moves_gaussian_center() {
    let psi = g(0.0, 1.0);
    let flowed = act_modular(&psi, 0.1);
    let c = 2.0 * std::f64::consts::PI * 0.1;
    assert!(close(flowed.at(c), C::new(1.0, 0.0), 1e-15));
    assert!((flowed.window().0 - (psi.window().0 + c)).abs() < 1e-12);
}

#[test]
fn conjugation_is_involutive_and_fixes_real_vectors() {
    let psi = RapidityVector::gaussian(0.1, 0.9, C::new(0.4, -1.2), 0.7).unwrap();
    let jj = act_conjugation(&act_conjugation(&psi));
    let real = g(0.0, 1.0);
    let jr = act_conjugation(&real);
    for th in [-1.0, 0.0, 0.8] {
        assert!(close(jj.at(th), psi.at(th), 1e-15));
        assert!(close(jr.at(th), real.at(th), 1e-15));
    }
}

#[test]
fn two_dimensional_translation_factorizes() {
    let psi = g(0.0, 1.0);
    let a = act_translation_2d(&psi, LightRay::new(0.6, 0.0));
    let b = act_translation(&psi, 0.6);
    for th in [-1.0, 0.0, 1.0] {
        assert!(close(a.at(th), b.at(th), 1e-14));
    }
    let zero = act_translation_2d(&psi, LightRay::new(0.0, 0.0));
    assert!(close(zero.at(0.4), psi.at(0.4), 1e-15));
    // ξ = (ξ₀, 0) in Minkowski coordinates gives phase ξ₀ at θ = 0.
    let x = LightRay::from_minkowski(0.75, 0.0);
    assert!((x.momentum_phase(0.0) - 0.75f64).abs() < 1e-15);
    let (x0, x1): (f64, f64) = LightRay::new(0.3, -0.8).to_minkowski();
    assert!((x0 - (-0.5)).abs() < 1e-15 && (x1 - (-1.1)).abs() < 1e-15);
}

#[test]
fn rapidity_phase_matches_minkowski_product() {
    for (x0, x1, th) in [(0.4, -1.3, 0.2), (-0.7, 0.5, -1.1), (2.0, 1.0, 0.9)] {
        let direct: f64 = x0 * f64::cosh(th) - x1 * f64::sinh(th);
        let lr = LightRay::from_minkowski(x0, x1);
        assert!((lr.momentum_phase(th) - direct).abs() < 1e-13);
    }
}

#[test]
fn bump_derivatives_match_finite_differences() {
    let f = TestFunction1D::bump_derivative(1.0, 2.5, 1.7, 2).unwrap();
    let h = 1e-5;
    for x in [1.2f64, 1.5, 1.75, 2.1, 2.4] {
        let fd: f64 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
        assert!((fd - f.derivative(x)).abs() < 1e-6 * (1.0 + fd.abs()), "x={x}: {fd} vs {}", f.derivative(x));
    }
    assert_eq!(f.value(0.9), 0.0);
    assert_eq!(f.value(2.6), 0.0);
}

#[test]
fn hat_transform_matches_independent_quadrature() {
    let f = TestFunction1D::bump(1.0, 2.0, 1.0).unwrap();
    let h = hat_transform(&f, &q()).unwrap();
    assert!(h.is_hardy());
    for th in [-3.0, -1.0, 0.0, 1.0, 2.0] {
        let k = C::new(f64::exp(th), 0.0);
        let oracle = fourier_oracle(&f, k, 1.0, 2.0);
        assert!(close(h.at(th), oracle, 1e-10), "θ={th}: {} vs {oracle}", h.at(th));
    }
    let z = C::new(0.3, 2.0);
    let oracle = fourier_oracle(&f, z.exp(), 1.0, 2.0);
    assert!(close(h.at_complex(z).unwrap(), oracle, 1e-10));
}

#[test]
fn hat_transform_of_gaussian_has_closed_form() {
    let f = TestFunction1D::gaussian(0.5, 0.8, 1.3).unwrap();
    let h = hat_transform(&f, &q()).unwrap();
    assert!(!h.is_hardy());
    for th in [-2.0, 0.0, 1.0] {
        let oracle = fourier_oracle(&f, C::new(f64::exp(th), 0.0), -12.0, 13.0);
        assert!(close(h.at(th), oracle, 1e-10));
    }
}

#[test]
fn hat_transform_of_gaussian_derivative_matches_quadrature() {
    for order in [1usize, 3] {
        let f = TestFunction1D::gaussian_derivative(2.0, 0.3, 0.7, order).unwrap();
        let h = hat_transform(&f, &q()).unwrap();
        for th in [-1.0, 0.5, 2.0] {
            let oracle = fourier_oracle(&f, C::new(f64::exp(th), 0.0), -2.0, 6.0);
            assert!(close(h.at(th), oracle, 1e-9 * (1.0 + oracle.norm())), "order {order} θ={th}: {} vs {oracle}", h.at(th));
        }
    }
}

#[test]
fn gaussian_derivative_values_match_finite_differences() {
    let f1 = TestFunction1D::gaussian_derivative(0.4, 0.6, 1.0, 1).unwrap();
    let f2 = TestFunction1D::gaussian_derivative(0.4, 0.6, 1.0, 2).unwrap();
    let h = 1e-5;
    for x in [-0.5f64, 0.1, 0.4, 0.9, 1.6] {
        let fd = (f1.value(x + h) - f1.value(x - h)) / (2.0 * h);
        assert!((fd - f2.value(x)).abs() < 1e-6 * (1.0 + fd.abs()), "x={x}");
    }
}

#[test]
fn hat_transform_of_positive_bump_lies_in_standard_subspace() {
    let f = TestFunction1D::bump(1.0, 2.0, 1.0).unwrap();
    let h = hat_transform(&f, &q()).unwrap();
    let r = standard_subspace_residual(&h, &SampleGrid::uniform(-4.0, 4.0, 41)).unwrap();
    assert!(r <= 1e-8, "residual {r}");
    assert!(strip_growth(&h, &SampleGrid::uniform(-4.0, 4.0, 41)).unwrap() <= 1.0 + 1e-9);
}

#[test]
fn modulated_gaussian_violates_standard_subspace_condition() {
    let psi = RapidityVector::gaussian(0.0, 1.0, C::new(1.0, 0.0), 1.0).unwrap();
    let r = standard_subspace_residual(&psi, &SampleGrid::uniform(-3.0, 3.0, 31)).unwrap();
    assert!(r >= 1e-2);
}

#[test]
fn residual_needs_strip_evaluator() {
    let f = TestFunction1D::bump(1.0, 2.0, 1.0).unwrap();
    let j = act_conjugation(&hat_transform(&f, &q()).unwrap());
    let e = standard_subspace_residual(&j, &SampleGrid::uniform(-1.0, 1.0, 5)).unwrap_err();
    assert!(matches!(e, OneParticleError::StripUnavailable { .. }));
}

#[test]
fn positive_translations_keep_hardy_vectors_and_negative_ones_leave() {
    let f = TestFunction1D::bump(1.0, 2.0, 1.0).unwrap();
    let h = hat_transform(&f, &q()).unwrap();
    let grid = SampleGrid::uniform(-3.0, 3.0, 31);
    for x in [0.5, 2.0] {
        let t = act_translation(&h, x);
        assert!(t.is_hardy());
        assert!(standard_subspace_residual(&t, &grid).unwrap() <= 1e-8);
        assert!(strip_growth(&t, &grid).unwrap() <= 1.0 + 1e-9);
    }
    let back = act_translation(&h, -3.0);
    assert!(!back.is_hardy());
    // The boundary relation survives but the continuation grows in the strip.
    assert!(standard_subspace_residual(&back, &grid).unwrap() <= 1e-8);
    assert!(strip_growth(&back, &grid).unwrap() > 2.0);
}

#[test]
fn wedge_translations_keep_hardy_vectors() {
    let f = TestFunction2D::bump((0.5, 1.5), (-1.5, -0.5), 1.0).unwrap();
    let fp = plusminus_transform(&f, 1, &q()).unwrap();
    let grid = SampleGrid::uniform(-3.0, 3.0, 25);
    assert!(fp.is_hardy());
    for xi in [LightRay::new(0.4, -0.2), LightRay::new(1.0, -1.0)] {
        let t = act_translation_2d(&fp, xi);
        assert!(t.is_hardy());
        assert!(standard_subspace_residual(&t, &grid).unwrap() <= 1e-8);
        assert!(strip_growth(&t, &grid).unwrap() <= 1.0 + 1e-9);
    }
}

/// Direct 2D Gauss–Legendre integral in Minkowski coordinates.
fn plus_oracle(f: &TestFunction2D<f64>, th: f64, sign: f64) -> C {
    let spec = QuadratureSpec { points_per_dim: 384, scheme: Scheme::GaussLegendre, max_refinements: 1, ..q() };
    let r = integrate_box(
        &[Range::Interval(-7.0, 7.0), Range::Interval(-7.0, 7.0)],
        |x: &[f64]| {
            let v = f.value(LightRay::from_minkowski(x[0], x[1]));
            (C::new(0.0, sign) * (x[0] * th.cosh() - x[1] * th.sinh())).exp() * v
        },
        &spec,
    );
    match r {
        Ok(r) => r.value,
        Err(QuadError::NonConvergence { value_re, value_im, .. }) => C::new(value_re, value_im),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn plus_transform_matches_two_dimensional_oracle() {
    let f = TestFunction2D::bump((0.3, 1.3), (-1.1, -0.2), 1.0).unwrap();
    let fp = plusminus_transform(&f, 1, &q()).unwrap();
    for th in [-2.0, 0.0, 2.0] {
        let o = plus_oracle(&f, th, 1.0);
        assert!(close(fp.at(th), o, 1e-7), "θ={th}: {} vs {o}", fp.at(th));
    }
    let fm = plusminus_transform(&f, -1, &q()).unwrap();
    for th in [-1.0, 0.5] {
        assert!(close(fm.at(th), fp.at(th).conj(), 1e-13));
    }
    assert!(!fm.is_hardy());
}

#[test]
fn plus_transform_of_gaussian_is_closed_form() {
    let f = TestFunction2D::gaussian(LightRay::new(0.2, -0.4), 0.5, 1.0).unwrap();
    let fp = plusminus_transform(&f, 1, &q()).unwrap();
    for th in [-1.0, 0.0, 1.0] {
        let o = plus_oracle(&f, th, 1.0);
        assert!(close(fp.at(th), o, 1e-8), "θ={th}: {} vs {o}", fp.at(th));
    }
}

#[test]
fn plus_transform_of_wedge_bump_lies_in_standard_subspace() {
    let f = TestFunction2D::bump((0.3, 1.3), (-1.1, -0.2), 1.0).unwrap();
    assert!(f.wedge_flag());
    let fp = plusminus_transform(&f, 1, &q()).unwrap();
    let r = standard_subspace_residual(&fp, &SampleGrid::uniform(-3.0, 3.0, 25)).unwrap();
    assert!(r <= 1e-8, "{r}");
}

#[test]
fn inner_product_of_unit_gaussians() {
    let r = inner_product(&g(0.0, 1.0), &g(0.0, 1.0), &q()).unwrap();
    assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    let far = inner_product(&g(-30.0, 0.5), &g(30.0, 0.5), &q()).unwrap();
    assert_eq!(far.value, C::new(0.0, 0.0));
}

#[test]
fn tomita_maps_gaussian_through_the_strip() {
    let psi = RapidityVector::gaussian(0.0, 1.0, C::new(1.0, 0.0), 0.5).unwrap();
    let s = psi.tomita().unwrap();
    for th in [-1.0, 0.0, 0.7] {
        let z = C::new(th, std::f64::consts::PI);
        let expected = (-(z * z) / 2.0 + C::new(0.0, 0.5) * z).exp().conj();
        assert!(close(s.at(th), expected, 1e-12));
    }
}

#[test]
fn single_precision_vectors() {
    let psi = RapidityVector::<f32>::gaussian(0.0, 1.0, Complex::new(1.0, 0.0), 0.0).unwrap();
    let spec = QuadratureSpec::<f32> { target_abs_error: 1e-5, ..Default::default() };
    let r = inner_product(&psi, &psi, &spec).unwrap();
    assert!((r.value.re - std::f32::consts::PI.sqrt()).abs() < 1e-4);
}

proptest! {
    #[test]
    fn translations_are_unitary(x in -5.0f64..5.0, th in -3.0f64..3.0, c in -1.0f64..1.0) {
        let psi = g(c, 0.8);
        let t = act_translation(&psi, x);
        prop_assert!((t.at(th).norm() - psi.at(th).norm()).abs() < 1e-13);
    }

    #[test]
    fn translation_group_law(x in -3.0f64..3.0, y in -3.0f64..3.0, th in -2.0f64..2.0) {
        let psi = g(0.1, 1.0);
        let a = act_translation(&act_translation(&psi, x), y);
        let b = act_translation(&psi, x + y);
        prop_assert!(close(a.at(th), b.at(th), 1e-11));
    }

    #[test]
    fn modular_flow_is_a_group(s in -0.5f64..0.5, t in -0.5f64..0.5, th in -2.0f64..2.0) {
        let psi = g(0.0, 1.0);
        let a = act_modular(&act_modular(&psi, s), t);
        let b = act_modular(&psi, s + t);
        prop_assert!(close(a.at(th), b.at(th), 1e-12));
    }

    #[test]
    fn borchers_relation_holds(x in -3.0f64..3.0, t in -0.3f64..0.3, th in -2.0f64..2.0) {
        let psi = g(0.0, 1.0);
        let lhs = act_modular(&act_translation(&act_modular(&psi, -t), x), t);
        let rhs = act_translation(&psi, (-2.0 * std::f64::consts::PI * t).exp() * x);
        prop_assert!(close(lhs.at(th), rhs.at(th), 1e-11));
    }

    #[test]
    fn conjugation_commutes_with_modular_flow(t in -0.4f64..0.4, th in -2.0f64..2.0) {
        let psi = RapidityVector::gaussian(0.2, 0.9, C::new(0.3, 0.8), 1.1).unwrap();
        let a = act_conjugation(&act_modular(&psi, t));
        let b = act_modular(&act_conjugation(&psi), t);
        prop_assert!(close(a.at(th), b.at(th), 1e-13));
    }

    #[test]
    fn conjugation_reverses_translations(x in -3.0f64..3.0, th in -2.0f64..2.0) {
        let psi = g(0.0, 1.0);
        let a = act_conjugation(&act_translation(&psi, x));
        let b = act_translation(&act_conjugation(&psi), -x);
        prop_assert!(close(a.at(th), b.at(th), 1e-13));
    }
}
