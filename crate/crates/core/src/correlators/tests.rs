use num_complex::Complex;

use super::*;
use crate::fock_oracle::{oracle_matrix_element, oracle_sequence, OracleOptions};
use crate::one_particle::RapidityVector;
use crate::wick::{classify, ContractionType, Deformation, Field, FieldMonomial};

type C = Complex<f64>;

fn g(c: f64, w: f64, k: f64) -> RapidityVector<f64> {
    RapidityVector::gaussian(c, w, C::new(1.0, 0.0), k).unwrap()
}

fn plain(v: RapidityVector<f64>) -> Field<f64> {
    Field::segal(Deformation::None, v)
}

/// `(1,1,1,1)` with unmodulated data, so every type is present.
fn task_1111(kappa: f64) -> CorrelatorTask<f64> {
    CorrelatorTask::new(
        vec![plain(g(0.0, 0.3, 0.0))],
        FieldMonomial::segal(kappa, Deformation::Plus, &[g(0.2, 0.3, 1.0)]),
        FieldMonomial::segal(kappa, Deformation::Minus, &[g(-0.1, 0.3, 0.5)]),
        vec![plain(g(0.1, 0.3, 0.0))],
    )
}

fn task_0220(kappa: f64) -> CorrelatorTask<f64> {
    CorrelatorTask::new(
        vec![],
        FieldMonomial::segal(kappa, Deformation::Plus, &[g(0.0, 0.3, 0.0), g(0.3, 0.3, 1.0)]),
        FieldMonomial::segal(kappa, Deformation::Minus, &[g(-0.2, 0.3, 0.0), g(0.1, 0.3, -1.0)]),
        vec![],
    )
}

fn quad() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

#[test]
fn trivial_vacuum_values() {
    let empty = FieldMonomial::<f64>::new(1.0, vec![]);
    assert_eq!(vacuum_npoint(&empty, &quad()).unwrap().value, C::new(1.0, 0.0));
    let one = FieldMonomial::segal(1.0, Deformation::Plus, &[g(0.0, 0.3, 0.0)]);
    assert_eq!(vacuum_npoint(&one, &quad()).unwrap().value, C::new(0.0, 0.0));
    let zero = FieldMonomial::segal(1.0, Deformation::Plus, &[RapidityVector::zero(), g(0.0, 0.3, 0.0)]);
    let r = vacuum_npoint(&zero, &quad()).unwrap();
    assert_eq!((r.value, r.error_estimate), (C::new(0.0, 0.0), 0.0));
}

#[test]
fn two_point_is_kappa_independent() {
    let v = [g(0.0, 0.4, 0.0), g(0.3, 0.5, 2.0)];
    let base = vacuum_npoint(&FieldMonomial::segal(0.0, Deformation::Plus, &v), &quad()).unwrap().value;
    for kappa in [0.5, 2.0] {
        let w = vacuum_npoint(&FieldMonomial::segal(kappa, Deformation::Plus, &v), &quad()).unwrap().value;
        assert!((w - base).norm() <= 1e-12 * base.norm());
    }
}

#[test]
fn four_point_of_one_sign_depends_on_kappa_in_both_pipelines() {
    let v = [g(0.0, 0.3, 0.0), g(0.2, 0.3, 1.0), g(-0.2, 0.3, 0.0), g(0.1, 0.3, -1.0)];
    let at = |kappa: f64| FieldSequence::from_monomial(&FieldMonomial::segal(kappa, Deformation::Plus, &v));
    let (w0, w2) = (expectation(&at(0.0), &quad()).unwrap().value, expectation(&at(2.0), &quad()).unwrap().value);
    let o2 = oracle_sequence(&at(2.0), &OracleOptions::default()).unwrap().value;
    assert!((w2 - o2).norm() < 1e-9);
    assert!((w2 - w0).norm() > 1e-3 * w0.norm());
}

#[test]
fn t_zero_matrix_element_is_vacuum_npoint() {
    let x = FieldMonomial::segal(1.0, Deformation::Plus, &[g(0.0, 0.3, 0.0), g(0.3, 0.4, 1.0)]);
    let task = CorrelatorTask::new(vec![], x.clone(), FieldMonomial::new(1.0, vec![]), vec![]);
    let a = modular_matrix_element(&task, 0.0).unwrap().value;
    let b = vacuum_npoint(&x, &quad()).unwrap().value;
    assert!((a - b).norm() < 1e-15);
}

#[test]
fn wick_matches_oracle_on_small_layouts() {
    for kappa in [0.0, 1.0] {
        for task in [task_1111(kappa), task_0220(kappa)] {
            for t in [0.0, 0.5] {
                let w = modular_matrix_element(&task, t).unwrap();
                let o = oracle_matrix_element(&task, t, &OracleOptions::default()).unwrap();
                let budget = w.error_estimate + o.error_estimate + o.leakage + 1e-12;
                assert!((w.value - o.value).norm() <= budget.max(1e-9 * o.value.norm()), "{:?} {} {}", task.layout(), w.value, o.value);
            }
        }
    }
}

#[test]
fn flow_routes_agree() {
    let task = task_1111(1.0);
    for t in [0.5, 1.0, -1.5] {
        let reduced = expectation_with(&task.sequence(t), &task.quad, FlowRoute::Reduced).unwrap();
        let physical = expectation_with(&task.sequence(t), &task.quad, FlowRoute::Physical).unwrap();
        let inverse = modular_matrix_element_inverse_flow(&task, t).unwrap();
        let tol = 2.0 * (reduced.error_estimate + physical.error_estimate) + 1e-13;
        assert!((reduced.value - physical.value).norm() <= tol);
        assert!((reduced.value - inverse.value).norm() <= 2.0 * (reduced.error_estimate + inverse.error_estimate) + 1e-13);
    }
}

#[test]
fn adjoint_sequence_conjugates() {
    let seq = task_1111(1.0).sequence(0.7);
    let a = expectation(&seq, &quad()).unwrap();
    let b = expectation(&seq.adjoint(), &quad()).unwrap();
    assert!((a.value - b.value.conj()).norm() <= 2.0 * (a.error_estimate + b.error_estimate) + 1e-14);
}

#[test]
fn inner_types_are_boost_invariant() {
    let task = task_0220(1.0).with_t_grid(vec![0.0, 1.0, 2.0, -2.0]);
    let report = run_limit_report(&task).unwrap();
    for kind in [ContractionType::II, ContractionType::IV] {
        let (var, err) = report.variation(kind);
        assert!(var <= 2.0 * err + 1e-15, "{kind}: {var} {err}");
    }
    // a = b = 0: σ_t(XY′) has the same vacuum expectation as XY′, and the
    // target is ω(XY′), so the residual vanishes for every t and κ.
    for r in &report.rows {
        assert!(r.residual <= 2.0 * r.error_budget + 1e-15);
    }
}

#[test]
fn type_one_decreases_with_boost() {
    let task = task_1111(1.0);
    let e = task.expansion().unwrap();
    let p = e.terms.iter().find(|t| t.kind == ContractionType::I).unwrap().partition.clone();
    let mut last = f64::INFINITY;
    for t in [0.0, 1.0, 2.0, 3.0] {
        let w = evaluate_w(&task, &p, t).unwrap().value.norm();
        assert!(w < last, "{t}: {w} !< {last}");
        last = w;
    }
}

#[test]
fn target_special_cases() {
    let empty = |k: f64| FieldMonomial::<f64>::new(k, vec![]);
    let l = vec![plain(g(0.0, 0.3, 0.0)), plain(g(0.2, 0.3, 0.0))];
    let r = vec![plain(g(0.1, 0.3, 1.0)), plain(g(-0.1, 0.3, 0.0))];
    let task = CorrelatorTask::new(l.clone(), empty(1.0), empty(1.0), r.clone());
    let mut lr = FieldSequence::new(1.0, vec![]);
    lr.push_block(&l, 0.0);
    lr.push_block(&r, 0.0);
    let want = expectation(&lr, &quad()).unwrap().value;
    assert!((limit_target(&task).unwrap().value - want).norm() < 1e-14);
    let report = run_limit_report(&task.with_t_grid(vec![0.0, 2.0])).unwrap();
    assert!(report.rows.iter().all(|r| r.residual <= 1e-13));

    let vac = task_0220(1.0);
    let mut xy = FieldSequence::new(1.0, vec![]);
    xy.push_block(&vac.x.factors, 0.0);
    xy.push_block(&vac.y_prime.factors, 0.0);
    let want = expectation(&xy, &quad()).unwrap().value;
    assert!((limit_target(&vac).unwrap().value - want).norm() < 1e-14);
}

#[test]
fn exchanged_target_is_the_same_number() {
    let w = limit_ingredients(&task_1111(1.0)).unwrap();
    let (a, b) = (target_from(&w), target_exchanged(&w));
    assert!((a.value - b.value).norm() <= 1e-15 + a.error_estimate + b.error_estimate);
}

#[test]
fn per_type_sums_add_up() {
    let task = task_1111(1.0).with_t_grid(vec![0.0, 1.0]);
    let report = run_limit_report(&task).unwrap();
    for (row, &t) in report.rows.iter().zip(&task.t_grid) {
        let direct = modular_matrix_element(&task, t).unwrap();
        assert!((row.total.value - direct.value).norm() <= 1e-14);
    }
}

#[test]
fn undeformed_type_three_is_constant() {
    let task = task_1111(0.0).with_t_grid(vec![0.0, 2.0, 4.0]);
    let report = run_limit_report(&task).unwrap();
    let (var, err) = report.variation(ContractionType::III);
    assert!(var <= 2.0 * err + 1e-14);
    assert!(report.rows[0].of_type(ContractionType::III).value.norm() > 1e-3);
}

#[test]
fn odd_layout_reports_exact_zeros() {
    let task = CorrelatorTask::new(
        vec![plain(g(0.0, 0.3, 0.0))],
        FieldMonomial::segal(1.0, Deformation::Plus, &[g(0.0, 0.3, 0.0)]),
        FieldMonomial::segal(1.0, Deformation::Minus, &[g(0.0, 0.3, 0.0)]),
        vec![],
    )
    .with_t_grid(vec![0.0, 1.0]);
    let report = run_limit_report(&task).unwrap();
    assert!(report.odd);
    assert!(report.rows.iter().all(|r| r.total.value == C::new(0.0, 0.0)));
    assert!(report.to_csv().lines().nth(1).unwrap().ends_with("true,true"));
}

#[test]
fn empty_grid_is_rejected() {
    assert!(matches!(run_limit_report(&task_1111(1.0).with_t_grid(vec![])), Err(CorrelatorError::InvalidTask(_))));
}

#[test]
fn csv_has_one_row_per_boost() {
    let report = run_limit_report(&task_1111(1.0).with_t_grid(vec![0.0, 0.5, 1.0])).unwrap();
    let csv = report.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(lines[1].starts_with("0.0000000000000000e0,"));
    let json = report.to_json();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn classify_evaluate_w_consistency() {
    let task = task_1111(1.0);
    let e = task.expansion().unwrap();
    let mut total = C::new(0.0, 0.0);
    for term in &e.terms {
        assert_eq!(classify(&term.partition, &task.layout()).unwrap(), term.kind);
        total += evaluate_w(&task, &term.partition, 0.4).unwrap().value;
    }
    assert!((total - modular_matrix_element(&task, 0.4).unwrap().value).norm() < 1e-14);
}

#[test]
fn product_defect_special_cases() {
    let a = FieldMonomial::segal(1.0, Deformation::Plus, &[g(0.0, 0.3, 0.0), g(0.2, 0.3, 1.0)]);
    let empty = FieldMonomial::new(1.0, vec![]);
    assert_eq!(product_state_defect(&a, &empty, &quad()).unwrap().defect.value, C::new(0.0, 0.0));

    let a1 = FieldMonomial::segal(1.0, Deformation::Plus, &[g(0.0, 0.3, 0.0)]);
    let b1 = FieldMonomial::segal(1.0, Deformation::Minus, &[g(0.1, 0.3, 0.0)]);
    let d = product_state_defect(&a1, &b1, &quad()).unwrap();
    assert!((d.defect.value - d.ab.value).norm() == 0.0);
    assert!(d.ab.value.norm() > 0.1);

    let b = FieldMonomial::segal(1.0, Deformation::Minus, &[g(0.1, 0.3, 0.0), g(-0.2, 0.3, 0.5)]);
    let (best, all) = scan_product_defect(&a, &b, &[0.0, 0.5, 1.0], &quad()).unwrap();
    assert_eq!(all.len(), 3);
    assert!(all[best].significance() > 10.0);
    assert!(all[best].s_coefficient().is_some());
}
