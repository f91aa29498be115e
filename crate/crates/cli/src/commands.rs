use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;
use warped_fields::correlators::{modular_matrix_element, run_limit_report, scan_product_defect, CorrelatorError, DefectReport};
use warped_fields::fock_oracle::{oracle_matrix_element, OracleError};
use warped_fields::quad::{IntegralResult, QuadError, QuadratureSpec};
use warped_fields::wick::{wick_expand, BlockLayout, ContractionType, MAX_POINTS};
use warped_fields::{Complex64, LimitReportF64};

use crate::output::{write_atomic, Staged};
use crate::scenario::{Format, Scenario, ScenarioKind};
use crate::CliError;

/// Largest point count the Fock oracle is asked to handle.
pub const ORACLE_MAX_POINTS: usize = 6;

fn correlator_error(e: CorrelatorError) -> CliError {
    match e {
        CorrelatorError::InvalidTask(_) | CorrelatorError::Wick(_) => CliError::Config(e.to_string()),
        CorrelatorError::Quad(QuadError::InvalidSpec(_)) => CliError::Config(e.to_string()),
        _ => CliError::Numeric(e.to_string()),
    }
}

fn require_kind(scn: &Scenario, kind: ScenarioKind) -> Result<(), CliError> {
    if scn.kind != kind {
        return Err(CliError::Config(format!("scenario `{}` is of kind {:?}, this command needs {kind:?}", scn.name, scn.kind)));
    }
    Ok(())
}

/// Tag used in output file names, e.g. `kappa1` or `kappa0.5`.
pub fn kappa_tag(kappa: f64) -> String {
    format!("kappa{kappa}")
}

/// One report per κ of the scenario. Fails on any unresolved boost.
pub fn limits(scn: &Scenario, quad: &QuadratureSpec<f64>) -> Result<Vec<LimitReportF64>, CliError> {
    require_kind(scn, ScenarioKind::Limits)?;
    let mut reports = Vec::with_capacity(scn.kappa_values.len());
    for &kappa in &scn.kappa_values {
        let task = scn.task(kappa, quad)?;
        let report = run_limit_report(&task).map_err(correlator_error)?;
        let unresolved: Vec<f64> = report.rows.iter().filter(|r| !r.resolution_ok).map(|r| r.t).collect();
        if !unresolved.is_empty() {
            return Err(CliError::Numeric(format!(
                "kappa {kappa}: quadrature cannot resolve the phase at t = {unresolved:?}; raise quad.max_phase_work or shrink t_grid"
            )));
        }
        reports.push(report);
    }
    Ok(reports)
}

pub fn limits_summary(reports: &[LimitReportF64]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "layout ({}) kappa {} terms {} target {:.6e}{}", r.layout, r.kappa, r.term_count, r.target.value, if r.odd { " [odd]" } else { "" });
        let _ = writeln!(s, "{:>6} {:>14} {:>12} {:>10} {:>10} {:>10} {:>10}", "t", "|total|", "residual", "budget", "|I|", "|III|", "|II+IV|");
        for row in &r.rows {
            let ii_iv = row.of_type(ContractionType::II).value + row.of_type(ContractionType::IV).value;
            let _ = writeln!(
                s,
                "{:>6} {:>14.6e} {:>12.4e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e}",
                row.t,
                row.total.value.norm(),
                row.residual,
                row.error_budget,
                row.of_type(ContractionType::I).value.norm(),
                row.of_type(ContractionType::III).value.norm(),
                ii_iv.norm()
            );
        }
    }
    s
}

pub fn write_limits(out: &Path, scn: &Scenario, reports: &[LimitReportF64]) -> Result<Vec<std::path::PathBuf>, CliError> {
    let mut staged = Vec::new();
    for r in reports {
        let stem = format!("{}_{}", scn.name, kappa_tag(r.kappa));
        if scn.writes(Format::Csv) {
            staged.push(Staged::new(out.join(format!("{stem}.csv")), r.to_csv()));
        }
        if scn.writes(Format::Json) {
            let mut doc = r.to_json();
            doc["scenario"] = json!(scn.name);
            staged.push(Staged::new(out.join(format!("{stem}.json")), pretty(&doc)));
        }
    }
    write_atomic(out, staged)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrossCheckRow {
    pub kappa: f64,
    pub t: f64,
    pub wick: IntegralResult<f64>,
    pub oracle: Complex64,
    pub oracle_error: f64,
    pub leakage: f64,
    pub oracle_points: usize,
    pub diff: f64,
    /// Wick error + oracle refinement error + leakage.
    pub budget: f64,
    pub verdict: Verdict,
}

impl CrossCheckRow {
    /// `budget / max(|wick|, tiny)`.
    pub fn relative_budget(&self) -> f64 {
        self.budget / self.wick.value.norm().max(f64::MIN_POSITIVE)
    }
}

/// Wick pipeline against the Fock oracle at every `(κ, t)` of the scenario.
pub fn cross_check(scn: &Scenario, quad: &QuadratureSpec<f64>) -> Result<Vec<CrossCheckRow>, CliError> {
    require_kind(scn, ScenarioKind::Limits)?;
    let n = scn.layout()?.total();
    if n > ORACLE_MAX_POINTS {
        return Err(CliError::Config(format!(
            "cross-check refused: N = {n} field factors exceeds the Fock oracle limit of {ORACLE_MAX_POINTS} \
             (the discretized {}-particle sector would not fit in memory)",
            n / 2
        )));
    }
    let opts = scn.oracle_options();
    let mut rows = Vec::new();
    for &kappa in &scn.kappa_values {
        let task = scn.task(kappa, quad)?;
        for &t in &scn.grid.cross_check_t {
            let wick = modular_matrix_element(&task, t).map_err(correlator_error)?;
            let o = oracle_matrix_element(&task, t, &opts).map_err(|e| match e {
                OracleError::MemoryGuard { .. } | OracleError::InvalidGrid(_) => CliError::Config(format!("cross-check refused: {e}")),
                OracleError::OneParticle(_) => CliError::Numeric(e.to_string()),
            })?;
            let diff = (wick.value - o.value).norm();
            let budget = wick.error_estimate + o.error_estimate + o.leakage;
            let scale = wick.value.norm().max(1.0);
            let verdict = if o.leakage > scn.grid.leakage_threshold * scale {
                Verdict::Inconclusive
            } else if diff <= budget {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            rows.push(CrossCheckRow {
                kappa,
                t,
                wick,
                oracle: o.value,
                oracle_error: o.error_estimate,
                leakage: o.leakage,
                oracle_points: o.points,
                diff,
                budget,
                verdict,
            });
        }
    }
    Ok(rows)
}

pub const CROSSCHECK_HEADER: &str =
    "kappa,t,re_wick,im_wick,wick_error,re_oracle,im_oracle,oracle_error,leakage,oracle_points,abs_diff,budget,verdict";

pub fn cross_check_csv(rows: &[CrossCheckRow]) -> String {
    let mut s = String::from(CROSSCHECK_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{}",
            r.kappa,
            r.t,
            r.wick.value.re,
            r.wick.value.im,
            r.wick.error_estimate,
            r.oracle.re,
            r.oracle.im,
            r.oracle_error,
            r.leakage,
            r.oracle_points,
            r.diff,
            r.budget,
            r.verdict.label()
        );
    }
    s
}

pub fn cross_check_table(rows: &[CrossCheckRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>6} {:>6} {:>26} {:>26} {:>10} {:>10} {:>5} {}", "kappa", "t", "wick", "oracle", "|diff|", "budget", "P", "verdict");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>6} {:>6} {:>26} {:>26} {:>10.2e} {:>10.2e} {:>5} {}",
            r.kappa,
            r.t,
            format!("{:.9e}", r.wick.value),
            format!("{:.9e}", r.oracle),
            r.diff,
            r.budget,
            r.oracle_points,
            r.verdict.label()
        );
    }
    s
}

/// Canonical partition listing with type tags, then per-type counts.
pub fn partitions(layout: &BlockLayout) -> Result<String, CliError> {
    let n = layout.total();
    if n % 2 == 1 {
        return Err(CliError::Config(format!("layout ({layout}) has odd N = {n}; there are no pair partitions")));
    }
    if n > MAX_POINTS {
        return Err(CliError::Config(format!("layout ({layout}) has N = {n} above the cap of {MAX_POINTS}")));
    }
    let signs: Vec<i8> = std::iter::repeat(0)
        .take(layout.a)
        .chain(std::iter::repeat(1).take(layout.n))
        .chain(std::iter::repeat(-1).take(layout.m))
        .chain(std::iter::repeat(0).take(layout.b))
        .collect();
    let e = wick_expand(layout, &signs).map_err(|e| CliError::Config(e.to_string()))?;
    let mut s = e.dump();
    let counts: Vec<String> = ContractionType::ALL.iter().map(|&k| format!("{k:?}={}", e.count(k))).collect();
    let _ = writeln!(s, "counts: {} total={}", counts.join(" "), e.terms.len());
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct DefectOutcome {
    pub kappa: f64,
    pub best: usize,
    pub scan: Vec<DefectReport<f64>>,
    pub conclusive: bool,
    pub min_significance: f64,
}

impl DefectOutcome {
    pub fn best(&self) -> &DefectReport<f64> {
        &self.scan[self.best]
    }
}

/// Offset scan of `ω(AB) − ω(A)ω(B)` for every κ of the scenario.
pub fn product_defect(scn: &Scenario, quad: &QuadratureSpec<f64>) -> Result<Vec<DefectOutcome>, CliError> {
    require_kind(scn, ScenarioKind::ProductDefect)?;
    let spec = scn.defect.as_ref().expect("validated product-defect scenario has a defect table");
    let mut out = Vec::new();
    for &kappa in &scn.kappa_values {
        let (a, b) = scn.defect_pair(kappa, quad)?;
        let (best, scan) = scan_product_defect(&a, &b, &spec.offsets, quad).map_err(correlator_error)?;
        let exact_zero = b.is_empty();
        let conclusive = exact_zero || scan[best].significance() >= spec.min_significance;
        out.push(DefectOutcome { kappa, best, scan, conclusive, min_significance: spec.min_significance });
    }
    Ok(out)
}

pub fn defect_summary(outcomes: &[DefectOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        let r = o.best();
        let _ = writeln!(s, "kappa {} best offset {}", o.kappa, r.offset);
        let _ = writeln!(s, "  omega(AB)          = {:.12e} ± {:.1e}", r.ab.value, r.ab.error_estimate);
        let _ = writeln!(s, "  omega(A) omega(B)  = {:.12e} ± {:.1e}", r.product.value, r.product.error_estimate);
        let _ = writeln!(s, "  defect             = {:.12e} ± {:.1e}", r.defect.value, r.defect.error_estimate);
        let _ = writeln!(s, "  significance       = {:.3e}", r.significance());
        match r.s_coefficient() {
            Some(c) => {
                let _ = writeln!(s, "  S coefficient      = {c:.12e}");
            }
            None => {
                let _ = writeln!(s, "  S coefficient      = undefined (defect is exactly zero)");
            }
        }
        if o.conclusive {
            let _ = writeln!(s, "  verdict: conclusive");
        } else {
            let _ = writeln!(
                s,
                "  verdict: inconclusive, defect below {}x its error over offsets {:?}; \
                 scan smaller offsets or move the supports toward the wedge edges",
                o.min_significance,
                o.scan.iter().map(|r| r.offset).collect::<Vec<_>>()
            );
        }
    }
    s
}

fn result_json(r: &IntegralResult<f64>) -> serde_json::Value {
    json!({ "re": r.value.re, "im": r.value.im, "error": r.error_estimate })
}

pub fn defect_json(scn: &Scenario, outcomes: &[DefectOutcome]) -> serde_json::Value {
    let per_kappa: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| {
            let scan: Vec<serde_json::Value> = o
                .scan
                .iter()
                .map(|r| {
                    json!({
                        "offset": r.offset,
                        "ab": result_json(&r.ab),
                        "a": result_json(&r.a),
                        "b": result_json(&r.b),
                        "product": result_json(&r.product),
                        "defect": result_json(&r.defect),
                        "significance": if r.significance().is_finite() { json!(r.significance()) } else { json!(null) },
                        "s_coefficient": r.s_coefficient().map(|c| json!({ "re": c.re, "im": c.im })),
                    })
                })
                .collect();
            json!({ "kappa": o.kappa, "best": o.best, "conclusive": o.conclusive, "min_significance": o.min_significance, "scan": scan })
        })
        .collect();
    json!({ "scenario": scn.name, "results": per_kappa })
}

pub fn write_defect(out: &Path, scn: &Scenario, outcomes: &[DefectOutcome]) -> Result<Vec<std::path::PathBuf>, CliError> {
    let mut staged = Vec::new();
    if scn.writes(Format::Json) {
        staged.push(Staged::new(out.join(format!("{}_defect.json", scn.name)), pretty(&defect_json(scn, outcomes))));
    }
    if scn.writes(Format::Csv) {
        let mut s = String::from("kappa,offset,re_ab,im_ab,re_product,im_product,re_defect,im_defect,defect_error\n");
        for o in outcomes {
            for r in &o.scan {
                let _ = writeln!(
                    s,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    o.kappa, r.offset, r.ab.value.re, r.ab.value.im, r.product.value.re, r.product.value.im, r.defect.value.re,
                    r.defect.value.im, r.defect.error_estimate
                );
            }
        }
        staged.push(Staged::new(out.join(format!("{}_defect.csv", scn.name)), s));
    }
    write_atomic(out, staged)
}

pub fn write_cross_check(out: &Path, scn: &Scenario, rows: &[CrossCheckRow]) -> Result<Vec<std::path::PathBuf>, CliError> {
    write_atomic(out, vec![Staged::new(out.join(format!("{}_crosscheck.csv", scn.name)), cross_check_csv(rows))])
}
