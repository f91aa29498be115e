use std::fmt::Write as _;

use num_complex::Complex;
use serde_json::{json, Value};

use crate::quad::IntegralResult;
use crate::scalar::{to_f64, Real};
use crate::wick::{BlockLayout, ContractionType};

/// Values at one boost.
#[derive(Clone, Copy, Debug)]
pub struct ReportRow<T> {
    pub t: T,
    /// Indexed like [`ContractionType::ALL`].
    pub per_type: [IntegralResult<T>; 4],
    pub total: IntegralResult<T>,
    /// `|total − target|`.
    pub residual: T,
    /// Error estimate of `total` plus that of the target.
    pub error_budget: T,
    pub resolution_ok: bool,
}

impl<T: Real> ReportRow<T> {
    pub(crate) fn new(t: T, per_type: [IntegralResult<T>; 4], total: IntegralResult<T>, target: &IntegralResult<T>) -> Self {
        Self {
            t,
            per_type,
            total,
            residual: (total.value - target.value).norm(),
            error_budget: total.error_estimate + target.error_estimate,
            resolution_ok: true,
        }
    }

    pub(crate) fn exact_zero(t: T) -> Self {
        Self {
            t,
            per_type: [IntegralResult::zero(); 4],
            total: IntegralResult::zero(),
            residual: T::zero(),
            error_budget: T::zero(),
            resolution_ok: true,
        }
    }

    pub(crate) fn unresolved(t: T) -> Self {
        let nan = IntegralResult { value: Complex::new(T::nan(), T::nan()), error_estimate: T::nan(), evaluations: 0 };
        Self { t, per_type: [nan; 4], total: nan, residual: T::nan(), error_budget: T::nan(), resolution_ok: false }
    }

    pub fn of_type(&self, kind: ContractionType) -> &IntegralResult<T> {
        &self.per_type[ContractionType::ALL.iter().position(|&k| k == kind).unwrap()]
    }
}

#[derive(Clone, Debug)]
pub struct LimitReport<T> {
    pub layout: BlockLayout,
    pub kappa: T,
    /// Odd number of factors: every row is an exact zero.
    pub odd: bool,
    pub target: IntegralResult<T>,
    pub term_count: usize,
    pub rows: Vec<ReportRow<T>>,
}

pub const CSV_HEADER: &str = "t,re_I,im_I,re_II,im_II,re_III,im_III,re_IV,im_IV,re_total,im_total,re_target,im_target,abs_residual,error_budget,odd,resolution_ok";

fn num<T: Real>(x: T) -> String {
    let v = to_f64(x);
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

impl<T: Real> LimitReport<T> {
    pub fn row_at(&self, t: T) -> Option<&ReportRow<T>> {
        self.rows.iter().find(|r| r.t == t)
    }

    pub fn all_resolved(&self) -> bool {
        self.rows.iter().all(|r| r.resolution_ok)
    }

    /// `max_t |series(t) − series(t₀)|` for one type over resolved rows,
    /// with `t₀` the first row, and the largest error estimate seen.
    pub fn variation(&self, kind: ContractionType) -> (T, T) {
        let rows: Vec<&ReportRow<T>> = self.rows.iter().filter(|r| r.resolution_ok).collect();
        let Some(first) = rows.first() else {
            return (T::zero(), T::zero());
        };
        let base = first.of_type(kind).value;
        let mut var = T::zero();
        let mut err = T::zero();
        for r in &rows {
            let v = r.of_type(kind);
            var = var.max((v.value - base).norm());
            err = err.max(v.error_estimate);
        }
        (var, err)
    }

    /// One line per boost; 17 significant digits, `.` as decimal point.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let mut cells = vec![num(r.t)];
            for v in &r.per_type {
                cells.push(num(v.value.re));
                cells.push(num(v.value.im));
            }
            cells.push(num(r.total.value.re));
            cells.push(num(r.total.value.im));
            cells.push(num(self.target.value.re));
            cells.push(num(self.target.value.im));
            cells.push(num(r.residual));
            cells.push(num(r.error_budget));
            cells.push(self.odd.to_string());
            cells.push(r.resolution_ok.to_string());
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let c = |z: Complex<T>| json!([to_f64(z.re), to_f64(z.im)]);
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut per_type = serde_json::Map::new();
                for (k, v) in ContractionType::ALL.iter().zip(&r.per_type) {
                    per_type.insert(k.to_string(), json!({ "value": c(v.value), "error": to_f64(v.error_estimate) }));
                }
                json!({
                    "t": to_f64(r.t),
                    "per_type": per_type,
                    "total": c(r.total.value),
                    "total_error": to_f64(r.total.error_estimate),
                    "abs_residual": to_f64(r.residual),
                    "error_budget": to_f64(r.error_budget),
                    "resolution_ok": r.resolution_ok,
                })
            })
            .collect();
        json!({
            "layout": self.layout.to_string(),
            "kappa": to_f64(self.kappa),
            "odd": self.odd,
            "terms": self.term_count,
            "target": c(self.target.value),
            "target_error": to_f64(self.target.error_estimate),
            "rows": rows,
        })
    }
}
