//! Vacuum correlators of deformed fields and the large-boost limit of
//! modular matrix elements.
//!
//! The central quantity is `⟨Ψ(l*), σ_t(X Y′) Ψ(r)⟩ = ω(L · σ_t(X Y′) · R)`,
//! evaluated term by term over pair partitions. Flowed factors are exact
//! rapidity shifts of closed-form vectors, so no flow is ever interpolated.

mod defect;
mod report;
mod sequence;

pub use defect::{product_state_defect, scan_product_defect, DefectReport};
pub use report::{LimitReport, ReportRow, CSV_HEADER};
pub use sequence::{
    expectation, expectation_with, partition_value, term_values, type_sums, vacuum_npoint, FieldSequence, FlowRoute,
};

use thiserror::Error;

use crate::one_particle::OneParticleError;
use crate::quad::{IntegralResult, QuadError, QuadratureSpec};
use crate::scalar::{lit, Real};
use crate::wick::{wick_expand, BlockLayout, Field, FieldMonomial, PairPartition, WickError, WickExpansion};

#[derive(Debug, Error)]
pub enum CorrelatorError {
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    OneParticle(#[from] OneParticleError),
    #[error("invalid task: {0}")]
    InvalidTask(String),
}

/// Boost values used when a task does not name its own.
pub fn default_t_grid<T: Real>() -> Vec<T> {
    [0.0, -0.5, 0.5, -1.0, 1.0, -1.5, 1.5, -2.0, 2.0, -3.0, 3.0, -4.0, 4.0].iter().map(|&x| lit(x)).collect()
}

/// `⟨Ψ(l*), σ_t(X Y′) Ψ(r)⟩` with `Ψ(r) = R Ω`, `Ψ(l*) = L* Ω`.
///
/// `σ_t` boosts every vector of `X` and `Y′` by the rapidity
/// `flow_scale · t`. With `flow_scale = 2π` the parameter is the modular
/// one and `t` moves in units of `2π`; the default `1` reads `t` as a
/// rapidity.
#[derive(Clone, Debug)]
pub struct CorrelatorTask<T: Real> {
    pub left: Vec<Field<T>>,
    pub x: FieldMonomial<T>,
    pub y_prime: FieldMonomial<T>,
    pub right: Vec<Field<T>>,
    pub kappa: T,
    pub t_grid: Vec<T>,
    pub quad: QuadratureSpec<T>,
    pub flow_scale: T,
}

impl<T: Real> CorrelatorTask<T> {
    pub fn new(left: Vec<Field<T>>, x: FieldMonomial<T>, y_prime: FieldMonomial<T>, right: Vec<Field<T>>) -> Self {
        let kappa = x.kappa;
        Self { left, x, y_prime, right, kappa, t_grid: default_t_grid(), quad: QuadratureSpec::default(), flow_scale: T::one() }
    }

    pub fn with_t_grid(mut self, t_grid: Vec<T>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn with_quad(mut self, quad: QuadratureSpec<T>) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_flow_scale(mut self, flow_scale: T) -> Self {
        self.flow_scale = flow_scale;
        self
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self.left.len(), self.x.len(), self.y_prime.len(), self.right.len())
    }

    pub fn validate(&self) -> Result<(), CorrelatorError> {
        if self.kappa < T::zero() || !self.kappa.is_finite() {
            return Err(CorrelatorError::InvalidTask(format!("kappa must be a nonnegative number, got {}", self.kappa)));
        }
        if self.x.kappa != self.kappa || self.y_prime.kappa != self.kappa {
            return Err(CorrelatorError::InvalidTask("X and Y′ must share the task's kappa".into()));
        }
        self.quad.validate()?;
        Ok(())
    }

    /// `[l, X, Y′, r]` with `X, Y′` boosted by `flow_scale · t`.
    pub fn sequence(&self, t: T) -> FieldSequence<T> {
        self.sequence_with(self.flow_scale * t, T::zero())
    }

    /// `[l, X, Y′, r]` with `l, r` boosted by `−flow_scale · t` instead.
    /// Boost invariance of `Ω` makes this equal to [`Self::sequence`].
    pub fn sequence_inverse_flow(&self, t: T) -> FieldSequence<T> {
        self.sequence_with(T::zero(), -self.flow_scale * t)
    }

    fn sequence_with(&self, inner: T, outer: T) -> FieldSequence<T> {
        let mut seq = FieldSequence::new(self.kappa, Vec::new());
        seq.push_block(&self.left, outer);
        seq.push_block(&self.x.factors, inner);
        seq.push_block(&self.y_prime.factors, inner);
        seq.push_block(&self.right, outer);
        seq
    }

    pub fn expansion(&self) -> Result<WickExpansion, CorrelatorError> {
        Ok(wick_expand(&self.layout(), &self.sequence(T::zero()).deformations())?)
    }

    fn block(&self, fields: &[&[Field<T>]]) -> FieldSequence<T> {
        let mut seq = FieldSequence::new(self.kappa, Vec::new());
        for f in fields {
            seq.push_block(f, T::zero());
        }
        seq
    }

    fn omega(&self, fields: &[&[Field<T>]]) -> Result<IntegralResult<T>, CorrelatorError> {
        expectation(&self.block(fields), &self.quad)
    }
}

/// `W_{(λ,μ)}(t)` for one partition of the task's layout.
pub fn evaluate_w<T: Real>(task: &CorrelatorTask<T>, partition: &PairPartition, t: T) -> Result<IntegralResult<T>, CorrelatorError> {
    let seq = task.sequence(t);
    let desc = crate::wick::IntegrandDescriptor::from_partition(partition, &seq.deformations())?;
    crate::wick::classify(partition, &task.layout())?;
    partition_value(&seq, partition, &desc, &task.quad, FlowRoute::Reduced)
}

/// Sum of all `W_{(λ,μ)}(t)`.
pub fn modular_matrix_element<T: Real>(task: &CorrelatorTask<T>, t: T) -> Result<IntegralResult<T>, CorrelatorError> {
    expectation(&task.sequence(t), &task.quad)
}

/// The same matrix element with the boost moved onto `l` and `r`, and every
/// vector evaluated at its boosted position ([`FlowRoute::Physical`]), so
/// no integral is shared with [`modular_matrix_element`].
pub fn modular_matrix_element_inverse_flow<T: Real>(
    task: &CorrelatorTask<T>,
    t: T,
) -> Result<IntegralResult<T>, CorrelatorError> {
    expectation_with(&task.sequence_inverse_flow(t), &task.quad, FlowRoute::Physical)
}

/// Vacuum expectations entering the limit formula.
#[derive(Clone, Copy, Debug)]
pub struct LimitIngredients<T> {
    pub xy: IntegralResult<T>,
    pub x: IntegralResult<T>,
    pub y: IntegralResult<T>,
    pub l: IntegralResult<T>,
    pub r: IntegralResult<T>,
    pub lr: IntegralResult<T>,
}

pub fn limit_ingredients<T: Real>(task: &CorrelatorTask<T>) -> Result<LimitIngredients<T>, CorrelatorError> {
    let (l, x, y, r) = (&task.left[..], &task.x.factors[..], &task.y_prime.factors[..], &task.right[..]);
    Ok(LimitIngredients {
        xy: task.omega(&[x, y])?,
        x: task.omega(&[x])?,
        y: task.omega(&[y])?,
        l: task.omega(&[l])?,
        r: task.omega(&[r])?,
        lr: task.omega(&[l, r])?,
    })
}

/// `⟨Ψ′, (ω(XY′) P_Ω + ω(X) ω(Y′) P_Ω^⊥) Ψ⟩`
/// `= ω(XY′) ω(L) ω(R) + ω(X) ω(Y′) (ω(LR) − ω(L) ω(R))`.
pub fn limit_target<T: Real>(task: &CorrelatorTask<T>) -> Result<IntegralResult<T>, CorrelatorError> {
    Ok(target_from(&limit_ingredients(task)?))
}

pub fn target_from<T: Real>(w: &LimitIngredients<T>) -> IntegralResult<T> {
    let lr_vac = w.l.mul(&w.r);
    w.xy.mul(&lr_vac).add(&w.x.mul(&w.y).mul(&w.lr.sub(&lr_vac)))
}

/// The target with the roles of `(X, Y′)` and `(L, R)` exchanged:
/// `ω(LR) ω(X) ω(Y′) + ω(L) ω(R) (ω(XY′) − ω(X) ω(Y′))`.
pub fn target_exchanged<T: Real>(w: &LimitIngredients<T>) -> IntegralResult<T> {
    let xy_vac = w.x.mul(&w.y);
    w.lr.mul(&xy_vac).add(&w.l.mul(&w.r).mul(&w.xy.sub(&xy_vac)))
}

/// Per-type series, total, target and residuals over the task's boost grid.
/// A boost whose phases exceed the quadrature resolution is kept as a row
/// with `resolution_ok = false` and NaN values; other failures propagate.
pub fn run_limit_report<T: Real>(task: &CorrelatorTask<T>) -> Result<LimitReport<T>, CorrelatorError> {
    task.validate()?;
    if task.t_grid.is_empty() {
        return Err(CorrelatorError::InvalidTask("empty t grid".into()));
    }
    let layout = task.layout();
    let ingredients = limit_ingredients(task)?;
    let target = target_from(&ingredients);
    if layout.is_odd() {
        let rows = task.t_grid.iter().map(|&t| ReportRow::exact_zero(t)).collect();
        return Ok(LimitReport { layout, kappa: task.kappa, odd: true, target, term_count: 0, rows });
    }
    let expansion = task.expansion()?;
    let mut rows = Vec::with_capacity(task.t_grid.len());
    for &t in &task.t_grid {
        let seq = task.sequence(t);
        match term_values(&seq, &expansion, &task.quad, FlowRoute::Reduced) {
            Ok(values) => {
                let per_type = type_sums(&expansion, &values);
                let total = per_type.iter().fold(IntegralResult::zero(), |a, v| a.add(v));
                rows.push(ReportRow::new(t, per_type, total, &target));
            }
            Err(CorrelatorError::Quad(QuadError::ResolutionInsufficient { .. })) => rows.push(ReportRow::unresolved(t)),
            Err(e) => return Err(e),
        }
    }
    Ok(LimitReport { layout, kappa: task.kappa, odd: false, target, term_count: expansion.terms.len(), rows })
}


#[cfg(test)]
mod tests;
