use num_complex::Complex;

use super::{expectation, CorrelatorError, FieldSequence};
use crate::quad::{IntegralResult, QuadratureSpec};
use crate::scalar::Real;
use crate::wick::FieldMonomial;

/// `ω(AB) − ω(A) ω(B)` with its ingredients.
#[derive(Clone, Copy, Debug)]
pub struct DefectReport<T> {
    /// Translation applied to `A` before evaluation.
    pub offset: T,
    pub ab: IntegralResult<T>,
    pub a: IntegralResult<T>,
    pub b: IntegralResult<T>,
    pub product: IntegralResult<T>,
    pub defect: IntegralResult<T>,
}

impl<T: Real> DefectReport<T> {
    /// `|defect| / error`; infinite for an exact nonzero defect.
    pub fn significance(&self) -> T {
        let d = self.defect.value.norm();
        if self.defect.error_estimate > T::zero() {
            d / self.defect.error_estimate
        } else if d > T::zero() {
            T::infinity()
        } else {
            T::zero()
        }
    }

    /// `1 / (ω(AB) − ω(A)ω(B))`, the coefficient normalizing
    /// `AB − ω(A)ω(B)` so that its limit is the vacuum projection.
    pub fn s_coefficient(&self) -> Option<Complex<T>> {
        (self.defect.value.norm() > T::zero()).then(|| self.defect.value.inv())
    }
}

/// `A` and `B` share `κ`; `B` typically holds the `J`-conjugated data.
pub fn product_state_defect<T: Real>(
    a: &FieldMonomial<T>,
    b: &FieldMonomial<T>,
    quad: &QuadratureSpec<T>,
) -> Result<DefectReport<T>, CorrelatorError> {
    defect_at(a, b, T::zero(), quad)
}

fn defect_at<T: Real>(
    a: &FieldMonomial<T>,
    b: &FieldMonomial<T>,
    offset: T,
    quad: &QuadratureSpec<T>,
) -> Result<DefectReport<T>, CorrelatorError> {
    let a = if offset == T::zero() { a.clone() } else { a.translated(offset) };
    let wa = expectation(&FieldSequence::from_monomial(&a), quad)?;
    if b.is_empty() {
        let one = IntegralResult::exact(Complex::new(T::one(), T::zero()));
        return Ok(DefectReport { offset, ab: wa, a: wa, b: one, product: wa, defect: IntegralResult::zero() });
    }
    let wb = expectation(&FieldSequence::new(a.kappa, b.factors.clone()), quad)?;
    let mut seq = FieldSequence::from_monomial(&a);
    seq.push_block(&b.factors, T::zero());
    let ab = expectation(&seq, quad)?;
    let product = wa.mul(&wb);
    Ok(DefectReport { offset, ab, a: wa, b: wb, product, defect: ab.sub(&product) })
}

/// Evaluates the defect with `A` translated by each offset and returns all
/// reports together with the index of the most significant one.
pub fn scan_product_defect<T: Real>(
    a: &FieldMonomial<T>,
    b: &FieldMonomial<T>,
    offsets: &[T],
    quad: &QuadratureSpec<T>,
) -> Result<(usize, Vec<DefectReport<T>>), CorrelatorError> {
    if offsets.is_empty() {
        return Err(CorrelatorError::InvalidTask("empty offset scan".into()));
    }
    let reports = offsets.iter().map(|&x| defect_at(a, b, x, quad)).collect::<Result<Vec<_>, _>>()?;
    let best = (0..reports.len())
        .max_by(|&i, &j| reports[i].significance().partial_cmp(&reports[j].significance()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    Ok((best, reports))
}
