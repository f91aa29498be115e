//! One-particle space `L²(ℝ, dθ)` with the translation, modular and
//! conjugation actions, and the maps from test functions into it.
//!
//! Translations act by `e^{i x e^θ}`, the modular group by rapidity shifts
//! `θ ↦ θ − 2πt`, and `J` by complex conjugation. The standard subspace `H`
//! consists of vectors with an analytic continuation to the strip
//! `0 < Im ζ < π` satisfying `conj ψ(θ + iπ) = ψ(θ)`.

mod test_function;
mod vector;

pub use test_function::{hat_transform, plusminus_transform, LightRay, TestFunction1D, TestFunction2D};
pub use vector::{Analyticity, Evaluator, RapidityVector, NUMERIC_WINDOW_TOL, WINDOW_TOL};

use num_complex::Complex;
use thiserror::Error;

use crate::quad::{integrate_interval, IntegralResult, QuadError, QuadratureSpec};
use crate::scalar::{from_usize, lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OneParticleError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vector `{label}` has no evaluator at Im ζ = {imag}")]
    StripUnavailable { label: String, imag: f64 },
    #[error("transform quadrature did not converge: error estimate {error_estimate:e}")]
    NonConvergence { error_estimate: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Uniform sample points in rapidity.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid<T> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
}

impl<T: Real> SampleGrid<T> {
    pub fn uniform(lo: T, hi: T, points: usize) -> Self {
        Self { lo, hi, points: points.max(2) }
    }

    pub fn nodes(&self) -> Vec<T> {
        let step = (self.hi - self.lo) / from_usize(self.points - 1);
        (0..self.points).map(|i| self.lo + step * from_usize(i)).collect()
    }
}

pub fn act_translation<T: Real>(psi: &RapidityVector<T>, x: T) -> RapidityVector<T> {
    psi.translated(x)
}

pub fn act_translation_2d<T: Real>(psi: &RapidityVector<T>, xi: LightRay<T>) -> RapidityVector<T> {
    psi.translated_2d(xi)
}

pub fn act_modular<T: Real>(psi: &RapidityVector<T>, t: T) -> RapidityVector<T> {
    psi.modular_flowed(t)
}

pub fn act_conjugation<T: Real>(psi: &RapidityVector<T>) -> RapidityVector<T> {
    psi.conjugated()
}

/// `max |conj ψ(θ + iπ) − ψ(θ)|` over the grid.
pub fn standard_subspace_residual<T: Real>(psi: &RapidityVector<T>, grid: &SampleGrid<T>) -> Result<T, OneParticleError> {
    let ipi = Complex::new(T::zero(), T::PI());
    let mut worst = T::zero();
    for theta in grid.nodes() {
        let z = Complex::new(theta, T::zero());
        let upper = psi.at_complex(z + ipi)?;
        worst = worst.max((upper.conj() - psi.at(theta)).norm());
    }
    Ok(worst)
}

/// `max |ψ(θ + iπ/2)| / max |ψ(θ)|` over the grid. Boundedness on the strip
/// is part of membership in `H`; the boundary residual alone does not see it.
pub fn strip_growth<T: Real>(psi: &RapidityVector<T>, grid: &SampleGrid<T>) -> Result<T, OneParticleError> {
    let mid = Complex::new(T::zero(), T::FRAC_PI_2());
    let mut inside = T::zero();
    let mut edge = T::zero();
    for theta in grid.nodes() {
        inside = inside.max(psi.at_complex(Complex::new(theta, T::zero()) + mid)?.norm());
        edge = edge.max(psi.at(theta).norm());
    }
    Ok(if edge == T::zero() { T::infinity() } else { inside / edge })
}

/// `⟨φ, ψ⟩ = ∫ conj φ(θ) ψ(θ) dθ` over the overlap of the two windows.
pub fn inner_product<T: Real>(
    phi: &RapidityVector<T>,
    psi: &RapidityVector<T>,
    quad: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>, OneParticleError> {
    if phi.is_zero() || psi.is_zero() {
        return Ok(IntegralResult::zero());
    }
    let (a0, b0) = phi.window();
    let (a1, b1) = psi.window();
    let lo = a0.max(a1);
    let hi = b0.min(b1);
    let tail = lit::<T>(NUMERIC_WINDOW_TOL) * phi.sup_norm() * psi.sup_norm() * (b0 - a0).max(b1 - a1);
    if !(hi > lo) {
        return Ok(IntegralResult { value: Complex::new(T::zero(), T::zero()), error_estimate: tail, evaluations: 0 });
    }
    let mut r = integrate_interval(lo, hi, |x| phi.at(x).conj() * psi.at(x), quad)?;
    r.error_estimate = r.error_estimate + tail;
    Ok(r)
}

#[cfg(test)]
mod tests;
