//! Multidimensional quadrature over rapidity variables.
//!
//! Rules are tanh–sinh (sinh–sinh on the whole line) and composite
//! Gauss–Legendre. Every result carries an error estimate from comparing a
//! rule with its refinement. [`integrate_coupled`] handles the correlator
//! integrands: products of one-variable weights times phases
//! `exp(i c sinh(θ_a − θ_b + o))`.

mod coupled;
pub mod rules;

pub use coupled::{integrate_coupled, Coupling, WeightFactor};

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{lit, to_f64, Real};
use rules::{composite_gauss_legendre, de_step_for_points, gauss_legendre, sinh_sinh, tanh_sinh, Rule, PANEL_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Tanh–sinh up to two dimensions, composite Gauss–Legendre above.
    Auto,
    TanhSinh,
    GaussLegendre,
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Scheme::Auto),
            "tanh-sinh" | "tanh_sinh" => Ok(Scheme::TanhSinh),
            "gauss-legendre" | "gauss_legendre" | "gl" => Ok(Scheme::GaussLegendre),
            other => Err(format!("unknown quadrature scheme `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec<T> {
    /// Half-width of the default box `[-W, W]^dim`; infinite means the whole line.
    pub window_halfwidth: T,
    /// Initial nodes per dimension; also the floor for oscillatory kernels.
    pub points_per_dim: usize,
    pub scheme: Scheme,
    pub target_abs_error: T,
    pub max_refinements: usize,
    /// Cap on integrand evaluations for a single integral.
    pub max_evaluations: usize,
    /// Cap on inner-loop operations of one coupled phase integral; these
    /// are table lookups and multiplies, far cheaper than evaluations.
    pub max_phase_work: usize,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            window_halfwidth: lit(12.0),
            points_per_dim: 256,
            scheme: Scheme::Auto,
            target_abs_error: lit(1e-10),
            max_refinements: 8,
            max_evaluations: 200_000_000,
            max_phase_work: 4_000_000_000,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<(), QuadError> {
        if self.points_per_dim < 64 {
            return Err(QuadError::InvalidSpec(format!(
                "points_per_dim must be at least 64, got {}",
                self.points_per_dim
            )));
        }
        if !(self.window_halfwidth > T::zero()) {
            return Err(QuadError::InvalidSpec("window_halfwidth must be positive".into()));
        }
        if !(self.target_abs_error > T::zero()) || !self.target_abs_error.is_finite() {
            return Err(QuadError::InvalidSpec("target_abs_error must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn with_target(mut self, target: T) -> Self {
        self.target_abs_error = target;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points_per_dim = points;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralResult<T> {
    pub value: Complex<T>,
    pub error_estimate: T,
    pub evaluations: usize,
}

impl<T: Real> IntegralResult<T> {
    pub fn zero() -> Self {
        Self { value: Complex::new(T::zero(), T::zero()), error_estimate: T::zero(), evaluations: 0 }
    }

    pub fn exact(value: Complex<T>) -> Self {
        Self { value, error_estimate: T::zero(), evaluations: 0 }
    }

    /// Product with first-order-exact error propagation.
    pub fn mul(&self, other: &Self) -> Self {
        let a = self.value.norm();
        let b = other.value.norm();
        let e = (a + self.error_estimate) * (b + other.error_estimate) - a * b;
        Self {
            value: self.value * other.value,
            error_estimate: e,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            value: self.value - other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("quadrature did not converge: value {value_re:e}{value_im:+e}i, error estimate {error_estimate:e} > target {target:e}")]
    NonConvergence { value_re: f64, value_im: f64, error_estimate: f64, target: f64 },
    #[error("oscillation unresolved: {required} evaluations required, cap is {cap}; shrink the window or raise the cap")]
    ResolutionInsufficient { required: f64, cap: usize },
}

impl QuadError {
    pub fn non_convergence<T: Real>(value: Complex<T>, error: T, target: T) -> Self {
        QuadError::NonConvergence {
            value_re: to_f64(value.re),
            value_im: to_f64(value.im),
            error_estimate: to_f64(error),
            target: to_f64(target),
        }
    }
}

/// Integration range of one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Range<T> {
    Interval(T, T),
    Line,
}

/// Integrates over `[-W, W]^dim`, or over `ℝ^dim` when the window is infinite.
pub fn integrate<T, F>(dim: usize, integrand: F, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>, QuadError>
where
    T: Real,
    F: Fn(&[T]) -> Complex<T> + Sync,
{
    let w = spec.window_halfwidth;
    let range = if w.is_infinite() { Range::Line } else { Range::Interval(-w, w) };
    integrate_box(&vec![range; dim], integrand, spec)
}

/// One-dimensional convenience wrapper around [`integrate_box`].
pub fn integrate_interval<T, F>(a: T, b: T, integrand: F, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    if !(b > a) {
        return Ok(IntegralResult::zero());
    }
    integrate_box(&[Range::Interval(a, b)], |x: &[T]| integrand(x[0]), spec)
}

/// Integrates over a product of ranges, refining until successive estimates
/// agree within `target_abs_error`.
pub fn integrate_box<T, F>(ranges: &[Range<T>], integrand: F, spec: &QuadratureSpec<T>) -> Result<IntegralResult<T>, QuadError>
where
    T: Real,
    F: Fn(&[T]) -> Complex<T> + Sync,
{
    spec.validate()?;
    let dim = ranges.len();
    if dim == 0 {
        return Ok(IntegralResult { value: integrand(&[]), error_estimate: T::zero(), evaluations: 1 });
    }
    let scheme = match spec.scheme {
        Scheme::Auto if dim <= 2 => Scheme::TanhSinh,
        Scheme::Auto => Scheme::GaussLegendre,
        s => s,
    };
    let base = gauss_legendre::<T>(PANEL_ORDER);
    let mut evaluations = 0usize;
    let mut previous: Option<Complex<T>> = None;
    let mut last_err = T::infinity();
    for level in 0..=spec.max_refinements {
        let points = spec.points_per_dim << level;
        let rules: Vec<Rule<T>> = ranges
            .iter()
            .map(|r| rule_for(*r, scheme, points, &base))
            .collect();
        let count: usize = rules.iter().map(|r| r.len()).product();
        if evaluations + count > spec.max_evaluations {
            break;
        }
        let value = tensor_sum(&rules, &integrand);
        evaluations += count;
        if let Some(prev) = previous {
            let err = (value - prev).norm();
            last_err = err;
            if err <= spec.target_abs_error {
                return Ok(IntegralResult { value, error_estimate: err, evaluations });
            }
        }
        previous = Some(value);
    }
    let value = previous.unwrap_or_else(|| Complex::new(T::nan(), T::nan()));
    Err(QuadError::non_convergence(value, last_err, spec.target_abs_error))
}

fn rule_for<T: Real>(range: Range<T>, scheme: Scheme, points: usize, base: &Rule<T>) -> Rule<T> {
    match (range, scheme) {
        (Range::Line, _) => sinh_sinh(de_step_for_points::<T>(points)),
        (Range::Interval(a, b), Scheme::GaussLegendre) => {
            composite_gauss_legendre(a, b, points.div_ceil(PANEL_ORDER), base)
        }
        (Range::Interval(a, b), _) => tanh_sinh(a, b, de_step_for_points::<T>(points)),
    }
}

/// Tensor-product sum; the outer dimension is split across threads and the
/// partial sums are reduced in index order.
fn tensor_sum<T, F>(rules: &[Rule<T>], f: &F) -> Complex<T>
where
    T: Real,
    F: Fn(&[T]) -> Complex<T> + Sync,
{
    let dim = rules.len();
    let outer = &rules[0];
    let partial: Vec<Complex<T>> = (0..outer.len())
        .into_par_iter()
        .map(|i| {
            let mut point = vec![T::zero(); dim];
            point[0] = outer.nodes[i];
            let inner = if dim == 1 {
                f(&point)
            } else {
                odometer_sum(&rules[1..], &mut point, f)
            };
            inner * outer.weights[i]
        })
        .collect();
    partial.into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
}

fn odometer_sum<T, F>(rules: &[Rule<T>], point: &mut [T], f: &F) -> Complex<T>
where
    T: Real,
    F: Fn(&[T]) -> Complex<T> + Sync,
{
    let d = rules.len();
    let mut idx = vec![0usize; d];
    let mut total = Complex::new(T::zero(), T::zero());
    loop {
        let mut w = T::one();
        for k in 0..d {
            point[k + 1] = rules[k].nodes[idx[k]];
            w = w * rules[k].weights[idx[k]];
        }
        total = total + f(point) * w;
        let mut k = d;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < rules[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `e^{i phase}`.
#[inline]
pub(crate) fn cis<T: Real>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}

pub(crate) fn ceil_usize<T: Real>(x: T) -> usize {
    if !x.is_finite() {
        return usize::MAX;
    }
    x.ceil().to_usize().unwrap_or(usize::MAX)
}
