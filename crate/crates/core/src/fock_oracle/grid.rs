use crate::quad::rules::{composite_gauss_legendre, gauss_legendre, PANEL_ORDER};
use crate::scalar::{lit, Real};

use super::OracleError;

/// Composite Gauss–Legendre grid with 16-node panels, the same family the
/// one-dimensional quadrature uses.
#[derive(Clone, Debug)]
pub struct GridSpec<T> {
    pub theta_min: T,
    pub theta_max: T,
    /// Node count; a multiple of the panel order.
    pub points: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GridSpec<T> {
    pub const DEFAULT_POINTS: usize = 256;

    /// `points` is rounded up to a whole number of panels.
    pub fn new(theta_min: T, theta_max: T, points: usize) -> Result<Self, OracleError> {
        if !(theta_max > theta_min) || !theta_min.is_finite() || !theta_max.is_finite() {
            return Err(OracleError::InvalidGrid(format!("window [{theta_min}, {theta_max}] is empty or unbounded")));
        }
        if points == 0 {
            return Err(OracleError::InvalidGrid("grid needs at least one panel".into()));
        }
        let panels = points.div_ceil(PANEL_ORDER);
        let rule = composite_gauss_legendre(theta_min, theta_max, panels, &gauss_legendre(PANEL_ORDER));
        Ok(Self { theta_min, theta_max, points: panels * PANEL_ORDER, nodes: rule.nodes, weights: rule.weights })
    }

    /// Smallest grid covering every window, padded by `pad`.
    pub fn covering(windows: &[(T, T)], points: usize, pad: T) -> Result<Self, OracleError> {
        let lo = windows.iter().map(|w| w.0).fold(T::infinity(), T::min);
        let hi = windows.iter().map(|w| w.1).fold(T::neg_infinity(), T::max);
        if windows.is_empty() {
            return Self::new(-T::one(), T::one(), points);
        }
        Self::new(lo - pad, hi + pad, points)
    }

    /// Same window with half as many panels (at least one).
    pub fn halved(&self) -> Self {
        let p = (self.points / 2).max(PANEL_ORDER);
        Self::new(self.theta_min, self.theta_max, p).expect("window already validated")
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// Panel index and local offset of `x`, if inside the window.
    pub(crate) fn panel_of(&self, x: T) -> Option<usize> {
        if x < self.theta_min || x > self.theta_max {
            return None;
        }
        let panels = self.points / PANEL_ORDER;
        let h = (self.theta_max - self.theta_min) / lit(panels as f64);
        let k = ((x - self.theta_min) / h).floor().to_usize().unwrap_or(0);
        Some(k.min(panels - 1))
    }
}
