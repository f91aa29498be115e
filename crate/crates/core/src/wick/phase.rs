use num_complex::Complex;

use crate::scalar::Real;

/// On-shell momentum `p(θ) = (cosh θ, sinh θ)` at unit mass.
pub fn on_shell<T: Real>(theta: T) -> [T; 2] {
    [theta.cosh(), theta.sinh()]
}

/// Minkowski product `p·q = p₀q₀ − p₁q₁`.
pub fn minkowski_dot<T: Real>(p: [T; 2], q: [T; 2]) -> T {
    p[0] * q[0] - p[1] * q[1]
}

/// `Q_κ = [[0, κ], [κ, 0]]` applied to `p`.
pub fn q_kappa<T: Real>(kappa: T, p: [T; 2]) -> [T; 2] {
    [kappa * p[1], kappa * p[0]]
}

/// `exp(i κ Σ_{l,r} sinh(θ′_r − θ_l))`, the factor picked up when the
/// particles `right` pass the twisted particles `left`; equals
/// `∏ exp(i p(θ_l)·Q_κ p(θ′_r))`.
pub fn deformed_phase<T: Real>(left: &[T], right: &[T], kappa: T) -> Complex<T> {
    let mut s = T::zero();
    for &l in left {
        for &r in right {
            s = s + (r - l).sinh();
        }
    }
    let (sin, cos) = (kappa * s).sin_cos();
    Complex::new(cos, sin)
}
