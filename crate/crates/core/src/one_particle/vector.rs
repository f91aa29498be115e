use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::{LightRay, OneParticleError};
use crate::scalar::{from_usize, lit, Real};

/// Relative magnitude below which a vector counts as outside its window.
pub const WINDOW_TOL: f64 = 1e-15;
/// Window tolerance for quadrature-evaluated vectors, above their rounding floor.
pub const NUMERIC_WINDOW_TOL: f64 = 1e-13;

pub type Evaluator<T> = Arc<dyn Fn(Complex<T>) -> Complex<T> + Send + Sync>;

/// Where the evaluator may be called.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Analyticity {
    /// Real arguments only.
    RealAxis,
    /// Closed strip `0 ≤ Im ζ ≤ π`.
    Strip,
    /// Any complex argument.
    Entire,
}

impl Analyticity {
    fn admits(self, imag: f64) -> bool {
        let slack = 1e-12;
        match self {
            Analyticity::RealAxis => imag == 0.0,
            Analyticity::Strip => imag >= -slack && imag <= std::f64::consts::PI + slack,
            Analyticity::Entire => true,
        }
    }

    fn meet(self, other: Analyticity) -> Analyticity {
        use Analyticity::*;
        match (self, other) {
            (RealAxis, _) | (_, RealAxis) => RealAxis,
            (Strip, _) | (_, Strip) => Strip,
            _ => Entire,
        }
    }
}

/// Element of `L²(ℝ, dθ)` given by a closed-form or quadrature evaluator.
///
/// `window` bounds the region where `|ψ| > WINDOW_TOL · sup`; `sup` bounds
/// `|ψ|` on the real axis.
#[derive(Clone)]
pub struct RapidityVector<T> {
    eval: Evaluator<T>,
    analyticity: Analyticity,
    window: (T, T),
    sup: T,
    decay_scale: T,
    hardy: bool,
    zero: bool,
    label: Arc<str>,
}

impl<T: Real> fmt::Debug for RapidityVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RapidityVector")
            .field("label", &self.label)
            .field("window", &self.window)
            .field("sup", &self.sup)
            .field("analyticity", &self.analyticity)
            .field("hardy", &self.hardy)
            .finish()
    }
}

impl<T: Real> RapidityVector<T> {
    /// `A exp(-(θ-c)²/(2σ²) + i k θ)`, entire in `θ`.
    pub fn gaussian(center: T, width: T, amplitude: Complex<T>, momentum: T) -> Result<Self, OneParticleError> {
        if !(width > T::zero()) || !width.is_finite() {
            return Err(OneParticleError::InvalidParameter(format!("gaussian width must be positive, got {width}")));
        }
        let two = lit::<T>(2.0);
        let s2 = two * width * width;
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| {
            let d = z - center;
            amplitude * (-(d * d) / s2 + Complex::new(T::zero(), momentum) * z).exp()
        });
        let reach = width * (two * (lit::<T>(1.0 / WINDOW_TOL)).ln()).sqrt();
        let zero = amplitude == Complex::new(T::zero(), T::zero());
        Ok(Self {
            eval,
            analyticity: Analyticity::Entire,
            window: (center - reach, center + reach),
            sup: amplitude.norm(),
            decay_scale: width,
            hardy: false,
            zero,
            label: Arc::from(format!("gaussian(c={center}, s={width}, k={momentum})")),
        })
    }

    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_| Complex::new(T::zero(), T::zero())),
            analyticity: Analyticity::Entire,
            window: (T::zero(), T::zero()),
            sup: T::zero(),
            decay_scale: T::one(),
            hardy: true,
            zero: true,
            label: Arc::from("zero"),
        }
    }

    /// Wraps an arbitrary evaluator; `sup` is estimated from samples on the window.
    pub fn from_evaluator(eval: Evaluator<T>, analyticity: Analyticity, window: (T, T), hardy: bool, label: &str) -> Self {
        let mut v = Self {
            eval,
            analyticity,
            window,
            sup: T::zero(),
            decay_scale: (window.1 - window.0) / lit(12.0),
            hardy,
            zero: false,
            label: Arc::from(label),
        };
        v.sup = v.sampled_sup();
        v.zero = v.sup == T::zero();
        v
    }

    fn derived(&self, eval: Evaluator<T>, analyticity: Analyticity, window: (T, T), hardy: bool, label: String) -> Self {
        Self {
            eval,
            analyticity,
            window,
            sup: self.sup,
            decay_scale: self.decay_scale,
            hardy,
            zero: self.zero,
            label: Arc::from(label),
        }
    }

    fn sampled_sup(&self) -> T {
        let (lo, hi) = self.window;
        if !(hi > lo) {
            return T::zero();
        }
        let n = 513;
        let step = (hi - lo) / from_usize(n - 1);
        (0..n).map(|i| self.at(lo + step * from_usize(i)).norm()).fold(T::zero(), T::max)
    }

    #[inline]
    pub fn at(&self, theta: T) -> Complex<T> {
        (self.eval)(Complex::new(theta, T::zero()))
    }

    /// Evaluates at a complex rapidity inside the vector's analyticity domain.
    pub fn at_complex(&self, z: Complex<T>) -> Result<Complex<T>, OneParticleError> {
        if !self.analyticity.admits(crate::scalar::to_f64(z.im)) {
            return Err(OneParticleError::StripUnavailable { label: self.label.to_string(), imag: crate::scalar::to_f64(z.im) });
        }
        Ok((self.eval)(z))
    }

    pub fn evaluator(&self) -> &Evaluator<T> {
        &self.eval
    }

    pub fn window(&self) -> (T, T) {
        self.window
    }

    pub fn sup_norm(&self) -> T {
        self.sup
    }

    pub fn decay_scale(&self) -> T {
        self.decay_scale
    }

    pub fn analyticity(&self) -> Analyticity {
        self.analyticity
    }

    pub fn is_hardy(&self) -> bool {
        self.hardy
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `(T₁(x)ψ)(θ) = e^{i x e^θ} ψ(θ)`; `H` is preserved for `x ≥ 0`.
    pub fn translated(&self, x: T) -> Self {
        let inner = self.eval.clone();
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| {
            let phase = Complex::new(T::zero(), x) * z.exp();
            phase.exp() * inner(z)
        });
        self.derived(eval, self.analyticity, self.window, self.hardy && x >= T::zero(), format!("T({x}){}", self.label))
    }

    /// `e^{i p(θ)·ξ} ψ(θ)` with `p(θ)·ξ = ξ₋ e^θ + ξ₊ e^{-θ}`.
    pub fn translated_2d(&self, xi: LightRay<T>) -> Self {
        let inner = self.eval.clone();
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| {
            let phase = z.exp() * xi.minus + (-z).exp() * xi.plus;
            (Complex::new(T::zero(), T::one()) * phase).exp() * inner(z)
        });
        let keeps = xi.minus >= T::zero() && xi.plus <= T::zero();
        self.derived(eval, self.analyticity, self.window, self.hardy && keeps, format!("T2({xi:?}){}", self.label))
    }

    /// Rapidity shift `ψ(θ − s)`: the boost `Λ_s` on one particle.
    pub fn boosted(&self, s: T) -> Self {
        if s == T::zero() {
            return self.clone();
        }
        let inner = self.eval.clone();
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| inner(z - s));
        let (lo, hi) = self.window;
        self.derived(eval, self.analyticity, (lo + s, hi + s), self.hardy, format!("B({s}){}", self.label))
    }

    /// `(Δ^{it} ψ)(θ) = ψ(θ − 2πt)`.
    pub fn modular_flowed(&self, t: T) -> Self {
        self.boosted(T::PI() * lit(2.0) * t)
    }

    /// `(Jψ)(θ) = conj ψ(θ)`. Strip data becomes real-axis data.
    pub fn conjugated(&self) -> Self {
        let inner = self.eval.clone();
        let analyticity = match self.analyticity {
            Analyticity::Entire => Analyticity::Entire,
            _ => Analyticity::RealAxis,
        };
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| inner(z.conj()).conj());
        self.derived(eval, analyticity, self.window, false, format!("J{}", self.label))
    }

    /// `(S₁ψ)(θ) = conj ψ(θ + iπ)`; needs the strip evaluator.
    pub fn tomita(&self) -> Result<Self, OneParticleError> {
        if self.analyticity == Analyticity::RealAxis {
            return Err(OneParticleError::StripUnavailable { label: self.label.to_string(), imag: std::f64::consts::PI });
        }
        if self.hardy {
            return Ok(self.clone());
        }
        let inner = self.eval.clone();
        let ipi = Complex::new(T::zero(), T::PI());
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| inner(z.conj() + ipi).conj());
        let mut v = self.derived(eval, self.analyticity, self.window, false, format!("S{}", self.label));
        v.sup = v.sampled_sup();
        Ok(v)
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        let inner = self.eval.clone();
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| inner(z) * c);
        let real = c.im == T::zero();
        let mut v = self.derived(eval, self.analyticity, self.window, self.hardy && real, format!("{c}*{}", self.label));
        v.sup = self.sup * c.norm();
        v.zero = self.zero || c == Complex::new(T::zero(), T::zero());
        v
    }

    pub fn plus(&self, other: &Self) -> Self {
        if other.zero {
            return self.clone();
        }
        if self.zero {
            return other.clone();
        }
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| a(z) + b(z));
        let window = (self.window.0.min(other.window.0), self.window.1.max(other.window.1));
        let mut v = Self::from_evaluator(
            eval,
            self.analyticity.meet(other.analyticity),
            window,
            self.hardy && other.hardy,
            &format!("({}+{})", self.label, other.label),
        );
        v.decay_scale = self.decay_scale.max(other.decay_scale);
        v
    }

    /// Values at the given nodes.
    pub fn sample(&self, nodes: &[T]) -> Vec<Complex<T>> {
        nodes.iter().map(|&x| self.at(x)).collect()
    }
}

/// Walks outwards from `start` in steps until the magnitude stays below
/// `tol · sup` for several steps in each direction. Returns the
/// window and the sampled sup.
pub(crate) fn scan_window<T: Real>(eval: &Evaluator<T>, start: T, limits: (T, T), step: T, tol: f64) -> Option<((T, T), T)> {
    const QUIET: usize = 8;
    let mag = |x: T| eval(Complex::new(x, T::zero())).norm();
    let mut pts: Vec<(T, T)> = vec![(start, mag(start))];
    let mut sup = pts[0].1;
    for dir in [T::one(), -T::one()] {
        let mut quiet = 0usize;
        let mut x = start;
        loop {
            x = x + dir * step;
            if x < limits.0 || x > limits.1 {
                break;
            }
            let m = mag(x);
            sup = sup.max(m);
            pts.push((x, m));
            if m < sup * lit(tol) {
                quiet += 1;
                if quiet >= QUIET {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
    if sup == T::zero() || !sup.is_finite() {
        return None;
    }
    let thr = sup * lit(tol);
    let inside: Vec<T> = pts.iter().filter(|(_, m)| *m >= thr).map(|(x, _)| *x).collect();
    let a = inside.iter().copied().fold(T::infinity(), T::min) - step;
    let b = inside.iter().copied().fold(T::neg_infinity(), T::max) + step;
    Some(((a.max(limits.0), b.min(limits.1)), sup))
}
