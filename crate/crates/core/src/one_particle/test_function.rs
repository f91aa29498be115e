use std::sync::Arc;

use num_complex::Complex;

use super::vector::{Analyticity, Evaluator, RapidityVector, NUMERIC_WINDOW_TOL, WINDOW_TOL};
use super::OneParticleError;
use crate::quad::rules::{gauss_legendre, Rule, PANEL_ORDER};
use crate::quad::QuadratureSpec;
use crate::scalar::{from_usize, lit, Real};

/// Panels used for the non-oscillatory part of a bump Fourier integral.
const BASE_PANELS: usize = 48;

/// Point of the plane in light-ray coordinates `ξ± = (ξ₀ ± ξ₁)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightRay<T> {
    pub minus: T,
    pub plus: T,
}

impl<T: Real> LightRay<T> {
    pub fn new(minus: T, plus: T) -> Self {
        Self { minus, plus }
    }

    pub fn from_minkowski(x0: T, x1: T) -> Self {
        let h = lit::<T>(0.5);
        Self { minus: (x0 - x1) * h, plus: (x0 + x1) * h }
    }

    pub fn to_minkowski(self) -> (T, T) {
        (self.plus + self.minus, self.plus - self.minus)
    }

    /// Open right wedge `ξ₋ > 0, ξ₊ < 0`, the cone of translations keeping `H` invariant.
    pub fn in_right_wedge(self) -> bool {
        self.minus > T::zero() && self.plus < T::zero()
    }

    /// `p(θ)·ξ = ξ₋ e^θ + ξ₊ e^{-θ}`.
    pub fn momentum_phase(self, theta: T) -> T {
        self.minus * theta.exp() + self.plus * (-theta).exp()
    }
}

/// Smooth bump `exp(-1/(1-u²))` on `(lo, hi)` and its derivatives.
#[derive(Clone, Debug)]
struct Bump<T> {
    lo: T,
    hi: T,
    /// `P_k` with `b^{(k)}(u) = P_k(u) (1-u²)^{-2k} exp(-1/(1-u²))` in the scaled variable `u`.
    polys: Vec<Vec<T>>,
}

impl<T: Real> Bump<T> {
    fn new(lo: T, hi: T, max_order: usize) -> Self {
        let mut polys = vec![vec![T::one()]];
        for k in 0..max_order {
            let p = &polys[k];
            let dp = poly_deriv(p);
            let q2 = [T::one(), T::zero(), lit(-2.0), T::zero(), T::one()];
            let kf = from_usize::<T>(k);
            let lin = [T::zero(), lit::<T>(4.0) * kf - lit(2.0), T::zero(), -lit::<T>(4.0) * kf];
            let next = poly_add(&poly_mul(&dp, &q2), &poly_mul(p, &lin));
            polys.push(next);
        }
        Self { lo, hi, polys }
    }

    fn scale(&self) -> T {
        lit::<T>(2.0) / (self.hi - self.lo)
    }

    fn derivative(&self, x: T, k: usize) -> T {
        if x <= self.lo || x >= self.hi {
            return T::zero();
        }
        let s = self.scale();
        let u = (x - self.lo) * s - T::one();
        let q = T::one() - u * u;
        let inv = T::one() / q;
        if inv > lit(700.0) {
            return T::zero();
        }
        let p = poly_eval(&self.polys[k], u);
        let log_mag = -inv - lit::<T>(2.0) * from_usize::<T>(k) * q.ln();
        p * log_mag.exp() * s.powi(k as i32)
    }
}

fn poly_eval<T: Real>(p: &[T], x: T) -> T {
    p.iter().rev().fold(T::zero(), |acc, c| acc * x + *c)
}

fn poly_deriv<T: Real>(p: &[T]) -> Vec<T> {
    if p.len() <= 1 {
        return vec![T::zero()];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| *c * from_usize(i)).collect()
}

fn poly_mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + *x * *y;
        }
    }
    out
}

fn poly_add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n).map(|i| *a.get(i).unwrap_or(&T::zero()) + *b.get(i).unwrap_or(&T::zero())).collect()
}

#[derive(Clone, Debug)]
enum Profile1D<T> {
    /// `order`-th derivative of a bump; for `order ≥ 1` all moments below `order` vanish.
    Bump { bump: Bump<T>, order: usize },
    /// `order`-th derivative of a Gaussian; its hat transform gains a factor `k^{order}` at small `k`.
    Gaussian { center: T, width: T, order: usize },
}

/// Real test function on the light ray.
#[derive(Clone, Debug)]
pub struct TestFunction1D<T> {
    profile: Profile1D<T>,
    amplitude: T,
}

impl<T: Real> TestFunction1D<T> {
    pub fn bump(lo: T, hi: T, amplitude: T) -> Result<Self, OneParticleError> {
        Self::bump_derivative(lo, hi, amplitude, 0)
    }

    /// `A b^{(order)}` for the standard bump `b` on `(lo, hi)`.
    pub fn bump_derivative(lo: T, hi: T, amplitude: T, order: usize) -> Result<Self, OneParticleError> {
        if !(hi > lo) {
            return Err(OneParticleError::InvalidParameter(format!("bump support ({lo}, {hi}) is empty")));
        }
        Ok(Self { profile: Profile1D::Bump { bump: Bump::new(lo, hi, order + 2), order }, amplitude })
    }

    pub fn gaussian(center: T, width: T, amplitude: T) -> Result<Self, OneParticleError> {
        Self::gaussian_derivative(center, width, amplitude, 0)
    }

    /// `A g^{(order)}` for `g(x) = exp(−(x−c)²/2w²)`.
    pub fn gaussian_derivative(center: T, width: T, amplitude: T, order: usize) -> Result<Self, OneParticleError> {
        if !(width > T::zero()) {
            return Err(OneParticleError::InvalidParameter("gaussian width must be positive".into()));
        }
        Ok(Self { profile: Profile1D::Gaussian { center, width, order }, amplitude })
    }

    pub fn value(&self, x: T) -> T {
        self.nth_derivative(x, 0)
    }

    pub fn derivative(&self, x: T) -> T {
        self.nth_derivative(x, 1)
    }

    fn nth_derivative(&self, x: T, n: usize) -> T {
        match &self.profile {
            Profile1D::Bump { bump, order } => self.amplitude * bump.derivative(x, order + n),
            Profile1D::Gaussian { center, width, order } => {
                // d^j/dx^j e^{−y²/2} = (−1/w)^j He_j(y) e^{−y²/2}, probabilists' Hermite.
                let j = order + n;
                let y = (x - *center) / *width;
                let (mut he, mut prev) = (T::one(), T::zero());
                for i in 0..j {
                    let next = y * he - from_usize::<T>(i) * prev;
                    prev = he;
                    he = next;
                }
                let sign = if j % 2 == 0 { T::one() } else { -T::one() };
                self.amplitude * sign * he * (-(y * y) / lit(2.0)).exp() / width.powi(j as i32)
            }
        }
    }

    /// Compact support, if any.
    pub fn support(&self) -> Option<(T, T)> {
        match &self.profile {
            Profile1D::Bump { bump, .. } => Some((bump.lo, bump.hi)),
            Profile1D::Gaussian { .. } => None,
        }
    }

    /// Support inside the closed right half-line.
    pub fn supported_in_positive_half_line(&self) -> bool {
        matches!(self.support(), Some((lo, _)) if lo >= T::zero())
    }
}

/// `f̂(ζ) = ∫ f′(x) e^{i x e^ζ} dx`.
pub fn hat_transform<T: Real>(f: &TestFunction1D<T>, quad: &QuadratureSpec<T>) -> Result<RapidityVector<T>, OneParticleError> {
    let hardy = f.supported_in_positive_half_line();
    let (eval, analyticity, scan, tol): (Evaluator<T>, Analyticity, (T, T), f64) = match &f.profile {
        Profile1D::Gaussian { center, width, order } => {
            let (c, s, a, m) = (*center, *width, f.amplitude, *order as u32 + 1);
            let norm = (T::PI() * lit(2.0)).sqrt() * s * a;
            let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| {
                let k = z.exp();
                let i = Complex::new(T::zero(), T::one());
                (-i * k).powu(m) * norm * (i * k * c - k * k * (s * s / lit(2.0))).exp()
            });
            (eval, Analyticity::Entire, (lit(-45.0), lit(12.0)), WINDOW_TOL)
        }
        Profile1D::Bump { bump, order } => {
            let kernel = FourierKernel::new(bump.clone(), order + 1, f.amplitude);
            kernel.validate(quad.target_abs_error, true, |z| z.exp())?;
            let eval: Evaluator<T> = Arc::new(move |z: Complex<T>| kernel.eval(z.exp(), 1));
            (eval, Analyticity::Strip, (lit(-45.0), lit(12.0)), NUMERIC_WINDOW_TOL)
        }
    };
    let (window, _) = super::vector::scan_window(&eval, T::zero(), scan, lit(0.125), tol)
        .ok_or(OneParticleError::InvalidParameter("hat transform vanishes identically".into()))?;
    let mut v = RapidityVector::from_evaluator(eval, analyticity, window, hardy, "hat");
    if f.amplitude == T::zero() {
        v = RapidityVector::zero();
    }
    Ok(v)
}

/// `∫ b^{(order)}(x) e^{i k x} dx` by composite Gauss–Legendre with panels
/// following the oscillation frequency `|k|`.
#[derive(Clone)]
struct FourierKernel<T> {
    bump: Bump<T>,
    order: usize,
    amplitude: T,
    rule: Rule<T>,
}

impl<T: Real> FourierKernel<T> {
    fn new(bump: Bump<T>, order: usize, amplitude: T) -> Self {
        Self { bump, order, amplitude, rule: gauss_legendre(PANEL_ORDER) }
    }

    fn panels(&self, k: Complex<T>) -> usize {
        let len = self.bump.hi - self.bump.lo;
        let periods = k.norm() * len / (T::PI() * lit(2.0));
        BASE_PANELS + periods.ceil().to_usize().unwrap_or(usize::MAX / 2)
    }

    /// Integrations by parts moved onto the exponential at frequency `k`:
    /// `∫ b^{(m)} e^{ikx} = (−ik)^j ∫ b^{(m−j)} e^{ikx}`. Lower derivatives
    /// resolve better near the support edges, while `|k|^j` amplifies
    /// rounding; `j` is the largest count keeping `|k|^j ≤ 10²`.
    fn by_parts(&self, k: Complex<T>) -> usize {
        let mut j = 0;
        let mut amp = T::one();
        while j < self.order && amp * k.norm() <= lit(1e2) {
            amp = amp * k.norm();
            j += 1;
        }
        j
    }

    fn eval(&self, k: Complex<T>, refine: usize) -> Complex<T> {
        let panels = self.panels(k) * refine;
        let j = self.by_parts(k);
        let order = self.order - j;
        let (lo, hi) = (self.bump.lo, self.bump.hi);
        let h = (hi - lo) / from_usize(panels);
        let half = h / lit(2.0);
        let i = Complex::new(T::zero(), T::one());
        let mut acc = Complex::new(T::zero(), T::zero());
        for p in 0..panels {
            let mid = lo + h * (from_usize::<T>(p) + lit(0.5));
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let xx = mid + half * *x;
                let b = self.bump.derivative(xx, order);
                if b != T::zero() {
                    acc = acc + (i * k * xx).exp() * (b * *w);
                }
            }
        }
        acc * (half * self.amplitude) * (-i * k).powu(j as u32)
    }

    /// Compares single and doubled panel counts at the frequencies `k(ζ)`
    /// reached from probe rapidities, relative to `max(1, |value|)`.
    fn validate(&self, target: T, strip: bool, k_of: impl Fn(Complex<T>) -> Complex<T>) -> Result<(), OneParticleError> {
        let mut worst = T::zero();
        let imags: &[f64] = if strip { &[0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] } else { &[0.0] };
        for j in -8..=6 {
            for &im in imags {
                let z = Complex::new(lit::<T>(j as f64), lit::<T>(im));
                let k = k_of(z);
                let a = self.eval(k, 1);
                let b = self.eval(k, 2);
                worst = worst.max((a - b).norm() / a.norm().max(T::one()));
            }
        }
        if worst > target {
            return Err(OneParticleError::NonConvergence { error_estimate: crate::scalar::to_f64(worst) });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Profile2D<T> {
    /// Product `b₋(ξ₋) b₊(ξ₊)` of bumps in light-ray coordinates.
    Bump { minus: Bump<T>, plus: Bump<T> },
    Gaussian { center: LightRay<T>, width: T },
}

/// Real test function on the plane.
#[derive(Clone, Debug)]
pub struct TestFunction2D<T> {
    profile: Profile2D<T>,
    amplitude: T,
}

impl<T: Real> TestFunction2D<T> {
    pub fn bump(minus: (T, T), plus: (T, T), amplitude: T) -> Result<Self, OneParticleError> {
        if !(minus.1 > minus.0) || !(plus.1 > plus.0) {
            return Err(OneParticleError::InvalidParameter("2D bump support is empty".into()));
        }
        Ok(Self {
            profile: Profile2D::Bump { minus: Bump::new(minus.0, minus.1, 1), plus: Bump::new(plus.0, plus.1, 1) },
            amplitude,
        })
    }

    pub fn gaussian(center: LightRay<T>, width: T, amplitude: T) -> Result<Self, OneParticleError> {
        if !(width > T::zero()) {
            return Err(OneParticleError::InvalidParameter("gaussian width must be positive".into()));
        }
        Ok(Self { profile: Profile2D::Gaussian { center, width }, amplitude })
    }

    pub fn value(&self, xi: LightRay<T>) -> T {
        match &self.profile {
            Profile2D::Bump { minus, plus } => self.amplitude * minus.derivative(xi.minus, 0) * plus.derivative(xi.plus, 0),
            Profile2D::Gaussian { center, width } => {
                let a = (xi.minus - center.minus) / *width;
                let b = (xi.plus - center.plus) / *width;
                self.amplitude * (-(a * a + b * b) / lit(2.0)).exp()
            }
        }
    }

    /// Compact support contained in the right wedge.
    pub fn wedge_flag(&self) -> bool {
        match &self.profile {
            Profile2D::Bump { minus, plus } => minus.lo >= T::zero() && plus.hi <= T::zero(),
            Profile2D::Gaussian { .. } => false,
        }
    }
}

/// `f^±(θ) = ∫ f(ξ) e^{± i p(θ)·ξ} d²ξ` with `d²ξ = dξ₀ dξ₁ = 2 dξ₊ dξ₋`.
pub fn plusminus_transform<T: Real>(
    f: &TestFunction2D<T>,
    sign: i8,
    quad: &QuadratureSpec<T>,
) -> Result<RapidityVector<T>, OneParticleError> {
    if sign != 1 && sign != -1 {
        return Err(OneParticleError::InvalidParameter(format!("sign must be ±1, got {sign}")));
    }
    let sg = if sign > 0 { T::one() } else { -T::one() };
    let amp = f.amplitude * lit(2.0);
    let tol = match &f.profile {
        Profile2D::Gaussian { .. } => WINDOW_TOL,
        Profile2D::Bump { .. } => NUMERIC_WINDOW_TOL,
    };
    let eval: Evaluator<T> = match &f.profile {
        Profile2D::Gaussian { center, width } => {
            let (c, s) = (*center, *width);
            let norm = T::PI() * lit(2.0) * s * s * amp;
            Arc::new(move |z: Complex<T>| {
                let km = z.exp() * sg;
                let kp = (-z).exp() * sg;
                let i = Complex::new(T::zero(), T::one());
                let half_s2 = s * s / lit(2.0);
                (i * km * c.minus - km * km * half_s2 + i * kp * c.plus - kp * kp * half_s2).exp() * norm
            })
        }
        Profile2D::Bump { minus, plus } => {
            let km = FourierKernel::new(minus.clone(), 0, T::one());
            let kp = FourierKernel::new(plus.clone(), 0, T::one());
            let strip = sign > 0 && f.wedge_flag();
            km.validate(quad.target_abs_error, strip, |z| z.exp() * sg)?;
            kp.validate(quad.target_abs_error, strip, |z| (-z).exp() * sg)?;
            Arc::new(move |z: Complex<T>| km.eval(z.exp() * sg, 1) * kp.eval((-z).exp() * sg, 1) * amp)
        }
    };
    let (window, _) = super::vector::scan_window(&eval, T::zero(), (lit(-14.0), lit(14.0)), lit(0.125), tol)
        .ok_or(OneParticleError::InvalidParameter("transform vanishes identically".into()))?;
    let hardy = sign > 0 && f.wedge_flag();
    Ok(RapidityVector::from_evaluator(eval, Analyticity::Strip, window, hardy, if sign > 0 { "f+" } else { "f-" }))
}
