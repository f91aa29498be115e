//! One-dimensional node/weight rules.

use crate::scalar::{from_usize, lit, Real};

/// Truncation point of the double-exponential parameter `t`.
pub(crate) const DE_TMAX: f64 = 3.2;

/// Number of nodes in each Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 16;

#[derive(Clone, Debug)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre rule with `n` nodes on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Rule<T> {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = from_usize::<T>(n);
    let one = T::one();
    let two = lit::<T>(2.0);
    let tol = T::epsilon() * lit(4.0);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nf + lit(0.5))).cos();
        let mut dp = one;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= tol {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != T::zero() {
            dp = d;
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Rule { nodes, weights }
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let one = T::one();
    let mut p0 = one;
    let mut p1 = x;
    for k in 2..=n {
        let kf = from_usize::<T>(k);
        let p2 = ((lit::<T>(2.0) * kf - one) * x * p1 - (kf - one) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = from_usize::<T>(n);
    let d = nf * (x * p1 - p0) / (x * x - one);
    (p1, d)
}

/// Composite Gauss–Legendre rule with `panels` equal panels on `[a, b]`.
pub fn composite_gauss_legendre<T: Real>(a: T, b: T, panels: usize, base: &Rule<T>) -> Rule<T> {
    let panels = panels.max(1);
    let h = (b - a) / from_usize(panels);
    let half = h / lit(2.0);
    let mut nodes = Vec::with_capacity(panels * base.len());
    let mut weights = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let mid = a + h * (from_usize::<T>(p) + lit(0.5));
        for (x, w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * *x);
            weights.push(half * *w);
        }
    }
    Rule { nodes, weights }
}

/// Tanh–sinh rule on `[a, b]` with step `h` in the transformed variable.
pub fn tanh_sinh<T: Real>(a: T, b: T, h: T) -> Rule<T> {
    let c = (a + b) / lit(2.0);
    let d = (b - a) / lit(2.0);
    let half_pi = T::FRAC_PI_2();
    let m = (lit::<T>(DE_TMAX) / h).floor().to_i64().unwrap_or(0);
    let mut nodes = Vec::with_capacity((2 * m + 1) as usize);
    let mut weights = Vec::with_capacity((2 * m + 1) as usize);
    for j in -m..=m {
        let t = h * T::from_i64(j).unwrap();
        let u = half_pi * t.sinh();
        let ch = u.cosh();
        let w = h * d * half_pi * t.cosh() / (ch * ch);
        if w == T::zero() {
            continue;
        }
        nodes.push(c + d * u.tanh());
        weights.push(w);
    }
    Rule { nodes, weights }
}

/// Sinh–sinh rule for the whole real line with step `h`.
pub fn sinh_sinh<T: Real>(h: T) -> Rule<T> {
    let half_pi = T::FRAC_PI_2();
    let m = (lit::<T>(DE_TMAX) / h).floor().to_i64().unwrap_or(0);
    let mut nodes = Vec::with_capacity((2 * m + 1) as usize);
    let mut weights = Vec::with_capacity((2 * m + 1) as usize);
    for j in -m..=m {
        let t = h * T::from_i64(j).unwrap();
        let u = half_pi * t.sinh();
        nodes.push(u.sinh());
        weights.push(h * half_pi * t.cosh() * u.cosh());
    }
    Rule { nodes, weights }
}

/// Transformed-variable step giving roughly `points` tanh–sinh nodes.
pub fn de_step_for_points<T: Real>(points: usize) -> T {
    lit::<T>(2.0 * DE_TMAX) / from_usize(points.max(2))
}
