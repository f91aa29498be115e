//! Integrals of the form `∫ ∏_k w_k(θ_k) ∏_c exp(i c sinh(θ_a − θ_b + o)) dθ`.
//!
//! Variables split into connected components of the coupling graph and each
//! component is integrated separately. Inside a component, variables with at
//! most one remaining neighbour are summed out into that neighbour's weight,
//! so tree-shaped graphs cost `O(n²)` per edge. Only cyclic cores fall back to
//! a full tensor sum. Node counts per variable follow a bound on the local
//! phase frequency.

use num_complex::Complex;
use rayon::prelude::*;

use super::rules::{composite_gauss_legendre, gauss_legendre, Rule, PANEL_ORDER};
use super::{cis, ceil_usize, integrate_interval, IntegralResult, QuadError, QuadratureSpec};
use crate::scalar::{from_usize, lit, Real};

/// Samples taken when trimming a window to its effective support.
const TRIM_SAMPLES: usize = 257;
/// Pairwise phase tables are cached up to this many entries.
const TABLE_LIMIT: usize = 4_000_000;

pub struct WeightFactor<'a, T> {
    /// Interval outside which the weight is negligible.
    pub window: (T, T),
    pub eval: &'a (dyn Fn(T) -> Complex<T> + Sync),
}

/// Phase `exp(i · coefficient · sinh(θ_a − θ_b + offset))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling<T> {
    pub a: usize,
    pub b: usize,
    pub coefficient: T,
    pub offset: T,
}

pub fn integrate_coupled<T: Real>(
    factors: &[WeightFactor<'_, T>],
    couplings: &[Coupling<T>],
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>, QuadError> {
    spec.validate()?;
    let d = factors.len();
    for c in couplings {
        if c.a >= d || c.b >= d || c.a == c.b {
            return Err(QuadError::InvalidSpec(format!("coupling ({}, {}) out of range", c.a, c.b)));
        }
    }
    let couplings: Vec<Coupling<T>> = couplings.iter().copied().filter(|c| c.coefficient != T::zero()).collect();
    if d == 0 {
        return Ok(IntegralResult::exact(Complex::new(T::one(), T::zero())));
    }

    let mut windows: Vec<(T, T)> = factors.iter().map(|f| f.window).collect();
    if windows.iter().any(|(lo, hi)| !(hi > lo)) {
        return Ok(IntegralResult::zero());
    }
    let trim = match trim_windows(factors, &mut windows, spec.target_abs_error) {
        Some(t) => t,
        None => return Ok(IntegralResult::zero()),
    };
    let spans: Vec<T> = couplings.iter().map(|c| trim.span(c, spec.target_abs_error)).collect();

    let mut total = IntegralResult::exact(Complex::new(T::one(), T::zero()));
    for comp in components(d, &couplings) {
        let (local, local_spans): (Vec<Coupling<T>>, Vec<T>) = couplings
            .iter()
            .zip(&spans)
            .filter(|(c, _)| comp.contains(&c.a))
            .map(|(c, s)| {
                let c = Coupling {
                    a: comp.iter().position(|&v| v == c.a).unwrap(),
                    b: comp.iter().position(|&v| v == c.b).unwrap(),
                    ..*c
                };
                (c, *s)
            })
            .unzip();
        let r = if comp.len() == 1 {
            let k = comp[0];
            let (lo, hi) = windows[k];
            integrate_interval(lo, hi, |x| (factors[k].eval)(x), spec)?
        } else {
            let f: Vec<&WeightFactor<'_, T>> = comp.iter().map(|&k| &factors[k]).collect();
            let w: Vec<(T, T)> = comp.iter().map(|&k| windows[k]).collect();
            integrate_component(&f, &w, &local, &local_spans, spec)?
        };
        total = total.mul(&r);
    }
    total.error_estimate = total.error_estimate + trim.tail;
    Ok(total)
}

/// Magnitude samples taken on the untrimmed windows.
struct Trim<T> {
    tail: T,
    grids: Vec<(T, T)>,
    mags: Vec<Vec<T>>,
    mass: Vec<T>,
}

impl<T: Real> Trim<T> {
    /// Largest `|θ_a − θ_b + o|` over sample pairs whose joint weight is
    /// not negligible at the target accuracy.
    fn span(&self, c: &Coupling<T>, target: T) -> T {
        let others: T = (0..self.mass.len())
            .filter(|&j| j != c.a && j != c.b)
            .map(|j| self.mass[j])
            .fold(T::one(), |x, y| x * y);
        let (alo, astep) = self.grids[c.a];
        let (blo, bstep) = self.grids[c.b];
        let cell = astep * bstep;
        let thr = target * lit(0.01) / (others * from_usize(TRIM_SAMPLES * TRIM_SAMPLES));
        let mut span = T::zero();
        for (i, ma) in self.mags[c.a].iter().enumerate() {
            if *ma == T::zero() {
                continue;
            }
            let xa = alo + astep * from_usize(i);
            for (j, mb) in self.mags[c.b].iter().enumerate() {
                if *ma * *mb * cell >= thr {
                    let xb = blo + bstep * from_usize(j);
                    span = span.max((xa - xb + c.offset).abs() + astep + bstep);
                }
            }
        }
        span
    }
}

/// Shrinks each window to where its weight can matter at the target accuracy.
/// Returns `None` when a weight vanishes identically on its samples.
fn trim_windows<T: Real>(factors: &[WeightFactor<'_, T>], windows: &mut [(T, T)], target: T) -> Option<Trim<T>> {
    let d = factors.len();
    let mut mags_all = Vec::with_capacity(d);
    let mut sups = Vec::with_capacity(d);
    let mut grids = Vec::with_capacity(d);
    for (f, &(lo, hi)) in factors.iter().zip(windows.iter()) {
        let step = (hi - lo) / from_usize(TRIM_SAMPLES - 1);
        let mags: Vec<T> = (0..TRIM_SAMPLES).map(|i| (f.eval)(lo + step * from_usize(i)).norm()).collect();
        let sup = mags.iter().copied().fold(T::zero(), T::max);
        if sup == T::zero() {
            return None;
        }
        sups.push(sup);
        mags_all.push(mags);
        grids.push((lo, step));
    }
    let budget = target * lit(0.01);
    let mass: Vec<T> = windows.iter().zip(&sups).map(|(&(lo, hi), s)| *s * (hi - lo)).collect();
    for k in 0..d {
        let (lo, hi) = windows[k];
        let others: T = (0..d).filter(|&j| j != k).map(|j| mass[j]).fold(T::one(), |a, b| a * b);
        let thr = budget / ((hi - lo) * others);
        let mags = &mags_all[k];
        let first = mags.iter().position(|m| *m >= thr);
        let last = mags.iter().rposition(|m| *m >= thr);
        let step = grids[k].1;
        if let (Some(f), Some(l)) = (first, last) {
            let nlo = lo + step * from_usize(f.saturating_sub(1));
            let nhi = lo + step * from_usize((l + 1).min(TRIM_SAMPLES - 1));
            windows[k] = (nlo, nhi.max(nlo + step));
        }
    }
    Some(Trim { tail: budget * from_usize(d), grids, mags: mags_all, mass })
}

fn components<T: Real>(d: usize, couplings: &[Coupling<T>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for c in couplings {
        let (ra, rb) = (find(&mut parent, c.a), find(&mut parent, c.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for v in 0..d {
        let r = find(&mut parent, v);
        match roots.iter().position(|&x| x == r) {
            Some(i) => out[i].push(v),
            None => {
                roots.push(r);
                out.push(vec![v]);
            }
        }
    }
    out
}

fn integrate_component<T: Real>(
    factors: &[&WeightFactor<'_, T>],
    windows: &[(T, T)],
    couplings: &[Coupling<T>],
    spans: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>, QuadError> {
    let d = factors.len();
    let base = gauss_legendre::<T>(PANEL_ORDER);
    let two_pi = T::PI() * lit(2.0);
    let floor_panels = spec.points_per_dim.div_ceil(PANEL_ORDER);
    let mut panels = vec![floor_panels; d];
    for (k, p) in panels.iter_mut().enumerate() {
        let mut rate = T::zero();
        for (c, m) in couplings.iter().zip(spans).filter(|(c, _)| c.a == k || c.b == k) {
            rate = rate + c.coefficient.abs() * m.cosh();
        }
        let periods = rate * (windows[k].1 - windows[k].0) / two_pi;
        *p = (*p).max(ceil_usize(periods / lit(2.0)));
    }

    let mut previous: Option<Complex<T>> = None;
    let mut evaluations = 0usize;
    let mut last_err = T::infinity();
    for level in 0..=spec.max_refinements {
        let scale = 1usize << level;
        let sizes: Vec<usize> = panels.iter().map(|p| p.saturating_mul(scale).saturating_mul(PANEL_ORDER)).collect();
        let cost = elimination_cost(&sizes, couplings);
        if !cost.is_finite() || evaluations as f64 + cost > spec.max_phase_work as f64 {
            if previous.is_none() || level == 1 {
                return Err(QuadError::ResolutionInsufficient { required: evaluations as f64 + cost, cap: spec.max_phase_work });
            }
            break;
        }
        let rules: Vec<Rule<T>> = (0..d)
            .map(|k| composite_gauss_legendre(windows[k].0, windows[k].1, panels[k] * scale, &base))
            .collect();
        let value = eliminate(factors, &rules, couplings);
        evaluations += cost as usize;
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

/// Neighbour sets of the coupling graph restricted to `alive` variables.
fn neighbours<T: Real>(d: usize, couplings: &[Coupling<T>], alive: &[bool]) -> Vec<Vec<usize>> {
    let mut nb = vec![Vec::new(); d];
    for c in couplings {
        if alive[c.a] && alive[c.b] {
            if !nb[c.a].contains(&c.b) {
                nb[c.a].push(c.b);
            }
            if !nb[c.b].contains(&c.a) {
                nb[c.b].push(c.a);
            }
        }
    }
    nb
}

/// Order in which leaves are summed out; the rest is the cyclic core.
fn elimination_order<T: Real>(d: usize, couplings: &[Coupling<T>]) -> (Vec<(usize, Option<usize>)>, Vec<usize>) {
    let mut alive = vec![true; d];
    let mut steps = Vec::new();
    loop {
        let nb = neighbours(d, couplings, &alive);
        let alive_count = alive.iter().filter(|a| **a).count();
        if alive_count <= 1 {
            break;
        }
        match (0..d).find(|&k| alive[k] && nb[k].len() <= 1) {
            Some(k) => {
                steps.push((k, nb[k].first().copied()));
                alive[k] = false;
            }
            None => break,
        }
    }
    let core: Vec<usize> = (0..d).filter(|&k| alive[k]).collect();
    (steps, core)
}

fn elimination_cost<T: Real>(sizes: &[usize], couplings: &[Coupling<T>]) -> f64 {
    let (steps, core) = elimination_order(sizes.len(), couplings);
    let mut cost = 0.0;
    for (k, m) in steps {
        cost += sizes[k] as f64 * m.map_or(1.0, |m| sizes[m] as f64);
    }
    if core.len() > 1 {
        cost += core.iter().map(|&k| sizes[k] as f64).product::<f64>();
    } else {
        cost += core.iter().map(|&k| sizes[k] as f64).sum::<f64>();
    }
    cost
}

fn phase<T: Real>(c: &Coupling<T>, xa: T, xb: T) -> Complex<T> {
    cis(c.coefficient * (xa - xb + c.offset).sinh())
}

fn eliminate<T: Real>(factors: &[&WeightFactor<'_, T>], rules: &[Rule<T>], couplings: &[Coupling<T>]) -> Complex<T> {
    let d = factors.len();
    let mut weights: Vec<Vec<Complex<T>>> = (0..d)
        .map(|k| {
            let r = &rules[k];
            r.nodes.iter().zip(&r.weights).map(|(x, w)| (factors[k].eval)(*x) * *w).collect()
        })
        .collect();
    let (steps, core) = elimination_order(d, couplings);
    let mut scalar = Complex::new(T::one(), T::zero());
    for (k, m) in steps {
        match m {
            None => {
                scalar = scalar * weights[k].iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + *b);
            }
            Some(m) => {
                let edge: Vec<&Coupling<T>> = couplings
                    .iter()
                    .filter(|c| (c.a == k && c.b == m) || (c.a == m && c.b == k))
                    .collect();
                let wk = &weights[k];
                let xk = &rules[k].nodes;
                let factor: Vec<Complex<T>> = rules[m]
                    .nodes
                    .par_iter()
                    .map(|&xm| {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (i, &x) in xk.iter().enumerate() {
                            let mut p = wk[i];
                            for c in &edge {
                                p = p * if c.a == k { phase(c, x, xm) } else { phase(c, xm, x) };
                            }
                            acc = acc + p;
                        }
                        acc
                    })
                    .collect();
                for (w, f) in weights[m].iter_mut().zip(factor) {
                    *w = *w * f;
                }
            }
        }
    }
    match core.len() {
        0 => scalar,
        1 => scalar * weights[core[0]].iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + *b),
        _ => scalar * core_sum(&core, &weights, rules, couplings),
    }
}

/// Brute-force tensor sum over the cyclic core.
fn core_sum<T: Real>(core: &[usize], weights: &[Vec<Complex<T>>], rules: &[Rule<T>], couplings: &[Coupling<T>]) -> Complex<T> {
    let q = core.len();
    let pos = |v: usize| core.iter().position(|&x| x == v).unwrap();
    // couplings[j] lists couplings whose later endpoint sits at level j.
    let mut by_level: Vec<Vec<(usize, Coupling<T>, Option<Vec<Complex<T>>>)>> = vec![Vec::new(); q];
    for c in couplings.iter().filter(|c| core.contains(&c.a) && core.contains(&c.b)) {
        let (pa, pb) = (pos(c.a), pos(c.b));
        let (early, late) = if pa < pb { (pa, pb) } else { (pb, pa) };
        let ne = rules[core[early]].len();
        let nl = rules[core[late]].len();
        let table = (ne * nl <= TABLE_LIMIT).then(|| {
            let xe = &rules[core[early]].nodes;
            let xl = &rules[core[late]].nodes;
            let mut t = Vec::with_capacity(ne * nl);
            for &a in xe {
                for &b in xl {
                    t.push(if pa < pb { phase(c, a, b) } else { phase(c, b, a) });
                }
            }
            t
        });
        by_level[late].push((early, *c, table));
    }
    let n0 = rules[core[0]].len();
    let partial: Vec<Complex<T>> = (0..n0)
        .into_par_iter()
        .map(|i0| {
            let mut idx = vec![0usize; q];
            idx[0] = i0;
            let start = weights[core[0]][i0];
            recurse(1, start, &mut idx, core, weights, rules, &by_level)
        })
        .collect();
    partial.into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
}

#[allow(clippy::type_complexity)]
fn recurse<T: Real>(
    level: usize,
    acc: Complex<T>,
    idx: &mut [usize],
    core: &[usize],
    weights: &[Vec<Complex<T>>],
    rules: &[Rule<T>],
    by_level: &[Vec<(usize, Coupling<T>, Option<Vec<Complex<T>>>)>],
) -> Complex<T> {
    let q = core.len();
    let v = core[level];
    let n = rules[v].len();
    let mut total = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        idx[level] = i;
        let mut p = acc * weights[v][i];
        for (early, c, table) in &by_level[level] {
            let ie = idx[*early];
            p = p * match table {
                Some(t) => t[ie * n + i],
                None => {
                    let xe = rules[core[*early]].nodes[ie];
                    let xl = rules[v].nodes[i];
                    if c.a == core[*early] { phase(c, xe, xl) } else { phase(c, xl, xe) }
                }
            };
        }
        total = total + if level + 1 == q { p } else { recurse(level + 1, p, idx, core, weights, rules, by_level) };
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(x: f64) -> Complex<f64> {
        Complex::new((-2.0 * x * x).exp(), 0.0)
    }

    /// Trapezoid sum on a fine uniform grid; spectrally accurate for
    /// integrands decaying like Gaussians.
    fn trapezoid_2d(kappa: f64, offset: f64, n: usize, w: f64) -> Complex<f64> {
        let h = 2.0 * w / n as f64;
        let mut s = Complex::new(0.0, 0.0);
        for i in 0..=n {
            let x = -w + h * i as f64;
            for j in 0..=n {
                let y = -w + h * j as f64;
                s += gauss(x) * gauss(y) * cis(kappa * (x - y + offset).sinh());
            }
        }
        s * h * h
    }

    #[test]
    fn uncoupled_factors_multiply() {
        let g = |x: f64| gauss(x);
        let f = [WeightFactor { window: (-10.0, 10.0), eval: &g }, WeightFactor { window: (-10.0, 10.0), eval: &g }];
        let r = integrate_coupled(&f, &[], &QuadratureSpec::default()).unwrap();
        assert!((r.value.re - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn coupled_pair_matches_trapezoid_oracle() {
        let g = |x: f64| gauss(x);
        let f = [WeightFactor { window: (-6.0, 6.0), eval: &g }, WeightFactor { window: (-6.0, 6.0), eval: &g }];
        let c = [Coupling { a: 0, b: 1, coefficient: 1.0, offset: 0.0 }];
        let r = integrate_coupled(&f, &c, &QuadratureSpec::default()).unwrap();
        let oracle = trapezoid_2d(1.0, 0.0, 1200, 6.0);
        assert!((r.value - oracle).norm() < 1e-8, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn cyclic_core_matches_leaf_elimination_by_relabelling() {
        // A triangle with one coupling of zero strength is a path.
        let g0 = |x: f64| Complex::new((-(x - 0.2).powi(2) * 16.0).exp(), 0.0);
        let g1 = |x: f64| Complex::new(1.0, 0.3 * x) * (-(x + 0.1).powi(2) * 16.0).exp();
        let g2 = |x: f64| Complex::new((-x * x * 16.0).exp(), 0.0);
        let f = [
            WeightFactor { window: (-3.0, 3.0), eval: &g0 },
            WeightFactor { window: (-3.0, 3.0), eval: &g1 },
            WeightFactor { window: (-3.0, 3.0), eval: &g2 },
        ];
        let path = [
            Coupling { a: 0, b: 1, coefficient: 0.7, offset: 0.5 },
            Coupling { a: 1, b: 2, coefficient: -1.1, offset: 0.0 },
        ];
        let mut tri = path.to_vec();
        tri.push(Coupling { a: 2, b: 0, coefficient: 0.4, offset: -0.3 });
        let spec = QuadratureSpec { points_per_dim: 64, ..Default::default() };
        let rp = integrate_coupled(&f, &path, &spec).unwrap();
        let rt = integrate_coupled(&f, &tri, &spec).unwrap();
        // Brute-force 3D Gauss–Legendre oracle for the triangle.
        let brute = super::super::integrate_box(
            &[super::super::Range::Interval(-3.0, 3.0); 3],
            |x: &[f64]| {
                g0(x[0]) * g1(x[1]) * g2(x[2])
                    * cis(0.7 * (x[0] - x[1] + 0.5).sinh())
                    * cis(-1.1 * (x[1] - x[2]).sinh())
                    * cis(0.4 * (x[2] - x[0] - 0.3).sinh())
            },
            &QuadratureSpec { points_per_dim: 96, scheme: super::super::Scheme::GaussLegendre, ..Default::default() },
        )
        .unwrap();
        assert!((rt.value - brute.value).norm() < 1e-8);
        assert!((rp.value - rt.value).norm() > 1e-3);
    }

    #[test]
    fn resolution_cap_is_reported() {
        let g = |x: f64| gauss(x);
        let f = [WeightFactor { window: (-9.0, 9.0), eval: &g }, WeightFactor { window: (-9.0, 9.0), eval: &g }];
        let c = [Coupling { a: 0, b: 1, coefficient: 1.0, offset: 16.0 }];
        let spec = QuadratureSpec { max_phase_work: 1_000_000, ..Default::default() };
        let e = integrate_coupled(&f, &c, &spec).unwrap_err();
        assert!(matches!(e, QuadError::ResolutionInsufficient { .. }), "{e:?}");
    }

    #[test]
    fn empty_window_gives_zero() {
        let g = |x: f64| gauss(x);
        let f = [WeightFactor { window: (1.0, 1.0), eval: &g }];
        let r = integrate_coupled(&f, &[], &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, Complex::new(0.0, 0.0));
    }
}
