use num_complex::Complex;
use rayon::prelude::*;

use super::GridSpec;
use crate::one_particle::RapidityVector;
use crate::scalar::{from_usize, Real};

/// Truncated Bose Fock vector on a rapidity grid. Component `n` is a dense
/// row-major array over `grid^n` holding function values (not weighted).
#[derive(Clone, Debug)]
pub struct FockState<T> {
    pub max_particles: usize,
    points: usize,
    components: Vec<Vec<Complex<T>>>,
    /// Norm discarded by creators hitting `max_particles`.
    leakage: T,
}

impl<T: Real> FockState<T> {
    pub const DEFAULT_MAX_PARTICLES: usize = 4;

    pub fn vacuum(max_particles: usize, points: usize) -> Self {
        let mut components = vec![Vec::new(); max_particles + 1];
        components[0] = vec![Complex::new(T::one(), T::zero())];
        Self { max_particles, points, components, leakage: T::zero() }
    }

    pub fn zero(max_particles: usize, points: usize) -> Self {
        Self { max_particles, points, components: vec![Vec::new(); max_particles + 1], leakage: T::zero() }
    }

    /// `ψ` sampled on the grid as a one-particle state.
    pub fn one_particle(psi: &RapidityVector<T>, grid: &GridSpec<T>, max_particles: usize) -> Self {
        let mut s = Self::zero(max_particles.max(1), grid.len());
        s.components[1] = psi.sample(grid.nodes());
        s
    }

    /// Sets component `n` from a full array of `points^n` values.
    pub fn with_component(mut self, n: usize, values: Vec<Complex<T>>) -> Self {
        assert!(n <= self.max_particles, "component above truncation");
        assert_eq!(values.len(), self.points.pow(n as u32), "component size");
        self.components[n] = values;
        self
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Values of component `n`; empty means identically zero.
    pub fn component(&self, n: usize) -> &[Complex<T>] {
        self.components.get(n).map_or(&[], |c| c.as_slice())
    }

    pub(crate) fn component_mut(&mut self, n: usize) -> &mut Vec<Complex<T>> {
        &mut self.components[n]
    }

    pub fn vacuum_amplitude(&self) -> Complex<T> {
        self.components[0].first().copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn leakage(&self) -> T {
        self.leakage
    }

    pub(crate) fn add_leakage(&mut self, x: T) {
        self.leakage = self.leakage + x;
    }

    /// Drops components above `n` without recording leakage; used when the
    /// dropped part provably cannot contribute downstream.
    pub fn truncate(&mut self, n: usize) {
        for c in self.components.iter_mut().skip(n + 1) {
            c.clear();
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.points, other.points, "grid mismatch");
        let max = self.max_particles.max(other.max_particles);
        let mut out = Self::zero(max, self.points);
        for n in 0..=max {
            let (a, b) = (self.component(n), other.component(n));
            out.components[n] = match (a.is_empty(), b.is_empty()) {
                (true, true) => Vec::new(),
                (false, true) => a.to_vec(),
                (true, false) => b.to_vec(),
                _ => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            };
        }
        out.leakage = self.leakage + other.leakage;
        out
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        for comp in &mut out.components {
            for z in comp.iter_mut() {
                *z = *z * c;
            }
        }
        out
    }
}

/// `∏_k w_{i_k}` for every multi-index of `n` grid points.
pub(crate) fn weight_products<T: Real>(weights: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::one()];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| weights.iter().map(move |&w| a * w)).collect();
    }
    out
}

/// `⟨Φ, Χ⟩ = Σ_n ∫ conj Φ_n Χ_n` with the grid weights.
pub fn inner<T: Real>(phi: &FockState<T>, chi: &FockState<T>, grid: &GridSpec<T>) -> Complex<T> {
    let max = phi.max_particles.max(chi.max_particles);
    let mut s = Complex::new(T::zero(), T::zero());
    for n in 0..=max {
        let (a, b) = (phi.component(n), chi.component(n));
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let w = weight_products(grid.weights(), n);
        s = s + a.par_iter().zip(b).zip(&w).map(|((x, y), &w)| x.conj() * y * w).reduce(|| Complex::new(T::zero(), T::zero()), |p, q| p + q);
    }
    s
}

pub fn norm<T: Real>(state: &FockState<T>, grid: &GridSpec<T>) -> T {
    inner(state, state, grid).re.max(T::zero()).sqrt()
}

/// Averages every component over all permutations of its arguments.
pub fn symmetrize<T: Real>(state: &mut FockState<T>) {
    let p = state.points;
    for n in 2..=state.max_particles {
        let comp = state.component(n);
        if comp.is_empty() {
            continue;
        }
        let perms = permutations(n);
        let scale = T::one() / from_usize(perms.len());
        let src = comp.to_vec();
        let out: Vec<Complex<T>> = (0..src.len())
            .into_par_iter()
            .map(|idx| {
                let digits = decode(idx, n, p);
                let mut acc = Complex::new(T::zero(), T::zero());
                for perm in &perms {
                    let mut j = 0;
                    for &k in perm {
                        j = j * p + digits[k];
                    }
                    acc = acc + src[j];
                }
                acc * scale
            })
            .collect();
        *state.component_mut(n) = out;
    }
}

pub(crate) fn decode(mut idx: usize, n: usize, p: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in (0..n).rev() {
        d[k] = idx % p;
        idx /= p;
    }
    d
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}
