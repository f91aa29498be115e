use num_complex::Complex;
use rayon::prelude::*;

use super::state::decode;
use super::{FockState, GridSpec, OracleError};
use crate::one_particle::RapidityVector;
use crate::quad::rules::{gauss_legendre, PANEL_ORDER};
use crate::scalar::{from_usize, lit, Real};
use crate::wick::Field;

/// `E[j][i] = exp(i κ sinh(x_j − x_i))`, row-major.
fn phase_table<T: Real>(kappa: T, nodes: &[T]) -> Vec<Complex<T>> {
    let p = nodes.len();
    let mut e = vec![Complex::new(T::one(), T::zero()); p * p];
    if kappa != T::zero() {
        for j in 0..p {
            for i in 0..p {
                let (s, c) = (kappa * (nodes[j] - nodes[i]).sinh()).sin_cos();
                e[j * p + i] = Complex::new(c, s);
            }
        }
    }
    e
}

/// `(a_κ(ψ)Ψ)_n(θ₁…θ_n) = √(n+1) ∫ conj ψ(θ) ∏_k e^{iκ sinh(θ−θ_k)} Ψ_{n+1}(θ, θ₁…θ_n)`.
pub fn apply_annihilator<T: Real>(kappa: T, psi: &RapidityVector<T>, state: &FockState<T>, grid: &GridSpec<T>) -> FockState<T> {
    let p = grid.len();
    assert_eq!(state.points(), p, "state and grid disagree on node count");
    let max = state.max_particles;
    let mut out = FockState::zero(max.saturating_sub(1), p);
    if max == 0 || psi.is_zero() {
        return out;
    }
    let e = phase_table(kappa, grid.nodes());
    let cw: Vec<Complex<T>> = psi.sample(grid.nodes()).iter().zip(grid.weights()).map(|(v, &w)| v.conj() * w).collect();
    for n in 0..max {
        let src = state.component(n + 1);
        if src.is_empty() {
            continue;
        }
        let stride = p.pow(n as u32);
        let scale: T = from_usize::<T>(n + 1).sqrt();
        let comp: Vec<Complex<T>> = (0..stride)
            .into_par_iter()
            .map(|rest| {
                let digits = decode(rest, n, p);
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..p {
                    let mut f = cw[j];
                    for &d in &digits {
                        f = f * e[j * p + d];
                    }
                    acc = acc + f * src[j * stride + rest];
                }
                acc * scale
            })
            .collect();
        *out.component_mut(n) = comp;
    }
    out.add_leakage(state.leakage());
    out
}

/// `(a*_κ(ψ)Φ)_{n+1}(θ₀…θ_n) = (n+1)^{−1/2} Σ_j ψ(θ_j) ∏_{k≠j} e^{−iκ sinh(θ_j−θ_k)} Φ_n(…θ̂_j…)`.
/// The component that would exceed `max_particles` is dropped and its norm
/// recorded as leakage.
pub fn apply_creator<T: Real>(kappa: T, psi: &RapidityVector<T>, state: &FockState<T>, grid: &GridSpec<T>) -> FockState<T> {
    creator(kappa, psi, state, grid, None)
}

fn creator<T: Real>(kappa: T, psi: &RapidityVector<T>, state: &FockState<T>, grid: &GridSpec<T>, cap: Option<usize>) -> FockState<T> {
    let p = grid.len();
    assert_eq!(state.points(), p, "state and grid disagree on node count");
    let max = state.max_particles;
    let mut out = FockState::zero(max, p);
    out.add_leakage(state.leakage());
    if psi.is_zero() {
        return out;
    }
    let e = phase_table(kappa, grid.nodes());
    let vals = psi.sample(grid.nodes());
    for n in 0..=max {
        let src = state.component(n);
        if src.is_empty() || cap.is_some_and(|c| n + 1 > c) {
            continue;
        }
        let scale = T::one() / from_usize::<T>(n + 1).sqrt();
        let size = p.pow((n + 1) as u32);
        let comp: Vec<Complex<T>> = (0..size)
            .into_par_iter()
            .map(|idx| {
                let digits = decode(idx, n + 1, p);
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..=n {
                    let ij = digits[j];
                    let mut f = vals[ij];
                    let mut rest = 0;
                    for (k, &ik) in digits.iter().enumerate() {
                        if k != j {
                            f = f * e[ij * p + ik].conj();
                            rest = rest * p + ik;
                        }
                    }
                    acc = acc + f * src[rest];
                }
                acc * scale
            })
            .collect();
        if n + 1 > max {
            let w = super::state::weight_products(grid.weights(), n + 1);
            let lost: T = comp.iter().zip(&w).map(|(z, &w)| z.norm_sqr() * w).fold(T::zero(), |a, b| a + b);
            out.add_leakage(lost.sqrt());
        } else {
            *out.component_mut(n + 1) = comp;
        }
    }
    out
}

/// `F = a*_{σκ}(u) + a_{σκ}(v)` applied as two kernels.
pub fn apply_field_operator<T: Real>(kappa: T, field: &Field<T>, state: &FockState<T>, grid: &GridSpec<T>) -> FockState<T> {
    field_operator(kappa, field, state, grid, None)
}

/// With `cap = Some(c)` creators skip results above `c` particles without
/// computing them or recording leakage; callers use this when those
/// components provably cannot matter.
pub(crate) fn field_operator<T: Real>(
    kappa: T,
    field: &Field<T>,
    state: &FockState<T>,
    grid: &GridSpec<T>,
    cap: Option<usize>,
) -> FockState<T> {
    let k = kappa * T::from_i8(field.deformation.sign()).unwrap();
    let c = creator(k, &field.creation, state, grid, cap);
    let mut a = apply_annihilator(k, &field.annihilation, state, grid);
    a.max_particles = state.max_particles;
    let mut s = c.plus(&a);
    s.max_particles = state.max_particles;
    let leak = state.leakage();
    // Both branches carried the input leakage.
    s.add_leakage(-leak);
    s
}

/// `φ_κ(ξ) = a*_κ(ξ) + a_κ(S₁ξ)`.
pub fn apply_field<T: Real>(
    kappa: T,
    xi: &RapidityVector<T>,
    state: &FockState<T>,
    grid: &GridSpec<T>,
) -> Result<FockState<T>, OracleError> {
    let sxi = xi.tomita()?;
    let c = apply_creator(kappa, xi, state, grid);
    let mut a = apply_annihilator(kappa, &sxi, state, grid);
    a.max_particles = state.max_particles;
    let mut s = c.plus(&a);
    s.add_leakage(-state.leakage());
    Ok(s)
}

/// Interpolation matrix taking grid values of `f` to grid values of
/// `f(· − s)`, 16-point Lagrange on the panel containing each source point.
fn shift_matrix<T: Real>(grid: &GridSpec<T>, s: T) -> Vec<Vec<(usize, T)>> {
    let base = gauss_legendre::<T>(PANEL_ORDER);
    let bary: Vec<T> = (0..PANEL_ORDER)
        .map(|j| {
            let mut w = T::one();
            for k in 0..PANEL_ORDER {
                if k != j {
                    w = w * (base.nodes[j] - base.nodes[k]);
                }
            }
            T::one() / w
        })
        .collect();
    let panels = grid.len() / PANEL_ORDER;
    let h = (grid.theta_max - grid.theta_min) / from_usize(panels);
    grid.nodes()
        .iter()
        .map(|&x| {
            let y = x - s;
            let Some(k) = grid.panel_of(y) else {
                return Vec::new();
            };
            let mid = grid.theta_min + h * (from_usize::<T>(k) + lit(0.5));
            let u = (y - mid) / (h / lit(2.0));
            if let Some(j) = base.nodes.iter().position(|&nj| (nj - u).abs() <= T::epsilon()) {
                return vec![(k * PANEL_ORDER + j, T::one())];
            }
            let terms: Vec<T> = (0..PANEL_ORDER).map(|j| bary[j] / (u - base.nodes[j])).collect();
            let denom = terms.iter().fold(T::zero(), |a, &b| a + b);
            terms.iter().enumerate().map(|(j, &t)| (k * PANEL_ORDER + j, t / denom)).collect()
        })
        .collect()
}

/// Second-quantized boost: every argument shifted by `s`. Values pulled in
/// from outside the window are zero; the lost norm is added to leakage.
pub fn apply_boost<T: Real>(state: &FockState<T>, s: T, grid: &GridSpec<T>) -> FockState<T> {
    if s == T::zero() {
        return state.clone();
    }
    let p = grid.len();
    let m = shift_matrix(grid, s);
    let mut out = state.clone();
    for n in 1..=state.max_particles {
        let mut comp = state.component(n).to_vec();
        if comp.is_empty() {
            continue;
        }
        for axis in 0..n {
            let stride = p.pow((n - 1 - axis) as u32);
            comp = (0..comp.len())
                .into_par_iter()
                .map(|idx| {
                    let i = (idx / stride) % p;
                    let base = idx - i * stride;
                    m[i].iter().fold(Complex::new(T::zero(), T::zero()), |a, &(j, c)| a + comp[base + j * stride] * c)
                })
                .collect();
        }
        *out.component_mut(n) = comp;
    }
    let before = super::norm(state, grid);
    let after = super::norm(&out, grid);
    out.add_leakage((before - after).abs());
    out
}

/// `Γ(Δ^{it})`, the boost by `2πt`.
pub fn apply_modular_flow<T: Real>(state: &FockState<T>, t: T, grid: &GridSpec<T>) -> FockState<T> {
    apply_boost(state, T::PI() * lit(2.0) * t, grid)
}
