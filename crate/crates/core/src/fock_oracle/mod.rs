//! Brute-force check of the Wick pipeline: a truncated Bose Fock space on
//! a rapidity grid with the deformed creation and annihilation kernels
//! applied literally, one factor at a time.
//!
//! Components are dense arrays over `grid^n`, so memory grows like
//! `points^n`. Products are evaluated right to left and components that
//! can no longer return to the vacuum are dropped as soon as they appear,
//! which makes the truncation exact rather than approximate.

mod grid;
mod ops;
mod state;

pub use grid::GridSpec;
pub use ops::{apply_annihilator, apply_boost, apply_creator, apply_field, apply_field_operator, apply_modular_flow};
pub use state::{inner, norm, symmetrize, FockState};

use num_complex::Complex;
use thiserror::Error;

use crate::correlators::{CorrelatorTask, FieldSequence};
use crate::one_particle::OneParticleError;
use crate::scalar::{lit, Real};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{factors} factors need {needed} particles; grid of {points} points exceeds the memory cap of {cap} entries")]
    MemoryGuard { factors: usize, needed: usize, points: usize, cap: usize },
    #[error(transparent)]
    OneParticle(#[from] OneParticleError),
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Starting node count; halved until the memory cap is met.
    pub points: usize,
    /// Largest dense component, in complex entries.
    pub max_entries: usize,
    /// Fewest nodes accepted after halving.
    pub min_points: usize,
    /// Most factors accepted.
    pub max_factors: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { points: 256, max_entries: 1 << 26, min_points: 64, max_factors: 6 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleValue<T> {
    pub value: Complex<T>,
    /// `|value(P) − value(P/2)|`.
    pub error_estimate: T,
    pub leakage: T,
    pub points: usize,
}

/// `ω(F₁ ⋯ F_N)` on one grid, applying `F_N` first. After factor `j`
/// (0-based) has been applied, components above `j` particles are dropped:
/// `j` factors remain and each changes the particle number by one.
pub fn oracle_expectation_on<T: Real>(seq: &FieldSequence<T>, grid: &GridSpec<T>) -> (Complex<T>, T) {
    let fields = seq.materialized();
    let n = fields.len();
    if n % 2 == 1 {
        return (Complex::new(T::zero(), T::zero()), T::zero());
    }
    let needed = n / 2;
    let mut state = FockState::vacuum(needed, grid.len());
    for (j, f) in fields.iter().enumerate().rev() {
        state = ops::field_operator(seq.kappa, f, &state, grid, Some(j.min(needed)));
        symmetrize(&mut state);
    }
    (state.vacuum_amplitude(), state.leakage())
}

/// Grid covering every factor vector of the sequence.
pub fn grid_for<T: Real>(seq: &FieldSequence<T>, points: usize) -> Result<GridSpec<T>, OracleError> {
    let windows: Vec<(T, T)> = seq
        .materialized()
        .iter()
        .flat_map(|f| [f.creation.window(), f.annihilation.window()])
        .filter(|w| w.1 > w.0)
        .collect();
    GridSpec::covering(&windows, points, lit(0.0))
}

/// Node count after the memory guard for `n` factors.
pub fn guarded_points(n: usize, opts: &OracleOptions) -> Result<usize, OracleError> {
    let needed = (n / 2) as u32;
    let mut p = opts.points;
    while needed > 0 && (p as u128).pow(needed) > opts.max_entries as u128 {
        p /= 2;
    }
    if n > opts.max_factors || p < opts.min_points {
        return Err(OracleError::MemoryGuard { factors: n, needed: needed as usize, points: p, cap: opts.max_entries });
    }
    Ok(p)
}

pub fn oracle_sequence<T: Real>(seq: &FieldSequence<T>, opts: &OracleOptions) -> Result<OracleValue<T>, OracleError> {
    let points = guarded_points(seq.len(), opts)?;
    let grid = grid_for(seq, points)?;
    let (fine, leak) = oracle_expectation_on(seq, &grid);
    let (coarse, _) = oracle_expectation_on(seq, &grid.halved());
    Ok(OracleValue { value: fine, error_estimate: (fine - coarse).norm(), leakage: leak, points: grid.len() })
}

/// `⟨Ψ(l*), σ_t(X Y′) Ψ(r)⟩` without Wick expansion.
pub fn oracle_matrix_element<T: Real>(task: &CorrelatorTask<T>, t: T, opts: &OracleOptions) -> Result<OracleValue<T>, OracleError> {
    oracle_sequence(&task.sequence(t), opts)
}
