//! Pair-partition expansion of vacuum expectations of deformed free fields.
//!
//! With `a_κ(θ) = a(θ) U(Q_κ p(θ))` every vacuum expectation of a product
//! of fields is a sum over pair partitions. Each term is an integral over
//! one rapidity per pair, with a phase that is a sum of integer multiples of
//! `κ sinh(θ_a − θ_b)`. The integrality is exact and is kept symbolic here.
//! The contraction types I–IV group the terms of the sandwich
//! `⟨Ψ(l*), X Y′ Ψ(r)⟩` by how the blocks `l, f, g, r` are joined.

mod classify;
mod descriptor;
mod field;
mod partition;
mod phase;

pub use classify::{classify, Block, BlockLayout, ContractionType};
pub use descriptor::{wick_expand, IntegrandDescriptor, PairVariable, PhaseTerm, VariableKind, WickExpansion, WickTerm};
pub use field::{Deformation, Field, FieldMonomial};
pub use partition::{enumerate_pair_partitions, partition_count, PairPartition, PairPartitions, PartitionSet, MAX_POINTS};
pub use phase::{deformed_phase, minkowski_dot, on_shell, q_kappa};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WickError {
    #[error("{n} points exceed the enumeration cap of {max}")]
    TooManyPoints { n: usize, max: usize },
    #[error("partition with {points} points does not match layout {layout}")]
    LayoutMismatch { points: usize, layout: BlockLayout },
    #[error("not a pair partition: {0}")]
    NotAPartition(String),
    #[error("layout `{0}` is not of the form a,n,m,b")]
    BadLayout(String),
}

#[cfg(test)]
mod tests;
