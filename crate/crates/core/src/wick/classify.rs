use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PairPartition, WickError};

/// Which group of a sandwich `⟨Ψ(l*), X Y′ Ψ(r)⟩` a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    L,
    F,
    G,
    R,
}

/// Block sizes `(a, n, m, b)` for the `l`, `f`, `g`, `r` groups in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockLayout {
    pub a: usize,
    pub n: usize,
    pub m: usize,
    pub b: usize,
}

impl BlockLayout {
    pub fn new(a: usize, n: usize, m: usize, b: usize) -> Self {
        Self { a, n, m, b }
    }

    pub fn total(&self) -> usize {
        self.a + self.n + self.m + self.b
    }

    pub fn is_odd(&self) -> bool {
        self.total() % 2 == 1
    }

    pub fn block_of(&self, i: usize) -> Block {
        if i < self.a {
            Block::L
        } else if i < self.a + self.n {
            Block::F
        } else if i < self.a + self.n + self.m {
            Block::G
        } else {
            Block::R
        }
    }

    fn outer(&self, i: usize) -> bool {
        matches!(self.block_of(i), Block::L | Block::R)
    }
}

impl fmt::Display for BlockLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.n, self.m, self.b)
    }
}

impl FromStr for BlockLayout {
    type Err = WickError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
        match parts.as_deref() {
            Ok([a, n, m, b]) => Ok(Self::new(*a, *n, *m, *b)),
            _ => Err(WickError::BadLayout(s.to_string())),
        }
    }
}

/// Contraction classes, tested in this order:
/// I some pair joins an outer point (`l` or `r`) to an inner one;
/// II every `f` point is paired inside `f`;
/// III some pair joins `l` to `r`;
/// IV everything else.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContractionType {
    I,
    II,
    III,
    IV,
}

impl ContractionType {
    pub const ALL: [ContractionType; 4] = [ContractionType::I, ContractionType::II, ContractionType::III, ContractionType::IV];
}

impl fmt::Display for ContractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ContractionType::I => "I",
            ContractionType::II => "II",
            ContractionType::III => "III",
            ContractionType::IV => "IV",
        };
        f.write_str(s)
    }
}

pub fn classify(partition: &PairPartition, layout: &BlockLayout) -> Result<ContractionType, WickError> {
    if partition.points() != layout.total() {
        return Err(WickError::LayoutMismatch { points: partition.points(), layout: *layout });
    }
    let pairs = partition.pairs();
    if pairs.iter().any(|&(l, m)| layout.outer(l) != layout.outer(m)) {
        return Ok(ContractionType::I);
    }
    let in_f = |i: usize| layout.block_of(i) == Block::F;
    if pairs.iter().all(|&(l, m)| in_f(l) == in_f(m)) {
        return Ok(ContractionType::II);
    }
    if pairs.iter().any(|&(l, m)| layout.block_of(l) == Block::L && layout.block_of(m) == Block::R) {
        return Ok(ContractionType::III);
    }
    Ok(ContractionType::IV)
}
