use std::fmt;

use super::WickError;

/// Largest number of field factors accepted by the enumerator.
pub const MAX_POINTS: usize = 16;

/// Perfect matching of `{0, …, N−1}`; pairs are stored as `(λ, μ)` with
/// `λ < μ`, sorted by `λ`. `λ` is the annihilating end, `μ` the creating end.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Validates and normalizes a list of pairs over `0..n`.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, WickError> {
        if n % 2 == 1 || pairs.len() * 2 != n {
            return Err(WickError::NotAPartition(format!("{} pairs cannot cover {n} points", pairs.len())));
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (l, m) = (a.min(b), a.max(b));
            if m >= n || l == m || seen[l] || seen[m] {
                return Err(WickError::NotAPartition(format!("pair ({a}, {b}) is invalid or repeats a point")));
            }
            seen[l] = true;
            seen[m] = true;
            out.push((l, m));
        }
        out.sort_unstable();
        Ok(Self { pairs: out })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn points(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Index of the pair containing point `i`.
    pub fn pair_of(&self, i: usize) -> Option<usize> {
        self.pairs.iter().position(|&(l, m)| l == i || m == i)
    }

    /// `pair_index[i]` for every point.
    pub fn pair_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.points()];
        for (k, &(l, m)) in self.pairs.iter().enumerate() {
            idx[l] = k;
            idx[m] = k;
        }
        idx
    }
}

/// Pairs printed 1-based, e.g. `(1,3) (2,4)`.
impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (l, m)) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "({},{})", l + 1, m + 1)?;
        }
        Ok(())
    }
}

/// Streams pair partitions of `0..n` in canonical order: the smallest free
/// point is paired with each larger free point in increasing order, depth
/// first. `n = 0` yields the single empty partition; odd `n` yields nothing.
pub struct PairPartitions {
    n: usize,
    stack: Vec<(usize, usize)>,
    used: Vec<bool>,
    started: bool,
    done: bool,
}

impl PairPartitions {
    pub fn new(n: usize) -> Result<Self, WickError> {
        if n > MAX_POINTS {
            return Err(WickError::TooManyPoints { n, max: MAX_POINTS });
        }
        Ok(Self { n, stack: Vec::new(), used: vec![false; n], started: false, done: n % 2 == 1 })
    }

    fn first_free(&self) -> Option<usize> {
        self.used.iter().position(|u| !*u)
    }

    fn next_free_after(&self, j: usize) -> Option<usize> {
        (j + 1..self.n).find(|&k| !self.used[k])
    }

    /// Greedily pairs the remaining points in canonical order.
    fn complete(&mut self) {
        while let Some(a) = self.first_free() {
            self.used[a] = true;
            let b = self.next_free_after(a).expect("even number of free points");
            self.used[b] = true;
            self.stack.push((a, b));
        }
    }
}

impl Iterator for PairPartitions {
    type Item = PairPartition;

    fn next(&mut self) -> Option<PairPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.complete();
            return Some(PairPartition { pairs: self.stack.clone() });
        }
        while let Some((a, b)) = self.stack.pop() {
            self.used[b] = false;
            if let Some(c) = self.next_free_after(b) {
                self.used[c] = true;
                self.stack.push((a, c));
                self.complete();
                let mut pairs = self.stack.clone();
                pairs.sort_unstable();
                return Some(PairPartition { pairs });
            }
            self.used[a] = false;
        }
        self.done = true;
        None
    }
}

/// All pair partitions of `n` points, collected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSet {
    pub n: usize,
    /// Set when `n` is odd; the partition list is then empty and every
    /// expectation vanishes.
    pub odd: bool,
    pub partitions: Vec<PairPartition>,
}

pub fn enumerate_pair_partitions(n: usize) -> Result<PartitionSet, WickError> {
    let partitions: Vec<PairPartition> = PairPartitions::new(n)?.collect();
    Ok(PartitionSet { n, odd: n % 2 == 1, partitions })
}

/// `(n−1)!!` for even `n`, the number of pair partitions; 0 for odd `n`.
pub fn partition_count(n: usize) -> u64 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n as u64).step_by(2).product()
}
