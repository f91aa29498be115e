use super::{classify, Block, BlockLayout, ContractionType, PairPartition, PairPartitions, WickError};

/// Rapidity variable of one contracted pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairVariable {
    /// Point whose annihilation vector enters conjugated.
    pub annihilator: usize,
    /// Point whose creation vector enters.
    pub creator: usize,
}

/// Phase `exp(i κ c sinh(θ_a − θ_b))` between the variables of pairs `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseTerm {
    pub a: usize,
    pub b: usize,
    pub coefficient: i32,
}

/// Integrand of one pair partition of `ω(F₁ ⋯ F_N)` for
/// `F_i = a*_{σ_i κ}(u_i) + a_{σ_i κ}(v_i)`:
///
/// `∫ ∏_k conj v_{λ_k}(θ_k) u_{μ_k}(θ_k) · exp(i κ Σ c_{ab} sinh(θ_a − θ_b)) dθ`
///
/// The annihilator at point `i` of pair `P` picks up `+σ_i sinh(θ_P − θ_Q)`
/// for every pair `Q` still open at `i` (`λ_Q < i < μ_Q`).
/// The creator picks up `−σ_i sinh(θ_P − θ_Q)` for the same pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrandDescriptor {
    pub variables: Vec<PairVariable>,
    pub phase: Vec<PhaseTerm>,
}

impl IntegrandDescriptor {
    pub fn from_partition(partition: &PairPartition, deformations: &[i8]) -> Result<Self, WickError> {
        let n = partition.points();
        if deformations.len() != n {
            return Err(WickError::LayoutMismatch {
                points: n,
                layout: BlockLayout::new(0, deformations.len(), 0, 0),
            });
        }
        let pairs = partition.pairs();
        let k = pairs.len();
        let variables = pairs.iter().map(|&(l, m)| PairVariable { annihilator: l, creator: m }).collect();
        let mut coeff = vec![0i32; k * k];
        for (p, &(l, m)) in pairs.iter().enumerate() {
            for (i, s) in [(l, 1i32), (m, -1i32)] {
                let sigma = deformations[i] as i32;
                if sigma == 0 {
                    continue;
                }
                for (q, &(lq, mq)) in pairs.iter().enumerate() {
                    if q != p && lq < i && i < mq {
                        // sinh(θ_p − θ_q), stored with the smaller index first.
                        if p < q {
                            coeff[p * k + q] += s * sigma;
                        } else {
                            coeff[q * k + p] -= s * sigma;
                        }
                    }
                }
            }
        }
        let mut phase = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let c = coeff[a * k + b];
                if c != 0 {
                    phase.push(PhaseTerm { a, b, coefficient: c });
                }
            }
        }
        Ok(Self { variables, phase })
    }

    pub fn is_phase_free(&self) -> bool {
        self.phase.is_empty()
    }

    pub fn coefficient(&self, a: usize, b: usize) -> i32 {
        let (x, y, sg) = if a < b { (a, b, 1) } else { (b, a, -1) };
        self.phase.iter().find(|t| t.a == x && t.b == y).map_or(0, |t| sg * t.coefficient)
    }
}

/// Position of a pair variable relative to the flowed blocks `f ∪ g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VariableKind {
    /// Both ends in `l ∪ r`.
    Outer,
    /// Both ends in `f ∪ g`; the whole pair carries the flow shift.
    Inner,
    /// One end in each; only one vector carries the shift.
    Mixed,
}

#[derive(Clone, Debug)]
pub struct WickTerm {
    /// Position in the canonical enumeration.
    pub index: usize,
    pub partition: PairPartition,
    pub kind: ContractionType,
    pub descriptor: IntegrandDescriptor,
    pub variable_kinds: Vec<VariableKind>,
}

impl WickTerm {
    /// Some phase couples an `Outer` variable to an `Inner` one.
    pub fn has_cross_block_phase(&self) -> bool {
        self.descriptor.phase.iter().any(|t| {
            let (x, y) = (self.variable_kinds[t.a], self.variable_kinds[t.b]);
            matches!((x, y), (VariableKind::Outer, VariableKind::Inner) | (VariableKind::Inner, VariableKind::Outer))
        })
    }

    /// `k: (λ₁,μ₁) (λ₂,μ₂) … -> TYPE`, 1-based points.
    pub fn dump_line(&self) -> String {
        format!("{}: {} -> {}", self.index, self.partition, self.kind)
    }
}

#[derive(Clone, Debug)]
pub struct WickExpansion {
    pub layout: BlockLayout,
    /// Odd number of points: no terms, every expectation is zero.
    pub odd: bool,
    pub terms: Vec<WickTerm>,
}

impl WickExpansion {
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&t.dump_line());
            s.push('\n');
        }
        s
    }

    pub fn count(&self, kind: ContractionType) -> usize {
        self.terms.iter().filter(|t| t.kind == kind).count()
    }
}

/// Expands `ω(L X Y′ R)` over the given layout; `deformations[i]` is the
/// deformation sign of point `i`.
pub fn wick_expand(layout: &BlockLayout, deformations: &[i8]) -> Result<WickExpansion, WickError> {
    let n = layout.total();
    if deformations.len() != n {
        return Err(WickError::LayoutMismatch { points: deformations.len(), layout: *layout });
    }
    if n % 2 == 1 {
        PairPartitions::new(n)?;
        return Ok(WickExpansion { layout: *layout, odd: true, terms: Vec::new() });
    }
    let inner = |i: usize| matches!(layout.block_of(i), Block::F | Block::G);
    let mut terms = Vec::new();
    for (index, partition) in PairPartitions::new(n)?.enumerate() {
        let kind = classify(&partition, layout)?;
        let descriptor = IntegrandDescriptor::from_partition(&partition, deformations)?;
        let variable_kinds = partition
            .pairs()
            .iter()
            .map(|&(l, m)| match (inner(l), inner(m)) {
                (true, true) => VariableKind::Inner,
                (false, false) => VariableKind::Outer,
                _ => VariableKind::Mixed,
            })
            .collect();
        terms.push(WickTerm { index, partition, kind, descriptor, variable_kinds });
    }
    Ok(WickExpansion { layout: *layout, odd: false, terms })
}
