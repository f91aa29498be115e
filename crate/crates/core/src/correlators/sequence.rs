use num_complex::Complex;
use rayon::prelude::*;

use super::CorrelatorError;
use crate::quad::{integrate_coupled, Coupling, IntegralResult, QuadratureSpec, WeightFactor};
use crate::scalar::Real;
use crate::wick::{
    wick_expand, BlockLayout, ContractionType, Field, FieldMonomial, IntegrandDescriptor, PairPartition, WickExpansion,
};

/// Ordered product `F₁ ⋯ F_N` whose factor `i` is boosted by `shifts[i]`.
/// All factors share `κ`; each carries its own deformation sign.
#[derive(Clone, Debug)]
pub struct FieldSequence<T: Real> {
    pub kappa: T,
    pub fields: Vec<Field<T>>,
    pub shifts: Vec<T>,
}

/// How boosted factors enter a pair integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlowRoute {
    /// Each pair variable is re-centred on its creator's shift; weights of
    /// pairs inside one flowed block are t-independent and the shift moves
    /// into the phase offsets.
    #[default]
    Reduced,
    /// Every vector is boosted in place and phases carry no offsets.
    Physical,
}

impl<T: Real> FieldSequence<T> {
    pub fn new(kappa: T, fields: Vec<Field<T>>) -> Self {
        let shifts = vec![T::zero(); fields.len()];
        Self { kappa, fields, shifts }
    }

    pub fn from_monomial(mono: &FieldMonomial<T>) -> Self {
        Self::new(mono.kappa, mono.factors.clone())
    }

    /// Appends `fields`, each boosted by `shift`.
    pub fn push_block(&mut self, fields: &[Field<T>], shift: T) {
        self.fields.extend_from_slice(fields);
        self.shifts.extend(std::iter::repeat(shift).take(fields.len()));
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn deformations(&self) -> Vec<i8> {
        self.fields.iter().map(|f| f.deformation.sign()).collect()
    }

    /// Operator adjoint of the product, so `ω(adjoint) = conj ω(self)`.
    pub fn adjoint(&self) -> Self {
        Self {
            kappa: self.kappa,
            fields: self.fields.iter().rev().map(Field::adjoint).collect(),
            shifts: self.shifts.iter().rev().copied().collect(),
        }
    }

    /// Factors with their shifts applied to the vectors.
    pub fn materialized(&self) -> Vec<Field<T>> {
        self.fields.iter().zip(&self.shifts).map(|(f, &s)| f.boosted(s)).collect()
    }
}

/// Value of one pair partition of `ω(F₁ ⋯ F_N)`.
pub fn partition_value<T: Real>(
    seq: &FieldSequence<T>,
    partition: &PairPartition,
    descriptor: &IntegrandDescriptor,
    quad: &QuadratureSpec<T>,
    route: FlowRoute,
) -> Result<IntegralResult<T>, CorrelatorError> {
    let pairs = partition.pairs();
    let mut weights = Vec::with_capacity(pairs.len());
    let mut centres = Vec::with_capacity(pairs.len());
    for &(l, m) in pairs {
        let (v, u) = (&seq.fields[l].annihilation, &seq.fields[m].creation);
        if v.is_zero() || u.is_zero() {
            return Ok(IntegralResult::zero());
        }
        let (v, u, centre) = match route {
            FlowRoute::Reduced => (v.boosted(seq.shifts[l] - seq.shifts[m]), u.clone(), seq.shifts[m]),
            FlowRoute::Physical => (v.boosted(seq.shifts[l]), u.boosted(seq.shifts[m]), T::zero()),
        };
        let (vl, vh) = v.window();
        let (ul, uh) = u.window();
        let window = (vl.max(ul), vh.min(uh));
        if !(window.1 > window.0) {
            return Ok(IntegralResult::zero());
        }
        weights.push((window, v, u));
        centres.push(centre);
    }
    let evals: Vec<Box<dyn Fn(T) -> Complex<T> + Sync>> = weights
        .iter()
        .map(|(_, v, u)| {
            let (v, u) = (v.clone(), u.clone());
            Box::new(move |x: T| v.at(x).conj() * u.at(x)) as Box<dyn Fn(T) -> Complex<T> + Sync>
        })
        .collect();
    let factors: Vec<WeightFactor<'_, T>> =
        weights.iter().zip(&evals).map(|((w, _, _), e)| WeightFactor { window: *w, eval: e.as_ref() }).collect();
    let couplings: Vec<Coupling<T>> = descriptor
        .phase
        .iter()
        .map(|p| Coupling {
            a: p.a,
            b: p.b,
            coefficient: seq.kappa * T::from_i32(p.coefficient).unwrap(),
            offset: centres[p.a] - centres[p.b],
        })
        .collect();
    Ok(integrate_coupled(&factors, &couplings, quad)?)
}

/// Per-term values of `ω(F₁ ⋯ F_N)` in canonical partition order.
pub fn term_values<T: Real>(
    seq: &FieldSequence<T>,
    expansion: &WickExpansion,
    quad: &QuadratureSpec<T>,
    route: FlowRoute,
) -> Result<Vec<IntegralResult<T>>, CorrelatorError> {
    if expansion.layout.total() != seq.len() {
        return Err(CorrelatorError::InvalidTask(format!(
            "layout {} does not match {} factors",
            expansion.layout,
            seq.len()
        )));
    }
    expansion
        .terms
        .par_iter()
        .map(|t| partition_value(seq, &t.partition, &t.descriptor, quad, route))
        .collect()
}

/// Sums per-term values into the four type totals, in canonical order.
pub fn type_sums<T: Real>(expansion: &WickExpansion, values: &[IntegralResult<T>]) -> [IntegralResult<T>; 4] {
    let mut out = [IntegralResult::zero(); 4];
    for (t, v) in expansion.terms.iter().zip(values) {
        let k = ContractionType::ALL.iter().position(|&c| c == t.kind).unwrap();
        out[k] = out[k].add(v);
    }
    out
}

/// `ω(F₁ ⋯ F_N)`; exactly zero for odd `N`.
pub fn expectation<T: Real>(seq: &FieldSequence<T>, quad: &QuadratureSpec<T>) -> Result<IntegralResult<T>, CorrelatorError> {
    expectation_with(seq, quad, FlowRoute::Reduced)
}

pub fn expectation_with<T: Real>(
    seq: &FieldSequence<T>,
    quad: &QuadratureSpec<T>,
    route: FlowRoute,
) -> Result<IntegralResult<T>, CorrelatorError> {
    let n = seq.len();
    if n % 2 == 1 {
        return Ok(IntegralResult::zero());
    }
    if seq.fields.iter().any(Field::is_zero) {
        return Ok(IntegralResult::zero());
    }
    let expansion = wick_expand(&BlockLayout::new(0, n, 0, 0), &seq.deformations())?;
    let values = term_values(seq, &expansion, quad, route)?;
    Ok(values.iter().fold(IntegralResult::exact(Complex::new(T::zero(), T::zero())), |acc, v| acc.add(v)))
}

/// `ω(mono)`.
pub fn vacuum_npoint<T: Real>(mono: &FieldMonomial<T>, quad: &QuadratureSpec<T>) -> Result<IntegralResult<T>, CorrelatorError> {
    expectation(&FieldSequence::from_monomial(mono), quad)
}
