use num_complex::Complex;

use crate::one_particle::{OneParticleError, RapidityVector};
use crate::scalar::Real;

/// Sign of the deformation parameter carried by a field factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Deformation {
    /// `φ_κ`, affiliated with the deformed algebra.
    Plus,
    /// `φ_{−κ}`, affiliated with its commutant.
    Minus,
    /// `φ_0`.
    None,
}

impl Deformation {
    pub fn sign(self) -> i8 {
        match self {
            Deformation::Plus => 1,
            Deformation::Minus => -1,
            Deformation::None => 0,
        }
    }

    pub fn from_sign(s: i8) -> Option<Self> {
        match s {
            1 => Some(Deformation::Plus),
            -1 => Some(Deformation::Minus),
            0 => Some(Deformation::None),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Deformation::Plus => Deformation::Minus,
            Deformation::Minus => Deformation::Plus,
            Deformation::None => Deformation::None,
        }
    }
}

/// `F = a*_{σκ}(u) + a_{σκ}(v)`.
#[derive(Clone, Debug)]
pub struct Field<T: Real> {
    pub deformation: Deformation,
    pub creation: RapidityVector<T>,
    pub annihilation: RapidityVector<T>,
}

impl<T: Real> Field<T> {
    pub fn new(deformation: Deformation, creation: RapidityVector<T>, annihilation: RapidityVector<T>) -> Self {
        Self { deformation, creation, annihilation }
    }

    /// `a*(ψ) + a(ψ)`. For `ψ ∈ H` this is the field `φ(ψ)`; for other `ψ`
    /// it is the Segal-type operator, symmetric on finite particle vectors.
    pub fn segal(deformation: Deformation, psi: RapidityVector<T>) -> Self {
        Self { deformation, creation: psi.clone(), annihilation: psi }
    }

    /// `a*(ξ) + a(S₁ξ)`, linear in `ξ`.
    pub fn smeared(deformation: Deformation, xi: RapidityVector<T>) -> Result<Self, OneParticleError> {
        let s = xi.tomita()?;
        Ok(Self { deformation, creation: xi, annihilation: s })
    }

    /// Operator adjoint: `a(u) + a*(v)`.
    pub fn adjoint(&self) -> Self {
        Self { deformation: self.deformation, creation: self.annihilation.clone(), annihilation: self.creation.clone() }
    }

    /// `U(Λ_s) F U(Λ_s)*`: both vectors shifted by rapidity `s`.
    pub fn boosted(&self, s: T) -> Self {
        Self { deformation: self.deformation, creation: self.creation.boosted(s), annihilation: self.annihilation.boosted(s) }
    }

    /// `T(x) F T(x)*`.
    pub fn translated(&self, x: T) -> Self {
        Self { deformation: self.deformation, creation: self.creation.translated(x), annihilation: self.annihilation.translated(x) }
    }

    /// `J F J = a*_{−σκ}(Ju) + a_{−σκ}(Jv)`.
    pub fn conjugated(&self) -> Self {
        Self {
            deformation: self.deformation.flipped(),
            creation: self.creation.conjugated(),
            annihilation: self.annihilation.conjugated(),
        }
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { deformation: self.deformation, creation: self.creation.scaled(c), annihilation: self.annihilation.scaled(c.conj()) }
    }

    pub fn is_zero(&self) -> bool {
        self.creation.is_zero() && self.annihilation.is_zero()
    }
}

/// Ordered product of field factors sharing one deformation strength `κ ≥ 0`.
#[derive(Clone, Debug)]
pub struct FieldMonomial<T: Real> {
    pub kappa: T,
    pub factors: Vec<Field<T>>,
}

impl<T: Real> FieldMonomial<T> {
    pub fn new(kappa: T, factors: Vec<Field<T>>) -> Self {
        Self { kappa, factors }
    }

    /// `φ_{σκ}(ψ₁) ⋯ φ_{σκ}(ψ_n)` in the Segal convention.
    pub fn segal(kappa: T, deformation: Deformation, vectors: &[RapidityVector<T>]) -> Self {
        Self { kappa, factors: vectors.iter().map(|v| Field::segal(deformation, v.clone())).collect() }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Product adjoint: reversed order, each factor adjoined.
    pub fn adjoint(&self) -> Self {
        Self { kappa: self.kappa, factors: self.factors.iter().rev().map(Field::adjoint).collect() }
    }

    pub fn boosted(&self, s: T) -> Self {
        Self { kappa: self.kappa, factors: self.factors.iter().map(|f| f.boosted(s)).collect() }
    }

    pub fn translated(&self, x: T) -> Self {
        Self { kappa: self.kappa, factors: self.factors.iter().map(|f| f.translated(x)).collect() }
    }

    pub fn deformations(&self) -> Vec<i8> {
        self.factors.iter().map(|f| f.deformation.sign()).collect()
    }
}
