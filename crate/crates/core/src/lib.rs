//! Numerical engine for modular-flow limits of Wick-expanded correlators in
//! free fields deformed by warped convolution.
//!
//! The one-particle space is `L²(ℝ, dθ)` in rapidity. Deformed fields carry a
//! translation twist `U(Q_κ p(θ))`; their vacuum expectations reduce to sums
//! over pair partitions with an exactly known phase. The modular flow of the
//! right wedge acts as a rapidity shift. [`correlators`] evaluates
//! `⟨Ψ(l*), σ_t(X Y′) Ψ(r)⟩` along a grid of flow parameters and compares it
//! with its predicted large-`|t|` limit. [`fock_oracle`] recomputes the same
//! quantities by brute force on a discretized Fock space.
//!
//! Everything is generic over [`Real`]. The `*F64` aliases below fix `f64`.

pub mod correlators;
pub mod fock_oracle;
pub mod one_particle;
pub mod quad;
pub mod scalar;
pub mod wick;

pub use num_complex::Complex;
pub use scalar::{lit, Real};

pub type Complex64 = Complex<f64>;
pub type QuadratureSpecF64 = quad::QuadratureSpec<f64>;
pub type IntegralResultF64 = quad::IntegralResult<f64>;
pub type RapidityVectorF64 = one_particle::RapidityVector<f64>;
pub type TestFunction1DF64 = one_particle::TestFunction1D<f64>;
pub type TestFunction2DF64 = one_particle::TestFunction2D<f64>;
pub type FieldF64 = wick::Field<f64>;
pub type FieldMonomialF64 = wick::FieldMonomial<f64>;
pub type CorrelatorTaskF64 = correlators::CorrelatorTask<f64>;
pub type LimitReportF64 = correlators::LimitReport<f64>;
pub type FockStateF64 = fock_oracle::FockState<f64>;
pub type GridSpecF64 = fock_oracle::GridSpec<f64>;
