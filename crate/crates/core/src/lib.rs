//! One-dimensional rate-independent system laboratory.
//!
//! Given a driven energy `E(t,x)` and the dissipation distance `|.|`, this
//! crate computes energetic solutions (incremental global minimization) and
//! local solutions (stick / slide / jump regime switching), audits
//! trajectories against the weak-solution conditions and their regularity
//! structure (jump detection, point classification, SBV decomposition),
//! checks the non-degeneracy hypotheses H1..H5 on a box, and constructs
//! adversarial smooth energies for which an arbitrary increasing driver is an
//! energetic solution.
//!
//! All numerics are generic over the scalar type via [`scalar::Scalar`];
//! `f64` aliases are exported at the crate root.

pub mod analyzer;
pub mod constructed;
pub mod driver;
pub mod energetic;
pub mod error;
pub mod hypotheses;
pub mod jet;
pub mod local;
pub mod model;
pub mod rootfind;
pub mod scalar;
pub mod signfield;
pub mod trajectory;
pub mod validate;

pub use error::{Result, RiError};
pub use scalar::Scalar;

/// Concrete `f64` aliases for the main domain types.
pub type Jet64 = jet::Jet3<f64>;
pub type Model64 = model::EnergyModel<f64>;
pub type Driver64 = driver::MonotoneDriver<f64>;
pub type SignField64 = signfield::SignField<f64>;
pub type Trajectory64 = trajectory::Trajectory<f64>;

/// Concrete `f32` aliases (reduced-precision instantiation).
pub type Jet32 = jet::Jet3<f32>;
pub type Model32 = model::EnergyModel<f32>;
pub type Trajectory32 = trajectory::Trajectory<f32>;
