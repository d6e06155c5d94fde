//! Graded equivalences and graded extensions of pointed fusion categories.
//!
//! The crate models `Vec^ω(E)` concretely (a finite group `E` plus a normalized
//! 3-cocycle `ω` with values in roots of unity) and provides:
//!
//! * finite groups, automorphisms and grading quotients ([`group`]);
//! * exact twisted group cohomology over finite abelian coefficients and the
//!   `ℂ^×`-valued theory through the integral Bockstein ([`cohomology`], [`cstar`]);
//! * brute-force enumeration of monoidal functors between pointed categories
//!   ([`pointed`]);
//! * metric groups, bosons/fermions and the fermion-twist auto-equivalence
//!   ([`metric`]);
//! * the layered torsor counts for graded equivalences and graded extensions,
//!   cross-checked against enumeration ([`classify`]).
//!
//! All `ℂ^×` values are stored additively as exponents: `x ∈ Z/M` stands for
//! `exp(2πi x / M)`.

pub mod abelian;
pub mod classify;
pub mod cochain;
pub mod cohomology;
pub mod cstar;
pub mod error;
pub mod group;
pub mod metric;
pub mod pointed;
pub mod report;
pub mod suite;
pub mod zmod;

pub use error::{Error, Result};
