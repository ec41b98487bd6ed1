//! Exact-arithmetic homological algebra over Reeb orbit data.
//!
//! The crate reconstructs filtered Morse-Bott complexes from finite orbit
//! records, runs their spectral sequences, extracts the Gysin-type long
//! exact sequence relating symplectic homology and linearized contact
//! homology, and certifies exactness — all over the rationals, with no
//! rounding anywhere.
//!
//! Modules, bottom up:
//!
//! * [`rational`], [`matrix`] — exact scalars and sparse elimination.
//! * [`complex`] — graded chain complexes, validation, homology.
//! * [`oracle`] — an independent dense homology oracle for cross-checks.
//! * [`filtration`] — filtration splitting and spectral sequence pages.
//! * [`gysin`] — long exact sequence extraction and exactness certificates.
//! * [`orbits`] — orbit records and the builders from orbit data to complexes.
//! * [`scenarios`] — executable encodings of the worked examples.

pub mod complex;
pub mod filtration;
pub mod gysin;
pub mod matrix;
pub mod oracle;
pub mod orbits;
pub mod rational;
pub mod scenarios;
#[cfg(feature = "testgen")]
pub mod testing;

pub use complex::{ChainComplex, GradedDims, Generator, HomologyClass, Window};
pub use filtration::{FilteredComplex, Page};
pub use gysin::{ExactnessCertificate, LongExactSequence};
pub use orbits::{OrbitSet, ReebOrbit};
pub use rational::Rational;
