//! Exact computation of Pixton's double ramification classes in the strata
//! algebra of the moduli space of stable curves, together with the CohFT
//! constructions they are compared against and numerical certification of the
//! resulting tautological relations.

pub mod arith;
pub mod cohft;
pub mod error;
pub mod graphs;
pub mod intersect;
pub mod pixton;
pub mod strata;
pub mod verify;

pub use arith::{Rational, TruncSeries, UniPoly};
pub use error::{Error, Result};
pub use graphs::{CanonicalKey, StableGraph};
pub use pixton::{PixtonInput, RPolyClass, RSamplePolicy};
pub use strata::{Decoration, Generator, TautClass};
pub use verify::{Comparison, RelationCertificate};
