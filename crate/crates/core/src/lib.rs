//! Orthogonal and symplectic rook monoids: enumeration, Green structure,
//! ideals, congruence lattices and the predicted congruence families.

pub mod congruence;
pub mod counterexample;
pub mod error;
pub mod families;
pub mod green;
pub mod group;
pub mod properties;
pub mod rook;
pub mod universe;

pub use error::{Error, Result};
pub use rook::{Family, PartialInjection};
pub use universe::{Budget, MonoidUniverse};
