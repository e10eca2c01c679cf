//! Homological algebra over finite categories with integer coefficients.

pub mod abgroup;
pub mod bar;
pub mod category;
pub mod ext;
pub mod hom;
pub mod module;
pub mod projective;
pub mod resolution;

pub use abgroup::AbGroupInvariants;
pub use category::{FinCategory, Functor};
pub use module::{CatModule, NatMap};
