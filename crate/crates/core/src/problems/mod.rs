//! Problem descriptions and the two benchmark systems.

pub mod catalog;
pub mod example1;
pub mod example2;
pub mod manufactured;
pub mod spec;
pub mod validate;

pub use example1::{example1, example1_slow};
pub use example2::example2;
pub use manufactured::{ManufacturedComponent, ManufacturedSystem, Polynomial};
pub use spec::{DiffusionLaw, Equation, FieldFn, ProblemSpec, ProfileFn};
pub use validate::{validate, Check, Status, ValidationOptions, ValidationReport};
