//! Exact computations in the augmented marking complex of a complexity-four
//! surface: the Farey graph, combinatorial horoballs over ℤ, augmented
//! markings with their elementary moves, hierarchies with slice
//! resolutions, and the comparison with Teichmüller space of the
//! once-punctured torus.

pub mod config;
pub mod error;
pub mod experiment;
pub mod farey;
pub mod format;
pub mod hierarchy;
pub mod horoball;
pub mod marking;
pub mod teich;
pub mod verify;

pub use error::{Error, Result};
pub use farey::{MappingClass, Slope, SurfaceKind};
pub use horoball::{HoroParams, HoroPoint};
pub use marking::{AugmentedMarking, ElementaryMove};
pub use teich::{TeichParams, TeichPoint};
