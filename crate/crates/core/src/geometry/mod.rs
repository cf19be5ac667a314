//! Closed convex cones, their polars and generators, support functions,
//! and the distance/support-function identity.

pub mod cone;
pub mod distance;
pub mod generator;
pub mod norm;

pub use cone::{ConeSpec, Sign};
pub use distance::{distance_to_cone, moreau_decompose};
pub use generator::{cap_generator, GeneratorRepr, GeneratorSet};
pub use norm::NormTag;
