//! Parametric Lévy families: triplets, characteristic functions, increment
//! and path samplers.

pub mod cf;
pub mod path;
pub mod sample;
pub mod spec;
pub mod triplet;

pub use cf::cf_exact;
pub use path::{default_step, sample_path, PathSkeleton};
pub use sample::sample_increment;
pub use spec::ProcessSpec;
pub use triplet::{tail_mass, triplet_of, LevyMeasureDescriptor, LevyTriplet};
