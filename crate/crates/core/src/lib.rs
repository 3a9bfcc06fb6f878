//! Simulation and verification toolkit for exponential functionals of Lévy
//! processes, `Z = ∫₀^{∞-} e^{-X_{s-}} dY_s`, and the generalized
//! Ornstein–Uhlenbeck processes they drive.
//!
//! * [`levy`]: process specifications, triplets, characteristic functions and
//!   exact samplers for the supported families.
//! * [`existence`]: the analytic criterion for `Z` to exist.
//! * [`exfunc`]: pathwise, series and closed-form samplers for `Z`.
//! * [`gou`]: generalized OU paths, the L-transformation and the stationarity
//!   check.
//! * [`distcheck`]: KS and characteristic-function checks, the
//!   selfdecomposability screen and Lévy-measure atom tables.
//! * [`cli`]: run configuration and artifact output for the `exlevy` binary.

pub mod cli;
pub mod distcheck;
pub(crate) mod engine;
pub mod error;
pub mod existence;
pub mod exfunc;
pub mod gou;
pub mod levy;
pub mod quad;
pub mod rng;
pub mod special;

pub use engine::IntegrationScheme;
pub use error::{Error, Result};
