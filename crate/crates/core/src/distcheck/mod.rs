//! Statistical and numerical checks of distributional identities.

pub mod atoms;
pub mod ecf;
pub mod ks;
pub mod report;

pub use atoms::{density_report, levy_atoms, nu0_mass, nu0_series, pmf_compound_poisson, AtomEntry, AtomTable, ConvolutionPowers, Domain};
pub use ecf::{default_z_grid, ecf, factorization_residual, selfdec_screen, EcfEstimate};
pub use ks::{ks_statistic, ks_two_sample};
pub use report::{ks_critical_value, TestReport, Verdict};
