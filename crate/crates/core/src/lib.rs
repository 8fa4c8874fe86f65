//! Exact and numerical machinery for higher-order cusp forms.
//!
//! The crate has two halves. The exact half (`index`, `shuffle`, `formal`)
//! manipulates formal symbols with declared transformation laws and checks
//! identities by normal-form comparison. The numeric half (`qseries`,
//! `periods`, `poincare`) evaluates truncated series on a concrete group.

pub mod formal;
pub mod group;
pub mod index;
pub mod periods;
pub mod poincare;
pub mod qseries;
pub mod report;
pub mod shuffle;

pub use report::VerificationReport;
