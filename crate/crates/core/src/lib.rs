//! Joint similarity of commuting power-bounded matrix families to
//! contractions.
//!
//! The pipeline profiles each member's eigenstructure ([`spectra`]), splits
//! `C^n` into joint invariant subspaces on which every member is either a
//! scalar or has spectrum inside its defective eigenvalues ([`decomp`]), and
//! assembles one similarity `Y` with `||Y T Y^-1|| <= 1` for every member,
//! together with a bound on `||Y||` ([`simjoint`]).

pub mod decomp;
pub mod error;
pub mod famgen;
pub mod matcore;
pub mod simjoint;
pub mod spectra;

mod family;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use family::FamilySpec;
pub use matcore::{CMatrix, ToleranceConfig, C64};
