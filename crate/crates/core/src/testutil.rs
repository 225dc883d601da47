//! Shared helpers for unit tests.

pub use crate::famgen::random::{random_matrix, random_unitary, rng};
