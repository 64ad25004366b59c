//! Local unitary classification of pure states of two bosons, two fermions
//! or two distinguishable particles.
//!
//! A state is an `N × N` coefficient matrix (symmetric, antisymmetric or
//! general) acted on by `SU(N)` or `SU(N) × SU(N)`. Orbits are separated by
//! the reduced one-particle spectrum ([`moment`]), represented by a unique
//! slice point ([`mod@slice`]), and sorted into strata whose orbit and fiber
//! dimensions are given in closed form ([`invariants`]) and checked against
//! a numerical symplectic rank computation ([`oracle`]).

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod moment;
pub mod oracle;
pub mod slice;
pub mod states;

pub use error::{Error, Result};
