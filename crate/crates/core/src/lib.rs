pub mod arith;
pub mod asymptotics;
pub mod bosonic;
pub mod degeneracy;
pub mod dynamics;
pub mod error;
pub mod levels;
pub mod measurement;
pub mod ode;
pub mod potential;
pub mod protocol;
pub mod quadrature;
pub mod spectra;
pub mod validation;

pub use error::{Error, Result};
