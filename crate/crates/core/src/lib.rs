//! Dimensions of linear systems of surfaces in P3 with fat points in
//! general position on a smooth elliptic quartic curve.
//!
//! [`dimension::dimension`] computes the exact dimension through Cremona
//! reduction and a three-way case split. [`oracle::oracle_dimension`]
//! measures the same number from an interpolation matrix over a prime
//! field, and [`chow`] checks the Euler-characteristic identities behind
//! the formulas. [`harness`] ties the two routes together for batch runs.

pub mod chow;
pub mod classification;
pub mod combinatorics;
pub mod dimension;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod reduction;

pub use classification::{classify, Classification};
pub use combinatorics::{DefectVector, FatPointSystem};
pub use dimension::{dimension, DimensionReport};
pub use error::{Error, Result};
pub use oracle::{oracle_dimension, OracleConfig, OracleReport};
