//! Genus-2 hyperelliptic pairings at desk scale.
//!
//! Layering, bottom to top: [`field`] and [`poly`] provide exact arithmetic,
//! [`curve`] the curve model and Frobenius data, [`jacobian`] Mumford-form
//! divisor classes, [`miller`] Miller functions, [`pairings`] the pairing
//! family, and [`pfsearch`] the parameter search.  [`io`] handles JSON
//! interchange and [`verify`] runs the randomized identity suite.

pub mod arith;
pub mod curve;
pub mod error;
pub mod field;
pub mod io;
pub mod jacobian;
pub mod miller;
pub mod pairings;
pub mod pfsearch;
pub mod poly;
pub mod verify;

pub use error::{Error, Result};
