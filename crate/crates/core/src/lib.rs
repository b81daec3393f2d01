//! Exact geometry, covering certification and density search for
//! translative coverings of 3-space by the regular octahedron
//! `C₃ = {|x| + |y| + |z| <= 2}`.

pub mod coverage;
pub mod density;
pub mod error;
pub mod io;
pub mod octahedron;
pub mod overlap;
pub mod polytope;
pub mod scalar;
pub mod search;
pub mod slice;

pub use error::{Error, ParseError, Result};
pub use polytope::{HalfSpace, Intersection, Polytope3, Vec3};
pub use scalar::{Rational, Scalar};
