//! Topological entropy of nearest-neighbour shifts of finite type on the k-ary tree.
//!
//! Strip approximations and entropy series with rigorous interval enclosures,
//! exact polynomial certificates for their monotonicity, the ratio maps behind the
//! count recursions, and brute-force enumeration to cross-check all of it.

pub mod counts;
pub mod enumeration;
pub mod error;
pub mod matrix;
pub mod numerics;
pub mod poly_verify;
pub mod reproduce;
pub mod simplex_map;
pub mod strip;

pub use counts::{ExactCap, GeneralCountState, GoldenCountState, RatioPoint};
pub use enumeration::Pattern;
pub use error::{Error, Result};
pub use matrix::TransitionMatrix;
pub use numerics::{Integer, Interval, Rational, RationalPolynomial};
pub use poly_verify::MonotonicityCertificate;
pub use simplex_map::{Arity, MapParams, MapPoint};
pub use strip::{SeriesAccumulator, StripReport};
