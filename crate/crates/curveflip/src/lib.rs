//! Curves on ideal triangulations of punctured surfaces, in normal
//! coordinates, with the moves needed to simplify a triangulation with
//! respect to a curve: edge flips, powers of Dehn twists, and extraction of
//! parallel components.
//!
//! The central entry points are [`simplify::simplify_flips_only`] and
//! [`simplify::simplify_accelerated`]. The accelerated engine reaches a
//! triangulation crossing the curve at most `2 * zeta` times in time
//! polynomial in the bit-size of the curve's coordinates, by tracing crossing
//! points in interval-compressed form and replacing long flip sequences with
//! single twist powers.
//!
//! All operations are pure: triangulations and curves are immutable values.

pub mod bench;
pub mod classify;
pub mod coords;
mod error;
pub mod gen;
pub mod simplify;
pub mod surface;
pub mod tracer;
pub mod twist;

pub use error::{Error, Result};
pub use coords::{MultiCurve, Weight};
pub use surface::{Side, SignedEdge, Triangulation};
