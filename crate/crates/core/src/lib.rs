//! Exact-arithmetic tools for convex-hull peeling in `R^d`.
//!
//! A peeling sequence of a point set removes, one at a time, a vertex of the
//! convex hull of the points still present. This crate counts and enumerates
//! such sequences, measures how well a point is defended against early
//! removal, builds the recursive point sets that keep the number of peeling
//! sequences small, and evaluates the accompanying growth bounds with
//! rigorous rational enclosures. All geometry is done with exact rationals.

pub mod bounds;
pub mod construction;
pub mod defense;
pub mod error;
pub mod format;
pub mod geom;
pub mod interval;
pub mod lp;
pub mod peeling;
pub mod random;
pub mod scalar;
pub mod verify;

pub use construction::BlockTree;
pub use error::{Error, Result};
pub use format::PointSetFile;
pub use geom::{MembershipCertificate, Point, PointSet};
pub use interval::Enclosure;
pub use scalar::Scalar;
