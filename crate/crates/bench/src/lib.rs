//! Benchmark fixtures shared by the criterion benches.

use peelkit_core::{Point, PointSet};

/// `n` points on the parabola `y = x^2`, a convex-position set.
pub fn parabola(n: i64) -> PointSet {
    PointSet::new(2, (0..n).map(|i| Point::from_ints(&[i, i * i])).collect()).expect("distinct points")
}
