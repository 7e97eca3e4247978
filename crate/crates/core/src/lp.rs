//! Exact feasibility for `A x = b, x >= 0` by the two-phase simplex method
//! restricted to phase one, with Bland's rule so it always terminates.
//!
//! Infeasible systems come back with a Farkas vector `y` satisfying
//! `yᵀA >= 0` and `yᵀb < 0`, read off the optimal phase-one duals.

use num_traits::{Signed, Zero};

use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A nonnegative solution of `A x = b`.
    Feasible(Vec<Scalar>),
    /// `y` with `yᵀA >= 0` componentwise and `yᵀb < 0`.
    Infeasible(Vec<Scalar>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides `A x = b, x >= 0`. `a` is row-major with `rows` rows, each of
/// length `cols`.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Feasibility {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    let cols = a.first().map_or(0, Vec::len);
    let width = cols + rows + 1;
    let rhs = width - 1;

    // Flip rows so the right-hand side is nonnegative.
    let signs: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut tab: Vec<Vec<Scalar>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = Vec::with_capacity(width);
        for v in &a[i] {
            row.push(if signs[i] { -v } else { v.clone() });
        }
        for k in 0..rows {
            row.push(if k == i { Scalar::from_integer(1.into()) } else { Scalar::zero() });
        }
        row.push(if signs[i] { -&b[i] } else { b[i].clone() });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Scalar::zero(); width];
    for j in 0..cols {
        let mut c = Scalar::zero();
        for row in &tab {
            c -= &row[j];
        }
        cost[j] = c;
    }
    {
        let mut z = Scalar::zero();
        for row in &tab {
            z -= &row[rhs];
        }
        cost[rhs] = z;
    }

    loop {
        // Bland: lowest-index column with negative reduced cost.
        let Some(enter) = (0..cols + rows).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Scalar)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let r = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        // Phase one is bounded below by zero, so a leaving row always exists.
        let (pr, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    // Objective value is -cost[rhs].
    if cost[rhs].is_zero() {
        let mut x = vec![Scalar::zero(); cols];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < cols {
                x[bv] = tab[i][rhs].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // Duals y = c_Bᵀ B⁻¹; B⁻¹ sits under the artificial columns.
        let mut y = vec![Scalar::zero(); rows];
        for (i, &bv) in basis.iter().enumerate() {
            if bv >= cols {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += &tab[i][cols + k];
                }
            }
        }
        // Farkas vector for the flipped system is -y; undo the flips.
        let farkas = y.into_iter().zip(&signs).map(|(v, &flip)| if flip { v } else { -v }).collect();
        Feasibility::Infeasible(farkas)
    }
}

fn pivot(tab: &mut [Vec<Scalar>], cost: &mut [Scalar], pr: usize, pc: usize) {
    let inv = tab[pr][pc].recip();
    for v in tab[pr].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let prow = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for (v, p) in cost.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    }
}

/// Checks a claimed Farkas vector exactly.
pub fn verify_farkas(a: &[Vec<Scalar>], b: &[Scalar], y: &[Scalar]) -> bool {
    let cols = a.first().map_or(0, Vec::len);
    let column_ok = (0..cols).all(|j| {
        let s: Scalar = a.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum();
        !s.is_negative()
    });
    column_ok && dot(y, b).is_negative()
}

/// Checks a claimed solution exactly.
pub fn verify_solution(a: &[Vec<Scalar>], b: &[Scalar], x: &[Scalar]) -> bool {
    x.iter().all(|v| !v.is_negative()) && a.iter().zip(b).all(|(row, bi)| dot(row, x) == *bi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn simple_feasible() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let b = vec![int(2), int(0)];
        match solve(&a, &b) {
            Feasibility::Feasible(x) => {
                assert_eq!(x, vec![int(1), int(1)]);
                assert!(verify_solution(&a, &b, &x));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simple_infeasible() {
        // x1 + x2 = -1 with x >= 0
        let a = m(&[&[1, 1]]);
        let b = vec![int(-1)];
        match solve(&a, &b) {
            Feasibility::Infeasible(y) => assert!(verify_farkas(&a, &b, &y)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_rows() {
        // Duplicate constraint rows leave an artificial basic at zero.
        let a = m(&[&[1, 2, 0], &[1, 2, 0], &[0, 1, 1]]);
        let b = vec![int(2), int(2), int(1)];
        let out = solve(&a, &b);
        match out {
            Feasibility::Feasible(x) => assert!(verify_solution(&a, &b, &x)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_solution() {
        let a = vec![vec![int(3), int(0)], vec![int(0), int(7)]];
        let b = vec![int(1), int(2)];
        assert_eq!(solve(&a, &b), Feasibility::Feasible(vec![ratio(1, 3), ratio(2, 7)]));
    }

    proptest! {
        #[test]
        fn certificates_always_verify(
            entries in proptest::collection::vec(-4i64..=4, 12),
            rhs in proptest::collection::vec(-4i64..=4, 3),
        ) {
            let a: Vec<Vec<Scalar>> = entries.chunks(4).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let b: Vec<Scalar> = rhs.iter().map(|&v| int(v)).collect();
            match solve(&a, &b) {
                Feasibility::Feasible(x) => prop_assert!(verify_solution(&a, &b, &x)),
                Feasibility::Infeasible(y) => prop_assert!(verify_farkas(&a, &b, &y)),
            }
        }
    }
}
