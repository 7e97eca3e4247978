//! Growth-rate formulas for the recursive construction, evaluated exactly or
//! as certified rational enclosures.
//!
//! With `D = d + 2m - 1` the construction's growth base is
//! `a = (d+m)^{D/m}`, the leading constant is `c = a^{-d/(d-1)}`, and the
//! number of peeling sequences of an `n`-point construction is at most
//! `c · a^n` for `d >= 3`, `n >= 2`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::interval::{self, Enclosure};
use crate::scalar::{self, Scalar};

pub const DEFAULT_PRECISION: u32 = 64;
const MAX_REFINEMENT_BITS: u32 = 4096;

/// Smallest set size defending a point for `m` steps in `R^d`.
pub fn defense_number(d: usize, m: usize) -> usize {
    d + 2 * m - 1
}

fn require(d: usize, m: usize) -> Result<()> {
    if d < 3 || m < 1 {
        return Err(Error::InvalidArgument(format!("needs d >= 3 and m >= 1 (got d={d}, m={m})")));
    }
    Ok(())
}

/// Enclosure of `a = (d+m)^{(d+2m-1)/m}` of width at most `2^-precision`;
/// exact when `m` divides `d + 2m - 1`.
pub fn growth_base(d: usize, m: usize, precision: u32) -> Result<Enclosure> {
    require(d, m)?;
    Ok(interval::rational_power((d + m) as u64, defense_number(d, m) as u64, m as u64, precision))
}

/// `(d+m)^{D}` = `a^m`, as an exact integer.
pub fn growth_base_power(d: usize, m: usize) -> BigUint {
    BigUint::from(d + m).pow(defense_number(d, m) as u32)
}

/// Exact ordering of `a(d, m1)` against `a(d, m2)`:
/// `a1 < a2 ⟺ (d+m1)^{D1·m2} < (d+m2)^{D2·m1}`.
pub fn compare_growth_base(d: usize, m1: usize, m2: usize) -> Ordering {
    let lhs = BigUint::from(d + m1).pow((defense_number(d, m1) * m2) as u32);
    let rhs = BigUint::from(d + m2).pow((defense_number(d, m2) * m1) as u32);
    lhs.cmp(&rhs)
}

/// Enclosure of `c = a^{-d/(d-1)}`.
pub fn constant_c(d: usize, m: usize, precision: u32) -> Result<Enclosure> {
    require(d, m)?;
    // a^{d/(d-1)} = (d+m)^{D·d / (m(d-1))}
    let num = (defense_number(d, m) * d) as u64;
    let den = (m * (d - 1)) as u64;
    let bits = precision + 2 * (num / den + 2) as u32 * ((d + m) as f64).log2().ceil() as u32;
    Ok(interval::rational_power((d + m) as u64, num, den, bits).recip().round_out(precision + 1))
}

/// Enclosure of `c · a^n = (d+m)^{D(n(d-1) - d) / (m(d-1))}`.
pub fn theorem2_bound(d: usize, m: usize, n: usize, precision: u32) -> Result<Enclosure> {
    require(d, m)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("needs n >= 2 (got {n})")));
    }
    let num = (defense_number(d, m) * (n * (d - 1) - d)) as u64;
    let den = (m * (d - 1)) as u64;
    Ok(interval::rational_power((d + m) as u64, num, den, precision))
}

/// `⌊d ln d⌋`, certified by refining `ln d` until both ends of the
/// enclosure of `d ln d` share a floor.
pub fn theorem1_m(d: usize) -> usize {
    assert!(d >= 1);
    if d == 1 {
        return 0;
    }
    let mut bits = 32;
    loop {
        let e = interval::ln(&scalar::int(d as i64), bits).scale(&scalar::int(d as i64));
        let lo = e.lo.floor();
        if lo == e.hi.floor() {
            return lo.to_integer().to_usize().expect("small");
        }
        bits *= 2;
        assert!(bits <= MAX_REFINEMENT_BITS, "d ln d is irrational; refinement must terminate");
    }
}

/// Minimizer of the growth base over `1..=search_limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalM {
    pub m: usize,
    pub growth_base: Enclosure,
    pub theorem1_m: usize,
}

/// Compares two growth bases by refining enclosures until they separate,
/// falling back to exact integer comparison (also the tie case).
fn order_by_enclosures(d: usize, m1: usize, m2: usize) -> Ordering {
    let mut bits = 16;
    while bits <= 256 {
        let a = interval::rational_power((d + m1) as u64, defense_number(d, m1) as u64, m1 as u64, bits);
        let b = interval::rational_power((d + m2) as u64, defense_number(d, m2) as u64, m2 as u64, bits);
        if a.lt(&b) {
            return Ordering::Less;
        }
        if b.lt(&a) {
            return Ordering::Greater;
        }
        if a.is_exact() && b.is_exact() && a == b {
            return Ordering::Equal;
        }
        bits *= 2;
    }
    compare_growth_base(d, m1, m2)
}

/// The `m` in `1..=search_limit` minimizing `a(d, m)`, ties toward smaller
/// `m`. The limit must reach at least `⌊d ln d⌋ + d`, and the minimizer
/// must fall strictly inside the range.
pub fn optimal_m(d: usize, search_limit: usize, precision: u32) -> Result<OptimalM> {
    require(d, 1)?;
    let t1 = theorem1_m(d);
    if search_limit < t1 + d {
        return Err(Error::InvalidArgument(format!(
            "search limit {search_limit} below floor(d ln d) + d = {}",
            t1 + d
        )));
    }
    let mut best = 1;
    for m in 2..=search_limit {
        if order_by_enclosures(d, m, best) == Ordering::Less {
            best = m;
        }
    }
    if best == search_limit {
        return Err(Error::InvalidArgument(format!(
            "minimum sits on the search boundary m = {search_limit}; widen the search"
        )));
    }
    Ok(OptimalM { m: best, growth_base: growth_base(d, best, precision)?, theorem1_m: t1 })
}

/// Enclosure of `1/L + 2 ln(2L)/L + ln(2L)/L²` with `L = ln d`, the smallest
/// exponent slack that the `m = ⌊d ln d⌋` bound supports.
pub fn corollary_epsilon(d: usize, precision: u32) -> Result<Enclosure> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("needs d >= 3 (got {d})")));
    }
    let bits = precision + 16;
    let l = interval::ln(&scalar::int(d as i64), bits);
    let two_l = l.scale(&scalar::int(2));
    let ln_two_l = interval::ln_enclosure(&two_l, bits);
    let inv_l = l.recip();
    let first = inv_l.clone();
    let second = ln_two_l.mul(&inv_l).scale(&scalar::int(2));
    let third = ln_two_l.mul(&inv_l).mul(&inv_l);
    Ok(first.add(&second).add(&third).round_out(precision))
}

/// Refines until `ε(d2) < ε(d1)` is certified or refuted.
pub fn corollary_epsilon_decreases(d1: usize, d2: usize) -> Result<bool> {
    let mut bits = 24;
    while bits <= 1024 {
        let e1 = corollary_epsilon(d1, bits)?;
        let e2 = corollary_epsilon(d2, bits)?;
        if e2.lt(&e1) {
            return Ok(true);
        }
        if e1.lt(&e2) {
            return Ok(false);
        }
        bits *= 2;
    }
    Ok(false)
}

/// Everything the bounds module reports for one `(d, m, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub d: usize,
    pub m: usize,
    pub n: Option<usize>,
    pub defense_number: usize,
    pub growth_base: Enclosure,
    pub constant_c: Enclosure,
    pub bound_value: Option<Enclosure>,
    pub optimal_m: usize,
    pub optimal_growth_base: Enclosure,
    pub theorem1_m: usize,
    pub corollary_epsilon: Enclosure,
}

/// Collects every formula for `d`, with `m` defaulting to the optimum.
pub fn bound_report(d: usize, m: Option<usize>, n: Option<usize>, precision: u32) -> Result<BoundReport> {
    require(d, m.unwrap_or(1))?;
    let t1 = theorem1_m(d);
    let opt = optimal_m(d, (t1 + d).max(2 * d + 2), precision)?;
    let m = m.unwrap_or(opt.m);
    Ok(BoundReport {
        d,
        m,
        n,
        defense_number: defense_number(d, m),
        growth_base: growth_base(d, m, precision)?,
        constant_c: constant_c(d, m, precision)?,
        bound_value: n.map(|n| theorem2_bound(d, m, n, precision)).transpose()?,
        optimal_m: opt.m,
        optimal_growth_base: opt.growth_base,
        theorem1_m: t1,
        corollary_epsilon: corollary_epsilon(d, precision)?,
    })
}

/// `(d+m)^D == a^m` and `c <= a^{-(d+m-1)/(d+m-2)}`, the two inequalities
/// the induction step needs, checked exactly on exponents and integers.
pub fn induction_identities_hold(d: usize, m: usize) -> bool {
    let big_d = defense_number(d, m);
    // (D - m + 1)^D = (d + m)^D = a^m.
    let lhs = BigUint::from(big_d - m + 1).pow(big_d as u32);
    let power_identity = lhs == growth_base_power(d, m);
    // a >= 1, so a^x is monotone in x; compare -d/(d-1) <= -(d+m-1)/(d+m-2)
    // as rationals.
    let c_exp = -Scalar::new((d as i64).into(), ((d - 1) as i64).into());
    let step_exp = -Scalar::new(((d + m - 1) as i64).into(), ((d + m - 2) as i64).into());
    power_identity && c_exp <= step_exp
}

/// `a^{-(d+m-1)/(d+m-2)}` as an enclosure, for reporting next to `c`.
pub fn step_coefficient(d: usize, m: usize, precision: u32) -> Result<Enclosure> {
    require(d, m)?;
    let num = (defense_number(d, m) * (d + m - 1)) as u64;
    let den = (m * (d + m - 2)) as u64;
    let bits = precision + 2 * (num / den + 2) as u32 * ((d + m) as f64).log2().ceil() as u32;
    Ok(interval::rational_power((d + m) as u64, num, den, bits).recip().round_out(precision + 1))
}
