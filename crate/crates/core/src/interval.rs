//! Rational interval enclosures with outward dyadic rounding, plus rigorous
//! `ln` and rational powers of integers.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{self, Scalar};

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Enclosure {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo <= hi, "empty enclosure");
        Enclosure { lo, hi }
    }

    pub fn exact(v: Scalar) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        (scalar::to_f64(&self.lo) + scalar::to_f64(&self.hi)) / 2.0
    }

    /// Strictly below `other` everywhere.
    pub fn lt(&self, other: &Enclosure) -> bool {
        self.hi < other.lo
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let c = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        Enclosure { lo, hi }
    }

    pub fn scale(&self, k: &Scalar) -> Enclosure {
        self.mul(&Enclosure::exact(k.clone()))
    }

    /// `1 / self` for a strictly positive enclosure.
    pub fn recip(&self) -> Enclosure {
        assert!(self.lo.is_positive(), "reciprocal of a non-positive enclosure");
        Enclosure { lo: self.hi.recip(), hi: self.lo.recip() }
    }

    pub fn div(&self, other: &Enclosure) -> Enclosure {
        self.mul(&other.recip())
    }

    /// Rounds both ends outward to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Enclosure {
        Enclosure { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", scalar::to_string(&self.lo), scalar::to_string(&self.hi))
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

pub fn floor_dyadic(x: &Scalar, bits: u32) -> Scalar {
    let s = pow2(bits);
    let n = (x * Scalar::from_integer(s.clone())).floor().to_integer();
    Scalar::new(n, s)
}

pub fn ceil_dyadic(x: &Scalar, bits: u32) -> Scalar {
    let s = pow2(bits);
    let n = (x * Scalar::from_integer(s.clone())).ceil().to_integer();
    Scalar::new(n, s)
}

/// Enclosure of `2·atanh(z) = Σ 2 z^{2i+1}/(2i+1)` for `0 <= z <= 1/3`, with
/// the tail bounded by the geometric series `2 z^{2N+3} / ((2N+3)(1 - z²))`.
fn two_atanh(z: &Scalar, bits: u32) -> Enclosure {
    let two = scalar::int(2);
    let tol = Scalar::new(BigInt::one(), pow2(bits + 4));
    let z2 = z * z;
    let denom_tail = Scalar::one() - &z2;
    let mut sum = Scalar::zero();
    let mut power = z.clone();
    let mut i: i64 = 0;
    loop {
        sum += &two * &power / scalar::int(2 * i + 1);
        power *= &z2;
        let tail = &two * &power / (scalar::int(2 * i + 3) * &denom_tail);
        if tail <= tol {
            return Enclosure { lo: sum.clone(), hi: sum + tail }.round_out(bits + 2);
        }
        i += 1;
    }
}

/// `ln 2` to within `2^-bits`.
pub fn ln2(bits: u32) -> Enclosure {
    two_atanh(&scalar::ratio(1, 3), bits)
}

/// Rigorous enclosure of `ln x` for rational `x > 0`, width about `2^-bits`.
pub fn ln(x: &Scalar, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "ln of a non-positive number");
    if x.is_one() {
        return Enclosure::exact(Scalar::zero());
    }
    // x = 2^k · y with y in [1, 2).
    let mut k: i64 = (x.numer().bits() as i64) - (x.denom().bits() as i64);
    let mut y =
        if k >= 0 { x / Scalar::from_integer(pow2(k as u32)) } else { x * Scalar::from_integer(pow2((-k) as u32)) };
    while y >= scalar::int(2) {
        y /= scalar::int(2);
        k += 1;
    }
    while y < Scalar::one() {
        y *= scalar::int(2);
        k -= 1;
    }
    let guard = bits + 8 + (64 - k.unsigned_abs().leading_zeros());
    let z = (&y - Scalar::one()) / (&y + Scalar::one());
    let frac = two_atanh(&z, guard);
    let whole = ln2(guard).scale(&scalar::int(k));
    frac.add(&whole).round_out(bits + 2)
}

/// `[ln lo, ln hi]` for a positive enclosure.
pub fn ln_enclosure(e: &Enclosure, bits: u32) -> Enclosure {
    Enclosure { lo: ln(&e.lo, bits).lo, hi: ln(&e.hi, bits).hi }
}

/// Enclosure of `base^(num/den)` for integers `base >= 1`, `den >= 1`.
/// Exact when the root is rational; otherwise of width `2^-bits`.
pub fn rational_power(base: u64, num: u64, den: u64, bits: u32) -> Enclosure {
    assert!(base >= 1 && den >= 1);
    let g = num.gcd(&den).max(1);
    let (num, den) = (num / g, den / g);
    let value = BigUint::from(base).pow(num as u32);
    if den == 1 {
        return Enclosure::exact(Scalar::from_integer(value.into()));
    }
    let exact_root = value.nth_root(den as u32);
    if exact_root.pow(den as u32) == value {
        return Enclosure::exact(Scalar::from_integer(exact_root.into()));
    }
    let scaled = value << (bits as usize * den as usize);
    let r = scaled.nth_root(den as u32);
    let s = pow2(bits);
    Enclosure { lo: Scalar::new(BigInt::from(r.clone()), s.clone()), hi: Scalar::new(BigInt::from(r + 1u32), s) }
}

/// Integer power of a nonnegative enclosure.
pub fn powi(e: &Enclosure, k: u32) -> Enclosure {
    assert!(!e.lo.is_negative());
    Enclosure { lo: num_traits::pow(e.lo.clone(), k as usize), hi: num_traits::pow(e.hi.clone(), k as usize) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(e: &Enclosure, v: f64, tol: f64) -> bool {
        (e.midpoint_f64() - v).abs() < tol
    }

    #[test]
    fn ln_values() {
        for (x, v) in [(2.0, std::f64::consts::LN_2), (3.0, 3f64.ln()), (10.0, 10f64.ln()), (0.3, 0.3f64.ln())] {
            let q = Scalar::new(BigInt::from((x * 10.0) as i64), BigInt::from(10));
            let e = ln(&q, 60);
            assert!(e.width() <= Scalar::new(BigInt::one(), pow2(58)));
            assert!(approx(&e, v, 1e-12), "ln {x}: {e}");
        }
        assert!(ln(&Scalar::one(), 10).is_exact());
    }

    #[test]
    fn ln_brackets_exp_series() {
        // exp(lo) <= 3 <= exp(hi) with a truncated (lower-bounding) series
        // for the left side and the right side checked through 3·exp(-hi).
        let e = ln(&scalar::int(3), 40);
        let exp_lower = |x: &Scalar| {
            let mut term = Scalar::one();
            let mut sum = Scalar::one();
            for i in 1..40 {
                term = term * x / scalar::int(i);
                sum += &term;
            }
            sum
        };
        assert!(exp_lower(&e.lo) <= scalar::int(3));
        assert!(exp_lower(&e.hi) >= scalar::int(3));
    }

    #[test]
    fn rational_powers() {
        assert_eq!(rational_power(4, 4, 1, 30), Enclosure::exact(scalar::int(256)));
        assert_eq!(rational_power(5, 6, 2, 30), Enclosure::exact(scalar::int(125)));
        assert_eq!(rational_power(256, 1, 2, 30), Enclosure::exact(scalar::int(16)));
        let e = rational_power(6, 8, 3, 40);
        assert!(approx(&e, 6f64.powf(8.0 / 3.0), 1e-9));
        assert!(num_traits::pow(e.lo.clone(), 3) <= scalar::int(6i64.pow(8)));
        assert!(num_traits::pow(e.hi.clone(), 3) >= scalar::int(6i64.pow(8)));
        assert!(e.width() <= Scalar::new(BigInt::one(), pow2(40)));
    }

    #[test]
    fn arithmetic_and_rounding() {
        let a = Enclosure::new(scalar::ratio(1, 3), scalar::ratio(1, 2));
        let b = Enclosure::new(scalar::int(-1), scalar::int(2));
        let p = a.mul(&b);
        assert_eq!(p, Enclosure::new(scalar::ratio(-1, 2), scalar::int(1)));
        let r = a.round_out(4);
        assert!(r.lo <= a.lo && r.hi >= a.hi);
        assert_eq!(r.lo, scalar::ratio(5, 16));
        assert_eq!(r.hi, scalar::ratio(8, 16));
        assert_eq!(a.recip(), Enclosure::new(scalar::int(2), scalar::int(3)));
    }
}
