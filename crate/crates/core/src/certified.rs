//! Certified rational enclosures of the few transcendental quantities the
//! constructions need (natural logarithms and expressions built from them).
//!
//! `ln x` is evaluated as `k·ln 2 + 2·atanh(z)` with `z = (y−1)/(y+1)`,
//! `y = x/2^k ∈ [1, 2)`, so `0 ≤ z < 1/3`. The series runs in big-integer
//! fixed point with floors on the lower path and ceilings on the upper path,
//! and the truncated tail is bounded by `z^(2J+1) / ((2J+1)(1 − z²))`.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational;

/// Refinement ceiling for comparisons; past this a comparison is reported
/// undecided instead of looping.
pub const DEFAULT_MAX_BITS: u32 = 4096;
const START_BITS: u32 = 64;

/// Closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(q: BigRational) -> Self {
        Enclosure { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rational::int(2)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Position of the enclosed real relative to `q`, when decided.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        if &self.hi < q {
            Some(Ordering::Less)
        } else if &self.lo > q {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn cmp_enclosure(&self, other: &Enclosure) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().cloned().unwrap();
        let hi = c.iter().max().cloned().unwrap();
        Enclosure { lo, hi }
    }

    fn recip(&self) -> Option<Enclosure> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Some(Enclosure {
                lo: self.hi.recip(),
                hi: self.lo.recip(),
            })
        } else {
            None
        }
    }
}

/// A real number given by an expression over rationals and `ln`.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Exact(BigRational),
    /// Natural logarithm of a positive rational.
    Ln(BigRational),
    Sum(Box<Real>, Box<Real>),
    Product(Box<Real>, Box<Real>),
    Quotient(Box<Real>, Box<Real>),
}

impl Real {
    pub fn exact(q: BigRational) -> Real {
        Real::Exact(q)
    }

    pub fn int(n: i64) -> Real {
        Real::Exact(rational::int(n))
    }

    /// `ln q`; panics when `q ≤ 0`.
    pub fn ln(q: BigRational) -> Real {
        assert!(q.is_positive(), "logarithm of a non-positive rational");
        Real::Ln(q)
    }

    pub fn ln_int(n: u64) -> Real {
        Real::ln(rational::int(n))
    }

    pub fn recip(self) -> Real {
        Real::Quotient(Box::new(Real::int(1)), Box::new(self))
    }

    /// Enclosure whose width is roughly `2^-bits` times the magnitude of the
    /// expression. `None` when a divisor enclosure still straddles zero.
    pub fn enclose(&self, bits: u32) -> Option<Enclosure> {
        match self {
            Real::Exact(q) => Some(Enclosure::point(q.clone())),
            Real::Ln(q) => Some(ln_enclosure(q, bits)),
            Real::Sum(a, b) => Some(a.enclose(bits)?.add(&b.enclose(bits)?)),
            Real::Product(a, b) => Some(a.enclose(bits)?.mul(&b.enclose(bits)?)),
            Real::Quotient(a, b) => Some(a.enclose(bits)?.mul(&b.enclose(bits)?.recip()?)),
        }
    }

    /// Compares against a rational, refining until decided or `max_bits`.
    pub fn cmp_rational(&self, q: &BigRational, max_bits: u32) -> Option<Ordering> {
        if let Real::Exact(x) = self {
            return Some(x.cmp(q));
        }
        refine(max_bits, |bits| self.enclose(bits)?.cmp_rational(q))
    }

    pub fn cmp_real(&self, other: &Real, max_bits: u32) -> Option<Ordering> {
        refine(max_bits, |bits| {
            self.enclose(bits)?.cmp_enclosure(&other.enclose(bits)?)
        })
    }

    /// A rational close to the value (midpoint of a 64-bit enclosure).
    pub fn approx(&self) -> BigRational {
        refine(DEFAULT_MAX_BITS, |bits| self.enclose(bits).map(|e| e.midpoint()))
            .unwrap_or_else(BigRational::zero)
    }
}

fn refine<T>(max_bits: u32, mut step: impl FnMut(u32) -> Option<T>) -> Option<T> {
    let mut bits = START_BITS;
    loop {
        if let Some(out) = step(bits) {
            return Some(out);
        }
        if bits >= max_bits {
            return None;
        }
        bits = (bits * 2).min(max_bits);
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        Real::Sum(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        Real::Product(Box::new(self), Box::new(rhs))
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        Real::Quotient(Box::new(self), Box::new(rhs))
    }
}

/// Floor and ceiling of `q · 2^p`.
fn fixed(q: &BigRational, p: u32) -> (BigInt, BigInt) {
    let scaled = q * BigRational::from_integer(BigInt::one() << p);
    (rational::floor(&scaled), rational::ceil(&scaled))
}

/// `atanh(z)` for `0 ≤ z ≤ 1/3`, as fixed-point bounds scaled by `2^p`.
fn atanh_fixed(z: &BigRational, p: u32) -> (BigInt, BigInt) {
    debug_assert!(!z.is_negative() && z <= &rational::rat(1, 3));
    let (z_lo, z_hi) = fixed(z, p);
    let (z2_lo, z2_hi) = fixed(&(z * z), p);
    let terms = p / 3 + 2;
    let (mut pw_lo, mut pw_hi) = (z_lo, z_hi);
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut j = 0u32;
    while j < terms && !pw_hi.is_zero() {
        let k = BigInt::from(2 * j + 1);
        s_lo += pw_lo.div_floor(&k);
        s_hi += Integer::div_ceil(&pw_hi, &k);
        pw_lo = (&pw_lo * &z2_lo) >> p;
        pw_hi = (&pw_hi * &z2_hi + ((BigInt::one() << p) - 1)) >> p;
        j += 1;
    }
    // Tail ≤ z^(2J+1)/((2J+1)(1 − z²)) ≤ pw · 9 / (8(2J+1)).
    let k = BigInt::from(8 * (2 * j + 1));
    s_hi += Integer::div_ceil(&(pw_hi * 9), &k);
    (s_lo, s_hi)
}

/// Certified enclosure of `ln q` for rational `q > 0`.
pub fn ln_enclosure(q: &BigRational, bits: u32) -> Enclosure {
    assert!(q.is_positive());
    if q.is_one() {
        return Enclosure::point(BigRational::zero());
    }
    // q = 2^k · y with y ∈ [1, 2).
    let mut k = q.numer().bits() as i64 - q.denom().bits() as i64;
    let two = BigRational::from_integer(BigInt::from(2));
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as u64)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
        }
    };
    let mut y = q / pow2(k);
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < BigRational::one() {
        y *= &two;
        k -= 1;
    }
    let one = BigRational::one();
    let z = (&y - &one) / (&y + &one);
    let guard = 24 + (64 - (k.unsigned_abs() + 1).leading_zeros());
    let p = bits + guard;
    let (a_lo, a_hi) = atanh_fixed(&z, p);
    let (l2_lo, l2_hi) = atanh_fixed(&rational::rat(1, 3), p);
    // ln q = 2·atanh(z) + k·2·atanh(1/3)
    let (kl_lo, kl_hi) = if k >= 0 {
        (l2_lo * k, l2_hi * k)
    } else {
        (l2_hi * k, l2_lo * k)
    };
    let scale = BigInt::one() << p;
    Enclosure {
        lo: BigRational::new((a_lo + kl_lo) * 2, scale.clone()),
        hi: BigRational::new((a_hi + kl_hi) * 2, scale),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn close(e: &Enclosure, x: f64) {
        let lo = rational::to_f64(&e.lo);
        let hi = rational::to_f64(&e.hi);
        assert!(lo <= x + 1e-15 && x - 1e-15 <= hi, "{lo} {x} {hi}");
        assert!(hi - lo < 1e-15, "width {}", hi - lo);
    }

    #[test]
    fn ln_matches_float_library() {
        for n in [2u64, 3, 4, 5, 7, 10, 1000, 1_000_000] {
            close(&ln_enclosure(&int(n as i64), 64), (n as f64).ln());
        }
        close(&ln_enclosure(&rat(1, 3), 64), (1.0f64 / 3.0).ln());
        close(&ln_enclosure(&rat(7, 5), 64), 1.4f64.ln());
        assert_eq!(ln_enclosure(&int(1), 64), Enclosure::point(int(0)));
    }

    #[test]
    fn enclosures_nest_and_shrink() {
        let coarse = ln_enclosure(&int(3), 64);
        let fine = ln_enclosure(&int(3), 512);
        assert!(fine.width() < coarse.width());
        assert!(fine.lo <= coarse.hi && coarse.lo <= fine.hi);
        assert!(fine.width() < rat(1, 1) / int(1u64 << 62) / int(1u64 << 62));
    }

    #[test]
    fn log_two_is_above_inverse_log_two_is_false() {
        // ln 2 < 1/ln 2 so the n = 2 annulus window is empty.
        let ln2 = Real::ln_int(2);
        let inv = Real::ln_int(2).recip();
        assert_eq!(ln2.cmp_real(&inv, DEFAULT_MAX_BITS), Some(Ordering::Less));
        // 1/ln 3 ≈ 0.910 < 1 < ln 3 ≈ 1.0986
        assert_eq!(
            Real::ln_int(3).recip().cmp_rational(&int(1), DEFAULT_MAX_BITS),
            Some(Ordering::Less)
        );
        assert_eq!(
            Real::ln_int(3).cmp_rational(&int(1), DEFAULT_MAX_BITS),
            Some(Ordering::Greater)
        );
    }

    #[test]
    fn compound_expression() {
        // ln(3)/4 ≈ 0.274653 and 5/ln 5 ≈ 3.10667
        let up = Real::ln_int(3) / Real::int(4);
        let e = up.enclose(64).unwrap();
        assert!(e.lo > rat(2746, 10000) && e.hi < rat(2747, 10000));
        let low = Real::int(5) / Real::ln_int(5);
        let e = low.enclose(64).unwrap();
        assert!(e.lo > rat(3106, 1000) && e.hi < rat(3107, 1000));
    }

    #[test]
    fn undecidable_comparison_reports_none() {
        // Exact tie with a non-trivial expression cannot be separated.
        let x = Real::ln_int(3) + Real::int(0);
        let same = Real::ln_int(3);
        assert_eq!(x.cmp_real(&same, 256), None);
    }
}
