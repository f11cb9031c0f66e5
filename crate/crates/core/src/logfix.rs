//! High-precision base-2 logarithms of rationals.
//!
//! KL values are irrational, so they cannot be exact rationals; instead
//! each log2 is computed in fixed-point binary with a 192-bit working
//! mantissa and returned as a dyadic rational with 160 fractional bits,
//! far beyond the 80-bit effective precision the KL path promises.
//!
//! For an integer n = 2^b m with m in [1,2): log2 n = b + 2 atanh(z) log2(e)
//! where z = (m-1)/(m+1) < 1/3, summed until terms vanish below the working
//! precision. Logs of rationals split into integer logs, which the cache
//! keys by integer — numerators and denominators repeat heavily across the
//! outcome tables of one information computation.

use alloc::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Fractional bits of the returned dyadic approximations.
pub const LOG2_FRAC_BITS: u32 = 160;

/// Internal working precision.
const WORK_BITS: u32 = 192;

/// Little-endian limbs of floor(frac(log2 e) * 2^192); log2(e) = 1.442695...
const LOG2_E_FRAC_LIMBS: [u64; 3] = [
    0xD6AE_F551_BAD2_B4B1,
    0x7D0F_FDA0_D23A_7D11,
    0x7154_7652_B82F_E177,
];

fn limbs_to_biguint(limbs: &[u64]) -> BigUint {
    let mut acc = BigUint::zero();
    for &l in limbs.iter().rev() {
        acc = (acc << 64u32) | BigUint::from(l);
    }
    acc
}

fn log2_e_fixed() -> BigUint {
    (BigUint::one() << WORK_BITS) | limbs_to_biguint(&LOG2_E_FRAC_LIMBS)
}

/// Allocation-free 192-bit fixed-point fraction, value = limbs / 2^192,
/// little-endian limbs. Only what the atanh loop needs.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Fix192([u64; 3]);

impl Fix192 {
    const ZERO: Fix192 = Fix192([0; 3]);

    fn is_zero(&self) -> bool {
        self.0 == [0; 3]
    }

    /// (self * other) >> 192, truncating.
    fn mul_shift(&self, other: &Fix192) -> Fix192 {
        let mut wide = [0u64; 6];
        for (i, &a) in self.0.iter().enumerate() {
            let mut carry = 0u128;
            for (j, &b) in other.0.iter().enumerate() {
                let cur = wide[i + j] as u128 + (a as u128) * (b as u128) + carry;
                wide[i + j] = cur as u64;
                carry = cur >> 64;
            }
            let mut k = i + 3;
            while carry > 0 {
                let cur = wide[k] as u128 + carry;
                wide[k] = cur as u64;
                carry = cur >> 64;
                k += 1;
            }
        }
        Fix192([wide[3], wide[4], wide[5]])
    }

    /// self / d for a small scalar divisor.
    fn div_scalar(&self, d: u64) -> Fix192 {
        let mut out = [0u64; 3];
        let mut rem = 0u128;
        for i in (0..3).rev() {
            let cur = (rem << 64) | self.0[i] as u128;
            out[i] = (cur / d as u128) as u64;
            rem = cur % d as u128;
        }
        Fix192(out)
    }

    fn add_assign(&mut self, other: &Fix192) {
        let mut carry = 0u128;
        for i in 0..3 {
            let cur = self.0[i] as u128 + other.0[i] as u128 + carry;
            self.0[i] = cur as u64;
            carry = cur >> 64;
        }
        debug_assert_eq!(carry, 0, "fixed-point overflow");
    }

    fn to_biguint(self) -> BigUint {
        limbs_to_biguint(&self.0)
    }

    fn from_biguint(n: &BigUint) -> Fix192 {
        let digits = n.to_u64_digits();
        debug_assert!(digits.len() <= 3);
        let mut limbs = [0u64; 3];
        limbs[..digits.len()].copy_from_slice(&digits);
        Fix192(limbs)
    }
}

/// log2 of a positive integer, scaled by 2^LOG2_FRAC_BITS and truncated.
/// Exact for powers of two.
fn log2_biguint_scaled(n: &BigUint) -> BigUint {
    debug_assert!(!n.is_zero());
    let int_part = n.bits() - 1; // floor(log2 n)
    // mantissa m = n / 2^int_part in [1,2), WORK_BITS fixed point
    let m: BigUint = (n << WORK_BITS) >> int_part;
    let one_fixed: BigUint = BigUint::one() << WORK_BITS;
    let frac = if m == one_fixed {
        BigUint::zero()
    } else {
        // z = (m-1)/(m+1), 0 < z < 1/3
        let z = Fix192::from_biguint(&(((&m - &one_fixed) << WORK_BITS) / (&m + &one_fixed)));
        // atanh(z) = sum_k z^(2k+1) / (2k+1)
        let zsq = z.mul_shift(&z);
        let mut power = z;
        let mut acc = z;
        let mut k = 1u64;
        loop {
            power = power.mul_shift(&zsq);
            if power.is_zero() {
                break;
            }
            acc.add_assign(&power.div_scalar(2 * k + 1));
            k += 1;
        }
        // log2 m = 2 atanh(z) log2(e), rounded down to the output width
        let log2m = ((acc.to_biguint() << 1u32) * log2_e_fixed()) >> WORK_BITS;
        log2m >> (WORK_BITS - LOG2_FRAC_BITS)
    };
    (BigUint::from(int_part) << LOG2_FRAC_BITS) | frac
}

/// Lowest-terms dyadic rational scaled / 2^LOG2_FRAC_BITS, reducing by the
/// shared power of two only (cheaper than a general gcd).
fn dyadic(scaled: BigInt) -> Rational {
    if scaled.is_zero() {
        return Rational::zero();
    }
    let tz = scaled
        .trailing_zeros()
        .expect("nonzero")
        .min(LOG2_FRAC_BITS as u64) as u32;
    Rational::new_raw(
        scaled >> tz,
        BigInt::from(BigUint::one() << (LOG2_FRAC_BITS - tz)),
    )
}

/// log2 of a positive rational, as a dyadic rational approximation with
/// `LOG2_FRAC_BITS` fractional bits.
///
/// Panics on non-positive input; callers skip zero-mass terms.
pub fn log2_ratio(r: &Rational) -> Rational {
    assert!(r.is_positive(), "log2 of non-positive rational");
    let num = log2_biguint_scaled(r.numer().magnitude());
    let den = log2_biguint_scaled(r.denom().magnitude());
    dyadic(BigInt::from(num) - BigInt::from(den))
}

/// Memo for repeated log2 arguments inside one information computation,
/// keyed by integer so shared numerators and denominators hit once.
#[derive(Default)]
pub struct Log2Cache {
    ints: BTreeMap<BigUint, BigUint>,
}

impl Log2Cache {
    pub fn new() -> Self {
        Self::default()
    }

    fn log2_int_scaled(&mut self, n: &BigUint) -> BigUint {
        if let Some(v) = self.ints.get(n) {
            return v.clone();
        }
        let v = log2_biguint_scaled(n);
        self.ints.insert(n.clone(), v.clone());
        v
    }

    pub fn log2(&mut self, r: &Rational) -> Rational {
        assert!(r.is_positive(), "log2 of non-positive rational");
        let num = self.log2_int_scaled(r.numer().magnitude());
        let den = self.log2_int_scaled(r.denom().magnitude());
        dyadic(BigInt::from(num) - BigInt::from(den))
    }

    /// x * log2(x), with the 0 log 0 = 0 convention.
    pub fn xlog2x(&mut self, x: &Rational) -> Rational {
        if x.is_zero() {
            return Rational::zero();
        }
        x * self.log2(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio_to_f64};

    #[test]
    fn powers_of_two_are_exact() {
        assert_eq!(log2_ratio(&rat(1, 1)), rat(0, 1));
        assert_eq!(log2_ratio(&rat(2, 1)), rat(1, 1));
        assert_eq!(log2_ratio(&rat(1024, 1)), rat(10, 1));
        assert_eq!(log2_ratio(&rat(1, 8)), rat(-3, 1));
    }

    #[test]
    fn matches_f64_log2_closely() {
        for (n, d) in [(3i64, 1i64), (10, 7), (1, 3), (97, 13), (5, 64), (1023, 512)] {
            let approx = ratio_to_f64(&log2_ratio(&rat(n, d)));
            let expect = (n as f64 / d as f64).log2();
            assert!(
                (approx - expect).abs() < 1e-13,
                "log2({n}/{d}): {approx} vs {expect}"
            );
        }
    }

    #[test]
    fn additivity_within_guard_bits() {
        // log2(6) = log2(2) + log2(3) up to truncation error
        let lhs = log2_ratio(&rat(6, 1));
        let rhs = log2_ratio(&rat(2, 1)) + log2_ratio(&rat(3, 1));
        let err = ratio_to_f64(&(lhs - rhs)).abs();
        assert!(err < 1e-45);
    }

    #[test]
    fn embedded_log2e_constant_is_right() {
        let fixed = log2_e_fixed();
        let as_f64 = ratio_to_f64(&Rational::new(
            BigInt::from(fixed),
            BigInt::from(BigUint::one() << WORK_BITS),
        ));
        assert!((as_f64 - core::f64::consts::LOG2_E).abs() < 1e-15);
    }

    #[test]
    fn cache_returns_identical_values() {
        let mut cache = Log2Cache::new();
        let a = cache.log2(&rat(7, 5));
        let b = cache.log2(&rat(7, 5));
        assert_eq!(a, b);
        assert_eq!(a, log2_ratio(&rat(7, 5)));
        assert_eq!(cache.xlog2x(&rat(0, 1)), rat(0, 1));
        // unreduced inputs reduce to the same integer keys
        assert_eq!(cache.log2(&rat(35, 25)), a);
    }

    #[test]
    fn timing_probe() {
        use std::time::Instant;
        let t0 = Instant::now();
        let mut acc = Rational::zero();
        for i in 1..1000i64 {
            acc += log2_ratio(&rat(i * 7 + 3, i * 5 + 2));
        }
        let dt = t0.elapsed();
        println!("1000 log2_ratio calls: {dt:?} ({:?}/call)", dt / 1000);
        assert!(!acc.is_zero());
    }
}
