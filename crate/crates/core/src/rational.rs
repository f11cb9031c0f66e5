//! Exact rational scalars and their text forms.
//!
//! Every probability in this crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. Floating point
//! appears only where a quantity is genuinely irrational (KL values, SDPI
//! search) or where an estimate is explicitly a simulation output.

use alloc::string::{String, ToString};
use alloc::{format, vec::Vec};
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms, denominator > 0.
pub type Rational = num_rational::BigRational;

/// Shorthand for small constant rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// True iff `r` lies in the closed interval [0, 1].
pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Error from [`parse_ratio`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatioError(pub String);

impl fmt::Display for ParseRatioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal `{}`", self.0)
    }
}

impl core::error::Error for ParseRatioError {}

/// Parses `p`, `-p`, `p/q` or `-p/q` into a reduced rational.
pub fn parse_ratio(s: &str) -> Result<Rational, ParseRatioError> {
    let bad = || ParseRatioError(String::from(s));
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den_str.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `p` when the denominator is one, `p/q` otherwise.
pub fn format_ratio(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rounds to f64. Exact conversion when representable; nearest otherwise.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite f64 (every finite f64 is dyadic).
pub fn ratio_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Decimal expansion with `sig` significant digits, round half away from zero.
///
/// Plain positional notation; values are probabilities and small bound values
/// in this crate, so no scientific form is needed.
pub fn decimal_string(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return String::from("0");
    }
    let neg = r.is_negative();
    let abs = r.abs();
    // exponent e with 10^e <= abs < 10^(e+1)
    let mut e: i64 = digits10(&(abs.numer().magnitude().clone())) as i64
        - digits10(abs.denom().magnitude()) as i64;
    let pow = |k: i64| -> Rational {
        let p = BigInt::from(BigUint::from(10u32).pow(k.unsigned_abs() as u32));
        if k >= 0 {
            Rational::from_integer(p)
        } else {
            Rational::new(BigInt::one(), p)
        }
    };
    if abs < pow(e) {
        e -= 1;
    } else if abs >= pow(e + 1) {
        e += 1;
    }
    // digit string d1.d2... = round(abs * 10^(sig-1-e))
    let scaled = &abs * pow(sig as i64 - 1 - e);
    let mut digits = round_half_away(&scaled).magnitude().clone();
    // rounding may carry into one extra digit (e.g. 9.99 -> 10.0)
    if digits10(&digits) > sig as u64 {
        digits /= BigUint::from(10u32);
        e += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 {
        let ip = (e + 1) as usize;
        if ip >= sig {
            out.push_str(&ds);
            for _ in 0..(ip - sig) {
                out.push('0');
            }
        } else {
            out.push_str(&ds[..ip]);
            out.push('.');
            out.push_str(&ds[ip..]);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(&ds);
    }
    out
}

fn digits10(n: &BigUint) -> u64 {
    if n.is_zero() {
        return 1;
    }
    n.to_string().len() as u64
}

fn round_half_away(r: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let num2 = r.numer() * &two;
    let den = r.denom();
    let den2 = den * &two;
    let adj = match num2.sign() {
        Sign::Minus => num2 - den,
        _ => num2 + den,
    };
    adj / den2
}

/// Sums an iterator of rationals exactly.
pub fn sum_exact<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let mut acc = Rational::zero();
    for r in items {
        acc += r;
    }
    acc
}

/// Exact rational accumulator with balanced merging.
///
/// A running `+=` over many fractions with unrelated denominators makes the
/// accumulator's denominator grow linearly and every reduction quadratic.
/// Merging in a binary-counter pattern keeps each addition between values
/// of comparable size, for the same exact result (rational addition is
/// associative), at O(log n) stored partial sums.
#[derive(Debug, Default, Clone)]
pub struct ExactSum {
    levels: Vec<Option<Rational>>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, mut value: Rational) {
        let mut i = 0;
        loop {
            if i == self.levels.len() {
                self.levels.push(Some(value));
                return;
            }
            match self.levels[i].take() {
                None => {
                    self.levels[i] = Some(value);
                    return;
                }
                Some(existing) => {
                    value += existing;
                    i += 1;
                }
            }
        }
    }

    pub fn finish(self) -> Rational {
        let mut acc = Rational::zero();
        for part in self.levels.into_iter().flatten() {
            acc += part;
        }
        acc
    }
}

/// Validates a probability vector: entries in [0,1], exact total of one.
pub fn check_distribution(p: &[Rational]) -> Result<(), DistributionError> {
    for (i, x) in p.iter().enumerate() {
        if x.is_negative() {
            return Err(DistributionError::NegativeEntry(i));
        }
    }
    let total = sum_exact(p.iter());
    if !total.is_one() {
        return Err(DistributionError::TotalNotOne(format_ratio(&total)));
    }
    Ok(())
}

/// Probability-vector validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributionError {
    NegativeEntry(usize),
    TotalNotOne(String),
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionError::NegativeEntry(i) => write!(f, "negative entry at index {i}"),
            DistributionError::TotalNotOne(t) => write!(f, "probabilities sum to {t}, not 1"),
        }
    }
}

impl core::error::Error for DistributionError {}

/// Normalizes nonnegative weights to a distribution. Fails on zero total.
pub fn normalize(weights: &[Rational]) -> Option<Vec<Rational>> {
    let total = sum_exact(weights.iter());
    if total.is_zero() || total.is_negative() {
        return None;
    }
    Some(weights.iter().map(|w| w / &total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/4", "0", "-3/7", "12", "100/7"] {
            let r = parse_ratio(s).unwrap();
            assert_eq!(format_ratio(&r), s);
        }
        assert_eq!(format_ratio(&parse_ratio("2/4").unwrap()), "1/2");
        assert_eq!(format_ratio(&parse_ratio("4/2").unwrap()), "2");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/y").is_err());
    }

    #[test]
    fn decimal_expansion() {
        assert_eq!(decimal_string(&rat(2, 5), 17), "0.40000000000000000");
        assert_eq!(decimal_string(&rat(1, 3), 5), "0.33333");
        assert_eq!(decimal_string(&rat(2, 3), 5), "0.66667");
        assert_eq!(decimal_string(&rat(1, 1), 3), "1.00");
        assert_eq!(decimal_string(&rat(-7, 16), 4), "-0.4375");
        assert_eq!(decimal_string(&rat(999, 1000), 2), "1.0");
        assert_eq!(decimal_string(&rat(1234, 1), 3), "1230");
        assert_eq!(decimal_string(&rat(0, 1), 17), "0");
        assert_eq!(decimal_string(&rat(1, 1000), 3), "0.00100");
    }

    #[test]
    fn distribution_checks() {
        assert!(check_distribution(&[rat(1, 2), rat(1, 2)]).is_ok());
        assert!(matches!(
            check_distribution(&[rat(1, 2), rat(1, 3)]),
            Err(DistributionError::TotalNotOne(_))
        ));
        assert!(matches!(
            check_distribution(&[rat(-1, 2), rat(3, 2)]),
            Err(DistributionError::NegativeEntry(0))
        ));
    }

    #[test]
    fn f64_round_trips_are_exact_for_dyadics() {
        let r = ratio_from_f64(0.625).unwrap();
        assert_eq!(r, rat(5, 8));
        assert_eq!(ratio_to_f64(&r), 0.625);
    }
}
