//! Exact rational arithmetic. All numeric values in the engine are
//! `BigRational`s; there is no floating point anywhere, so comparisons and
//! serialized forms are exact and reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `p/q` in lowest terms, or a bare integer when the denominator
/// is one. `Rational` keeps itself reduced with a positive denominator, so
/// the output is canonical.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p`, `p/q` or `-p/q`. Returns `None` for anything else,
/// including a zero denominator.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num_text, den_text) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let num: BigInt = num_text.parse().ok()?;
    let den: BigInt = match den_text {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if den.is_zero() || den.is_negative() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}
