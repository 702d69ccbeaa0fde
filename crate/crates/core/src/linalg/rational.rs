//! Checked arithmetic on `Ratio<i128>`.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Zero};

use super::{LinalgError, Result};

pub type Rational = Ratio<i128>;

pub fn int(n: impl Into<i128>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn add(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_add(b).ok_or(LinalgError::Overflow)
}

pub fn sub(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_sub(b).ok_or(LinalgError::Overflow)
}

pub fn mul(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_mul(b).ok_or(LinalgError::Overflow)
}

pub fn div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(LinalgError::SingularMatrix);
    }
    a.checked_div(b).ok_or(LinalgError::Overflow)
}

/// Round to the nearest integer, halves toward positive infinity.
pub fn round(a: &Rational) -> i128 {
    (a + Rational::new(1, 2)).floor().to_integer()
}

/// Render as `a/b`, or `a` when integral.
pub fn format(a: &Rational) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Parse `a` or `a/b`.
pub fn parse(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        None => s.trim().parse::<i128>().ok().map(int),
        Some((n, d)) => {
            let n = n.trim().parse::<i128>().ok()?;
            let d = d.trim().parse::<i128>().ok()?;
            (d != 0).then(|| Rational::new(n, d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_exact() {
        assert_eq!(round(&Rational::new(5, 2)), 3);
        assert_eq!(round(&Rational::new(-5, 2)), -2);
        assert_eq!(round(&Rational::new(-7, 3)), -2);
        assert_eq!(round(&Rational::new(7, 3)), 2);
    }

    #[test]
    fn format_and_parse() {
        let x = Rational::new(-4, 10);
        assert_eq!(format(&x), "-2/5");
        assert_eq!(parse("-2/5"), Some(x));
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse("1/0"), None);
    }

    #[test]
    fn overflow_is_reported() {
        let big = int(i128::MAX);
        assert_eq!(add(&big, &int(1)), Err(LinalgError::Overflow));
        assert_eq!(div(&int(1), &int(0)), Err(LinalgError::SingularMatrix));
    }
}
