//! Decimal expansions used by exact-arithmetic comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// 150 digits of pi after the leading 3 (truncated).
pub const PI_DIGITS: &str = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058223172535940813";

/// 60 digits of ln 2 after the point (truncated).
pub const LN2_DIGITS: &str = "0.69314718055994530941723212145817656807550013436025525412068";

/// Parses a plain decimal string into an exact rational.
pub fn decimal_rational(s: &str) -> BigRational {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: String = format!("{int}{frac}");
    let num: BigInt = digits.parse().expect("decimal digits");
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    if neg {
        -r
    } else {
        r
    }
}

/// Rational bracket `(lo, hi)` around pi of width `1e-150`.
pub fn pi_bracket() -> (BigRational, BigRational) {
    let lo = decimal_rational(PI_DIGITS);
    let ulp = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), PI_DIGITS.len() - 2));
    let hi = &lo + ulp;
    (lo, hi)
}

pub fn ln2_rational() -> BigRational {
    decimal_rational(LN2_DIGITS)
}

/// Formats a rational with `digits` significant decimal digits (truncated).
pub fn format_significant(x: &BigRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let neg = x < &BigRational::zero();
    let x = if neg { -x.clone() } else { x.clone() };
    let mut scale = 0i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let lower = num_traits::pow(BigInt::from(10), digits - 1);
    let upper = &lower * 10;
    let mut y = x.clone();
    while y.to_integer() >= upper {
        y = y / &ten;
        scale -= 1;
    }
    while y.to_integer() < lower {
        y = y * &ten;
        scale += 1;
    }
    let m = y.to_integer().to_string();
    let point = m.len() as i64 - scale;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), m)
    } else if point as usize >= m.len() {
        format!("{}{}", m, "0".repeat(point as usize - m.len()))
    } else {
        format!("{}.{}", &m[..point as usize], &m[point as usize..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn pi_bracket_contains_f64_pi() {
        let (lo, hi) = pi_bracket();
        assert!(lo < hi);
        assert_eq!(lo.to_f64().unwrap(), std::f64::consts::PI);
        assert_eq!(ln2_rational().to_f64().unwrap(), std::f64::consts::LN_2);
    }

    #[test]
    fn significant_digits() {
        let x = decimal_rational("123.456789");
        assert_eq!(format_significant(&x, 5), "123.45");
        assert_eq!(format_significant(&decimal_rational("0.00123"), 2), "0.0012");
        assert_eq!(format_significant(&decimal_rational("-42"), 4), "-42.00");
    }
}
