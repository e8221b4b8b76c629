use super::gaussian::GaussianRational;
use super::Rational;
use crate::error::{EvoderError, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Formats a rational in lowest terms: `-3`, `1/2`, `0`.
pub fn format_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Formats a ℚ(i) value in the canonical scalar grammar.
///
/// Pure reals print as rationals (`3`, `-1/2`, `0`); pure imaginaries as a
/// rational followed by `i` (`5i`, `-1i`); mixed values as real part, sign,
/// imaginary magnitude, `i` (`1/2-2/3i`). `-i` is written `-1i`. No
/// whitespace anywhere.
pub fn format_gaussian(v: &GaussianRational) -> String {
    let re = v.re();
    let im = v.im();
    if im.is_zero() {
        return format_rational(re);
    }
    if re.is_zero() {
        return format!("{}i", format_rational(im));
    }
    if im.is_negative() {
        format!("{}-{}i", format_rational(re), format_rational(&-im.clone()))
    } else {
        format!("{}+{}i", format_rational(re), format_rational(im))
    }
}

/// Parses an unsigned or `-`-signed rational: `["-"] DIGITS ["/" DIGITS]`.
fn parse_rational(t: &str) -> std::result::Result<Rational, String> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    if body.is_empty() {
        return Err("empty number".to_string());
    }
    let (num_str, den_str) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits_of = |part: &str, what: &str| -> std::result::Result<BigInt, String> {
        if part.is_empty() {
            return Err(format!("empty {what}"));
        }
        if !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("non-digit character in {what}"));
        }
        part.parse::<BigInt>().map_err(|e| e.to_string())
    };
    let numer = digits_of(num_str, "numerator")?;
    let denom = match den_str {
        Some(d) => {
            let d = digits_of(d, "denominator")?;
            if d.is_zero() {
                return Err("zero denominator".to_string());
            }
            d
        }
        None => BigInt::one(),
    };
    let v = Rational::new(numer, denom);
    Ok(if neg { -v } else { v })
}

/// Parses a scalar in the canonical grammar, reporting the failure reason.
pub fn parse_gaussian_text(s: &str) -> std::result::Result<GaussianRational, String> {
    if s.is_empty() {
        return Err("empty scalar".to_string());
    }
    if !s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'/' | b'+' | b'-' | b'i'))
    {
        return Err("invalid character (only digits, /, +, -, i allowed)".to_string());
    }
    match s.strip_suffix('i') {
        None => {
            if s.contains('i') {
                return Err("i may only appear at the end".to_string());
            }
            if s.contains('+') {
                return Err("+ only separates real and imaginary parts".to_string());
            }
            let re = parse_rational(s)?;
            Ok(GaussianRational::from_rational(re))
        }
        Some(body) => {
            if body.contains('i') {
                return Err("i may only appear at the end".to_string());
            }
            // The last sign past position 0 separates the real part from the
            // unsigned imaginary magnitude; rationals carry no interior signs.
            let sep = body
                .char_indices()
                .rev()
                .find(|&(idx, c)| idx > 0 && (c == '+' || c == '-'));
            match sep {
                None => {
                    let im = parse_rational(body)?;
                    Ok(GaussianRational::new(Rational::zero(), im))
                }
                Some((idx, sign)) => {
                    let re = parse_rational(&body[..idx])?;
                    let mag_str = &body[idx + 1..];
                    if mag_str.starts_with('-') || mag_str.starts_with('+') {
                        return Err("doubled sign".to_string());
                    }
                    let mag = parse_rational(mag_str)?;
                    let im = if sign == '-' { -mag } else { mag };
                    Ok(GaussianRational::new(re, im))
                }
            }
        }
    }
}

/// Parses a scalar, wrapping failures in [`EvoderError::MalformedScalar`]
/// with the given matrix position (0-based).
pub fn parse_gaussian_at(s: &str, row: usize, col: usize) -> Result<GaussianRational> {
    parse_gaussian_text(s).map_err(|reason| EvoderError::MalformedScalar {
        text: s.to_string(),
        row,
        col,
        reason,
    })
}

/// Parses a standalone scalar.
pub fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    parse_gaussian_at(s, 0, 0)
}
