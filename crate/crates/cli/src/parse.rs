//! Parsers for command-line values.

use std::str::FromStr;

use num_complex::Complex64;
use octavic::octonion::ComplexOctave;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid complex number '{0}' (expected a+bi)")]
    Complex(String),
    #[error("expected 8 comma-separated coordinates, found {0}")]
    CoordinateCount(usize),
    #[error("invalid characteristic '{0}' (expected up to 4 hex digits)")]
    Characteristic(String),
    #[error("invalid prime list '{0}'")]
    Primes(String),
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i` or `-i`; whitespace is ignored.
pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || ParseError::Complex(s.to_string());
    if compact.is_empty() {
        return Err(err());
    }
    let z = Complex64::from_str(&compact).map_err(|_| err())?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(err())
    }
}

/// Eight comma-separated complex e-coordinates.
pub fn parse_coords(s: &str) -> Result<ComplexOctave, ParseError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 8 {
        return Err(ParseError::CoordinateCount(parts.len()));
    }
    let mut e = [Complex64::new(0.0, 0.0); 8];
    for (slot, part) in e.iter_mut().zip(parts) {
        *slot = parse_complex(part)?;
    }
    Ok(ComplexOctave { e })
}

/// A 16-bit characteristic in hex, with an optional `0x` prefix.
pub fn parse_characteristic(s: &str) -> Result<u16, ParseError> {
    let t = s.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    if digits.is_empty() || digits.len() > 4 || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(ParseError::Characteristic(s.to_string()));
    }
    u16::from_str_radix(digits, 16).map_err(|_| ParseError::Characteristic(s.to_string()))
}

/// Comma-separated list of positive integers.
pub fn parse_primes(s: &str) -> Result<Vec<u64>, ParseError> {
    let out: Result<Vec<u64>, _> = s.split(',').map(|p| p.trim().parse::<u64>()).collect();
    match out {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(ParseError::Primes(s.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("1 - 2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex("-0.5").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), Complex64::new(0.0, 3.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e1i").unwrap(), Complex64::new(1e-3, 20.0));
        for bad in ["", "1+", "abc", "inf", "NaN+i", "2i+2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn coordinates() {
        let z = parse_coords("0,0,0,0,0,0,0,i").unwrap();
        assert_eq!(z.e[7], Complex64::new(0.0, 1.0));
        assert_eq!(parse_coords("0,0").unwrap_err(), ParseError::CoordinateCount(2));
        assert!(parse_coords("0,0,0,0,0,0,0,x").is_err());
    }

    #[test]
    fn characteristics() {
        assert_eq!(parse_characteristic("0").unwrap(), 0);
        assert_eq!(parse_characteristic("0x0301").unwrap(), 0x0301);
        assert_eq!(parse_characteristic("ffff").unwrap(), 0xffff);
        for bad in ["", "0x", "10000", "g1", "-1", "+1"] {
            assert!(parse_characteristic(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn prime_lists() {
        assert_eq!(parse_primes("10009, 1000033").unwrap(), vec![10009, 1000033]);
        assert!(parse_primes("").is_err());
        assert!(parse_primes("7,x").is_err());
    }
}
