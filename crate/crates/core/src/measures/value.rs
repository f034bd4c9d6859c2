//! Probabilities and integrals that are either exact rationals or floats
//! with an absolute error bound.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Approx { value: f64, error: f64 },
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Value::Exact(BigRational::one())
    }

    pub fn int(k: i64) -> Self {
        Value::Exact(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn approx(value: f64, error: f64) -> Self {
        Value::Approx { value, error: error.abs() }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => rational_to_f64(q),
            Value::Approx { value, .. } => *value,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            Value::Exact(_) => 0.0,
            Value::Approx { error, .. } => *error,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(q.abs()),
            Value::Approx { value, error } => Value::Approx { value: value.abs(), error: *error },
        }
    }

    /// `Some(true)` if certainly positive, `Some(false)` if certainly not,
    /// `None` if the error bound straddles zero.
    pub fn is_positive(&self) -> Option<bool> {
        match self {
            Value::Exact(q) => Some(q.is_positive()),
            Value::Approx { value, error } => {
                if *value > *error {
                    Some(true)
                } else if *value < -*error {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    /// Sign of `self - other`, when it can be certified.
    pub fn certified_cmp(&self, other: &Value) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(b)),
            _ => {
                let diff = self.clone() - other.clone();
                match diff.is_positive() {
                    Some(true) => Some(std::cmp::Ordering::Greater),
                    Some(false) if diff.to_f64() < -diff.error() => Some(std::cmp::Ordering::Less),
                    _ => None,
                }
            }
        }
    }

    /// Fraction text for exact values.
    pub fn fraction(&self) -> Option<String> {
        self.exact().map(|q| q.to_string())
    }

    pub fn display(&self, precision: usize) -> String {
        match self {
            Value::Exact(q) => format!("{q} ({:.*})", precision, rational_to_f64(q)),
            Value::Approx { value, error } => format!("{value:.precision$} (+/- {error:.1e})"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Exact(q) => serde_json::json!({
                "exact": true,
                "fraction": q.to_string(),
                "decimal": rational_to_f64(q),
            }),
            Value::Approx { value, error } => serde_json::json!({
                "exact": false,
                "decimal": value,
                "error": error,
            }),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(6))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Exact(q)
    }
}

fn combine(a: &Value, b: &Value, exact: impl Fn(&BigRational, &BigRational) -> BigRational, approx: impl Fn(f64, f64, f64, f64) -> (f64, f64)) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(exact(x, y)),
        _ => {
            let (v, e) = approx(a.to_f64(), a.error(), b.to_f64(), b.error());
            // one ulp-scale term for the float operation itself
            Value::Approx { value: v, error: e + v.abs() * f64::EPSILON }
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        combine(&self, &rhs, |x, y| x + y, |a, ea, b, eb| (a + b, ea + eb))
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        combine(&self, &rhs, |x, y| x - y, |a, ea, b, eb| (a - b, ea + eb))
    }
}

impl Mul for Value {
    type Output = Value;
    fn mul(self, rhs: Value) -> Value {
        combine(&self, &rhs, |x, y| x * y, |a, ea, b, eb| {
            (a * b, a.abs() * eb + b.abs() * ea + ea * eb)
        })
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(-q),
            Value::Approx { value, error } => Value::Approx { value: -value, error },
        }
    }
}

impl std::iter::Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, v| acc + v)
    }
}

/// Nearest-ish float of a rational, robust to numerators and denominators
/// beyond the f64 range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        q.numer().clone() / (q.denom() << shift as usize)
    } else {
        (q.numer() << (-shift) as usize) / q.denom().clone()
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Value {
        Value::Exact(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let v = q(1, 4) + q(1, 8) * q(2, 1) - q(1, 2);
        assert_eq!(v, q(0, 1));
        assert!(v.is_exact());
    }

    #[test]
    fn mixing_in_a_float_tracks_error() {
        let v = q(1, 2) + Value::approx(0.25, 1e-9);
        assert!(!v.is_exact());
        assert!((v.to_f64() - 0.75).abs() < 1e-15);
        assert!(v.error() >= 1e-9);
        assert_eq!(Value::approx(1e-12, 1e-9).is_positive(), None);
        assert_eq!(q(-1, 3).is_positive(), Some(false));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(3).pow(800), BigInt::from(2).pow(1300));
        let expected = 800.0 * 3f64.log2() - 1300.0;
        assert!((rational_to_f64(&big).log2() - expected).abs() < 1e-9);
    }
}
