//! Truncated weak* metric `d(mu, nu) = sum_n 2^{-n} |mu(C_n) - nu(C_n)|` over
//! the cylinders `C_1, C_2, ...` of admissible words ordered by length, then
//! canonically.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::eval::Evaluator;
use super::value::Value;
use super::MeasureSpec;
use crate::error::{invalid, Result};
use crate::language::admissible_words;
use crate::symbol::{AlphabetParams, Ambient, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakStarConfig {
    pub max_len: usize,
}

impl Default for WeakStarConfig {
    fn default() -> Self {
        WeakStarConfig { max_len: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakStarDistance {
    pub value: Value,
    /// Bound `2^{-n(L)}` on the omitted tail of the series.
    pub truncation: f64,
}

pub fn cylinder_family(params: &AlphabetParams, ambient: Ambient, max_len: usize) -> Vec<Word> {
    (1..=max_len).flat_map(|n| admissible_words(params, ambient, n)).collect()
}

/// The masses a measure gives to the cylinder family, computed once so that
/// many distances can be taken cheaply.
#[derive(Clone, Debug)]
pub struct CylinderProfile {
    params: AlphabetParams,
    ambient: Ambient,
    max_len: usize,
    values: Vec<Value>,
}

impl CylinderProfile {
    pub fn new(mu: &MeasureSpec, cfg: &WeakStarConfig) -> Result<Self> {
        Self::from_evaluator(&Evaluator::new(mu)?, cfg)
    }

    pub fn from_evaluator(ev: &Evaluator, cfg: &WeakStarConfig) -> Result<Self> {
        let params = ev.params();
        let values = cylinder_family(&params, ev.ambient(), cfg.max_len)
            .iter()
            .map(|w| ev.cylinder(w))
            .collect::<Result<_>>()?;
        Ok(CylinderProfile { params, ambient: ev.ambient(), max_len: cfg.max_len, values })
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn distance(&self, other: &CylinderProfile) -> Result<WeakStarDistance> {
        if self.ambient != other.ambient || self.params != other.params || self.max_len != other.max_len {
            return invalid("weak* distance between profiles of different shifts or cutoffs");
        }
        let both_exact = self.values.iter().chain(&other.values).all(Value::is_exact);
        let value = if both_exact {
            let mut total = BigRational::from_integer(BigInt::from(0));
            let mut weight = BigRational::new(1.into(), 1.into());
            let half = BigRational::new(1.into(), 2.into());
            for (a, b) in self.values.iter().zip(&other.values) {
                weight *= &half;
                let (a, b) = (a.exact().expect("exact"), b.exact().expect("exact"));
                let diff = if a > b { a - b } else { b - a };
                total += diff * &weight;
            }
            Value::Exact(total)
        } else {
            let mut total = 0.0;
            let mut error = 0.0;
            let mut weight = 1.0;
            for (a, b) in self.values.iter().zip(&other.values) {
                weight *= 0.5;
                total += weight * (a.to_f64() - b.to_f64()).abs();
                error += weight * (a.error() + b.error());
            }
            Value::approx(total, error + total * 1e-15)
        };
        let truncation = 0.5f64.powi(self.values.len().min(i32::MAX as usize) as i32);
        Ok(WeakStarDistance { value, truncation })
    }
}

pub fn weakstar_distance(mu: &MeasureSpec, nu: &MeasureSpec, cfg: &WeakStarConfig) -> Result<WeakStarDistance> {
    if mu.ambient() != nu.ambient() {
        return invalid(format!(
            "weak* distance between measures on {} and {}",
            mu.ambient(),
            nu.ambient()
        ));
    }
    CylinderProfile::new(mu, cfg)?.distance(&CylinderProfile::new(nu, cfg)?)
}
