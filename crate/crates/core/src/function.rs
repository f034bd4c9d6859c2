//! Locally constant functions: a value table on the windows
//! `x_{-r} .. x_r` with a default for windows not listed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value as Json};

use crate::error::{invalid, Error, Result};
use crate::krieger::PeriodicPoint;
use crate::language::all_words;
use crate::measures::parse_rational;
use crate::reduce::reduce_symbols;
use crate::symbol::{AlphabetParams, Ambient, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyConstantFn {
    params: AlphabetParams,
    ambient: Ambient,
    radius: usize,
    table: BTreeMap<Word, BigRational>,
    default: BigRational,
}

impl LocallyConstantFn {
    pub fn new(
        params: AlphabetParams,
        ambient: Ambient,
        radius: usize,
        table: BTreeMap<Word, BigRational>,
        default: BigRational,
    ) -> Result<Self> {
        for w in table.keys() {
            if w.len() != 2 * radius + 1 {
                return invalid(format!("table word {w} has length {}, expected {}", w.len(), 2 * radius + 1));
            }
            params.check_word(ambient, w)?;
        }
        Ok(LocallyConstantFn { params, ambient, radius, table, default })
    }

    pub fn constant(params: AlphabetParams, ambient: Ambient, c: BigRational) -> Self {
        LocallyConstantFn { params, ambient, radius: 0, table: BTreeMap::new(), default: c }
    }

    /// Indicator of the cylinder `[w]` at coordinate `-r`, `r = floor(|w|/2)`,
    /// as a function of the window of radius `r`. Only admissible windows
    /// are listed on the Dyck shift, so the indicator of an inadmissible
    /// word is identically zero there.
    pub fn indicator(params: AlphabetParams, ambient: Ambient, w: &[Symbol]) -> Result<Self> {
        if w.is_empty() {
            return invalid("indicator of the empty word");
        }
        params.check_word(ambient, w)?;
        let radius = w.len() / 2;
        let pad = 2 * radius + 1 - w.len();
        let mut table = BTreeMap::new();
        for tail in all_words(&params.alphabet(ambient), pad) {
            let window = Word::from(w.to_vec()).concat(&tail);
            if ambient == Ambient::SigmaD && reduce_symbols(&window).zero {
                continue;
            }
            table.insert(window, BigRational::one());
        }
        Self::new(params, ambient, radius, table, BigRational::zero())
    }

    /// The height increment of the symbol at coordinate 0.
    pub fn drift(params: AlphabetParams, ambient: Ambient) -> Self {
        let table = params
            .alphabet(ambient)
            .into_iter()
            .filter(|s| s.step() != 0)
            .map(|s| (Word::from(vec![s]), BigRational::from_integer(BigInt::from(s.step()))))
            .collect();
        LocallyConstantFn { params, ambient, radius: 0, table, default: BigRational::zero() }
    }

    pub fn params(&self) -> AlphabetParams {
        self.params
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn table(&self) -> &BTreeMap<Word, BigRational> {
        &self.table
    }

    pub fn default_value(&self) -> &BigRational {
        &self.default
    }

    pub fn eval(&self, window: &[Symbol]) -> &BigRational {
        self.table.get(window).unwrap_or(&self.default)
    }

    /// Mean of `f` along the orbit of a periodic point: the integral against
    /// its orbit measure.
    pub fn cyclic_mean(&self, cycle: &[Symbol]) -> BigRational {
        let p = cycle.len();
        let l = self.window_len();
        let mut window = Vec::with_capacity(l);
        let mut total = BigRational::zero();
        for i in 0..p {
            window.clear();
            window.extend((0..l).map(|k| cycle[(i + k) % p]));
            total += self.eval(&window);
        }
        total / BigRational::from_integer(BigInt::from(p))
    }

    pub fn mean_on(&self, point: &PeriodicPoint) -> Result<BigRational> {
        if point.ambient() != self.ambient {
            return invalid("periodic point and function live on different shifts");
        }
        Ok(self.cyclic_mean(point.cycle()))
    }

    pub fn from_json(v: &Json, params: AlphabetParams) -> Result<Self> {
        let ambient: Ambient = match v.get("ambient").and_then(Json::as_str) {
            Some(a) => a.parse()?,
            None => Ambient::SigmaD,
        };
        let radius = v
            .get("radius")
            .and_then(Json::as_u64)
            .ok_or_else(|| Error::InvalidInput("function needs a nonnegative integer \"radius\"".into()))?
            as usize;
        let number = |x: &Json| match x {
            Json::String(s) => parse_rational(s),
            Json::Number(n) => parse_rational(&n.to_string()),
            other => invalid(format!("expected a number, got {other}")),
        };
        let default = match v.get("default") {
            None | Some(Json::Null) => BigRational::zero(),
            Some(x) => number(x)?,
        };
        let mut table = BTreeMap::new();
        let entries = match v.get("entries") {
            None | Some(Json::Null) => Vec::new(),
            Some(Json::Array(a)) => a.clone(),
            Some(_) => return invalid("\"entries\" must be an array"),
        };
        for e in &entries {
            let word = e
                .get("word")
                .and_then(Json::as_str)
                .ok_or_else(|| Error::InvalidInput("entry without a \"word\" string".into()))?;
            let value = number(e.get("value").ok_or_else(|| Error::InvalidInput("entry without a \"value\"".into()))?)?;
            if table.insert(Word::parse(word)?, value).is_some() {
                return invalid(format!("duplicate entry for {word}"));
            }
        }
        Self::new(params, ambient, radius, table, default)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "ambient": self.ambient.to_string(),
            "radius": self.radius,
            "entries": self.table.iter().map(|(w, v)| json!({"word": w.to_string(), "value": v.to_string()})).collect::<Vec<_>>(),
            "default": self.default.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::w;

    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }
    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn indicator_tables() {
        let f = LocallyConstantFn::indicator(p21(), Ambient::SigmaD, &w("A1 B1")).unwrap();
        assert_eq!(f.radius(), 1);
        // A1 B1 followed by any of the five symbols is admissible
        assert_eq!(f.table().len(), 5);
        assert_eq!(f.cyclic_mean(&w("A1 B1")), q(1, 2));
        let dead = LocallyConstantFn::indicator(p21(), Ambient::SigmaD, &w("A1 B2")).unwrap();
        assert!(dead.table().is_empty());
        let one = LocallyConstantFn::indicator(p21(), Ambient::SigmaD, &w("U1")).unwrap();
        assert_eq!(one.cyclic_mean(&w("U1 A1")), q(1, 2));
    }

    #[test]
    fn drift_means() {
        let g = LocallyConstantFn::drift(p21(), Ambient::SigmaD);
        assert_eq!(g.cyclic_mean(&w("A1 A2 B2")), q(1, 3));
    }

    #[test]
    fn json_round_trip() {
        let v = json!({"radius": 0, "entries": [{"word": "A1", "value": "1/2"}, {"word": "U1", "value": 0.25}], "default": -1});
        let f = LocallyConstantFn::from_json(&v, p21()).unwrap();
        assert_eq!(f.eval(&w("U1")), &q(1, 4));
        assert_eq!(f.eval(&w("B2")), &q(-1, 1));
        assert_eq!(LocallyConstantFn::from_json(&f.to_json(), p21()).unwrap(), f);
        assert!(LocallyConstantFn::from_json(&json!({"radius": 1, "entries": [{"word": "A1", "value": 1}]}), p21()).is_err());
    }
}
