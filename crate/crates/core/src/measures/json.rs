//! JSON encoding of measure specifications.
//!
//! ```json
//! {"type": "bernoulli", "ambient": "sigma_alpha", "weights": ["1/4", "1/4", "1/4", "1/4"]}
//! {"type": "markov", "ambient": "sigma_alpha", "kernel": [[0.5, 0.5, 0, 0], ...]}
//! {"type": "co", "ambient": "sigma_d", "cycle": "A1 B1"}
//! {"type": "pushforward", "gamma": "alpha", "inner": {"type": "bernoulli", ...}}
//! ```
//!
//! Bernoulli weights may also be the string `"uniform"`. Markov chains take
//! optional `labels` (one symbol per state, defaulting to the alphabet) and
//! an optional `stationary` vector.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde_json::{json, Value as Json};

use super::value::rational_to_f64;
use super::{Bernoulli, MarkovChain, MeasureSpec};
use crate::error::{invalid, Error, Result};
use crate::krieger::PeriodicPoint;
use crate::symbol::{AlphabetParams, Ambient, Gamma, Word};

/// Parses `"p/q"`, integers and plain or scientific decimals exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int_part.starts_with('-');
    let digits: String = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut n: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        n = -n;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(n, Pow::pow(&ten, (-scale) as u32))
    })
}

fn rational_from_json(v: &Json) -> Result<BigRational> {
    match v {
        Json::String(s) => parse_rational(s),
        Json::Number(n) => parse_rational(&n.to_string()),
        other => invalid(format!("expected a number or fraction string, got {other}")),
    }
}

fn field<'a>(obj: &'a Json, key: &str) -> Result<&'a Json> {
    obj.get(key).ok_or_else(|| Error::InvalidInput(format!("missing field {key:?}")))
}

fn str_field<'a>(obj: &'a Json, key: &str) -> Result<&'a str> {
    field(obj, key)?
        .as_str()
        .ok_or_else(|| Error::InvalidInput(format!("field {key:?} must be a string")))
}

fn float_vec(v: &Json, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be an array")))?
        .iter()
        .map(|x| match x.as_f64() {
            Some(f) => Ok(f),
            None => rational_from_json(x).map(|q| rational_to_f64(&q)),
        })
        .collect()
}

pub fn point_from_json(v: &Json, params: AlphabetParams) -> Result<PeriodicPoint> {
    let ambient: Ambient = str_field(v, "ambient")?.parse()?;
    PeriodicPoint::new(params, ambient, Word::parse(str_field(v, "cycle")?)?)
}

pub fn point_to_json(p: &PeriodicPoint) -> Json {
    json!({"ambient": p.ambient().to_string(), "cycle": p.cycle().to_string()})
}

pub fn measure_from_json(v: &Json, params: AlphabetParams) -> Result<MeasureSpec> {
    match str_field(v, "type")? {
        "bernoulli" => {
            let ambient: Ambient = str_field(v, "ambient")?.parse()?;
            let weights = field(v, "weights")?;
            let b = if weights.as_str() == Some("uniform") {
                Bernoulli::uniform(params, ambient)?
            } else {
                let ws = weights
                    .as_array()
                    .ok_or_else(|| Error::InvalidInput("weights must be an array or \"uniform\"".into()))?
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>>>()?;
                Bernoulli::new(params, ambient, ws)?
            };
            Ok(MeasureSpec::Bernoulli(b))
        }
        "markov" => {
            let ambient: Ambient = str_field(v, "ambient")?.parse()?;
            let kernel = field(v, "kernel")?
                .as_array()
                .ok_or_else(|| Error::InvalidInput("kernel must be an array of rows".into()))?
                .iter()
                .map(|r| float_vec(r, "kernel row"))
                .collect::<Result<Vec<_>>>()?;
            let labels = match v.get("labels") {
                None | Some(Json::Null) => params.alphabet(ambient),
                Some(Json::String(s)) => Word::parse(s)?.into_symbols(),
                Some(Json::Array(items)) => items
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .ok_or_else(|| Error::InvalidInput("labels must be symbol strings".into()))?
                            .parse()
                    })
                    .collect::<Result<Vec<_>>>()?,
                Some(other) => return invalid(format!("bad labels {other}")),
            };
            let stationary = match v.get("stationary") {
                None | Some(Json::Null) => None,
                Some(s) => Some(float_vec(s, "stationary")?),
            };
            Ok(MeasureSpec::Markov(MarkovChain::new(params, ambient, labels, kernel, stationary)?))
        }
        "co" => Ok(MeasureSpec::Co(point_from_json(v, params)?)),
        "pushforward" => {
            let gamma: Gamma = str_field(v, "gamma")?.parse()?;
            let inner = measure_from_json(field(v, "inner")?, params)?;
            MeasureSpec::pushforward(gamma, inner)
        }
        other => invalid(format!("unknown measure type {other:?}")),
    }
}

pub fn measure_to_json(mu: &MeasureSpec) -> Json {
    match mu {
        MeasureSpec::Bernoulli(b) => json!({
            "type": "bernoulli",
            "ambient": b.ambient().to_string(),
            "weights": b.weights().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
        MeasureSpec::Markov(m) => json!({
            "type": "markov",
            "ambient": m.ambient().to_string(),
            "labels": m.labels().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "kernel": m.kernel(),
            "stationary": m.stationary(),
        }),
        MeasureSpec::Co(p) => {
            let mut v = point_to_json(p);
            v["type"] = json!("co");
            v
        }
        MeasureSpec::Pushforward(pf) => json!({
            "type": "pushforward",
            "gamma": pf.gamma().to_string(),
            "inner": measure_to_json(pf.inner()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }

    #[test]
    fn rationals() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("1/4").unwrap(), q(1, 4));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("1e2").unwrap(), q(100, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn round_trip() {
        let specs = [
            json!({"type": "co", "ambient": "sigma_d", "cycle": "B1 A1"}),
            json!({"type": "pushforward", "gamma": "alpha",
                   "inner": {"type": "bernoulli", "ambient": "sigma_alpha", "weights": "uniform"}}),
            json!({"type": "pushforward", "gamma": "beta",
                   "inner": {"type": "markov", "ambient": "sigma_beta",
                             "kernel": [[0.4, 0.2, 0.2, 0.2], [0.25, 0.25, 0.25, 0.25],
                                        [0.25, 0.25, 0.25, 0.25], [0.25, 0.25, 0.25, 0.25]]}}),
        ];
        for s in specs {
            let mu = measure_from_json(&s, p21()).unwrap();
            let back = measure_from_json(&measure_to_json(&mu), p21()).unwrap();
            assert_eq!(mu, back);
        }
    }

    #[test]
    fn schema_errors() {
        assert!(measure_from_json(&json!({"type": "gibbs"}), p21()).is_err());
        assert!(measure_from_json(&json!({"type": "co", "ambient": "sigma_d"}), p21()).is_err());
        let low = json!({"type": "pushforward", "gamma": "alpha",
                         "inner": {"type": "co", "ambient": "sigma_alpha", "cycle": "B*"}});
        assert!(matches!(measure_from_json(&low, p21()), Err(Error::TransportCondition { .. })));
    }
}
