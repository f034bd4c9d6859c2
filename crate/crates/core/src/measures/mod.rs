//! Invariant measures given by closed descriptions: Bernoulli and Markov
//! measures on the collapsed full shifts, measures on single periodic
//! orbits, and transports of the former through the reconstruction maps.

pub(crate) mod approx;
pub mod chain;
mod eval;
mod json;
mod metric;
mod sample;
mod value;

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::LocallyConstantFn;
use crate::krieger::PeriodicPoint;
use crate::reduce::ErgodicClass;
use crate::symbol::{AlphabetParams, Ambient, Gamma, Symbol, Word};

pub use approx::{co_approx, co_approx_with, ApproxConfig};
pub use eval::Evaluator;
pub use json::{measure_from_json, measure_to_json, parse_rational, point_from_json, point_to_json};
pub use metric::{cylinder_family, weakstar_distance, CylinderProfile, WeakStarConfig, WeakStarDistance};
pub use sample::{sample, sample_with, SampleConfig};
pub use value::{rational_to_f64, Value};

/// I.i.d. symbols with rational weights, one per symbol of the canonical
/// alphabet of a collapsed full shift.
#[derive(Clone, Debug, PartialEq)]
pub struct Bernoulli {
    params: AlphabetParams,
    ambient: Ambient,
    weights: Vec<BigRational>,
}

impl Bernoulli {
    pub fn new(params: AlphabetParams, ambient: Ambient, weights: Vec<BigRational>) -> Result<Self> {
        check_full_shift(ambient, "Bernoulli")?;
        let size = params.alphabet_size(ambient);
        if weights.len() != size {
            return invalid(format!("{ambient} has {size} symbols, got {} weights", weights.len()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return invalid("negative Bernoulli weight");
        }
        let total: BigRational = weights.iter().sum();
        if (rational_to_f64(&total) - 1.0).abs() > 1e-12 {
            return invalid(format!("Bernoulli weights sum to {total}, not 1"));
        }
        let weights = weights.into_iter().map(|w| w / &total).collect();
        Ok(Bernoulli { params, ambient, weights })
    }

    pub fn uniform(params: AlphabetParams, ambient: Ambient) -> Result<Self> {
        let size = params.alphabet_size(ambient);
        let w = BigRational::new(1.into(), (size as i64).into());
        Self::new(params, ambient, vec![w; size])
    }

    pub fn params(&self) -> AlphabetParams {
        self.params
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Weights in canonical alphabet order.
    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, s: Symbol) -> BigRational {
        self.params
            .index_of(self.ambient, s)
            .map(|i| self.weights[i].clone())
            .unwrap_or_else(BigRational::zero)
    }
}

/// A stationary Markov chain on finitely many states, observed through a
/// symbol label on each state. With one state per symbol this is an
/// ordinary Markov measure; repeated labels allow periodic orbits and
/// their mixtures to be written as chains.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    params: AlphabetParams,
    ambient: Ambient,
    labels: Vec<Symbol>,
    kernel: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl MarkovChain {
    pub fn new(
        params: AlphabetParams,
        ambient: Ambient,
        labels: Vec<Symbol>,
        kernel: Vec<Vec<f64>>,
        stationary: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_full_shift(ambient, "Markov")?;
        let n = labels.len();
        if n == 0 {
            return invalid("Markov chain without states");
        }
        params.check_word(ambient, &labels)?;
        if kernel.len() != n || kernel.iter().any(|r| r.len() != n) {
            return invalid(format!("kernel must be {n}x{n}"));
        }
        for (i, row) in kernel.iter().enumerate() {
            if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return invalid(format!("kernel row {i} has a negative or non-finite entry"));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return invalid(format!("kernel row {i} sums to {s}"));
            }
        }
        let p = chain::to_matrix(&kernel);
        if !chain::is_irreducible(&p) {
            return invalid("Markov kernel is not irreducible");
        }
        let stationary = match stationary {
            Some(pi) => {
                if pi.len() != n || pi.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return invalid("stationary vector has the wrong length or a negative entry");
                }
                if (pi.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                    return invalid("stationary vector does not sum to 1");
                }
                let v = nalgebra::DVector::from_vec(pi.clone());
                let moved = p.transpose() * &v;
                if (moved - v).amax() > 1e-10 {
                    return invalid("stationary vector is not invariant under the kernel");
                }
                pi
            }
            None => chain::stationary(&p)?.iter().copied().collect(),
        };
        Ok(MarkovChain { params, ambient, labels, kernel, stationary })
    }

    /// A chain whose states are the symbols of the alphabet, in canonical order.
    pub fn on_symbols(
        params: AlphabetParams,
        ambient: Ambient,
        kernel: Vec<Vec<f64>>,
        stationary: Option<Vec<f64>>,
    ) -> Result<Self> {
        Self::new(params, ambient, params.alphabet(ambient), kernel, stationary)
    }

    pub fn params(&self) -> AlphabetParams {
        self.params
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn states(&self) -> usize {
        self.labels.len()
    }

    /// Whether each symbol labels at most one state.
    pub fn labels_injective(&self) -> bool {
        let set: HashSet<_> = self.labels.iter().collect();
        set.len() == self.labels.len()
    }

    pub fn strictly_positive(&self) -> bool {
        self.kernel.iter().flatten().all(|&x| x > 0.0)
    }
}

/// Transport of a measure on `Sigma_gamma` to the Dyck shift through the
/// reconstruction map. Construct with [`MeasureSpec::pushforward`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pushforward {
    gamma: Gamma,
    inner: Box<MeasureSpec>,
}

impl Pushforward {
    pub fn gamma(&self) -> Gamma {
        self.gamma
    }

    pub fn inner(&self) -> &MeasureSpec {
        &self.inner
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    Bernoulli(Bernoulli),
    Markov(MarkovChain),
    Co(PeriodicPoint),
    Pushforward(Pushforward),
}

impl MeasureSpec {
    /// Wraps `inner` as its transport through the reconstruction map. The
    /// transport integral of `inner` must exceed 1 strictly, which is what
    /// makes the reconstruction defined almost everywhere.
    pub fn pushforward(gamma: Gamma, inner: MeasureSpec) -> Result<Self> {
        if inner.ambient() != Ambient::collapsed(gamma) {
            return invalid(format!(
                "transport through psi_{gamma} needs a measure on {}, got {}",
                Ambient::collapsed(gamma),
                inner.ambient()
            ));
        }
        let e = transport_condition(&inner, gamma)?;
        let ok = match &e {
            Value::Exact(q) => *q > BigRational::one(),
            Value::Approx { value, error } => *value > 1.0 + error.max(1e-9),
        };
        if !ok {
            return Err(Error::TransportCondition { value: e.to_f64(), at: None });
        }
        Ok(MeasureSpec::Pushforward(Pushforward { gamma, inner: Box::new(inner) }))
    }

    pub fn params(&self) -> AlphabetParams {
        match self {
            MeasureSpec::Bernoulli(b) => b.params,
            MeasureSpec::Markov(m) => m.params,
            MeasureSpec::Co(p) => *p.params(),
            MeasureSpec::Pushforward(p) => p.inner.params(),
        }
    }

    pub fn ambient(&self) -> Ambient {
        match self {
            MeasureSpec::Bernoulli(b) => b.ambient,
            MeasureSpec::Markov(m) => m.ambient,
            MeasureSpec::Co(p) => p.ambient(),
            MeasureSpec::Pushforward(_) => Ambient::SigmaD,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MeasureSpec::Bernoulli(_) => "bernoulli",
            MeasureSpec::Markov(_) => "markov",
            MeasureSpec::Co(_) => "co",
            MeasureSpec::Pushforward(_) => "pushforward",
        }
    }

    pub fn as_co(&self) -> Option<&PeriodicPoint> {
        match self {
            MeasureSpec::Co(p) => Some(p),
            _ => None,
        }
    }
}

fn check_full_shift(ambient: Ambient, what: &str) -> Result<()> {
    if ambient == Ambient::SigmaD {
        return invalid(format!(
            "{what} measures live on sigma_alpha or sigma_beta; reach sigma_d through a pushforward"
        ));
    }
    Ok(())
}

/// A cylinder `{x : x_j .. x_{j+|w|-1} = w}`. The anchor is irrelevant for
/// the shift-invariant measures handled here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderQuery {
    pub word: Word,
    pub anchor: i64,
}

impl CylinderQuery {
    pub fn new(word: Word) -> Self {
        CylinderQuery { word, anchor: 0 }
    }
}

pub fn cylinder_prob(mu: &MeasureSpec, q: &CylinderQuery) -> Result<Value> {
    Evaluator::new(mu)?.cylinder(&q.word)
}

/// `sum_w f(w) mu([w])` over windows of length `2r+1`.
pub fn integral(mu: &MeasureSpec, f: &LocallyConstantFn) -> Result<Value> {
    Evaluator::new(mu)?.integral(f)
}

/// Entropy, with bounds. All bounds coincide except for Markov chains with
/// repeated labels, whose label process is a hidden Markov chain; there the
/// reported value is the upper bound `H(Y_n | Y_1..Y_{n-1})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl EntropyValue {
    fn exact(value: f64) -> Self {
        EntropyValue { value, lower: value, upper: value }
    }
}

pub fn entropy(mu: &MeasureSpec) -> Result<EntropyValue> {
    Ok(match mu {
        MeasureSpec::Bernoulli(b) => EntropyValue::exact(
            b.weights
                .iter()
                .map(rational_to_f64)
                .filter(|&p| p > 0.0)
                .map(|p| -p * p.ln())
                .sum(),
        ),
        MeasureSpec::Markov(m) => {
            let p = chain::to_matrix(&m.kernel);
            let pi = nalgebra::DVector::from_vec(m.stationary.clone());
            if m.labels_injective() {
                EntropyValue::exact(chain::state_entropy(&p, &pi))
            } else {
                let alphabet = m.params.alphabet(m.ambient);
                let labels: Vec<usize> = m
                    .labels
                    .iter()
                    .map(|s| alphabet.iter().position(|a| a == s).expect("checked label"))
                    .collect();
                let k = alphabet.len().max(2);
                let mut n = 2;
                while n < 6 && k.pow(n as u32) <= 512 {
                    n += 1;
                }
                let (lower, upper) = chain::hidden_entropy_bounds(&p, &pi, &labels, alphabet.len(), n);
                EntropyValue { value: upper, lower, upper }
            }
        }
        MeasureSpec::Co(_) => EntropyValue::exact(0.0),
        MeasureSpec::Pushforward(p) => entropy(&p.inner)?,
    })
}

/// `int E_gamma dnu = 2 nu(indexed brackets) + nu(units)` for `nu` on
/// `Sigma_gamma`.
pub fn transport_condition(nu: &MeasureSpec, gamma: Gamma) -> Result<Value> {
    if nu.ambient() != Ambient::collapsed(gamma) {
        return invalid(format!(
            "the transport integral for {gamma} needs a measure on {}",
            Ambient::collapsed(gamma)
        ));
    }
    let ev = Evaluator::new(nu)?;
    let params = nu.params();
    let mut total = Value::zero();
    for s in params.alphabet(nu.ambient()) {
        let coeff = match s {
            Symbol::Left(_) | Symbol::Right(_) => 2,
            Symbol::Unit(_) => 1,
            _ => continue,
        };
        total = total + Value::int(coeff) * ev.cylinder(&[s])?;
    }
    Ok(total)
}

/// Mean height increment `mu(left brackets) - mu(right brackets)`.
pub fn mean_drift(mu: &MeasureSpec) -> Result<Value> {
    let ev = Evaluator::new(mu)?;
    let mut total = Value::zero();
    for s in mu.params().alphabet(mu.ambient()) {
        if s.step() != 0 {
            total = total + Value::int(s.step()) * ev.cylinder(&[s])?;
        }
    }
    Ok(total)
}

/// Class of an ergodic measure on the Dyck shift by the sign of its drift.
pub fn classify_measure(mu: &MeasureSpec) -> Result<ErgodicClass> {
    match mu {
        MeasureSpec::Co(p) if p.ambient() == Ambient::SigmaD => Ok(p.class()),
        // the transport condition is exactly positive drift on the gamma side
        MeasureSpec::Pushforward(p) => Ok(match p.gamma {
            Gamma::Alpha => ErgodicClass::Alpha,
            Gamma::Beta => ErgodicClass::Beta,
        }),
        _ => invalid(format!("classification needs a measure on sigma_d, got {}", mu.ambient())),
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
    fn exact(v: Value) -> BigRational {
        v.exact().cloned().expect("exact value")
    }
    fn krieger(gamma: Gamma) -> MeasureSpec {
        let u = Bernoulli::uniform(p21(), Ambient::collapsed(gamma)).unwrap();
        MeasureSpec::pushforward(gamma, MeasureSpec::Bernoulli(u)).unwrap()
    }
    fn co(text: &str) -> MeasureSpec {
        MeasureSpec::Co(PeriodicPoint::parse(p21(), Ambient::SigmaD, text).unwrap())
    }
    fn cyl(mu: &MeasureSpec, text: &str) -> BigRational {
        exact(cylinder_prob(mu, &CylinderQuery::new(w(text))).unwrap())
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(cyl(&co("A1 B1"), "A1"), q(1, 2));
        let k = krieger(Gamma::Alpha);
        assert_eq!(cyl(&k, "A1 B1"), q(1, 16));
        assert_eq!(cyl(&k, "A1 B2"), q(0, 1));
        assert_eq!(cyl(&k, "B1"), q(1, 8));
        assert_eq!(cyl(&k, "A1"), q(1, 4));
        assert_eq!(cyl(&krieger(Gamma::Beta), "A1"), q(1, 8));
    }

    #[test]
    fn entropy_examples() {
        let u = MeasureSpec::Bernoulli(Bernoulli::uniform(p21(), Ambient::SigmaAlpha).unwrap());
        assert!((entropy(&u).unwrap().value - 4f64.ln()).abs() < 1e-12);
        assert_eq!(entropy(&co("A1 B1")).unwrap().value, 0.0);
        assert!((entropy(&krieger(Gamma::Beta)).unwrap().value - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn transport_examples() {
        let u = MeasureSpec::Bernoulli(Bernoulli::uniform(p21(), Ambient::SigmaAlpha).unwrap());
        assert_eq!(exact(transport_condition(&u, Gamma::Alpha).unwrap()), q(5, 4));
        let fixed = MeasureSpec::Co(PeriodicPoint::parse(p21(), Ambient::SigmaAlpha, "B*").unwrap());
        assert_eq!(exact(transport_condition(&fixed, Gamma::Alpha).unwrap()), q(0, 1));
        assert!(matches!(
            MeasureSpec::pushforward(Gamma::Alpha, fixed),
            Err(Error::TransportCondition { .. })
        ));
        let balanced = MeasureSpec::Co(PeriodicPoint::parse(p21(), Ambient::SigmaAlpha, "A1 B*").unwrap());
        assert!(MeasureSpec::pushforward(Gamma::Alpha, balanced).is_err());
        assert!(transport_condition(&u, Gamma::Beta).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_measure(&co("A1 B1")).unwrap(), ErgodicClass::Zero);
        assert_eq!(classify_measure(&krieger(Gamma::Alpha)).unwrap(), ErgodicClass::Alpha);
        assert_eq!(classify_measure(&co("B1")).unwrap(), ErgodicClass::Beta);
        assert_eq!(exact(mean_drift(&krieger(Gamma::Alpha)).unwrap()), q(1, 4));
    }

    #[test]
    fn bernoulli_and_markov_validation() {
        assert!(Bernoulli::new(p21(), Ambient::SigmaAlpha, vec![q(1, 2); 4]).is_err());
        assert!(Bernoulli::uniform(p21(), Ambient::SigmaD).is_err());
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let labels = vec![Symbol::Left(1), Symbol::Left(2)];
        assert!(MarkovChain::new(p21(), Ambient::SigmaAlpha, labels.clone(), id, None).is_err());
        let flip = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let m = MarkovChain::new(p21(), Ambient::SigmaAlpha, labels, flip, None).unwrap();
        assert!((m.stationary()[0] - 0.5).abs() < 1e-12);
    }
}
