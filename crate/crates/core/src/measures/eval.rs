//! Compiled form of a [`MeasureSpec`] for repeated cylinder evaluation.
//!
//! Transports need the law of the partners of brackets that are left open
//! inside a window. For the alpha side the partners of the unmatched right
//! brackets are the left brackets at which the height, read leftwards from
//! the window, reaches a new minimum. Under a Bernoulli measure their
//! indices are i.i.d. with law `w_k / W_alpha`. Under a Markov chain they are
//! read off the first-passage matrix of the time-reversed chain, viewed as
//! a level process (level down on a left bracket, up on the collapsed
//! bracket). The beta side is the mirror image with the forward chain.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::chain;
use super::value::Value;
use super::{MarkovChain, MeasureSpec};
use crate::error::{invalid, Result};
use crate::function::LocallyConstantFn;
use crate::krieger::{collapse_word, reconstruct_cycle};
use crate::reduce::reduce_symbols;
use crate::symbol::{AlphabetParams, Ambient, Gamma, Symbol};

#[derive(Clone, Debug)]
pub struct Evaluator {
    params: AlphabetParams,
    ambient: Ambient,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Bernoulli(Vec<BigRational>),
    Markov(ChainData),
    Cycle(Vec<Symbol>),
    PushBernoulli {
        gamma: Gamma,
        inner: Vec<BigRational>,
        // law of the partner index, by bracket index - 1
        ladder: Vec<BigRational>,
    },
    PushMarkov {
        gamma: Gamma,
        chain: ChainData,
        passage: DMatrix<f64>,
        passage_err: f64,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct ChainData {
    pub labels: Vec<Symbol>,
    pub kernel: DMatrix<f64>,
    pub pi: DVector<f64>,
}

impl ChainData {
    pub fn new(m: &MarkovChain) -> Self {
        ChainData {
            labels: m.labels().to_vec(),
            kernel: chain::to_matrix(m.kernel()),
            pi: DVector::from_vec(m.stationary().to_vec()),
        }
    }

    fn states(&self) -> usize {
        self.labels.len()
    }

    fn mask(&self, v: &DVector<f64>, s: Symbol) -> DVector<f64> {
        DVector::from_fn(self.states(), |i, _| if self.labels[i] == s { v[i] } else { 0.0 })
    }

    /// Row vector of `P(X_{len-1} = s, Y_0..Y_{len-1} = word)`.
    fn forward(&self, word: &[Symbol]) -> DVector<f64> {
        let mut a = self.mask(&self.pi, word[0]);
        for &c in &word[1..] {
            a = self.mask(&(self.kernel.transpose() * a), c);
        }
        a
    }

    /// Column vector of `P(Y_1..Y_{len-1} = word[1..] | X_0 = s)`.
    fn backward(&self, word: &[Symbol]) -> DVector<f64> {
        let mut f = DVector::from_element(self.states(), 1.0);
        for &c in word[1..].iter().rev() {
            f = &self.kernel * self.mask(&f, c);
        }
        f
    }
}

fn bernoulli_weights(mu: &MeasureSpec) -> Option<Vec<BigRational>> {
    match mu {
        MeasureSpec::Bernoulli(b) => Some(b.weights().to_vec()),
        _ => None,
    }
}

impl Evaluator {
    pub fn new(mu: &MeasureSpec) -> Result<Self> {
        let params = mu.params();
        let ambient = mu.ambient();
        let kind = match mu {
            MeasureSpec::Bernoulli(b) => Kind::Bernoulli(b.weights().to_vec()),
            MeasureSpec::Markov(m) => Kind::Markov(ChainData::new(m)),
            MeasureSpec::Co(p) => Kind::Cycle(p.cycle().to_vec()),
            MeasureSpec::Pushforward(p) => {
                let gamma = p.gamma();
                match p.inner() {
                    MeasureSpec::Co(y) => Kind::Cycle(reconstruct_cycle(y.cycle(), gamma)?),
                    inner @ MeasureSpec::Bernoulli(_) => {
                        let weights = bernoulli_weights(inner).expect("bernoulli");
                        let amb = Ambient::collapsed(gamma);
                        let bracket = |k: u16| match gamma {
                            Gamma::Alpha => Symbol::Left(k),
                            Gamma::Beta => Symbol::Right(k),
                        };
                        let w = |k: u16| weights[params.index_of(amb, bracket(k)).expect("bracket")].clone();
                        let total: BigRational = (1..=params.m).map(w).sum();
                        let ladder = (1..=params.m).map(|k| w(k) / &total).collect();
                        Kind::PushBernoulli { gamma, inner: weights, ladder }
                    }
                    MeasureSpec::Markov(m) => {
                        let data = ChainData::new(m);
                        let (passage, passage_err) = passage_matrix(&data, gamma)?;
                        Kind::PushMarkov { gamma, chain: data, passage, passage_err }
                    }
                    MeasureSpec::Pushforward(_) => return invalid("nested pushforward"),
                }
            }
        };
        Ok(Evaluator { params, ambient, kind })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn params(&self) -> AlphabetParams {
        self.params
    }

    /// Whether cylinder values come out as exact rationals.
    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, Kind::Markov(_) | Kind::PushMarkov { .. })
    }

    pub fn cylinder(&self, word: &[Symbol]) -> Result<Value> {
        self.params.check_word(self.ambient, word)?;
        if word.is_empty() {
            return Ok(Value::one());
        }
        Ok(match &self.kind {
            Kind::Bernoulli(weights) => Value::Exact(self.product(weights, self.ambient, word)),
            Kind::Markov(data) => {
                let p = data.forward(word).sum();
                Value::approx(p, 1e-13 * (word.len() as f64 + 1.0))
            }
            Kind::Cycle(cycle) => Value::Exact(cyclic_frequency(cycle, word)),
            Kind::PushBernoulli { gamma, inner, ladder } => {
                let red = reduce_symbols(word);
                if red.zero {
                    return Ok(Value::zero());
                }
                let collapsed = collapse_word(word, *gamma);
                let mut p = self.product(inner, Ambient::collapsed(*gamma), &collapsed);
                let open = match gamma {
                    Gamma::Alpha => &red.rights,
                    Gamma::Beta => &red.lefts,
                };
                for &k in open {
                    p *= &ladder[k as usize - 1];
                }
                Value::Exact(p)
            }
            Kind::PushMarkov { gamma, chain, passage, passage_err } => {
                let red = reduce_symbols(word);
                if red.zero {
                    return Ok(Value::zero());
                }
                let collapsed = collapse_word(word, *gamma);
                let (open, partner): (Vec<u16>, fn(u16) -> Symbol) = match gamma {
                    Gamma::Alpha => (red.rights.clone(), Symbol::Left),
                    Gamma::Beta => (red.lefts.iter().rev().copied().collect(), Symbol::Right),
                };
                // ladder vector G D_{k1} G D_{k2} ... 1, built from the far end
                let mut v = DVector::from_element(chain.states(), 1.0);
                for &k in open.iter().rev() {
                    v = passage * chain.mask(&v, partner(k));
                }
                let p = match gamma {
                    Gamma::Alpha => {
                        let f = chain.backward(&collapsed);
                        let start = chain.mask(&chain.pi, collapsed[0]);
                        start.component_mul(&f).dot(&v)
                    }
                    Gamma::Beta => chain.forward(&collapsed).dot(&v),
                };
                let err = passage_err * open.len() as f64 + 1e-13 * (word.len() + open.len() + 1) as f64;
                Value::approx(p, err)
            }
        })
    }

    fn product(&self, weights: &[BigRational], ambient: Ambient, word: &[Symbol]) -> BigRational {
        let mut p = BigRational::one();
        for &s in word {
            match self.params.index_of(ambient, s) {
                Some(i) => p *= &weights[i],
                None => return BigRational::zero(),
            }
        }
        p
    }

    /// `int f dmu` for a locally constant `f` on the same ambient.
    pub fn integral(&self, f: &LocallyConstantFn) -> Result<Value> {
        if f.ambient() != self.ambient {
            return invalid(format!(
                "function lives on {} but the measure on {}",
                f.ambient(),
                self.ambient
            ));
        }
        let default = Value::Exact(f.default_value().clone());
        let mut total = default.clone();
        for (w, v) in f.table() {
            let delta = Value::Exact(v.clone()) - default.clone();
            if delta.exact().is_some_and(|d| d.is_zero()) {
                continue;
            }
            total = total + delta * self.cylinder(w)?;
        }
        Ok(total)
    }
}

/// Proportion of phases `0..p` at which `word` starts in the repetition of
/// `cycle`.
pub(crate) fn cyclic_frequency(cycle: &[Symbol], word: &[Symbol]) -> BigRational {
    let p = cycle.len();
    let hits = (0..p)
        .filter(|&i| word.iter().enumerate().all(|(j, s)| cycle[(i + j) % p] == *s))
        .count();
    BigRational::new((hits as i64).into(), (p as i64).into())
}

/// First-passage matrix for the partners of open brackets. For alpha it is
/// built on the reversed chain, for beta on the forward chain.
fn passage_matrix(data: &ChainData, gamma: Gamma) -> Result<(DMatrix<f64>, f64)> {
    let n = data.states();
    let (kernel, down_sym): (DMatrix<f64>, fn(Symbol) -> bool) = match gamma {
        Gamma::Alpha => (chain::reversed(&data.kernel, &data.pi), |s| matches!(s, Symbol::Left(_))),
        Gamma::Beta => (data.kernel.clone(), |s| matches!(s, Symbol::Right(_))),
    };
    let split = |pred: &dyn Fn(Symbol) -> bool| {
        DMatrix::from_fn(n, n, |a, b| if pred(data.labels[b]) { kernel[(a, b)] } else { 0.0 })
    };
    let down = split(&down_sym);
    let local = split(&|s| matches!(s, Symbol::Unit(_)));
    let up = split(&|s| s.is_collapsed());
    chain::first_passage(&down, &local, &up)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Bernoulli;
    use crate::symbol::{w, Word};

    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }

    /// The uniform Bernoulli measure written as a Markov chain must give the
    /// same transported cylinders through the first-passage route.
    #[test]
    fn markov_route_matches_bernoulli_route() {
        for gamma in [Gamma::Alpha, Gamma::Beta] {
            let amb = Ambient::collapsed(gamma);
            let weights = [0.4, 0.1, 0.3, 0.2];
            let b = Bernoulli::new(
                p21(),
                amb,
                weights.iter().map(|&x| BigRational::from_float(x).unwrap()).collect(),
            )
            .unwrap();
            let b = if gamma == Gamma::Beta {
                // mirror so that the transport condition holds on the beta side
                let mut ws = b.weights().to_vec();
                ws.reverse();
                Bernoulli::new(p21(), amb, ws).unwrap()
            } else {
                b
            };
            let rows: Vec<Vec<f64>> = vec![b.weights().iter().map(crate::measures::rational_to_f64).collect(); 4];
            let m = MarkovChain::on_symbols(p21(), amb, rows, None).unwrap();
            let exact = Evaluator::new(&MeasureSpec::pushforward(gamma, MeasureSpec::Bernoulli(b)).unwrap()).unwrap();
            let approx = Evaluator::new(&MeasureSpec::pushforward(gamma, MeasureSpec::Markov(m)).unwrap()).unwrap();
            for text in ["A1", "B2", "B1 B2", "A2 A1 U1", "B1 A2 B2 B1", "A1 B1 B2 B2"] {
                let a = exact.cylinder(&w(text)).unwrap().to_f64();
                let b = approx.cylinder(&w(text)).unwrap().to_f64();
                assert!((a - b).abs() < 1e-12, "{gamma} {text}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cyclic_frequency_wraps() {
        let c = w("A1 B1 U1");
        assert_eq!(cyclic_frequency(&c, &w("U1 A1")), BigRational::new(1.into(), 3.into()));
        assert_eq!(cyclic_frequency(&c, &w("A1 B1 U1 A1 B1")), BigRational::new(1.into(), 3.into()));
        assert!(cyclic_frequency(&c, &Word::parse("B1 A1").unwrap()).is_zero());
    }
}
