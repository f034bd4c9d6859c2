//! Seeded sampling of finite windows.
//!
//! A transported sample is an inner window whose open brackets get their
//! indices from an independently drawn context: to the left of the window
//! (time-reversed chain) for alpha, to the right for beta.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chain;
use super::value::rational_to_f64;
use super::MeasureSpec;
use crate::error::{invalid, Error, Result};
use crate::krieger::reconstruct_cycle;
use crate::symbol::{Gamma, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    /// Longest context drawn while looking for partners, on top of `4n`.
    pub max_extension: usize,
    /// Fresh draws of the whole window after the context cap is hit.
    pub retries: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { max_extension: 1 << 16, retries: 8 }
    }
}

pub fn sample(mu: &MeasureSpec, n: usize, seed: u64) -> Result<Word> {
    sample_with(mu, n, seed, &SampleConfig::default())
}

pub fn sample_with(mu: &MeasureSpec, n: usize, seed: u64, cfg: &SampleConfig) -> Result<Word> {
    if n == 0 {
        return invalid("sample length must be at least 1");
    }
    match mu {
        MeasureSpec::Co(p) => Ok(periodic_window(p.cycle(), n)),
        MeasureSpec::Bernoulli(_) | MeasureSpec::Markov(_) => {
            let src = Source::new(mu)?;
            let mut rng = stream(seed, 0);
            let states = src.run(&mut rng, n);
            Ok(states.iter().map(|&s| src.labels[s]).collect())
        }
        MeasureSpec::Pushforward(pf) => {
            let gamma = pf.gamma();
            if let MeasureSpec::Co(y) = pf.inner() {
                return Ok(periodic_window(&reconstruct_cycle(y.cycle(), gamma)?, n));
            }
            let src = Source::new(pf.inner())?;
            let cap = cfg.max_extension + 4 * n;
            for attempt in 0..=cfg.retries as u64 {
                let mut rng = stream(seed, 2 * attempt);
                let states = src.run(&mut rng, n);
                let mut ctx = stream(seed, 2 * attempt + 1);
                if let Some(word) = src.transport(&states, gamma, &mut ctx, cap) {
                    return Ok(word);
                }
            }
            Err(Error::Resource(format!(
                "no partner found within {cap} context symbols in {} attempts",
                cfg.retries + 1
            )))
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn periodic_window(cycle: &[Symbol], n: usize) -> Word {
    (0..n).map(|i| cycle[i % cycle.len()]).collect()
}

/// A labelled chain to draw from; Bernoulli measures become chains with
/// one state per symbol and identical rows.
struct Source {
    labels: Vec<Symbol>,
    initial: WeightedIndex<f64>,
    forward: Vec<WeightedIndex<f64>>,
    backward: Vec<WeightedIndex<f64>>,
}

fn weighted(w: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(w).map_err(|e| Error::Numerical(format!("sampling weights: {e}")))
}

impl Source {
    fn new(mu: &MeasureSpec) -> Result<Self> {
        match mu {
            MeasureSpec::Bernoulli(b) => {
                let w: Vec<f64> = b.weights().iter().map(rational_to_f64).collect();
                let row = weighted(&w)?;
                let k = w.len();
                Ok(Source {
                    labels: b.params().alphabet(b.ambient()),
                    initial: row.clone(),
                    forward: vec![row.clone(); k],
                    backward: vec![row; k],
                })
            }
            MeasureSpec::Markov(m) => {
                let p = chain::to_matrix(m.kernel());
                let pi = nalgebra::DVector::from_vec(m.stationary().to_vec());
                let rev = chain::reversed(&p, &pi);
                let rows = |k: &nalgebra::DMatrix<f64>| {
                    (0..k.nrows())
                        .map(|i| {
                            let r: Vec<f64> = k.row(i).iter().copied().collect();
                            if r.iter().sum::<f64>() > 0.0 {
                                weighted(&r)
                            } else {
                                weighted(m.stationary())
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                };
                Ok(Source {
                    labels: m.labels().to_vec(),
                    initial: weighted(m.stationary())?,
                    forward: rows(&p)?,
                    backward: rows(&rev)?,
                })
            }
            _ => invalid("only Bernoulli and Markov measures are sampled through a chain"),
        }
    }

    fn run(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
        let mut states = Vec::with_capacity(n);
        let mut s = self.initial.sample(rng);
        states.push(s);
        for _ in 1..n {
            s = self.forward[s].sample(rng);
            states.push(s);
        }
        states
    }

    /// Reconstructs the window, drawing context until every open bracket is
    /// matched. `None` if the cap is reached first.
    fn transport(&self, states: &[usize], gamma: Gamma, rng: &mut ChaCha8Rng, cap: usize) -> Option<Word> {
        let mut out: Vec<Symbol> = states.iter().map(|&s| self.labels[s]).collect();
        match gamma {
            Gamma::Alpha => {
                let mut open: Vec<u16> = Vec::new();
                let mut unmatched = Vec::new();
                for (i, sym) in out.clone().into_iter().enumerate() {
                    match sym {
                        Symbol::Left(k) => open.push(k),
                        Symbol::CollapsedRight => match open.pop() {
                            Some(k) => out[i] = Symbol::Right(k),
                            None => unmatched.push(i),
                        },
                        _ => {}
                    }
                }
                let partners = self.ladder(states[0], &self.backward, Symbol::is_left, unmatched.len(), rng, cap)?;
                for (pos, k) in unmatched.into_iter().zip(partners) {
                    out[pos] = Symbol::Right(k);
                }
            }
            Gamma::Beta => {
                let mut open: Vec<usize> = Vec::new();
                for (i, sym) in out.clone().into_iter().enumerate() {
                    match sym {
                        Symbol::CollapsedLeft => open.push(i),
                        Symbol::Right(k) => {
                            if let Some(j) = open.pop() {
                                out[j] = Symbol::Left(k);
                            }
                        }
                        _ => {}
                    }
                }
                let last = *states.last().expect("nonempty window");
                let partners = self.ladder(last, &self.forward, Symbol::is_right, open.len(), rng, cap)?;
                for k in partners {
                    let pos = open.pop().expect("one partner per open bracket");
                    out[pos] = Symbol::Left(k);
                }
            }
        }
        Some(out.into())
    }

    /// Indices of the brackets at which the context walk reaches new lower
    /// levels, nearest first. `down` tells which symbols lower the level.
    fn ladder(
        &self,
        start: usize,
        rows: &[WeightedIndex<f64>],
        down: fn(Symbol) -> bool,
        count: usize,
        rng: &mut ChaCha8Rng,
        cap: usize,
    ) -> Option<Vec<u16>> {
        let mut found = Vec::with_capacity(count);
        let mut level = 0i64;
        let mut s = start;
        let mut steps = 0;
        while found.len() < count {
            if steps == cap {
                return None;
            }
            steps += 1;
            s = rows[s].sample(rng);
            let sym = self.labels[s];
            if down(sym) {
                level -= 1;
                if level < -(found.len() as i64) {
                    found.push(sym.bracket_index().expect("indexed bracket"));
                }
            } else if sym.is_collapsed() {
                level += 1;
            }
        }
        Some(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krieger::PeriodicPoint;
    use crate::measures::Bernoulli;
    use crate::symbol::{w, AlphabetParams, Ambient};

    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }

    #[test]
    fn periodic_sample_starts_at_phase_zero() {
        let co = MeasureSpec::Co(PeriodicPoint::parse(p21(), Ambient::SigmaD, "A1 B1").unwrap());
        assert_eq!(sample(&co, 4, 7).unwrap(), w("A1 B1 A1 B1"));
    }

    #[test]
    fn samples_are_deterministic_and_admissible() {
        for gamma in [Gamma::Alpha, Gamma::Beta] {
            let u = Bernoulli::uniform(p21(), Ambient::collapsed(gamma)).unwrap();
            let mu = MeasureSpec::pushforward(gamma, MeasureSpec::Bernoulli(u)).unwrap();
            let a = sample(&mu, 300, 11).unwrap();
            assert_eq!(a, sample(&mu, 300, 11).unwrap());
            assert_ne!(a, sample(&mu, 300, 12).unwrap());
            assert!(crate::reduce::is_admissible(&p21(), &a).unwrap());
            assert!(p21().check_word(Ambient::SigmaD, &a).is_ok());
        }
    }
}
