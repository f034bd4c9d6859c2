//! Counting and enumerating the admissible words `L_n` of the shift.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::symbol::{AlphabetParams, Ambient, Symbol, Word};

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// `|L_n(Sigma_D)|`, exactly.
///
/// The state is the height above the running minimum. An up step (a left
/// bracket) always carries weight M: if it is later closed, the pair gets
/// its index from the opener. A down step closes the most recent open
/// bracket (weight 1) when the height is positive and is otherwise an
/// unmatched right bracket (weight M). Units carry weight N.
pub fn count_words(params: &AlphabetParams, n: usize) -> BigUint {
    let m = BigUint::from(params.m);
    let units = BigUint::from(params.n);
    let mut dist: Vec<BigUint> = vec![BigUint::from(1u8)];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); dist.len() + 1];
        for (h, c) in dist.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[h + 1] += c * &m;
            if h > 0 {
                next[h - 1] += c;
            } else {
                next[0] += c * &m;
            }
            if params.n > 0 {
                next[h] += c * &units;
            }
        }
        dist = next;
    }
    dist.into_iter().sum()
}

/// `(1/n) log |L_n|`. Submultiplicativity of the counts makes this an upper
/// bound for the topological entropy `log(M+N+1)`.
pub fn entropy_estimate(params: &AlphabetParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("entropy estimate needs n >= 1".into()));
    }
    Ok(ln_biguint(&count_words(params, n)) / n as f64)
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Admissible words of length `n`, in lexicographic order of the canonical
/// alphabet. Fails if `n` exceeds `cap`.
pub fn enumerate_words(params: &AlphabetParams, n: usize, cap: usize) -> Result<AdmissibleWords> {
    if n > cap {
        return Err(Error::Resource(format!("enumeration length {n} exceeds cap {cap}")));
    }
    Ok(AdmissibleWords::new(params, n))
}

/// Depth-first enumeration with the reduction stack carried along, so that
/// an inadmissible prefix prunes its whole subtree.
#[derive(Debug)]
pub struct AdmissibleWords {
    alphabet: Vec<Symbol>,
    len: usize,
    choice: Vec<usize>,
    // stacks[d] is the open-bracket stack after the first d symbols
    stacks: Vec<Vec<u16>>,
    started: bool,
    finished: bool,
}

impl AdmissibleWords {
    fn new(params: &AlphabetParams, len: usize) -> Self {
        AdmissibleWords {
            alphabet: params.alphabet(Ambient::SigmaD),
            len,
            choice: Vec::with_capacity(len),
            stacks: vec![Vec::new()],
            started: false,
            finished: false,
        }
    }

    fn apply(stack: &[u16], s: Symbol) -> Option<Vec<u16>> {
        let mut next = stack.to_vec();
        match s {
            Symbol::Left(k) => next.push(k),
            Symbol::Right(k) => {
                if let Some(j) = next.pop() {
                    if j != k {
                        return None;
                    }
                }
            }
            _ => {}
        }
        Some(next)
    }

    /// Try choices `from..` at the current depth, then descend with choice 0
    /// until the word is complete. Backtracks on exhaustion.
    fn fill(&mut self, mut from: usize) -> bool {
        loop {
            if self.choice.len() == self.len {
                return true;
            }
            let depth = self.choice.len();
            let mut advanced = false;
            for c in from..self.alphabet.len() {
                if let Some(st) = Self::apply(&self.stacks[depth], self.alphabet[c]) {
                    self.choice.push(c);
                    self.stacks.truncate(depth + 1);
                    self.stacks.push(st);
                    advanced = true;
                    break;
                }
            }
            if advanced {
                from = 0;
                continue;
            }
            match self.choice.pop() {
                Some(c) => {
                    self.stacks.truncate(self.choice.len() + 1);
                    from = c + 1;
                }
                None => return false,
            }
        }
    }
}

impl Iterator for AdmissibleWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.finished {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.fill(0)
        } else {
            match self.choice.pop() {
                Some(c) => {
                    self.stacks.truncate(self.choice.len() + 1);
                    self.fill(c + 1)
                }
                None => false,
            }
        };
        if !ok {
            self.finished = true;
            return None;
        }
        if self.len == 0 {
            self.finished = true;
        }
        Some(self.choice.iter().map(|&c| self.alphabet[c]).collect())
    }
}

/// Admissible words of length `n` over any of the three ambients (every word
/// of the collapsed full shifts is admissible), in canonical order.
pub fn admissible_words(params: &AlphabetParams, ambient: Ambient, n: usize) -> Vec<Word> {
    match ambient {
        Ambient::SigmaD => AdmissibleWords::new(params, n).collect(),
        _ => all_words(&params.alphabet(ambient), n),
    }
}

pub(crate) fn all_words(alphabet: &[Symbol], n: usize) -> Vec<Word> {
    let mut out: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |&s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(Word::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::w;

    #[test]
    fn small_counts() {
        let p = AlphabetParams::new(2, 0).unwrap();
        let counts: Vec<u64> = (0..=3).map(|n| count_words(&p, n).to_u64().unwrap()).collect();
        assert_eq!(counts, vec![1, 4, 14, 48]);
    }

    #[test]
    fn enumeration_examples() {
        let p = AlphabetParams::new(2, 0).unwrap();
        let one: Vec<Word> = enumerate_words(&p, 1, 12).unwrap().collect();
        assert_eq!(one, vec![w("A1"), w("A2"), w("B1"), w("B2")]);
        let two: Vec<Word> = enumerate_words(&p, 2, 12).unwrap().collect();
        assert_eq!(two.len(), 14);
        assert!(!two.contains(&w("A1 B2")) && !two.contains(&w("A2 B1")));
        let mut sorted = two.clone();
        sorted.sort();
        assert_eq!(sorted, two);
        let p21 = AlphabetParams::new(2, 1).unwrap();
        assert_eq!(enumerate_words(&p21, 1, 12).unwrap().count(), 5);
        assert_eq!(enumerate_words(&p, 0, 12).unwrap().collect::<Vec<_>>(), vec![Word::empty()]);
        assert!(matches!(enumerate_words(&p, 13, 12), Err(Error::Resource(_))));
    }

    #[test]
    fn entropy_examples() {
        let p = AlphabetParams::new(2, 0).unwrap();
        assert!((entropy_estimate(&p, 1).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((entropy_estimate(&p, 3).unwrap() - 48f64.ln() / 3.0).abs() < 1e-15);
        assert!(entropy_estimate(&p, 0).is_err());
    }

    #[test]
    fn big_log_matches_small_log() {
        let x = BigUint::from(3u8).pow(900);
        assert!((ln_biguint(&x) - 900.0 * 3f64.ln()).abs() < 1e-9);
    }
}
