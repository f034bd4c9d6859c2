//! Approximation of ergodic measures on the Dyck shift by measures on single
//! periodic orbits.
//!
//! Orbits with drift zero are periodized as `w^{2k} a` with `w` a neutral
//! rotation and `a` a bracket of the requested side. Everything else is
//! approximated from sampled orbit segments: every negative (alpha side) or
//! positive (beta side) subword of length at most `n` repeats admissibly,
//! and the one whose orbit measure is closest to the target wins. The
//! samples do not depend on `n`, so the candidate sets grow with `n` and the
//! achieved distance never increases.

use std::collections::HashMap;

use super::eval::Evaluator;
use super::metric::{cylinder_family, WeakStarConfig};
use super::sample::sample;
use super::MeasureSpec;
use crate::error::{invalid, Error, Result};
use crate::krieger::{reconstruct_cycle, PeriodicPoint};
use crate::reduce::{reduce_symbols, ErgodicClass, WordClass};
use crate::symbol::{AlphabetParams, Ambient, Gamma, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxConfig {
    /// Side of the bracket appended to periodize drift-zero orbits.
    pub neutral_side: Gamma,
    /// Number of independent sample windows.
    pub draws: usize,
    pub sample_len: usize,
    /// Cutoff of the metric used to rank candidates.
    pub metric: WeakStarConfig,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig { neutral_side: Gamma::Alpha, draws: 16, sample_len: 256, metric: WeakStarConfig::default() }
    }
}

pub fn co_approx(target: &MeasureSpec, n: usize, seed: u64) -> Result<MeasureSpec> {
    co_approx_with(target, n, seed, &ApproxConfig::default())
}

pub fn co_approx_with(target: &MeasureSpec, n: usize, seed: u64, cfg: &ApproxConfig) -> Result<MeasureSpec> {
    if target.ambient() != Ambient::SigmaD {
        return invalid(format!("approximation targets live on sigma_d, got {}", target.ambient()));
    }
    if n == 0 {
        return invalid("period budget must be at least 1");
    }
    let params = target.params();
    let orbit = match target {
        MeasureSpec::Co(p) => Some(p.clone()),
        MeasureSpec::Pushforward(pf) => match pf.inner() {
            MeasureSpec::Co(y) => Some(PeriodicPoint::new(params, Ambient::SigmaD, reconstruct_cycle(y.cycle(), pf.gamma())?)?),
            _ => None,
        },
        _ => None,
    };
    let (class, samples) = match orbit {
        Some(p) => {
            let class = p.class();
            if class == ErgodicClass::Zero {
                return neutral_periodization(&p, n, cfg.neutral_side);
            }
            if p.period() <= n {
                return Ok(MeasureSpec::Co(p));
            }
            let len = cfg.sample_len.max(2 * p.period());
            let window: Word = (0..len).map(|i| p.cycle()[i % p.period()]).collect();
            (class, vec![window])
        }
        None => {
            let class = super::classify_measure(target)?;
            let samples = (0..cfg.draws as u64)
                .map(|d| sample(target, cfg.sample_len, draw_seed(seed, d)))
                .collect::<Result<Vec<_>>>()?;
            (class, samples)
        }
    };
    let scorer = Scorer::new(target, &cfg.metric)?;
    let mut best: Option<(f64, Vec<Symbol>)> = None;
    for s in &samples {
        for cand in pure_subwords(s, n, class == ErgodicClass::Alpha) {
            let d = scorer.score(cand);
            let better = match &best {
                None => true,
                Some((bd, bw)) => d < *bd || (d == *bd && (cand.len(), cand) < (bw.len(), bw.as_slice())),
            };
            if better {
                best = Some((d, cand.to_vec()));
            }
        }
    }
    match best {
        Some((_, w)) => Ok(MeasureSpec::Co(PeriodicPoint::new(params, Ambient::SigmaD, w)?)),
        None => Err(Error::Budget(format!("no periodic candidate of length <= {n} in the samples"))),
    }
}

fn draw_seed(seed: u64, d: u64) -> u64 {
    seed ^ d.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `w^{2k} a` with `k = floor((n-1) / (2|w|))`.
fn neutral_periodization(p: &PeriodicPoint, n: usize, side: Gamma) -> Result<MeasureSpec> {
    let omega = neutral_rotation(p.cycle()).expect("drift-zero orbits have a neutral rotation");
    let k = n.saturating_sub(1) / (2 * omega.len());
    if k == 0 {
        return Err(Error::Budget(format!(
            "period budget {n} is too small to periodize a neutral block of length {}",
            omega.len()
        )));
    }
    let tail = match side {
        Gamma::Alpha => Symbol::Left(1),
        Gamma::Beta => Symbol::Right(1),
    };
    let word = omega.repeat(2 * k).concat(&[tail]);
    Ok(MeasureSpec::Co(PeriodicPoint::new(*p.params(), Ambient::SigmaD, word)?))
}

/// Least rotation of `cycle` of the given word class, if any.
pub(crate) fn rotation_of_class(cycle: &[Symbol], class: WordClass) -> Option<Word> {
    (0..cycle.len())
        .map(|r| {
            let mut v = cycle[r..].to_vec();
            v.extend_from_slice(&cycle[..r]);
            v
        })
        .filter(|v| WordClass::of(&reduce_symbols(v)) == class)
        .min()
        .map(Word::from)
}

pub(crate) fn neutral_rotation(cycle: &[Symbol]) -> Option<Word> {
    rotation_of_class(cycle, WordClass::Neutral)
}

/// Subwords of length at most `n` that are negative (`negative = true`) or
/// positive.
fn pure_subwords(s: &[Symbol], n: usize, negative: bool) -> Vec<&[Symbol]> {
    let mut out = Vec::new();
    let len = s.len();
    if negative {
        for i in 0..len {
            let mut depth = 0usize;
            for j in i..len.min(i + n) {
                match s[j] {
                    x if x.is_left() => depth += 1,
                    x if x.is_right() => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                    }
                    _ => {}
                }
                if depth > 0 {
                    out.push(&s[i..=j]);
                }
            }
        }
    } else {
        for j in (0..len).rev() {
            let mut depth = 0usize;
            for i in (j.saturating_sub(n - 1)..=j).rev() {
                match s[i] {
                    x if x.is_right() => depth += 1,
                    x if x.is_left() => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                    }
                    _ => {}
                }
                if depth > 0 {
                    out.push(&s[i..=j]);
                }
            }
        }
    }
    out
}

/// Floating-point distance from periodic-orbit measures to a fixed target,
/// with family words looked up by integer code.
struct Scorer {
    params: AlphabetParams,
    max_len: usize,
    alphabet_size: usize,
    position: HashMap<u64, usize>,
    target: Vec<f64>,
}

impl Scorer {
    fn new(target: &MeasureSpec, cfg: &WeakStarConfig) -> Result<Self> {
        let params = target.params();
        let ev = Evaluator::new(target)?;
        let family = cylinder_family(&params, Ambient::SigmaD, cfg.max_len);
        let alphabet_size = params.alphabet_size(Ambient::SigmaD);
        let mut position = HashMap::new();
        let mut values = Vec::with_capacity(family.len());
        for (i, w) in family.iter().enumerate() {
            position.insert(code(&params, alphabet_size, w), i);
            values.push(ev.cylinder(w)?.to_f64());
        }
        Ok(Scorer { params, max_len: cfg.max_len, alphabet_size, position, target: values })
    }

    fn score(&self, cycle: &[Symbol]) -> f64 {
        let p = cycle.len();
        let mut counts = vec![0usize; self.target.len()];
        let mut window = Vec::with_capacity(self.max_len);
        for i in 0..p {
            window.clear();
            for k in 0..self.max_len {
                window.push(cycle[(i + k) % p]);
                if let Some(&m) = self.position.get(&code(&self.params, self.alphabet_size, &window)) {
                    counts[m] += 1;
                }
            }
        }
        let mut weight = 1.0;
        let mut d = 0.0;
        for (c, t) in counts.iter().zip(&self.target) {
            weight *= 0.5;
            d += weight * (*c as f64 / p as f64 - t).abs();
        }
        d
    }
}

fn code(params: &AlphabetParams, base: usize, w: &[Symbol]) -> u64 {
    let mut c = 1u64;
    for &s in w {
        let i = params.index_of(Ambient::SigmaD, s).expect("Dyck symbol") as u64;
        c = c * (base as u64 + 1) + i + 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{weakstar_distance, Bernoulli};
    use crate::symbol::w;

    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }
    fn co(text: &str) -> MeasureSpec {
        MeasureSpec::Co(PeriodicPoint::parse(p21(), Ambient::SigmaD, text).unwrap())
    }

    #[test]
    fn neutral_orbit_is_periodized() {
        assert_eq!(co_approx(&co("A1 B1"), 5, 0).unwrap(), co("A1 B1 A1 B1 A1"));
        assert!(matches!(co_approx(&co("A1 B1"), 4, 0), Err(Error::Budget(_))));
        let cfg = ApproxConfig { neutral_side: Gamma::Beta, ..ApproxConfig::default() };
        assert_eq!(co_approx_with(&co("A1 B1"), 5, 0, &cfg).unwrap(), co("A1 B1 A1 B1 B1"));
    }

    #[test]
    fn short_periodic_targets_are_returned() {
        assert_eq!(co_approx(&co("A1"), 3, 0).unwrap(), co("A1"));
        assert_eq!(co_approx(&co("B2 U1"), 2, 0).unwrap(), co("B2 U1"));
    }

    #[test]
    fn long_periodic_target_gets_a_shorter_orbit() {
        let target = co("A1 A1 B1 A2 U1 A1 B1 B2 A2 A1");
        let a = co_approx(&target, 4, 0).unwrap();
        assert!(a.as_co().unwrap().period() <= 4);
        assert_eq!(a.as_co().unwrap().class(), ErgodicClass::Alpha);
    }

    #[test]
    fn subword_extraction_is_pure() {
        let s = w("A1 B1 B2 A2 U1 A1 B1 A2");
        for c in pure_subwords(&s, 5, true) {
            assert_eq!(WordClass::of(&reduce_symbols(c)), WordClass::Negative);
        }
        for c in pure_subwords(&s, 5, false) {
            assert_eq!(WordClass::of(&reduce_symbols(c)), WordClass::Positive);
        }
    }

    #[test]
    fn pushforward_target_improves_with_budget() {
        let u = Bernoulli::uniform(p21(), Ambient::SigmaAlpha).unwrap();
        let target = MeasureSpec::pushforward(Gamma::Alpha, MeasureSpec::Bernoulli(u)).unwrap();
        let cfg = WeakStarConfig::default();
        let d = |n| {
            let a = co_approx(&target, n, 3).unwrap();
            weakstar_distance(&a, &target, &cfg).unwrap().value.to_f64()
        };
        let (d10, d40) = (d(10), d(40));
        assert!(d40 <= d10 && d40 < 0.05, "{d10} {d40}");
    }
}
