//! Ergodic optimization of locally constant functions over periodic orbits.
//!
//! Every periodic point of the Dyck shift has a rotation whose block is
//! neutral, negative or positive, and such blocks are exactly the closed
//! walks of a finite graph: the state is the stack of open brackets that
//! will still be closed, the last `2r` symbols, and a side. On the negative
//! side a left bracket may be read with an empty stack as one that is never
//! closed; on the positive side the same holds for right brackets. Stacks
//! deeper than `p/2` cannot return to empty within `p` steps, so the graph
//! is finite and the search over periods `<= p` is exhaustive.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value as Json};

use crate::error::{invalid, Error, Result};
use crate::function::LocallyConstantFn;
use crate::krieger::PeriodicPoint;
use crate::language::{admissible_words, count_words};
use crate::measures::{integral, MeasureSpec, Value};
use crate::reduce::reduce_symbols;
use crate::symbol::{AlphabetParams, Ambient, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimizeConfig {
    /// Upper bound on graph states; larger searches fail with the result
    /// for the largest period that fits.
    pub node_cap: usize,
    /// Maximum number of optimal walks listed before the witness list is
    /// marked incomplete.
    pub walk_cap: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { node_cap: 400_000, walk_cap: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    /// Best mean of `f` over periodic orbits of period at most the budget.
    pub lower_bound: BigRational,
    /// Largest value of `f` on an admissible window.
    pub upper_bound: BigRational,
    pub argmax_orbits: Vec<PeriodicPoint>,
    pub period_budget: usize,
    /// False when the list of optimal orbits was cut at the walk cap.
    pub complete: bool,
}

impl OptimizationResult {
    pub fn to_json(&self) -> Json {
        json!({
            "lower_bound": self.lower_bound.to_string(),
            "lower_bound_decimal": crate::measures::rational_to_f64(&self.lower_bound),
            "upper_bound": self.upper_bound.to_string(),
            "upper_bound_decimal": crate::measures::rational_to_f64(&self.upper_bound),
            "period_budget": self.period_budget,
            "argmax_orbits": self.argmax_orbits.iter().map(|p| p.cycle().to_string()).collect::<Vec<_>>(),
            "complete": self.complete,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximizerProbe {
    pub tolerance: BigRational,
    pub bound: BigRational,
    /// Orbits whose mean is within the tolerance of the bound.
    pub witnesses: Vec<PeriodicPoint>,
    pub complete: bool,
}

impl MaximizerProbe {
    pub fn multiple(&self) -> bool {
        self.witnesses.len() >= 2
    }

    pub fn to_json(&self) -> Json {
        json!({
            "tolerance": self.tolerance.to_string(),
            "bound": self.bound.to_string(),
            "witnesses": self.witnesses.iter().map(|p| p.cycle().to_string()).collect::<Vec<_>>(),
            "multiple": self.multiple(),
            "complete": self.complete,
        })
    }
}

pub fn lambda_periodic(f: &LocallyConstantFn, p: usize) -> Result<OptimizationResult> {
    lambda_periodic_with(f, p, &OptimizeConfig::default())
}

pub fn lambda_periodic_with(f: &LocallyConstantFn, p: usize, cfg: &OptimizeConfig) -> Result<OptimizationResult> {
    let search = Search::prepare(f, p, cfg)?;
    let (best, _) = search.best()?;
    let (witnesses, complete) = search.walks_at_least(&best, cfg.walk_cap)?;
    Ok(OptimizationResult {
        lower_bound: best,
        upper_bound: window_max(f),
        argmax_orbits: witnesses,
        period_budget: p,
        complete,
    })
}

pub fn maximizer_probe(f: &LocallyConstantFn, p: usize, tol: &BigRational) -> Result<MaximizerProbe> {
    maximizer_probe_with(f, p, tol, &OptimizeConfig::default())
}

pub fn maximizer_probe_with(
    f: &LocallyConstantFn,
    p: usize,
    tol: &BigRational,
    cfg: &OptimizeConfig,
) -> Result<MaximizerProbe> {
    if tol.is_negative() {
        return invalid("tolerance must be nonnegative");
    }
    let search = Search::prepare(f, p, cfg)?;
    let (best, _) = search.best()?;
    let (witnesses, complete) = search.walks_at_least(&(&best - tol), cfg.walk_cap)?;
    Ok(MaximizerProbe { tolerance: tol.clone(), bound: best, witnesses, complete })
}

/// `f = 0` on every window seen along the listed orbits and `-1` elsewhere,
/// so each listed orbit measure is maximizing with `Lambda(f) = 0`.
pub fn degenerate_fn(orbits: &[PeriodicPoint], r: usize) -> Result<LocallyConstantFn> {
    let first = orbits.first().ok_or_else(|| Error::InvalidInput("degenerate_fn needs at least one orbit".into()))?;
    let params = *first.params();
    let mut table = std::collections::BTreeMap::new();
    for o in orbits {
        if o.ambient() != Ambient::SigmaD || *o.params() != params {
            return invalid("orbits must be points of the same Dyck shift");
        }
        let c = o.cycle();
        for i in 0..c.len() {
            let window: Word = (0..2 * r + 1).map(|k| c[(i + k) % c.len()]).collect();
            table.insert(window, BigRational::zero());
        }
    }
    LocallyConstantFn::new(params, Ambient::SigmaD, r, table, BigRational::from_integer((-1).into()))
}

/// `int f dmu`, a lower bound for `Lambda(f)` for any invariant `mu`.
pub fn lambda_markov_lower(f: &LocallyConstantFn, mu: &MeasureSpec) -> Result<Value> {
    integral(mu, f)
}

/// Largest value of `f` over admissible windows.
pub fn window_max(f: &LocallyConstantFn) -> BigRational {
    let params = f.params();
    let admissible_key = |w: &Word| f.ambient() != Ambient::SigmaD || !reduce_symbols(w).zero;
    let listed = f.table().iter().filter(|(w, _)| admissible_key(w));
    let n_listed = listed.clone().count();
    let n_windows = match f.ambient() {
        Ambient::SigmaD => count_words(&params, f.window_len()),
        amb => num_bigint::BigUint::from(params.alphabet_size(amb)).pow(f.window_len() as u32),
    };
    let mut best: Option<BigRational> = None;
    for (_, v) in listed {
        if best.as_ref().is_none_or(|b| v > b) {
            best = Some(v.clone());
        }
    }
    if num_bigint::BigUint::from(n_listed) < n_windows {
        let d = f.default_value();
        if best.as_ref().is_none_or(|b| d > b) {
            best = Some(d.clone());
        }
    }
    best.unwrap_or_else(|| f.default_value().clone())
}

/// Mean of `f` maximized by exhaustive enumeration of all admissible
/// periodic blocks of length at most `p`. Exponential; for small cases and
/// cross-checks.
pub fn brute_force_lambda(f: &LocallyConstantFn, p: usize) -> Result<BigRational> {
    let params = f.params();
    let mut best: Option<BigRational> = None;
    for n in 1..=p {
        for w in crate::language::all_words(&params.alphabet(Ambient::SigmaD), n) {
            if !crate::reduce::periodic_admissible(&params, &w)? {
                continue;
            }
            let m = f.cyclic_mean(&w);
            if best.as_ref().is_none_or(|b| m > *b) {
                best = Some(m);
            }
        }
    }
    best.ok_or_else(|| Error::InvalidInput("period budget must be at least 1".into()))
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct NodeKey {
    negative: bool,
    stack: Vec<u16>,
    history: Vec<Symbol>,
}

struct Edge {
    to: usize,
    weight: i128,
    symbol: Symbol,
}

struct Search {
    params: AlphabetParams,
    p: usize,
    scale: BigInt,
    succ: Vec<Vec<Edge>>,
    starts: Vec<usize>,
}

const NEG_INF: i128 = i128::MIN / 4;

fn state_estimate(params: &AlphabetParams, histories: usize, p: usize) -> f64 {
    let depth = p / 2;
    let stacks: f64 = (0..=depth).map(|d| (params.m as f64).powi(d as i32)).sum();
    2.0 * stacks * histories as f64
}

impl Search {
    fn prepare(f: &LocallyConstantFn, p: usize, cfg: &OptimizeConfig) -> Result<Self> {
        if f.ambient() != Ambient::SigmaD {
            return invalid("optimization works on functions over sigma_d");
        }
        if p == 0 {
            return invalid("period budget must be at least 1");
        }
        let params = f.params();
        let histories = admissible_words(&params, Ambient::SigmaD, 2 * f.radius());
        let fits = |q: usize| state_estimate(&params, histories.len(), q) <= cfg.node_cap as f64;
        if !fits(p) {
            let smaller = (1..p).rev().find(|&q| fits(q));
            let best_so_far = match smaller {
                Some(q) => Some(Box::new(lambda_periodic_with(f, q, cfg)?)),
                None => None,
            };
            return Err(Error::SearchCap {
                message: format!(
                    "period {p} needs about {:.0} search states, cap is {}",
                    state_estimate(&params, histories.len(), p),
                    cfg.node_cap
                ),
                best_so_far,
            });
        }
        // common denominator so that weights are integers
        let mut scale = f.default_value().denom().clone();
        for v in f.table().values() {
            scale = scale.lcm(v.denom());
        }
        let scaled = |q: &BigRational| -> Result<i128> {
            (q * BigRational::from_integer(scale.clone()))
                .to_integer()
                .to_i128()
                .filter(|x| x.unsigned_abs() < (1u128 << 100) / (p as u128 + 1))
                .ok_or_else(|| Error::Numerical("function values too large for exact search".into()))
        };

        let alphabet = params.alphabet(Ambient::SigmaD);
        let depth_cap = p / 2;
        let mut index: HashMap<NodeKey, usize> = HashMap::new();
        let mut keys: Vec<NodeKey> = Vec::new();
        let mut starts = Vec::new();
        for h in &histories {
            for negative in [true, false] {
                let key = NodeKey { negative, stack: Vec::new(), history: h.to_vec() };
                index.insert(key.clone(), keys.len());
                starts.push(keys.len());
                keys.push(key);
            }
        }
        let mut succ: Vec<Vec<Edge>> = Vec::new();
        let mut window = Vec::with_capacity(f.window_len());
        let mut i = 0;
        while i < keys.len() {
            let key = keys[i].clone();
            let mut out = Vec::new();
            for &s in &alphabet {
                let mut stack = key.stack.clone();
                let ok = match s {
                    Symbol::Left(k) => {
                        if key.negative && stack.is_empty() {
                            // never-closed left bracket, or the opener of a pair
                            out.extend(Self::edge(&key, &stack, s, f, &mut window, &scaled, &mut index, &mut keys)?);
                        }
                        stack.push(k);
                        stack.len() <= depth_cap
                    }
                    Symbol::Right(k) => match stack.last() {
                        Some(&top) => {
                            stack.pop();
                            top == k
                        }
                        None => !key.negative,
                    },
                    _ => true,
                };
                if ok {
                    out.extend(Self::edge(&key, &stack, s, f, &mut window, &scaled, &mut index, &mut keys)?);
                }
            }
            succ.push(out);
            i += 1;
        }
        Ok(Search { params, p, scale, succ, starts })
    }

    #[allow(clippy::too_many_arguments)]
    fn edge(
        key: &NodeKey,
        stack: &[u16],
        s: Symbol,
        f: &LocallyConstantFn,
        window: &mut Vec<Symbol>,
        scaled: &dyn Fn(&BigRational) -> Result<i128>,
        index: &mut HashMap<NodeKey, usize>,
        keys: &mut Vec<NodeKey>,
    ) -> Result<Option<Edge>> {
        window.clear();
        window.extend_from_slice(&key.history);
        window.push(s);
        // windows that cannot occur in the shift are never part of a closed walk
        if reduce_symbols(window).zero {
            return Ok(None);
        }
        let weight = scaled(f.eval(window))?;
        let next = NodeKey { negative: key.negative, stack: stack.to_vec(), history: window[1..].to_vec() };
        let to = match index.get(&next) {
            Some(&j) => j,
            None => {
                let j = keys.len();
                index.insert(next.clone(), j);
                keys.push(next);
                j
            }
        };
        Ok(Some(Edge { to, weight, symbol: s }))
    }

    /// `back[i][v]`: best weight of a walk of exactly `i` steps from `v` to
    /// `target`.
    fn back_layers(&self, target: usize) -> Vec<Vec<i128>> {
        let n = self.succ.len();
        let mut layers = Vec::with_capacity(self.p + 1);
        let mut cur = vec![NEG_INF; n];
        cur[target] = 0;
        layers.push(cur);
        for i in 1..=self.p {
            let prev = &layers[i - 1];
            let next: Vec<i128> = self
                .succ
                .iter()
                .map(|edges| {
                    edges
                        .iter()
                        .filter(|e| prev[e.to] > NEG_INF)
                        .map(|e| e.weight + prev[e.to])
                        .max()
                        .unwrap_or(NEG_INF)
                })
                .collect();
            layers.push(next);
        }
        layers
    }

    fn best(&self) -> Result<(BigRational, Vec<Vec<Vec<i128>>>)> {
        let mut best: Option<(i128, usize)> = None;
        let mut all = Vec::with_capacity(self.starts.len());
        for &u in &self.starts {
            let back = self.back_layers(u);
            for (k, layer) in back.iter().enumerate().skip(1) {
                let w = layer[u];
                if w == NEG_INF {
                    continue;
                }
                if best.is_none_or(|(bw, bk)| w * bk as i128 > bw * k as i128) {
                    best = Some((w, k));
                }
            }
            all.push(back);
        }
        let (w, k) = best.ok_or_else(|| Error::InvalidInput("no admissible periodic orbit found".into()))?;
        Ok((BigRational::new(BigInt::from(w), &self.scale * BigInt::from(k)), all))
    }

    /// Canonical orbits of all closed walks with mean at least `threshold`.
    fn walks_at_least(&self, threshold: &BigRational, cap: usize) -> Result<(Vec<PeriodicPoint>, bool)> {
        let scaled = threshold * BigRational::from_integer(self.scale.clone());
        let mut found: BTreeSet<Word> = BTreeSet::new();
        let mut walks = 0usize;
        let mut complete = true;
        'starts: for &u in &self.starts {
            let back = self.back_layers(u);
            for k in 1..=self.p {
                if back[k][u] == NEG_INF {
                    continue;
                }
                let need = (&scaled * BigRational::from_integer(BigInt::from(k)))
                    .ceil()
                    .to_integer()
                    .to_i128()
                    .unwrap_or(i128::MAX);
                if back[k][u] < need {
                    continue;
                }
                let mut path = Vec::with_capacity(k);
                if !self.dfs(u, k, 0, need, &back, &mut path, &mut found, &mut walks, cap) {
                    complete = false;
                    break 'starts;
                }
            }
        }
        let orbits = found
            .into_iter()
            .map(|w| PeriodicPoint::new(self.params, Ambient::SigmaD, w))
            .collect::<Result<Vec<_>>>()?;
        let mut orbits: Vec<_> = orbits.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        orbits.sort_by(|a, b| (a.period(), a.cycle()).cmp(&(b.period(), b.cycle())));
        Ok((orbits, complete))
    }

    /// Returns false when the walk cap was hit.
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        v: usize,
        remaining: usize,
        acc: i128,
        need: i128,
        back: &[Vec<i128>],
        path: &mut Vec<Symbol>,
        found: &mut BTreeSet<Word>,
        walks: &mut usize,
        cap: usize,
    ) -> bool {
        if remaining == 0 {
            *walks += 1;
            found.insert(Word::from(crate::krieger::canonical_block(path)));
            return *walks < cap;
        }
        for e in &self.succ[v] {
            let rest = back[remaining - 1][e.to];
            if rest == NEG_INF || acc + e.weight + rest < need {
                continue;
            }
            path.push(e.symbol);
            let go_on = self.dfs(e.to, remaining - 1, acc + e.weight, need, back, path, found, walks, cap);
            path.pop();
            if !go_on {
                return false;
            }
        }
        true
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
    fn point(text: &str) -> PeriodicPoint {
        PeriodicPoint::parse(p21(), Ambient::SigmaD, text).unwrap()
    }
    fn ind(text: &str) -> LocallyConstantFn {
        LocallyConstantFn::indicator(p21(), Ambient::SigmaD, &w(text)).unwrap()
    }

    #[test]
    fn unit_indicator() {
        let r = lambda_periodic(&ind("U1"), 4).unwrap();
        assert_eq!(r.lower_bound, q(1, 1));
        assert_eq!(r.argmax_orbits, vec![point("U1")]);
    }

    #[test]
    fn pair_indicator() {
        for p in 2..=6 {
            let r = lambda_periodic(&ind("A1 B1"), p).unwrap();
            assert_eq!(r.lower_bound, q(1, 2), "p = {p}");
            assert_eq!(r.argmax_orbits, vec![point("A1 B1")]);
            assert!(r.lower_bound <= r.upper_bound);
        }
        assert_eq!(lambda_periodic(&ind("A1 B1"), 1).unwrap().lower_bound, q(0, 1));
    }

    #[test]
    fn drift_function() {
        let r = lambda_periodic(&LocallyConstantFn::drift(p21(), Ambient::SigmaD), 3).unwrap();
        assert_eq!(r.lower_bound, q(1, 1));
        let all_left = ["A1", "A2", "A1 A2", "A1 A1 A2", "A1 A2 A2"];
        assert_eq!(r.argmax_orbits, all_left.map(point).to_vec());
    }

    #[test]
    fn degenerate_function_has_two_maximizers() {
        let f = degenerate_fn(&[point("A1"), point("A2")], 0).unwrap();
        let r = lambda_periodic(&f, 4).unwrap();
        assert_eq!(r.lower_bound, q(0, 1));
        assert!(r.argmax_orbits.contains(&point("A1")) && r.argmax_orbits.contains(&point("A2")));
        let probe = maximizer_probe(&f, 4, &q(0, 1)).unwrap();
        assert!(probe.multiple());
        assert!(degenerate_fn(&[], 1).is_err());
    }

    #[test]
    fn zero_function_makes_everything_a_witness() {
        let f = LocallyConstantFn::constant(p21(), Ambient::SigmaD, q(0, 1));
        let probe = maximizer_probe(&f, 3, &q(0, 1)).unwrap();
        assert!(probe.witnesses.contains(&point("U1")));
        assert!(probe.witnesses.contains(&point("B1 A1")));
        assert!(probe.complete);
    }

    #[test]
    fn matches_brute_force_on_a_mixed_function() {
        let v = json!({"radius": 1, "default": "1/3", "entries": [
            {"word": "A1 B1 U1", "value": 2}, {"word": "B2 B1 A2", "value": "-1/2"},
            {"word": "U1 U1 U1", "value": "1/5"}, {"word": "A2 A2 B2", "value": "5/4"}]});
        let f = LocallyConstantFn::from_json(&v, p21()).unwrap();
        for p in 1..=5 {
            assert_eq!(lambda_periodic(&f, p).unwrap().lower_bound, brute_force_lambda(&f, p).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn cap_reports_smaller_budget() {
        let cfg = OptimizeConfig { node_cap: 200, walk_cap: 1000 };
        match lambda_periodic_with(&ind("A1 B1"), 12, &cfg) {
            Err(Error::SearchCap { best_so_far: Some(r), .. }) => assert!(r.period_budget < 12),
            other => panic!("expected a cap error, got {other:?}"),
        }
    }
}
