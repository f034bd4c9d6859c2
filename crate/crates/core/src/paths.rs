//! Paths of ergodic measures on the Dyck shift.
//!
//! A path is assembled inside one collapsed full shift and carried to the
//! Dyck shift by the reconstruction map. Its pieces are Sigmund segments:
//! for `0 < s < 1` the segment between `nu0` and `nu1` is a Markov chain on
//! the disjoint union of the states of both endpoint chains and one free
//! state per symbol. A state of endpoint `g` follows its own kernel `Q_g`
//! with probability `1 - lambda - eta`, jumps with probability `lambda` to a
//! state drawn from `J_s` and with probability `eta` to a uniform state:
//!
//! ```text
//! P_s(i, .) = (1 - lambda - eta) Q_g(i, .) + lambda J_s + eta U
//! J_s       = (1 - s) unif(states of nu0) + s unif(states of nu1)
//! lambda    = s(1 - s),  eta = lambda^2
//! ```
//!
//! Free states move by `(1 - eta) J_s + eta U`. Every entry is positive, so
//! interior points are fully supported, and both endpoints hold time
//! fractions `1 - s` and `s`, so the segment moves at a steady rate.
//!
//! The time schedule for `K` approximation levels is
//!
//! ```text
//! t = 0                      mu+
//! 0 < t <= 2^{-K-1}          segment mu+ -> mu_K+
//! 2^{-n-2} <= t <= 2^{-n-1}  segment mu_{n+1}+ -> mu_n+        (n = 1..K-1)
//! 1/4 <= t <= 3/4            chain mu_1+ -> nodes -> mu_1-
//! ```
//!
//! mirrored under `t -> 1 - t` on the minus side.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::{invalid, Error, Result};
use crate::function::LocallyConstantFn;
use crate::krieger::{collapse, reconstruct, PeriodicPoint};
use crate::measures::{
    classify_measure, co_approx, cylinder_family, entropy, measure_from_json, measure_to_json, point_from_json,
    weakstar_distance, CylinderProfile, Evaluator, MarkovChain, MeasureSpec, WeakStarConfig,
};
use crate::measures::approx::rotation_of_class;
use crate::reduce::{ErgodicClass, WordClass};
use crate::symbol::{AlphabetParams, Ambient, Gamma, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConfig {
    /// Number of approximants on each side.
    pub levels: usize,
    /// Number of segments in the central chain.
    pub central_segments: usize,
    /// Offset in the approximation rate `1/(n + q)`.
    pub q: usize,
    /// Period budget for the first approximant of a non-periodic target;
    /// level `n` starts from `base_budget * 2^{n-1}`.
    pub base_budget: usize,
    pub max_budget: usize,
    pub metric: WeakStarConfig,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            levels: 4,
            central_segments: 4,
            q: 1,
            base_budget: 10,
            max_budget: 640,
            metric: WeakStarConfig::default(),
        }
    }
}

/// A measure path between two measures on the Dyck shift. Immutable once
/// built; evaluation at different times is independent.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    gamma: Gamma,
    plus: MeasureSpec,
    minus: MeasureSpec,
    /// `mu_1+, .., mu_K+` on the Dyck shift.
    plus_approx: Vec<PeriodicPoint>,
    minus_approx: Vec<PeriodicPoint>,
    /// Interior nodes of the central chain, on the Dyck shift.
    central: Vec<PeriodicPoint>,
}

impl PathSpec {
    pub fn gamma(&self) -> Gamma {
        self.gamma
    }

    pub fn plus(&self) -> &MeasureSpec {
        &self.plus
    }

    pub fn minus(&self) -> &MeasureSpec {
        &self.minus
    }

    pub fn plus_approx(&self) -> &[PeriodicPoint] {
        &self.plus_approx
    }

    pub fn minus_approx(&self) -> &[PeriodicPoint] {
        &self.minus_approx
    }

    pub fn central(&self) -> &[PeriodicPoint] {
        &self.central
    }

    pub fn params(&self) -> AlphabetParams {
        self.plus.params()
    }

    pub fn levels(&self) -> usize {
        self.plus_approx.len()
    }

    /// Times at which the path passes through a stored periodic measure.
    pub fn knots(&self) -> Vec<f64> {
        let k = self.levels();
        let mut out: Vec<f64> = (1..=k).map(|n| 0.5f64.powi(n as i32 + 1)).collect();
        let c = self.central.len() + 1;
        out.extend((1..c).map(|i| 0.25 + 0.5 * i as f64 / c as f64));
        out.extend((1..=k).map(|n| 1.0 - 0.5f64.powi(n as i32 + 1)));
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn to_json(&self) -> Json {
        let points = |v: &[PeriodicPoint]| v.iter().map(|p| p.cycle().to_string()).collect::<Vec<_>>();
        json!({
            "gamma": self.gamma.to_string(),
            "plus": measure_to_json(&self.plus),
            "minus": measure_to_json(&self.minus),
            "plus_approx": points(&self.plus_approx),
            "minus_approx": points(&self.minus_approx),
            "central": points(&self.central),
        })
    }

    pub fn from_json(v: &Json, params: AlphabetParams) -> Result<Self> {
        let gamma: Gamma = v
            .get("gamma")
            .and_then(Json::as_str)
            .ok_or_else(|| Error::InvalidInput("path needs a \"gamma\" string".into()))?
            .parse()?;
        let get = |key: &str| v.get(key).ok_or_else(|| Error::InvalidInput(format!("path needs {key:?}")));
        let points = |key: &str| -> Result<Vec<PeriodicPoint>> {
            get(key)?
                .as_array()
                .ok_or_else(|| Error::InvalidInput(format!("{key:?} must be an array of cycles")))?
                .iter()
                .map(|c| {
                    let text = c.as_str().ok_or_else(|| Error::InvalidInput("cycles are strings".into()))?;
                    point_from_json(&json!({"ambient": "sigma_d", "cycle": text}), params)
                })
                .collect()
        };
        let path = PathSpec {
            gamma,
            plus: measure_from_json(get("plus")?, params)?,
            minus: measure_from_json(get("minus")?, params)?,
            plus_approx: points("plus_approx")?,
            minus_approx: points("minus_approx")?,
            central: points("central")?,
        };
        if path.plus_approx.is_empty() || path.plus_approx.len() != path.minus_approx.len() {
            return invalid("both sides need the same positive number of approximants");
        }
        for p in path.plus_approx.iter().chain(&path.minus_approx).chain(&path.central) {
            if p.class() != gamma_class(gamma) {
                return invalid(format!("stored approximant {} is not of {}", p.cycle(), gamma_class(gamma)));
            }
        }
        Ok(path)
    }
}

fn gamma_class(gamma: Gamma) -> ErgodicClass {
    match gamma {
        Gamma::Alpha => ErgodicClass::Alpha,
        Gamma::Beta => ErgodicClass::Beta,
    }
}

fn pure_class(gamma: Gamma) -> WordClass {
    match gamma {
        Gamma::Alpha => WordClass::Negative,
        Gamma::Beta => WordClass::Positive,
    }
}

/// A measure on the collapsed shift as a labeled chain.
fn chain_of(nu: &MeasureSpec) -> Result<(Vec<Symbol>, Vec<Vec<f64>>)> {
    match nu {
        MeasureSpec::Co(p) => {
            let n = p.period();
            let kernel = (0..n)
                .map(|i| {
                    let mut row = vec![0.0; n];
                    row[(i + 1) % n] = 1.0;
                    row
                })
                .collect();
            Ok((p.cycle().to_vec(), kernel))
        }
        MeasureSpec::Bernoulli(b) => {
            let row: Vec<f64> = b.weights().iter().map(crate::measures::rational_to_f64).collect();
            let alphabet = b.params().alphabet(b.ambient());
            Ok((alphabet.clone(), vec![row; alphabet.len()]))
        }
        MeasureSpec::Markov(m) => Ok((m.labels().to_vec(), m.kernel().to_vec())),
        MeasureSpec::Pushforward(_) => invalid("segment endpoints live on a collapsed shift"),
    }
}

/// Point `s` of the Sigmund segment from `nu0` to `nu1`, two measures on the
/// same collapsed shift.
pub fn sigmund_segment(nu0: &MeasureSpec, nu1: &MeasureSpec, s: f64) -> Result<MeasureSpec> {
    let ambient = nu0.ambient();
    if ambient == Ambient::SigmaD || nu1.ambient() != ambient || nu0.params() != nu1.params() {
        return invalid("segment endpoints must live on the same collapsed shift");
    }
    if nu0 == nu1 {
        return invalid("segment endpoints must differ");
    }
    if !(0.0..=1.0).contains(&s) {
        return invalid(format!("segment parameter {s} outside [0, 1]"));
    }
    if s == 0.0 {
        return Ok(nu0.clone());
    }
    if s == 1.0 {
        return Ok(nu1.clone());
    }
    let params = nu0.params();
    let (l0, q0) = chain_of(nu0)?;
    let (l1, q1) = chain_of(nu1)?;
    let free = params.alphabet(ambient);
    let (n0, n1) = (l0.len(), l1.len());
    let total = n0 + n1 + free.len();
    let lambda = s * (1.0 - s);
    let eta = lambda * lambda;
    let jump: Vec<f64> = (0..total)
        .map(|j| {
            if j < n0 {
                (1.0 - s) / n0 as f64
            } else if j < n0 + n1 {
                s / n1 as f64
            } else {
                0.0
            }
        })
        .collect();
    let mut kernel = Vec::with_capacity(total);
    for i in 0..total {
        let (own, offset, stay) = if i < n0 {
            (Some(&q0[i]), 0, 1.0 - lambda - eta)
        } else if i < n0 + n1 {
            (Some(&q1[i - n0]), n0, 1.0 - lambda - eta)
        } else {
            (None, 0, 0.0)
        };
        let to_jump = if own.is_some() { lambda } else { 1.0 - eta };
        let mut row: Vec<f64> = jump.iter().map(|j| to_jump * j + eta / total as f64).collect();
        if let Some(q) = own {
            for (j, &x) in q.iter().enumerate() {
                row[offset + j] += stay * x;
            }
        }
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= sum);
        // absorb rounding so that the row sums to 1 within the chain tolerance
        let rest: f64 = 1.0 - row.iter().sum::<f64>();
        let big = row.iter().cloned().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).map(|(j, _)| j).unwrap_or(0);
        row[big] += rest;
        kernel.push(row);
    }
    let labels: Vec<Symbol> = l0.into_iter().chain(l1).chain(free).collect();
    Ok(MeasureSpec::Markov(MarkovChain::new(params, ambient, labels, kernel, None)?))
}

/// Carries a measure on the collapsed shift to the Dyck shift. Periodic
/// orbits are reconstructed directly.
pub fn transport_segment(nu: &MeasureSpec, gamma: Gamma) -> Result<MeasureSpec> {
    if nu.ambient() != Ambient::collapsed(gamma) {
        return invalid(format!("transport through psi_{gamma} needs a measure on {}", Ambient::collapsed(gamma)));
    }
    match nu {
        MeasureSpec::Co(y) => Ok(MeasureSpec::Co(reconstruct(y, gamma)?)),
        other => MeasureSpec::pushforward(gamma, other.clone()),
    }
}

/// The collapsed form of a measure on the Dyck shift.
fn collapsed_of(mu: &MeasureSpec, gamma: Gamma) -> Result<MeasureSpec> {
    match mu {
        MeasureSpec::Co(x) => Ok(MeasureSpec::Co(collapse(x, gamma)?)),
        MeasureSpec::Pushforward(p) if p.gamma() == gamma => Ok(p.inner().clone()),
        _ => invalid("path endpoints must be periodic orbits or transports on the chosen side"),
    }
}

/// Periodic orbit behind an endpoint, when it has one.
fn orbit_of(mu: &MeasureSpec) -> Result<Option<PeriodicPoint>> {
    Ok(match mu {
        MeasureSpec::Co(x) => Some(x.clone()),
        MeasureSpec::Pushforward(p) => match p.inner() {
            MeasureSpec::Co(y) => Some(reconstruct(y, p.gamma())?),
            _ => None,
        },
        _ => None,
    })
}

pub fn build_path(
    plus: &MeasureSpec,
    minus: &MeasureSpec,
    gamma: Gamma,
    cfg: &PathConfig,
    seed: u64,
) -> Result<PathSpec> {
    if plus.ambient() != Ambient::SigmaD || minus.ambient() != Ambient::SigmaD {
        return invalid("path endpoints must be measures on sigma_d");
    }
    if plus.params() != minus.params() {
        return invalid("path endpoints use different alphabets");
    }
    if plus == minus {
        return invalid("path endpoints must differ");
    }
    if cfg.levels == 0 || cfg.central_segments == 0 {
        return invalid("a path needs at least one level and one central segment");
    }
    for mu in [plus, minus] {
        let class = classify_measure(mu)?;
        if class != ErgodicClass::Zero && class != gamma_class(gamma) {
            return invalid(format!("endpoint of {class} cannot be joined on the {gamma} side"));
        }
        collapsed_of(mu, gamma)?;
    }
    let mut taken: Vec<PeriodicPoint> = [plus, minus].iter().filter_map(|m| m.as_co().cloned()).collect();
    let plus_approx = approximants(plus, gamma, cfg, seed, &mut taken)?;
    let minus_approx = approximants(minus, gamma, cfg, seed.wrapping_add(0x5851_F42D), &mut taken)?;
    let central = central_nodes(&plus_approx[0], &minus_approx[0], gamma, cfg.central_segments, &taken)?;
    Ok(PathSpec { gamma, plus: plus.clone(), minus: minus.clone(), plus_approx, minus_approx, central })
}

/// `mu_1, .., mu_K` of class gamma with `d(collapsed mu_n, collapsed mu) < 1/(n+q)`,
/// distinct from each other and from everything in `taken`.
fn approximants(
    mu: &MeasureSpec,
    gamma: Gamma,
    cfg: &PathConfig,
    seed: u64,
    taken: &mut Vec<PeriodicPoint>,
) -> Result<Vec<PeriodicPoint>> {
    let params = mu.params();
    let target = collapsed_of(mu, gamma)?;
    let target_profile = CylinderProfile::new(&target, &cfg.metric)?;
    let close = |x: &PeriodicPoint, n: usize| -> Result<bool> {
        let c = CylinderProfile::new(&MeasureSpec::Co(collapse(x, gamma)?), &cfg.metric)?;
        Ok(c.distance(&target_profile)?.value.to_f64() < 1.0 / (n + cfg.q) as f64)
    };
    let mut out: Vec<PeriodicPoint> = Vec::with_capacity(cfg.levels);
    match orbit_of(mu)? {
        Some(x) => {
            let class = if x.class() == ErgodicClass::Zero { WordClass::Neutral } else { pure_class(gamma) };
            let omega = rotation_of_class(x.cycle(), class)
                .ok_or_else(|| Error::InvalidInput(format!("{} has no rotation of class {class}", x.cycle())))?;
            let mut tails: Vec<Symbol> = match gamma {
                Gamma::Alpha => (1..=params.m).map(Symbol::Left).collect(),
                Gamma::Beta => (1..=params.m).map(Symbol::Right).collect(),
            };
            if class != WordClass::Neutral {
                tails.extend((1..=params.n).map(Symbol::Unit));
            }
            let mut reps = 0usize;
            for n in 1..=cfg.levels {
                let mut j = (1usize << n).max(2 * reps);
                let found = loop {
                    if j * omega.len() > cfg.max_budget {
                        return Err(Error::Budget(format!(
                            "no approximant of level {n} within period budget {}",
                            cfg.max_budget
                        )));
                    }
                    let mut hit = None;
                    for &a in &tails {
                        let cand = PeriodicPoint::new(params, Ambient::SigmaD, omega.repeat(j).concat(&[a]))?;
                        if !taken.contains(&cand) && close(&cand, n)? {
                            hit = Some(cand);
                            break;
                        }
                    }
                    match hit {
                        Some(c) => break c,
                        None => j *= 2,
                    }
                };
                reps = j;
                taken.push(found.clone());
                out.push(found);
            }
        }
        None => {
            for n in 1..=cfg.levels {
                let mut budget = cfg.base_budget << (n - 1);
                let found = 'search: loop {
                    if budget > cfg.max_budget {
                        return Err(Error::Budget(format!(
                            "no approximant of level {n} within period budget {}",
                            cfg.max_budget
                        )));
                    }
                    for attempt in 0..8u64 {
                        let a = co_approx(mu, budget, seed.wrapping_add(attempt * 7919 + n as u64))?;
                        let cand = a.as_co().expect("approximants are periodic").clone();
                        if cand.class() == gamma_class(gamma) && !taken.contains(&cand) && close(&cand, n)? {
                            break 'search cand;
                        }
                    }
                    budget *= 2;
                };
                taken.push(found.clone());
                out.push(found);
            }
        }
    }
    Ok(out)
}

/// Nodes `w0^{k-i} w1^i`, `0 < i < k`, with `w0`, `w1` the pure rotations of
/// the first approximants. Nodes already used elsewhere are skipped.
fn central_nodes(
    a: &PeriodicPoint,
    b: &PeriodicPoint,
    gamma: Gamma,
    k: usize,
    taken: &[PeriodicPoint],
) -> Result<Vec<PeriodicPoint>> {
    let class = pure_class(gamma);
    let w0 = rotation_of_class(a.cycle(), class).expect("approximants are pure");
    let w1 = rotation_of_class(b.cycle(), class).expect("approximants are pure");
    let mut out: Vec<PeriodicPoint> = Vec::new();
    for i in 1..k {
        let word: Word = w0.repeat(k - i).concat(&w1.repeat(i));
        let p = PeriodicPoint::new(*a.params(), Ambient::SigmaD, word)?;
        if !taken.contains(&p) && !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Where `t` falls in the schedule.
enum Place<'a> {
    Exact(MeasureSpec),
    Segment { from: Endpoint<'a>, to: Endpoint<'a>, s: f64 },
}

#[derive(Clone, Copy)]
enum Endpoint<'a> {
    Target(&'a MeasureSpec),
    Orbit(&'a PeriodicPoint),
}

impl PathSpec {
    fn locate(&self, t: f64) -> Place<'_> {
        if t == 0.0 {
            return Place::Exact(self.plus.clone());
        }
        if t == 1.0 {
            return Place::Exact(self.minus.clone());
        }
        if (0.25..=0.75).contains(&t) {
            let mut nodes = vec![&self.plus_approx[0]];
            nodes.extend(&self.central);
            nodes.push(&self.minus_approx[0]);
            let k = nodes.len() - 1;
            let u = (t - 0.25) * 2.0 * k as f64;
            let i = (u.floor() as usize).min(k - 1);
            let s = u - i as f64;
            return self.segment(Endpoint::Orbit(nodes[i]), Endpoint::Orbit(nodes[i + 1]), s);
        }
        let (side, target, tt) = if t < 0.5 {
            (&self.plus_approx, &self.plus, t)
        } else {
            (&self.minus_approx, &self.minus, 1.0 - t)
        };
        let flip = t > 0.5;
        let k = side.len();
        let tail_end = 0.5f64.powi(k as i32 + 1);
        let (from, to, s) = if tt <= tail_end {
            (Endpoint::Target(target), Endpoint::Orbit(&side[k - 1]), tt / tail_end)
        } else {
            // tt in [2^{-n-2}, 2^{-n-1}]
            let n = ((-tt.log2()).floor() as usize).saturating_sub(1).clamp(1, k - 1);
            let lo = 0.5f64.powi(n as i32 + 2);
            (Endpoint::Orbit(&side[n]), Endpoint::Orbit(&side[n - 1]), (tt - lo) / lo)
        };
        if flip {
            self.segment(to, from, 1.0 - s)
        } else {
            self.segment(from, to, s)
        }
    }

    fn segment<'a>(&self, from: Endpoint<'a>, to: Endpoint<'a>, s: f64) -> Place<'a> {
        let s = s.clamp(0.0, 1.0);
        let exact = |e: Endpoint<'a>| match e {
            Endpoint::Target(m) => m.clone(),
            Endpoint::Orbit(p) => MeasureSpec::Co(p.clone()),
        };
        if s == 0.0 {
            Place::Exact(exact(from))
        } else if s == 1.0 {
            Place::Exact(exact(to))
        } else {
            Place::Segment { from, to, s }
        }
    }

    fn collapsed(&self, e: Endpoint<'_>) -> Result<MeasureSpec> {
        match e {
            Endpoint::Target(m) => collapsed_of(m, self.gamma),
            Endpoint::Orbit(p) => Ok(MeasureSpec::Co(collapse(p, self.gamma)?)),
        }
    }

    /// Whether `t` is a schedule knot or an endpoint, where the path passes
    /// through a stored measure.
    pub fn is_knot(&self, t: f64) -> bool {
        matches!(self.locate(t), Place::Exact(_))
    }
}

pub fn path_point(path: &PathSpec, t: f64) -> Result<MeasureSpec> {
    if !(0.0..=1.0).contains(&t) {
        return invalid(format!("path time {t} outside [0, 1]"));
    }
    match path.locate(t) {
        Place::Exact(m) => Ok(m),
        Place::Segment { from, to, s } => {
            let nu = sigmund_segment(&path.collapsed(from)?, &path.collapsed(to)?, s)?;
            transport_segment(&nu, path.gamma).map_err(|e| match e {
                Error::TransportCondition { value, .. } => Error::TransportCondition { value, at: Some(t) },
                other => other,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathRow {
    pub t: f64,
    pub class: ErgodicClass,
    pub entropy: f64,
    pub integral_of_probe_f: f64,
    /// Distance to the previous grid point; zero on the first row.
    pub gap_to_prev: f64,
    pub fully_supported: bool,
    pub knot: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathReport {
    pub rows: Vec<PathRow>,
    pub max_gap: f64,
    pub start_exact: bool,
    pub end_exact: bool,
    /// Every pair of grid points is at certified positive distance.
    pub pairwise_distinct: bool,
    pub min_pair_distance: f64,
}

impl PathReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,class,entropy,integral_of_probe_f,gap_to_prev,fully_supported\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.9},{:.9},{:.9},{}\n",
                r.t, r.class, r.entropy, r.integral_of_probe_f, r.gap_to_prev, r.fully_supported as u8
            ));
        }
        out
    }
}

/// Evaluates the path on `grid` equally spaced times and checks endpoint
/// exactness, full support of interior points and pairwise distinctness.
/// The probe function is the indicator of `[A1]`.
pub fn verify_path(path: &PathSpec, grid: usize, metric: &WeakStarConfig) -> Result<PathReport> {
    if grid < 2 {
        return invalid("a verification grid needs at least two points");
    }
    let params = path.params();
    let probe = LocallyConstantFn::indicator(params, Ambient::SigmaD, &[Symbol::Left(1)])?;
    let family = cylinder_family(&params, Ambient::SigmaD, 2);
    let mut rows = Vec::with_capacity(grid);
    let mut profiles: Vec<CylinderProfile> = Vec::with_capacity(grid);
    for i in 0..grid {
        let t = i as f64 / (grid - 1) as f64;
        let mu = path_point(path, t)?;
        let ev = Evaluator::new(&mu)?;
        let profile = CylinderProfile::from_evaluator(&ev, metric)?;
        let gap = match profiles.last() {
            Some(prev) => prev.distance(&profile)?.value.to_f64(),
            None => 0.0,
        };
        let strictly_positive = match &mu {
            MeasureSpec::Pushforward(p) => match p.inner() {
                MeasureSpec::Markov(m) => m.strictly_positive(),
                MeasureSpec::Bernoulli(b) => b.weights().iter().all(|w| *w > BigRational::zero()),
                _ => false,
            },
            _ => false,
        };
        let fully_supported = strictly_positive
            && family.iter().try_fold(true, |acc, w| Ok::<_, Error>(acc && ev.cylinder(w)?.is_positive() == Some(true)))?;
        rows.push(PathRow {
            t,
            class: classify_measure(&mu)?,
            entropy: entropy(&mu)?.value,
            integral_of_probe_f: ev.integral(&probe)?.to_f64(),
            gap_to_prev: gap,
            fully_supported,
            knot: path.is_knot(t),
        });
        profiles.push(profile);
    }
    let mut pairwise_distinct = true;
    let mut min_pair_distance = f64::INFINITY;
    for i in 0..grid {
        for j in i + 1..grid {
            let d = profiles[i].distance(&profiles[j])?.value;
            let v = d.to_f64();
            min_pair_distance = min_pair_distance.min(v);
            if d.is_positive() != Some(true) {
                pairwise_distinct = false;
            }
        }
    }
    let max_gap = rows.iter().map(|r| r.gap_to_prev).fold(0.0, f64::max);
    Ok(PathReport {
        start_exact: path_point(path, 0.0)? == path.plus,
        end_exact: path_point(path, 1.0)? == path.minus,
        rows,
        max_gap,
        pairwise_distinct,
        min_pair_distance,
    })
}

/// `d(path(t), path(t + h))` for the given times, for continuity checks.
pub fn local_gaps(path: &PathSpec, times: &[f64], h: f64, metric: &WeakStarConfig) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            let a = path_point(path, t)?;
            let b = path_point(path, (t + h).min(1.0))?;
            Ok(weakstar_distance(&a, &b, metric)?.value.to_f64())
        })
        .collect()
}

/// Exact rational form of a dyadic time, for display.
pub fn time_fraction(t: f64) -> String {
    let mut den = 1u64;
    while (t * den as f64).fract() != 0.0 && den < 1 << 40 {
        den *= 2;
    }
    let num = (t * den as f64).round().to_u64().unwrap_or(0);
    if den == 1 {
        num.to_string()
    } else {
        let q = BigRational::new(num.into(), den.into());
        if q.is_one() { "1".into() } else { q.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Bernoulli, Value};

    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }
    fn co(amb: Ambient, text: &str) -> MeasureSpec {
        MeasureSpec::Co(PeriodicPoint::parse(p21(), amb, text).unwrap())
    }
    fn mme() -> MeasureSpec {
        let u = Bernoulli::uniform(p21(), Ambient::SigmaAlpha).unwrap();
        MeasureSpec::pushforward(Gamma::Alpha, MeasureSpec::Bernoulli(u)).unwrap()
    }

    #[test]
    fn segment_endpoints_and_interior() {
        let a = co(Ambient::SigmaAlpha, "A1");
        let b = co(Ambient::SigmaAlpha, "A2");
        assert_eq!(sigmund_segment(&a, &b, 0.0).unwrap(), a);
        assert_eq!(sigmund_segment(&a, &b, 1.0).unwrap(), b);
        let mid = sigmund_segment(&a, &b, 0.5).unwrap();
        match &mid {
            MeasureSpec::Markov(m) => assert!(m.strictly_positive()),
            other => panic!("expected a Markov chain, got {other:?}"),
        }
        assert!(entropy(&mid).unwrap().value > 0.0);
        assert!(sigmund_segment(&a, &a, 0.5).is_err());
    }

    #[test]
    fn segment_is_continuous() {
        let a = co(Ambient::SigmaAlpha, "A1 B*");
        let b = co(Ambient::SigmaAlpha, "A2 A1 U1");
        let cfg = WeakStarConfig::default();
        for s in [0.0, 0.1, 0.3, 0.5, 0.8, 0.998] {
            let x = sigmund_segment(&a, &b, s).unwrap();
            let y = sigmund_segment(&a, &b, s + 1e-3).unwrap();
            assert!(weakstar_distance(&x, &y, &cfg).unwrap().value.to_f64() <= 1e-2, "s = {s}");
        }
    }

    #[test]
    fn transport_examples() {
        let y = co(Ambient::SigmaAlpha, "A1 B*");
        assert_eq!(transport_segment(&y, Gamma::Alpha).unwrap(), co(Ambient::SigmaD, "A1 B1"));
        assert!(transport_segment(&co(Ambient::SigmaAlpha, "B*"), Gamma::Alpha).is_err());
        let u = MeasureSpec::Bernoulli(Bernoulli::uniform(p21(), Ambient::SigmaAlpha).unwrap());
        let pushed = transport_segment(&u, Gamma::Alpha).unwrap();
        let ev = Evaluator::new(&pushed).unwrap();
        assert_eq!(ev.cylinder(&crate::symbol::w("A1 B1")).unwrap(), Value::from(BigRational::new(1.into(), 16.into())));
    }

    #[test]
    fn periodic_endpoints() {
        let plus = co(Ambient::SigmaD, "A1");
        let minus = co(Ambient::SigmaD, "A2");
        let path = build_path(&plus, &minus, Gamma::Alpha, &PathConfig::default(), 1).unwrap();
        assert_eq!(path_point(&path, 0.0).unwrap(), plus);
        assert_eq!(path_point(&path, 1.0).unwrap(), minus);
        assert!(path.is_knot(0.5) || path_point(&path, 0.5).is_ok());
        let mid = path_point(&path, 3.0 / 8.0).unwrap();
        assert_eq!(classify_measure(&mid).unwrap(), ErgodicClass::Alpha);
        assert!(build_path(&plus, &plus, Gamma::Alpha, &PathConfig::default(), 1).is_err());
        let json = path.to_json();
        assert_eq!(PathSpec::from_json(&json, p21()).unwrap(), path);
    }

    #[test]
    fn path_to_the_krieger_measure() {
        let path = build_path(&co(Ambient::SigmaD, "A1"), &mme(), Gamma::Alpha, &PathConfig::default(), 7).unwrap();
        let report = verify_path(&path, 17, &WeakStarConfig::default()).unwrap();
        assert!(report.start_exact && report.end_exact);
        for r in &report.rows {
            if !r.knot {
                assert!(r.fully_supported, "t = {}", r.t);
                assert!(r.entropy > 0.0);
            }
        }
        assert!(report.pairwise_distinct, "{}", report.min_pair_distance);
    }

    #[test]
    fn neutral_endpoint() {
        let path = build_path(&co(Ambient::SigmaD, "A1 B1"), &mme(), Gamma::Alpha, &PathConfig::default(), 2).unwrap();
        for p in path.plus_approx() {
            assert_eq!(p.class(), ErgodicClass::Alpha);
        }
        let near = path_point(&path, 1e-3).unwrap();
        assert_eq!(near.kind(), "pushforward");
    }

    #[test]
    fn dyadic_times() {
        assert_eq!(time_fraction(0.375), "3/8");
        assert_eq!(time_fraction(1.0), "1");
        assert_eq!(time_fraction(0.0), "0");
    }
}
