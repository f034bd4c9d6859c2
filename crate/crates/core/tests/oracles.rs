use num_rational::BigRational;

use dyckmotzkin::krieger::PeriodicPoint;
use dyckmotzkin::measures::{cylinder_family, sample, Bernoulli, Evaluator, MarkovChain, MeasureSpec, Value};
use dyckmotzkin::{entropy, integral, AlphabetParams, Ambient, Gamma, LocallyConstantFn, Symbol, Word};

const SAMPLES: u64 = 40_000;
const SAMPLE_LEN: usize = 2;

fn params() -> AlphabetParams {
    AlphabetParams::new(2, 1).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Every length-2 cylinder mass must lie within 4 standard errors of the
/// frequency observed in independent samples.
fn check_against_samples(mu: &MeasureSpec) {
    let ev = Evaluator::new(mu).unwrap();
    let family: Vec<Word> = cylinder_family(&params(), Ambient::SigmaD, SAMPLE_LEN)
        .into_iter()
        .filter(|w| w.len() == SAMPLE_LEN)
        .collect();
    let mut hits = vec![0u64; family.len()];
    for seed in 0..SAMPLES {
        let w = sample(mu, SAMPLE_LEN, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xA5).unwrap();
        if let Some(i) = family.iter().position(|f| f.symbols() == w.symbols()) {
            hits[i] += 1;
        }
    }
    for (w, h) in family.iter().zip(hits) {
        let exact = ev.cylinder(w).unwrap().to_f64();
        let freq = h as f64 / SAMPLES as f64;
        let se = (exact * (1.0 - exact) / SAMPLES as f64).sqrt().max(1e-4);
        assert!((freq - exact).abs() <= 4.0 * se, "[{w}]: sampled {freq}, computed {exact}");
    }
}

#[test]
fn bernoulli_transport_matches_sampling() {
    for gamma in [Gamma::Alpha, Gamma::Beta] {
        let amb = Ambient::collapsed(gamma);
        let mut w = vec![q(3, 8), q(1, 4), q(1, 4), q(1, 8)];
        if gamma == Gamma::Beta {
            w.reverse();
        }
        let b = Bernoulli::new(params(), amb, w).unwrap();
        check_against_samples(&MeasureSpec::pushforward(gamma, MeasureSpec::Bernoulli(b)).unwrap());
    }
}

#[test]
fn markov_transport_matches_sampling() {
    let kernel = vec![
        vec![0.4, 0.3, 0.2, 0.1],
        vec![0.1, 0.5, 0.2, 0.2],
        vec![0.3, 0.3, 0.2, 0.2],
        vec![0.5, 0.2, 0.2, 0.1],
    ];
    let chain = MarkovChain::on_symbols(params(), Ambient::SigmaAlpha, kernel, None).unwrap();
    check_against_samples(&MeasureSpec::pushforward(Gamma::Alpha, MeasureSpec::Markov(chain)).unwrap());
}

#[test]
fn orbit_measure_counts_occurrences() {
    // A1 A2 B2 U1: [A2 B2] occurs once in four positions, [A1] once.
    let x = PeriodicPoint::parse(params(), Ambient::SigmaD, "A1 A2 B2 U1").unwrap();
    let mu = MeasureSpec::Co(x.clone());
    let ev = Evaluator::new(&mu).unwrap();
    let cyl = |t: &str| ev.cylinder(Word::parse(t).unwrap().symbols()).unwrap();
    assert_eq!(cyl("A2 B2"), Value::from(q(1, 4)));
    assert_eq!(cyl("A1"), Value::from(q(1, 4)));
    assert_eq!(cyl("B2 A2"), Value::from(q(0, 1)));
    assert_eq!(cyl("U1 A1 A2"), Value::from(q(1, 4)));
    assert_eq!(entropy(&mu).unwrap().value, 0.0);
    let drift = LocallyConstantFn::drift(params(), Ambient::SigmaD);
    assert_eq!(integral(&mu, &drift).unwrap(), Value::from(q(x.drift(), 4)));
}

#[test]
fn transported_orbit_equals_reconstructed_orbit() {
    let y = PeriodicPoint::parse(params(), Ambient::SigmaBeta, "B1 B2 A* U1").unwrap();
    let moved = MeasureSpec::pushforward(Gamma::Beta, MeasureSpec::Co(y.clone())).unwrap();
    let direct = MeasureSpec::Co(dyckmotzkin::reconstruct(&y, Gamma::Beta).unwrap());
    let (a, b) = (Evaluator::new(&moved).unwrap(), Evaluator::new(&direct).unwrap());
    for w in cylinder_family(&params(), Ambient::SigmaD, 3) {
        assert_eq!(a.cylinder(&w).unwrap(), b.cylinder(&w).unwrap(), "[{w}]");
    }
}

#[test]
fn uniform_transport_single_symbols() {
    // A* has weight 1/4 and is relabelled as one of the two lefts, so
    // [A1] = 1/4 * 1/2.
    let beta = MeasureSpec::pushforward(
        Gamma::Beta,
        MeasureSpec::Bernoulli(Bernoulli::uniform(params(), Ambient::SigmaBeta).unwrap()),
    )
    .unwrap();
    let ev = Evaluator::new(&beta).unwrap();
    assert_eq!(ev.cylinder(&[Symbol::Right(1)]).unwrap(), Value::from(q(1, 4)));
    assert_eq!(ev.cylinder(&[Symbol::Left(1)]).unwrap(), Value::from(q(1, 8)));
    assert_eq!(ev.cylinder(&[Symbol::Unit(1)]).unwrap(), Value::from(q(1, 4)));
}
