//! Krieger's embeddings of the full shifts on `M+N+1` symbols, realized on
//! periodic points.
//!
//! `collapse` forgets the indices of one bracket side; `reconstruct` puts
//! them back by matching every collapsed bracket with its partner. Both
//! maps are exact on periodic points, which is where this module works.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::reduce::{periodic_admissible, ErgodicClass};
use crate::symbol::{AlphabetParams, Ambient, Gamma, Symbol, Word};

/// A periodic point, stored as the lexicographically least rotation of its
/// minimal-period block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicPoint {
    params: AlphabetParams,
    ambient: Ambient,
    cycle: Word,
}

impl PeriodicPoint {
    pub fn new(params: AlphabetParams, ambient: Ambient, cycle: impl Into<Word>) -> Result<Self> {
        let cycle: Word = cycle.into();
        if cycle.is_empty() {
            return invalid("periodic point with an empty block");
        }
        params.check_word(ambient, &cycle)?;
        if ambient == Ambient::SigmaD && !periodic_admissible(&params, &cycle)? {
            return Err(Error::Precondition(format!("({cycle})^inf is not a point of the shift")));
        }
        Ok(PeriodicPoint { params, ambient, cycle: canonical_block(&cycle).into() })
    }

    pub fn parse(params: AlphabetParams, ambient: Ambient, text: &str) -> Result<Self> {
        Self::new(params, ambient, Word::parse(text)?)
    }

    pub fn params(&self) -> &AlphabetParams {
        &self.params
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// Height change over one period.
    pub fn drift(&self) -> i64 {
        self.cycle.drift()
    }

    pub fn class(&self) -> ErgodicClass {
        ErgodicClass::from_drift_sign(self.drift().cmp(&0))
    }

    /// Symbol at integer position `i` of the bi-infinite sequence.
    pub fn at(&self, i: i64) -> Symbol {
        self.cycle[i.rem_euclid(self.period() as i64) as usize]
    }
}

impl PartialOrd for PeriodicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PeriodicPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient(), self.cycle()).cmp(&(other.ambient(), other.cycle()))
    }
}

/// Least rotation of the minimal-period block of `w`.
pub fn canonical_block(w: &[Symbol]) -> Vec<Symbol> {
    let n = w.len();
    let period = (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]))
        .unwrap_or(n);
    let base = &w[..period];
    (0..period)
        .map(|r| {
            let mut v = base[r..].to_vec();
            v.extend_from_slice(&base[..r]);
            v
        })
        .min()
        .unwrap_or_default()
}

fn collapse_symbol(s: Symbol, gamma: Gamma) -> Symbol {
    match (gamma, s) {
        (Gamma::Alpha, Symbol::Right(_)) => Symbol::CollapsedRight,
        (Gamma::Beta, Symbol::Left(_)) => Symbol::CollapsedLeft,
        _ => s,
    }
}

/// Symbol-wise collapse of a word of the Dyck shift.
pub fn collapse_word(w: &[Symbol], gamma: Gamma) -> Word {
    w.iter().map(|&s| collapse_symbol(s, gamma)).collect()
}

pub fn collapse(x: &PeriodicPoint, gamma: Gamma) -> Result<PeriodicPoint> {
    if x.ambient != Ambient::SigmaD {
        return invalid(format!("collapse expects a point of sigma_d, got {}", x.ambient));
    }
    PeriodicPoint::new(x.params, Ambient::collapsed(gamma), collapse_word(&x.cycle, gamma))
}

/// Whether every right (alpha) or left (beta) bracket of `x` is closed.
pub fn in_b(x: &PeriodicPoint, gamma: Gamma) -> Result<bool> {
    if x.ambient != Ambient::SigmaD {
        return invalid("membership in B is defined for points of sigma_d");
    }
    Ok(drift_allows(x.drift(), gamma))
}

/// `in_b` decided by explicitly searching a partner for every bracket of
/// the relevant side within one period.
pub fn in_b_by_scan(x: &PeriodicPoint, gamma: Gamma) -> Result<bool> {
    if x.ambient != Ambient::SigmaD {
        return invalid("membership in B is defined for points of sigma_d");
    }
    all_matched(&x.cycle, gamma)
}

/// Whether a point of the collapsed full shift lies in the image `K`.
pub fn in_k(y: &PeriodicPoint, gamma: Gamma) -> Result<bool> {
    if y.ambient != Ambient::collapsed(gamma) {
        return invalid(format!("membership in K_{gamma} needs a point of {}", Ambient::collapsed(gamma)));
    }
    Ok(drift_allows(y.drift(), gamma))
}

fn drift_allows(drift: i64, gamma: Gamma) -> bool {
    match gamma {
        Gamma::Alpha => drift >= 0,
        Gamma::Beta => drift <= 0,
    }
}

fn all_matched(cycle: &[Symbol], gamma: Gamma) -> Result<bool> {
    for (i, s) in cycle.iter().enumerate() {
        let relevant = match gamma {
            Gamma::Alpha => s.is_right(),
            Gamma::Beta => s.is_left(),
        };
        if relevant {
            match match_in_cycle(cycle, gamma, i) {
                Ok(_) => {}
                Err(Error::NoMatch { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

/// Partner of the bracket at `position` within the periodic repetition of a
/// block. `partner` is an integer index into the bi-infinite sequence, so
/// `-1` is the last symbol of the previous period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub position: usize,
    pub partner: i64,
    pub partner_symbol: Symbol,
}

/// Finds the partner of the bracket at `i` in the periodic repetition of
/// `cycle`, keeping the phase of `cycle` as given.
///
/// For alpha the bracket at `i` must be a right bracket and the partner is
/// `max{j <= i : H_j = H_{i+1}}`, found scanning left. For beta it must be a
/// left bracket; the scan goes right to the first `j > i` with `H_j = H_i`
/// and the partner is the closing bracket at `j - 1`.
pub fn match_in_cycle(cycle: &[Symbol], gamma: Gamma, i: usize) -> Result<MatchResult> {
    let p = cycle.len();
    if i >= p {
        return invalid(format!("position {i} outside a block of period {p}"));
    }
    let at = |j: i64| cycle[j.rem_euclid(p as i64) as usize];
    let drift: i64 = cycle.iter().map(|s| s.step()).sum();
    let horizon = p * (2 + drift.unsigned_abs() as usize);
    let i = i as i64;
    match gamma {
        Gamma::Alpha => {
            if !at(i).is_right() {
                return invalid(format!("position {i} does not hold a right bracket"));
            }
            // rel = H_j - H_{i+1}
            let mut rel = 0i64;
            let mut j = i;
            while i - j < horizon as i64 {
                rel -= at(j).step();
                if rel == 0 {
                    return Ok(MatchResult { position: i as usize, partner: j, partner_symbol: at(j) });
                }
                j -= 1;
            }
        }
        Gamma::Beta => {
            if !at(i).is_left() {
                return invalid(format!("position {i} does not hold a left bracket"));
            }
            // rel = H_j - H_i
            let mut rel = 0i64;
            let mut j = i;
            while j - i < horizon as i64 {
                rel += at(j).step();
                j += 1;
                if rel == 0 {
                    let partner = j - 1;
                    return Ok(MatchResult { position: i as usize, partner, partner_symbol: at(partner) });
                }
            }
        }
    }
    Err(Error::NoMatch { position: i, horizon })
}

/// `match_in_cycle` on the canonical block of a collapsed point.
pub fn match_position(y: &PeriodicPoint, i: usize) -> Result<MatchResult> {
    let gamma = match y.ambient {
        Ambient::SigmaAlpha => Gamma::Alpha,
        Ambient::SigmaBeta => Gamma::Beta,
        Ambient::SigmaD => return invalid("match_position works on collapsed points"),
    };
    let expected = match gamma {
        Gamma::Alpha => Symbol::CollapsedRight,
        Gamma::Beta => Symbol::CollapsedLeft,
    };
    if y.cycle.get(i) != Some(&expected) {
        return invalid(format!("position {i} does not hold {expected}"));
    }
    match_in_cycle(&y.cycle, gamma, i)
}

/// Reconstructs the indices of a collapsed block, keeping its phase.
pub fn reconstruct_cycle(cycle: &[Symbol], gamma: Gamma) -> Result<Vec<Symbol>> {
    let mut out = cycle.to_vec();
    for (i, s) in cycle.iter().enumerate() {
        let restored = match (gamma, *s) {
            (Gamma::Alpha, Symbol::CollapsedRight) => match match_in_cycle(cycle, gamma, i)?.partner_symbol {
                Symbol::Left(k) => Symbol::Right(k),
                other => return invalid(format!("collapsed right bracket matched {other}")),
            },
            (Gamma::Beta, Symbol::CollapsedLeft) => match match_in_cycle(cycle, gamma, i)?.partner_symbol {
                Symbol::Right(k) => Symbol::Left(k),
                other => return invalid(format!("collapsed left bracket matched {other}")),
            },
            _ => continue,
        };
        out[i] = restored;
    }
    Ok(out)
}

pub fn reconstruct(y: &PeriodicPoint, gamma: Gamma) -> Result<PeriodicPoint> {
    if !in_k(y, gamma)? {
        return Err(Error::Precondition(format!(
            "({})^inf is not in K_{gamma}: some collapsed bracket is never matched",
            y.cycle
        )));
    }
    let block = reconstruct_cycle(&y.cycle, gamma)?;
    PeriodicPoint::new(y.params, Ambient::SigmaD, block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::w;

    fn p() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }
    fn d(text: &str) -> PeriodicPoint {
        PeriodicPoint::parse(p(), Ambient::SigmaD, text).unwrap()
    }
    fn alpha(text: &str) -> PeriodicPoint {
        PeriodicPoint::parse(p(), Ambient::SigmaAlpha, text).unwrap()
    }
    fn beta(text: &str) -> PeriodicPoint {
        PeriodicPoint::parse(p(), Ambient::SigmaBeta, text).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(d("B1 A1").cycle(), &w("A1 B1"));
        assert_eq!(d("A1 B1 A1 B1"), d("A1 B1"));
        assert_eq!(d("A1 B1 A1 B1").period(), 2);
        assert!(matches!(PeriodicPoint::parse(p(), Ambient::SigmaD, "B1 A2"), Err(Error::Precondition(_))));
        assert!(PeriodicPoint::parse(p(), Ambient::SigmaD, "").is_err());
    }

    #[test]
    fn collapse_examples() {
        assert_eq!(collapse(&d("A1 B1 A2 B2"), Gamma::Alpha).unwrap(), alpha("A1 B* A2 B*"));
        assert_eq!(collapse(&d("B1 U1"), Gamma::Alpha).unwrap(), alpha("B* U1"));
        assert_eq!(collapse(&d("A1 B1"), Gamma::Beta).unwrap(), beta("A* B1"));
    }

    #[test]
    fn b_membership_examples() {
        assert!(in_b(&d("A1 B1"), Gamma::Alpha).unwrap());
        assert!(!in_b(&d("A1"), Gamma::Beta).unwrap());
        assert!(!in_b(&d("B1 B2 U1"), Gamma::Alpha).unwrap());
        for x in [d("A1 B1"), d("A1"), d("B1 B2 U1"), d("U1"), d("A1 A2 B2")] {
            for g in [Gamma::Alpha, Gamma::Beta] {
                assert_eq!(in_b(&x, g).unwrap(), in_b_by_scan(&x, g).unwrap(), "{:?} {g}", x.cycle());
            }
        }
    }

    #[test]
    fn k_membership_examples() {
        assert!(in_k(&alpha("B* A1"), Gamma::Alpha).unwrap());
        assert!(!in_k(&alpha("B* B* A1"), Gamma::Alpha).unwrap());
        assert!(in_k(&alpha("A1 A2 B*"), Gamma::Alpha).unwrap());
        assert!(in_k(&alpha("A1"), Gamma::Beta).is_err());
    }

    #[test]
    fn match_examples() {
        let m = match_in_cycle(&w("A1 B*"), Gamma::Alpha, 1).unwrap();
        assert_eq!((m.partner, m.partner_symbol), (0, Symbol::Left(1)));
        let nested = w("A1 A2 B* B*");
        let m2 = match_in_cycle(&nested, Gamma::Alpha, 2).unwrap();
        assert_eq!((m2.partner, m2.partner_symbol), (1, Symbol::Left(2)));
        let m3 = match_in_cycle(&nested, Gamma::Alpha, 3).unwrap();
        assert_eq!((m3.partner, m3.partner_symbol), (0, Symbol::Left(1)));
        let wrap = match_in_cycle(&w("B* A1"), Gamma::Alpha, 0).unwrap();
        assert_eq!((wrap.partner, wrap.partner_symbol), (-1, Symbol::Left(1)));
        let b = match_in_cycle(&w("A* B2"), Gamma::Beta, 0).unwrap();
        assert_eq!((b.partner, b.partner_symbol), (1, Symbol::Right(2)));
        assert!(matches!(
            match_in_cycle(&w("B* B* A1"), Gamma::Alpha, 1),
            Err(Error::NoMatch { .. })
        ));
        assert!(match_in_cycle(&w("A1 B*"), Gamma::Alpha, 0).is_err());
        let y = alpha("A1 A2 B* B*");
        assert_eq!(match_position(&y, 3).unwrap().partner, 0);
    }

    #[test]
    fn reconstruct_examples() {
        assert_eq!(reconstruct(&alpha("A2 B*"), Gamma::Alpha).unwrap(), d("A2 B2"));
        assert_eq!(reconstruct(&alpha("A1 A2 B* B*"), Gamma::Alpha).unwrap(), d("A1 A2 B2 B1"));
        assert_eq!(reconstruct(&beta("A* B1"), Gamma::Beta).unwrap(), d("A1 B1"));
        assert!(matches!(reconstruct(&alpha("B*"), Gamma::Alpha), Err(Error::Precondition(_))));
    }
}
