//! Bracket-monoid reduction and everything derived from it: admissibility,
//! word classes, height profiles and admissibility of periodic repetitions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symbol::{AlphabetParams, Ambient, Symbol, Word};

/// Normal form of a word in the bracket monoid: zero, or
/// `B_{i1}..B_{ip} A_{j1}..A_{jq}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedForm {
    pub zero: bool,
    pub rights: Vec<u16>,
    pub lefts: Vec<u16>,
}

impl ReducedForm {
    pub fn zero() -> Self {
        ReducedForm { zero: true, rights: Vec::new(), lefts: Vec::new() }
    }

    pub fn identity() -> Self {
        ReducedForm { zero: false, rights: Vec::new(), lefts: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        !self.zero && self.rights.is_empty() && self.lefts.is_empty()
    }

    /// The normal form written back out as a word over the Dyck alphabet.
    /// Meaningless for zero.
    pub fn to_word(&self) -> Word {
        self.rights
            .iter()
            .map(|&k| Symbol::Right(k))
            .chain(self.lefts.iter().map(|&k| Symbol::Left(k)))
            .collect()
    }
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return f.write_str("ZERO");
        }
        if self.is_identity() {
            return f.write_str("IDENTITY");
        }
        let join = |v: &[u16], tag: char| {
            v.iter().map(|k| format!("{tag}{k}")).collect::<Vec<_>>().join(" ")
        };
        let rights = join(&self.rights, 'B');
        let lefts = join(&self.lefts, 'A');
        match (rights.is_empty(), lefts.is_empty()) {
            (false, false) => write!(f, "{rights} | {lefts}"),
            (false, true) => write!(f, "{rights} |"),
            _ => write!(f, "| {lefts}"),
        }
    }
}

/// Stack reduction of a symbol sequence, without alphabet checks.
pub(crate) fn reduce_symbols(symbols: &[Symbol]) -> ReducedForm {
    let mut rights = Vec::new();
    let mut stack: Vec<u16> = Vec::new();
    for s in symbols {
        match *s {
            Symbol::Left(k) => stack.push(k),
            Symbol::Right(k) => match stack.pop() {
                Some(j) if j == k => {}
                Some(_) => return ReducedForm::zero(),
                None => rights.push(k),
            },
            Symbol::Unit(_) => {}
            Symbol::CollapsedLeft | Symbol::CollapsedRight => {
                unreachable!("collapsed symbols are rejected before reduction")
            }
        }
    }
    ReducedForm { zero: false, rights, lefts: stack }
}

pub fn reduce(params: &AlphabetParams, w: &[Symbol]) -> Result<ReducedForm> {
    params.check_word(Ambient::SigmaD, w)?;
    Ok(reduce_symbols(w))
}

pub fn is_admissible(params: &AlphabetParams, w: &[Symbol]) -> Result<bool> {
    Ok(!reduce(params, w)?.zero)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WordClass {
    Neutral,
    Negative,
    Positive,
    Mixed,
    Inadmissible,
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl WordClass {
    pub fn of(red: &ReducedForm) -> Self {
        match (red.zero, red.rights.is_empty(), red.lefts.is_empty()) {
            (true, _, _) => WordClass::Inadmissible,
            (false, true, true) => WordClass::Neutral,
            (false, true, false) => WordClass::Negative,
            (false, false, true) => WordClass::Positive,
            (false, false, false) => WordClass::Mixed,
        }
    }

    /// Neutral, negative and positive words repeat admissibly.
    pub fn is_pure(self) -> bool {
        matches!(self, WordClass::Neutral | WordClass::Negative | WordClass::Positive)
    }
}

pub fn classify(params: &AlphabetParams, w: &[Symbol]) -> Result<WordClass> {
    Ok(WordClass::of(&reduce(params, w)?))
}

/// Running heights `H_0 = 0, H_i = H_{i-1} + step(w_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightProfile {
    pub values: Vec<i64>,
}

impl HeightProfile {
    pub fn last(&self) -> i64 {
        *self.values.last().expect("profile always holds H_0")
    }
}

pub fn height_profile(params: &AlphabetParams, w: &[Symbol]) -> Result<HeightProfile> {
    let fits = [Ambient::SigmaD, Ambient::SigmaAlpha, Ambient::SigmaBeta]
        .into_iter()
        .any(|amb| params.check_word(amb, w).is_ok());
    if !fits {
        return invalid(format!("word {} does not belong to any alphabet of {params}", Word::from(w.to_vec())));
    }
    Ok(heights(w))
}

pub(crate) fn heights(w: &[Symbol]) -> HeightProfile {
    let mut values = Vec::with_capacity(w.len() + 1);
    let mut h = 0;
    values.push(h);
    for s in w {
        h += s.step();
        values.push(h);
    }
    HeightProfile { values }
}

/// Whether the bi-infinite repetition of `w` lies in the Dyck-Motzkin shift.
///
/// Decided by `red(ww) != 0`: if `red(w) = B A` in normal form, the square
/// reduces to zero exactly when the innermost pairs of `A B` mismatch, and
/// once they match every further power stays nonzero.
pub fn periodic_admissible(params: &AlphabetParams, w: &[Symbol]) -> Result<bool> {
    if w.is_empty() {
        return invalid("periodic admissibility of the empty word");
    }
    params.check_word(Ambient::SigmaD, w)?;
    let mut ww = w.to_vec();
    ww.extend_from_slice(w);
    Ok(!reduce_symbols(&ww).zero)
}

/// Which of the three height-asymptotics classes a periodic point or an
/// ergodic measure belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErgodicClass {
    /// Recurrent heights (drift zero).
    Zero,
    /// Heights tend to +infinity (more left brackets).
    Alpha,
    /// Heights tend to -infinity (more right brackets).
    Beta,
}

impl ErgodicClass {
    pub fn from_drift_sign(sign: std::cmp::Ordering) -> Self {
        match sign {
            std::cmp::Ordering::Greater => ErgodicClass::Alpha,
            std::cmp::Ordering::Less => ErgodicClass::Beta,
            std::cmp::Ordering::Equal => ErgodicClass::Zero,
        }
    }
}

impl fmt::Display for ErgodicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErgodicClass::Zero => "class0",
            ErgodicClass::Alpha => "class_alpha",
            ErgodicClass::Beta => "class_beta",
        })
    }
}

pub fn periodic_class(params: &AlphabetParams, w: &[Symbol]) -> Result<ErgodicClass> {
    if !periodic_admissible(params, w)? {
        return Err(Error::Precondition(format!(
            "({})^inf is not a point of the shift",
            Word::from(w.to_vec())
        )));
    }
    let drift: i64 = w.iter().map(|s| s.step()).sum();
    Ok(ErgodicClass::from_drift_sign(drift.cmp(&0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::w;

    fn p20() -> AlphabetParams {
        AlphabetParams::new(2, 0).unwrap()
    }
    fn p21() -> AlphabetParams {
        AlphabetParams::new(2, 1).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(&p21(), &w("A1 B1")).unwrap().is_identity());
        assert!(reduce(&p21(), &w("A1 B2")).unwrap().zero);
        let r = reduce(&p21(), &w("B1 U1 A2")).unwrap();
        assert_eq!(r, ReducedForm { zero: false, rights: vec![1], lefts: vec![2] });
        assert_eq!(r.to_string(), "B1 | A2");
        assert!(reduce(&p21(), &w("A*")).is_err());
        assert!(reduce(&p20(), &w("U1")).is_err());
    }

    #[test]
    fn empty_word_is_neutral() {
        assert!(reduce(&p20(), &[]).unwrap().is_identity());
        assert_eq!(classify(&p20(), &[]).unwrap(), WordClass::Neutral);
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&p20(), &w("A1 B1")).unwrap());
        assert!(!is_admissible(&p20(), &w("A2 B1")).unwrap());
        let r = reduce(&p20(), &w("B1 B2 A2 A1")).unwrap();
        assert_eq!((r.rights.clone(), r.lefts.clone()), (vec![1, 2], vec![2, 1]));
        assert!(is_admissible(&p20(), &w("B1 B2 A2 A1")).unwrap());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&p21(), &w("A1 B1")).unwrap(), WordClass::Neutral);
        assert_eq!(classify(&p21(), &w("A1 U1")).unwrap(), WordClass::Negative);
        assert_eq!(classify(&p21(), &w("B1 A1 B1")).unwrap(), WordClass::Positive);
        assert_eq!(classify(&p21(), &w("B1 A2")).unwrap(), WordClass::Mixed);
        assert_eq!(classify(&p21(), &w("A1 B2")).unwrap(), WordClass::Inadmissible);
    }

    #[test]
    fn height_examples() {
        let p = p21();
        assert_eq!(height_profile(&p, &w("A1 A2 B2")).unwrap().values, vec![0, 1, 2, 1]);
        assert_eq!(height_profile(&p, &w("U1 U1")).unwrap().values, vec![0, 0, 0]);
        assert_eq!(height_profile(&p, &w("B1 B1")).unwrap().values, vec![0, -1, -2]);
        assert_eq!(height_profile(&p, &w("A1 B* B*")).unwrap().values, vec![0, 1, 0, -1]);
        assert!(height_profile(&p, &w("A* B*")).is_err());
    }

    #[test]
    fn periodic_examples() {
        let p = p21();
        assert!(periodic_admissible(&p, &w("A1 B1")).unwrap());
        assert!(!periodic_admissible(&p, &w("B1 A2")).unwrap());
        assert!(periodic_admissible(&p, &w("B1 A1")).unwrap());
        assert!(periodic_admissible(&p, &[]).is_err());
        assert_eq!(periodic_class(&p, &w("A1")).unwrap(), ErgodicClass::Alpha);
        assert_eq!(periodic_class(&p, &w("B2")).unwrap(), ErgodicClass::Beta);
        assert_eq!(periodic_class(&p, &w("A1 B1")).unwrap(), ErgodicClass::Zero);
        assert!(matches!(periodic_class(&p, &w("B1 A2")), Err(Error::Precondition(_))));
    }
}
