//! Alphabets, symbols and words of the (M,N) Dyck-Motzkin shift and of the
//! two collapsed full shifts.
//!
//! Text encoding: `A1..AM` are left brackets, `B1..BM` right brackets,
//! `U1..UN` units, `A*` the collapsed left bracket of the beta-side full
//! shift and `B*` the collapsed right bracket of the alpha-side full shift.
//! Words are whitespace-separated tokens.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Number of bracket pairs `m` and of unit symbols `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlphabetParams {
    pub m: u16,
    pub n: u16,
}

impl AlphabetParams {
    pub fn new(m: u16, n: u16) -> Result<Self> {
        if m < 2 {
            return invalid(format!("M must be at least 2, got {m}"));
        }
        Ok(Self { m, n })
    }

    /// Symbols of `ambient` in canonical order.
    pub fn alphabet(&self, ambient: Ambient) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(self.alphabet_size(ambient));
        if ambient == Ambient::SigmaBeta {
            out.push(Symbol::CollapsedLeft);
        } else {
            out.extend((1..=self.m).map(Symbol::Left));
        }
        out.extend((1..=self.n).map(Symbol::Unit));
        if ambient == Ambient::SigmaAlpha {
            out.push(Symbol::CollapsedRight);
        } else {
            out.extend((1..=self.m).map(Symbol::Right));
        }
        out
    }

    pub fn alphabet_size(&self, ambient: Ambient) -> usize {
        let (m, n) = (self.m as usize, self.n as usize);
        match ambient {
            Ambient::SigmaD => 2 * m + n,
            Ambient::SigmaAlpha | Ambient::SigmaBeta => m + n + 1,
        }
    }

    pub fn contains(&self, ambient: Ambient, s: Symbol) -> bool {
        let in_range = |k: u16, hi: u16| (1..=hi).contains(&k);
        match (ambient, s) {
            (_, Symbol::Unit(k)) => in_range(k, self.n),
            (Ambient::SigmaD, Symbol::Left(k)) | (Ambient::SigmaD, Symbol::Right(k)) => {
                in_range(k, self.m)
            }
            (Ambient::SigmaAlpha, Symbol::Left(k)) => in_range(k, self.m),
            (Ambient::SigmaAlpha, Symbol::CollapsedRight) => true,
            (Ambient::SigmaBeta, Symbol::Right(k)) => in_range(k, self.m),
            (Ambient::SigmaBeta, Symbol::CollapsedLeft) => true,
            _ => false,
        }
    }

    /// Position of `s` in the canonical alphabet of `ambient`.
    pub fn index_of(&self, ambient: Ambient, s: Symbol) -> Option<usize> {
        if !self.contains(ambient, s) {
            return None;
        }
        let (m, n) = (self.m as usize, self.n as usize);
        let lead = match ambient {
            Ambient::SigmaBeta => 1,
            _ => m,
        };
        Some(match s {
            Symbol::CollapsedLeft => 0,
            Symbol::Left(k) => k as usize - 1,
            Symbol::Unit(l) => lead + l as usize - 1,
            Symbol::Right(k) => lead + n + k as usize - 1,
            Symbol::CollapsedRight => lead + n,
        })
    }

    pub fn check_word(&self, ambient: Ambient, w: &[Symbol]) -> Result<()> {
        match w.iter().find(|s| !self.contains(ambient, **s)) {
            Some(s) => invalid(format!("symbol {s} is not in the {ambient} alphabet for {self}")),
            None => Ok(()),
        }
    }

    /// log(M+N+1), the common entropy of the collapsed full shifts.
    pub fn full_shift_entropy(&self) -> f64 {
        ((self.m + self.n + 1) as f64).ln()
    }
}

impl fmt::Display for AlphabetParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(M={}, N={})", self.m, self.n)
    }
}

/// Which shift space a word or measure lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    SigmaD,
    SigmaAlpha,
    SigmaBeta,
}

impl Ambient {
    pub fn collapsed(gamma: Gamma) -> Self {
        match gamma {
            Gamma::Alpha => Ambient::SigmaAlpha,
            Gamma::Beta => Ambient::SigmaBeta,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ambient::SigmaD => "sigma_d",
            Ambient::SigmaAlpha => "sigma_alpha",
            Ambient::SigmaBeta => "sigma_beta",
        })
    }
}

impl FromStr for Ambient {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigma_d" | "d" => Ok(Ambient::SigmaD),
            "sigma_alpha" | "alpha" => Ok(Ambient::SigmaAlpha),
            "sigma_beta" | "beta" => Ok(Ambient::SigmaBeta),
            _ => invalid(format!("unknown ambient {s:?}")),
        }
    }
}

/// Side of the Krieger embedding: alpha collapses right brackets, beta
/// collapses left brackets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    Alpha,
    Beta,
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gamma::Alpha => "alpha",
            Gamma::Beta => "beta",
        })
    }
}

impl FromStr for Gamma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" | "a" => Ok(Gamma::Alpha),
            "beta" | "b" => Ok(Gamma::Beta),
            _ => invalid(format!("unknown gamma {s:?}")),
        }
    }
}

/// A symbol of any of the three alphabets. The derived order is the
/// canonical order `A* < A1..AM < U1..UN < B1..BM < B*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    CollapsedLeft,
    Left(u16),
    Unit(u16),
    Right(u16),
    CollapsedRight,
}

impl Symbol {
    /// Height increment: +1 for left brackets, 0 for units, -1 for right
    /// brackets (collapsed or not).
    pub fn step(self) -> i64 {
        match self {
            Symbol::CollapsedLeft | Symbol::Left(_) => 1,
            Symbol::Unit(_) => 0,
            Symbol::Right(_) | Symbol::CollapsedRight => -1,
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Symbol::Left(_) | Symbol::CollapsedLeft)
    }

    pub fn is_right(self) -> bool {
        matches!(self, Symbol::Right(_) | Symbol::CollapsedRight)
    }

    pub fn is_collapsed(self) -> bool {
        matches!(self, Symbol::CollapsedLeft | Symbol::CollapsedRight)
    }

    pub fn bracket_index(self) -> Option<u16> {
        match self {
            Symbol::Left(k) | Symbol::Right(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::CollapsedLeft => f.write_str("A*"),
            Symbol::Left(k) => write!(f, "A{k}"),
            Symbol::Unit(l) => write!(f, "U{l}"),
            Symbol::Right(k) => write!(f, "B{k}"),
            Symbol::CollapsedRight => f.write_str("B*"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;
    fn from_str(tok: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad symbol token {tok:?}"));
        let mut chars = tok.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        if rest == "*" {
            return match head {
                'A' | 'a' => Ok(Symbol::CollapsedLeft),
                'B' | 'b' => Ok(Symbol::CollapsedRight),
                _ => Err(bad()),
            };
        }
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let k: u16 = rest.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match head {
            'A' | 'a' => Ok(Symbol::Left(k)),
            'B' | 'b' => Ok(Symbol::Right(k)),
            'U' | 'u' => Ok(Symbol::Unit(k)),
            _ => Err(bad()),
        }
    }
}

/// A finite word. The empty word is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses tokens without checking them against an alphabet.
    pub fn parse(text: &str) -> Result<Self> {
        text.split_whitespace()
            .map(Symbol::from_str)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Parses and checks every token against the `ambient` alphabet.
    pub fn parse_in(text: &str, params: &AlphabetParams, ambient: Ambient) -> Result<Self> {
        let w = Self::parse(text)?;
        params.check_word(ambient, &w)?;
        Ok(w)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn concat(&self, other: &[Symbol]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    /// Total height change over the word.
    pub fn drift(&self) -> i64 {
        self.0.iter().map(|s| s.step()).sum()
    }
}

impl Deref for Word {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

impl std::borrow::Borrow<[Symbol]> for Word {
    fn borrow(&self) -> &[Symbol] {
        &self.0
    }
}

/// Symbols and words serialize as their text tokens.
macro_rules! serde_as_text {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_text!(Symbol);
serde_as_text!(Word);

/// Shorthand used throughout the tests: `w("A1 B1")`.
pub fn w(text: &str) -> Word {
    Word::parse(text).expect("valid word literal")
}
