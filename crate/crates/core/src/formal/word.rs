//! Free-group words on abstract generators and parabolic letters, and the
//! rational group ring they span.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// A letter of the free group, without orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterKind {
    /// γ_i, an arbitrary element of Γ.
    Gen(u32),
    /// π_𝔞ₖ, the parabolic generator of the k-th cusp (1-based).
    Parabolic(u32),
}

impl LetterKind {
    pub fn is_parabolic(&self) -> bool {
        matches!(self, LetterKind::Parabolic(_))
    }
}

impl fmt::Display for LetterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LetterKind::Gen(i) => write!(f, "g{i}"),
            LetterKind::Parabolic(k) => write!(f, "p{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub kind: LetterKind,
    pub inv: bool,
}

impl Letter {
    pub fn gen(i: u32) -> Self {
        Letter { kind: LetterKind::Gen(i), inv: false }
    }

    pub fn parabolic(k: u32) -> Self {
        Letter { kind: LetterKind::Parabolic(k), inv: false }
    }

    pub fn inverse(self) -> Self {
        Letter { kind: self.kind, inv: !self.inv }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inv {
            write!(f, "{}^-1", self.kind)
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

/// A freely reduced word. Construction always reduces, so equality is syntactic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormalWord(Vec<Letter>);

impl FormalWord {
    pub fn identity() -> Self {
        FormalWord(Vec::new())
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FormalWord(out)
    }

    pub fn letter(l: Letter) -> Self {
        FormalWord(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &FormalWord) -> FormalWord {
        FormalWord::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> FormalWord {
        FormalWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }
}

impl fmt::Display for FormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// An element of ℚ[F], the rational group ring of the free group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRing(BTreeMap<FormalWord, BigRational>);

impl GroupRing {
    pub fn zero() -> Self {
        GroupRing(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::word(FormalWord::identity())
    }

    pub fn word(w: FormalWord) -> Self {
        let mut m = BTreeMap::new();
        m.insert(w, BigRational::one());
        GroupRing(m)
    }

    /// The difference λ − 1.
    pub fn difference(l: Letter) -> Self {
        let mut r = Self::word(FormalWord::letter(l));
        r.add_term(FormalWord::identity(), -BigRational::one());
        r
    }

    /// (λ₁ − 1)(λ₂ − 1)⋯(λ_s − 1).
    pub fn differences(letters: &[Letter]) -> Self {
        letters
            .iter()
            .fold(Self::one(), |acc, &l| acc.mul(&Self::difference(l)))
    }

    pub fn add_term(&mut self, w: FormalWord, c: BigRational) {
        let e = self.0.entry(w).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &GroupRing) -> GroupRing {
        let mut out = self.clone();
        for (w, c) in &other.0 {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &GroupRing) -> GroupRing {
        let mut out = GroupRing::zero();
        for (w1, c1) in &self.0 {
            for (w2, c2) in &other.0 {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormalWord, &BigRational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}
