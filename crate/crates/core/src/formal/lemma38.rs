//! The ledgers S, R and a as commutative polynomials, and the identity
//! R_v = Σ_{j=0}^{t−2} S_{v[..j]} · a_{v[j..]}.
//!
//! J_u stands for conj(∫_z^{i∞} F_u) and a_u for the residue coefficient;
//! both are free commuting symbols here.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::report::VerificationReport;

pub const ANCHOR: &str = "R_v = Σ_j S_{v[..j]} a_{v[j..]}, with R from its recursion";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LedgerSymbol {
    J(Vec<u32>),
    A(Vec<u32>),
}

/// Integer polynomial in commuting ledger symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(BTreeMap<Vec<LedgerSymbol>, BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Self {
        let mut m = BTreeMap::new();
        m.insert(Vec::new(), BigInt::one());
        Poly(m)
    }

    pub fn symbol(s: LedgerSymbol) -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![s], BigInt::one());
        Poly(m)
    }

    fn add_mono(&mut self, mono: Vec<LedgerSymbol>, c: BigInt) {
        let e = self.0.entry(mono).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_mono(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m: Vec<LedgerSymbol> = m1.iter().chain(m2).cloned().collect();
                m.sort();
                out.add_mono(m, c1 * c2);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| {
                let mut s: Vec<String> = Vec::new();
                if !c.is_one() || m.is_empty() {
                    s.push(c.to_string());
                }
                for x in m {
                    s.push(match x {
                        LedgerSymbol::J(v) => format!("J{v:?}"),
                        LedgerSymbol::A(v) => format!("a{v:?}"),
                    });
                }
                s.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Default)]
pub struct Ledger {
    s: HashMap<Vec<u32>, Poly>,
    r: HashMap<Vec<u32>, Poly>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    fn j(v: &[u32]) -> Poly {
        Poly::symbol(LedgerSymbol::J(v.to_vec()))
    }

    fn a(v: &[u32]) -> Poly {
        Poly::symbol(LedgerSymbol::A(v.to_vec()))
    }

    /// S_∅ = 1, S_v = Σ_{r=1}^{t} J_{v[..r]} S_{v[r..]}.
    pub fn s(&mut self, v: &[u32]) -> Poly {
        if v.is_empty() {
            return Poly::one();
        }
        if let Some(p) = self.s.get(v) {
            return p.clone();
        }
        let mut out = Poly::zero();
        for r in 1..=v.len() {
            out = out.add(&Self::j(&v[..r]).mul(&self.s(&v[r..])));
        }
        self.s.insert(v.to_vec(), out.clone());
        out
    }

    /// R_v = a_v + Σ_{r=1}^{t−2} J_{v[..r]} R_{v[r..]}, for t ≥ 2.
    pub fn r(&mut self, v: &[u32]) -> Poly {
        assert!(v.len() >= 2, "R is defined from order two");
        if let Some(p) = self.r.get(v) {
            return p.clone();
        }
        let mut out = Self::a(v);
        for r in 1..=v.len().saturating_sub(2) {
            out = out.add(&Self::j(&v[..r]).mul(&self.r(&v[r..])));
        }
        self.r.insert(v.to_vec(), out.clone());
        out
    }

    /// Σ_{j=0}^{t−2} S_{v[..j]} a_{v[j..]}.
    pub fn closed_form(&mut self, v: &[u32]) -> Poly {
        let mut out = Poly::zero();
        for j in 0..=v.len() - 2 {
            out = out.add(&self.s(&v[..j]).mul(&Self::a(&v[j..])));
        }
        out
    }
}

/// Checks the identity for every v ∈ {1..g}^t.
pub fn verify_lemma_3_8(g: u32, t: usize) -> VerificationReport {
    let mut report = VerificationReport::new("lemma38", ANCHOR).param("g", g).param("t", t);
    if t < 2 || g == 0 {
        return report;
    }
    let mut ledger = Ledger::new();
    let mut vectors = vec![Vec::new()];
    for _ in 0..t {
        vectors = vectors
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (1..=g).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    for v in vectors {
        let lhs = ledger.r(&v);
        let rhs = ledger.closed_form(&v);
        report.exact_case(format!("{v:?}"), lhs == rhs, &lhs, &rhs);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_is_a() {
        let mut l = Ledger::new();
        assert_eq!(l.r(&[1, 2]), Ledger::a(&[1, 2]));
    }

    #[test]
    fn order_three_expansion() {
        let mut l = Ledger::new();
        let want = Ledger::a(&[1, 2, 3]).add(&Ledger::j(&[1]).mul(&Ledger::a(&[2, 3])));
        assert_eq!(l.r(&[1, 2, 3]), want);
    }

    #[test]
    fn identity_through_order_five() {
        for t in 2..=5 {
            for g in 1..=2 {
                let r = verify_lemma_3_8(g, t);
                assert!(r.passed, "{}", r.to_text());
            }
        }
    }
}
