//! Atoms, period symbols and normalized formal expressions.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::word::{Letter, LetterKind};

/// The weight-k terminal of an axiomatic atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    Cusp(u32),
    Poincare { m: u32, k: u32 },
}

impl Terminal {
    pub fn atom(&self) -> Atom {
        match self {
            Terminal::Cusp(j) => Atom::Cusp(*j),
            Terminal::Poincare { m, k } => Atom::Poincare { m: *m, k: *k },
        }
    }
}

/// A basis-form symbol. Products are flattened and sorted so that equal
/// products compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    One,
    /// f_j: a cusp form for j ≤ g, an Eisenstein combination for j > g.
    Cusp(u32),
    Poincare { m: u32, k: u32 },
    /// F_{i₁…i_t} with positive labels, t ≥ 2.
    F(Vec<u32>),
    /// A form whose only structure is its declared top value
    /// ⟨f_{s₁},γ₁⟩⋯⟨f_{s_l},γ_l⟩·terminal.
    Axiom { slots: Vec<i32>, terminal: Terminal },
    /// A form of the given order with no further structure.
    Abstract { name: String, order: u32 },
    /// X|(λ₁−1)⋯(λ_s−1) for an atom X without an explicit law at this depth.
    Partial(Box<Atom>, Vec<Letter>),
    /// ∫_i^z X(w) dw.
    Integral(Box<Atom>),
    /// ∫_{i∞}^z X(w) dw.
    CuspIntegral(Box<Atom>),
    Product(Vec<Atom>),
}

impl Atom {
    pub fn product(a: &Atom, b: &Atom) -> Atom {
        let mut factors = Vec::new();
        for x in [a, b] {
            match x {
                Atom::One => {}
                Atom::Product(fs) => factors.extend(fs.iter().cloned()),
                other => factors.push(other.clone()),
            }
        }
        Self::from_factors(factors)
    }

    pub fn from_factors(mut factors: Vec<Atom>) -> Atom {
        factors.retain(|f| *f != Atom::One);
        factors.sort();
        match factors.len() {
            0 => Atom::One,
            1 => factors.pop().expect("one factor"),
            _ => Atom::Product(factors),
        }
    }

    /// F_v, reducing to f_j at order one.
    pub fn iterated(v: &[u32]) -> Atom {
        if v.len() == 1 {
            Atom::Cusp(v[0])
        } else {
            Atom::F(v.to_vec())
        }
    }

    pub fn integral(x: Atom) -> Atom {
        Atom::Integral(Box::new(x))
    }

    /// The number of difference factors that annihilate this atom.
    pub fn order(&self) -> usize {
        match self {
            Atom::One | Atom::Cusp(_) | Atom::Poincare { .. } => 1,
            Atom::F(v) => v.len(),
            Atom::Axiom { slots, .. } => slots.len() + 1,
            Atom::Abstract { order, .. } => *order as usize,
            Atom::Partial(x, letters) => x.order().saturating_sub(letters.len()),
            Atom::Integral(x) | Atom::CuspIntegral(x) => x.order() + 1,
            Atom::Product(fs) => fs.iter().map(Atom::order).sum::<usize>() + 1 - fs.len(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::One => write!(f, "1"),
            Atom::Cusp(j) => write!(f, "f{j}"),
            Atom::Poincare { m, k } => write!(f, "P{m}_k{k}"),
            Atom::F(v) => write!(f, "F{v:?}"),
            Atom::Axiom { slots, terminal: Terminal::Cusp(j) } => {
                write!(f, "Z[")?;
                for s in slots {
                    write!(f, "{s},")?;
                }
                write!(f, "{j}]")
            }
            Atom::Axiom { slots, terminal: Terminal::Poincare { m, .. } } => {
                write!(f, "Y{slots:?};{m}")
            }
            Atom::Abstract { name, .. } => write!(f, "{name}"),
            Atom::Partial(x, letters) => {
                write!(f, "{x}|")?;
                for l in letters {
                    write!(f, "({l}-1)")?;
                }
                Ok(())
            }
            Atom::Integral(x) => write!(f, "Int_i[{x}]"),
            Atom::CuspIntegral(x) => write!(f, "Int_inf[{x}]"),
            Atom::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    /// ⟨f_j, λ⟩, complex-conjugated when j < 0.
    Basic(i32),
    /// ∫_{i∞}^{λ i∞} F_v, for |v| ≥ 2.
    Iterated(Vec<u32>),
    /// ∫_i^{λ i} X.
    Opaque(Atom),
    /// ∫_{i∞}^{λ i∞} X.
    CuspPeriod(Atom),
    /// The period of the Eisenstein series at cusp k along its own parabolic.
    EisConst(u32),
}

/// A scalar attached to one letter. Sorted by letter, then kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodSymbol {
    pub letter: Option<LetterKind>,
    pub kind: SymbolKind,
}

impl PeriodSymbol {
    pub fn basic(label: i32, letter: LetterKind) -> Self {
        PeriodSymbol { letter: Some(letter), kind: SymbolKind::Basic(label) }
    }
}

impl fmt::Display for PeriodSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.letter.map(|l| l.to_string()).unwrap_or_default();
        match &self.kind {
            SymbolKind::Basic(j) if *j < 0 => write!(f, "conj<f{},{l}>", -j),
            SymbolKind::Basic(j) => write!(f, "<f{j},{l}>"),
            SymbolKind::Iterated(v) => write!(f, "Pi{v:?}({l})"),
            SymbolKind::Opaque(x) => write!(f, "Per_i[{x}]({l})"),
            SymbolKind::CuspPeriod(x) => write!(f, "Per_inf[{x}]({l})"),
            SymbolKind::EisConst(k) => write!(f, "kappa{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub atom: Atom,
    pub symbols: Vec<PeriodSymbol>,
}

/// A finite sum of terms with nonzero rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalExpr(BTreeMap<Term, BigRational>);

impl FormalExpr {
    pub fn zero() -> Self {
        FormalExpr(BTreeMap::new())
    }

    pub fn atom(a: Atom) -> Self {
        Self::term(BigRational::one(), Vec::new(), a)
    }

    pub fn one() -> Self {
        Self::atom(Atom::One)
    }

    pub fn symbol(s: PeriodSymbol) -> Self {
        Self::term(BigRational::one(), vec![s], Atom::One)
    }

    pub fn term(c: BigRational, mut symbols: Vec<PeriodSymbol>, atom: Atom) -> Self {
        let mut e = Self::zero();
        symbols.sort();
        e.add_term(Term { atom, symbols }, c);
        e
    }

    pub fn add_term(&mut self, term: Term, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(term) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &FormalExpr) {
        for (t, c) in &other.0 {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &FormalExpr, s: &BigRational) {
        for (t, c) in &other.0 {
            self.add_term(t.clone(), c * s);
        }
    }

    pub fn sub_assign(&mut self, other: &FormalExpr) {
        for (t, c) in &other.0 {
            self.add_term(t.clone(), -c.clone());
        }
    }

    pub fn add(&self, other: &FormalExpr) -> FormalExpr {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &FormalExpr) -> FormalExpr {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn scale(&self, s: &BigRational) -> FormalExpr {
        let mut out = FormalExpr::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn neg(&self) -> FormalExpr {
        self.scale(&-BigRational::one())
    }

    pub fn mul(&self, other: &FormalExpr) -> FormalExpr {
        let mut out = FormalExpr::zero();
        for (t1, c1) in &self.0 {
            for (t2, c2) in &other.0 {
                let mut symbols: Vec<PeriodSymbol> =
                    t1.symbols.iter().chain(t2.symbols.iter()).cloned().collect();
                symbols.sort();
                out.add_term(
                    Term { atom: Atom::product(&t1.atom, &t2.atom), symbols },
                    c1 * c2,
                );
            }
        }
        out
    }

    /// Replaces every atom by `f(atom)`, keeping coefficients and symbols.
    pub fn map_atoms<E>(
        &self,
        mut f: impl FnMut(&Atom) -> Result<FormalExpr, E>,
    ) -> Result<FormalExpr, E> {
        let mut out = FormalExpr::zero();
        for (t, c) in &self.0 {
            let image = f(&t.atom)?;
            let prefix = FormalExpr::term(c.clone(), t.symbols.clone(), Atom::One);
            out.add_assign(&prefix.mul(&image));
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &BigRational)> {
        self.0.iter()
    }

    pub fn coefficient(&self, t: &Term) -> BigRational {
        self.0.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The first `n` terms, for report excerpts.
    pub fn excerpt(&self, n: usize) -> String {
        let mut s = String::new();
        for (i, (t, c)) in self.0.iter().enumerate() {
            if i == n {
                s.push_str(&format!(" + ... ({} terms)", self.0.len()));
                break;
            }
            s.push_str(&fmt_term(i == 0, t, c));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

fn fmt_term(first: bool, t: &Term, c: &BigRational) -> String {
    let mut s = String::new();
    if c.is_negative() {
        s.push_str(if first { "-" } else { " - " });
    } else if !first {
        s.push_str(" + ");
    }
    let a = c.abs();
    let mut parts: Vec<String> = Vec::new();
    if !a.is_one() {
        parts.push(a.to_string());
    }
    parts.extend(t.symbols.iter().map(|x| x.to_string()));
    if t.atom != Atom::One || parts.is_empty() {
        parts.push(t.atom.to_string());
    }
    s.push_str(&parts.join("*"));
    s
}

impl fmt::Display for FormalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.0.iter().enumerate() {
            write!(f, "{}", fmt_term(i == 0, t, c))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_are_canonical() {
        let a = Atom::Cusp(2);
        let b = Atom::integral(Atom::Cusp(1));
        assert_eq!(Atom::product(&a, &b), Atom::product(&b, &a));
        assert_eq!(Atom::product(&Atom::One, &a), a);
        let ab = Atom::product(&a, &b);
        let abc = Atom::product(&ab, &Atom::Cusp(1));
        assert_eq!(abc, Atom::product(&Atom::Cusp(1), &ab));
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let x = FormalExpr::atom(Atom::Cusp(1));
        let two = BigRational::from_integer(2.into());
        assert_eq!(x.add(&x), x.scale(&two));
        assert!(x.sub(&x).is_zero());
        assert_eq!(x.to_string(), "f1");
    }

    #[test]
    fn orders() {
        assert_eq!(Atom::F(vec![1, 2, 1]).order(), 3);
        let prod = Atom::product(&Atom::Cusp(1), &Atom::integral(Atom::F(vec![1, 1])));
        assert_eq!(prod.order(), 3);
    }
}
