//! The slash action of free-group words and group-ring elements on formal
//! expressions, driven by the declared transformation laws of each atom.

use num_rational::BigRational;
use num_traits::One;

use super::expr::{Atom, FormalExpr, PeriodSymbol, SymbolKind, Term};
use super::word::{FormalWord, GroupRing, Letter, LetterKind};
use super::FormalError;

type Result<T> = std::result::Result<T, FormalError>;

/// Genus and cusp count fix which labels are cuspidal (1..=g) and which are
/// Eisenstein (g+1..=g+m−1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Engine {
    pub g: u32,
    pub m: u32,
}

impl Engine {
    pub fn new(g: u32, m: u32) -> Self {
        Engine { g, m }
    }

    fn is_eisenstein(&self, j: u32) -> bool {
        j > self.g
    }

    /// e|λ.
    pub fn slash_letter(&self, e: &FormalExpr, l: Letter) -> Result<FormalExpr> {
        e.map_atoms(|a| self.atom_slash(a, l))
    }

    /// e|(λ − 1), renormalized.
    pub fn difference(&self, e: &FormalExpr, l: Letter) -> Result<FormalExpr> {
        e.map_atoms(|a| {
            let mut img = self.atom_slash(a, l)?;
            img.sub_assign(&FormalExpr::atom(a.clone()));
            Ok(img)
        })
    }

    /// e|(λ₁ − 1)⋯(λ_s − 1), one factor at a time.
    pub fn slash_differences(&self, e: &FormalExpr, letters: &[Letter]) -> Result<FormalExpr> {
        let mut cur = e.clone();
        for &l in letters {
            if cur.is_zero() {
                break;
            }
            cur = self.difference(&cur, l)?;
        }
        Ok(cur)
    }

    pub fn slash_word(&self, e: &FormalExpr, w: &FormalWord) -> Result<FormalExpr> {
        let mut cur = e.clone();
        for &l in w.letters() {
            cur = self.slash_letter(&cur, l)?;
        }
        Ok(cur)
    }

    /// e|ω for ω = Σ c_w w, by linearity over the expanded group-ring element.
    pub fn slash_apply(&self, e: &FormalExpr, omega: &GroupRing) -> Result<FormalExpr> {
        let mut out = FormalExpr::zero();
        for (w, c) in omega.terms() {
            out.add_scaled(&self.slash_word(e, w)?, c);
        }
        Ok(out)
    }

    pub fn atom_slash(&self, a: &Atom, l: Letter) -> Result<FormalExpr> {
        let parabolic = l.kind.is_parabolic();
        match a {
            Atom::One | Atom::Cusp(_) | Atom::Poincare { .. } => Ok(FormalExpr::atom(a.clone())),
            Atom::F(v) => {
                let mut out = FormalExpr::atom(a.clone());
                if parabolic {
                    return Ok(out);
                }
                for r in 1..v.len() {
                    let head = FormalExpr::atom(Atom::iterated(&v[..r]));
                    out.add_assign(&head.mul(&self.iterated_period(&v[r..], l)?));
                }
                Ok(out)
            }
            Atom::Axiom { .. } | Atom::Abstract { .. } => {
                let mut out = FormalExpr::atom(a.clone());
                if !parabolic {
                    out.add_assign(&self.partial(a, vec![l])?);
                }
                Ok(out)
            }
            Atom::Partial(x, letters) => {
                let mut out = FormalExpr::atom(a.clone());
                if !parabolic {
                    let mut ext = letters.clone();
                    ext.push(l);
                    out.add_assign(&self.partial(x, ext)?);
                }
                Ok(out)
            }
            Atom::Integral(x) => {
                let inner = self.atom_slash(x, l)?;
                let mut out = self.period_i(&FormalExpr::atom((**x).clone()), l)?;
                out.add_assign(&integrate(&inner, Atom::Integral)?);
                Ok(out)
            }
            Atom::CuspIntegral(x) => {
                let inner = self.atom_slash(x, l)?;
                let mut out = self.period_cusp(&FormalExpr::atom((**x).clone()), l)?;
                out.add_assign(&integrate(&inner, Atom::CuspIntegral)?);
                Ok(out)
            }
            Atom::Product(fs) => {
                let mut out = FormalExpr::one();
                for f in fs {
                    out = out.mul(&self.atom_slash(f, l)?);
                }
                Ok(out)
            }
        }
    }

    /// X|(λ₁−1)⋯(λ_s−1) in normal form: parabolic letters and depth ≥ order
    /// give zero, inverse letters are rewritten away, and axiomatic atoms at
    /// full depth are replaced by their declared top value.
    pub fn partial(&self, x: &Atom, letters: Vec<Letter>) -> Result<FormalExpr> {
        if letters.iter().any(|l| l.kind.is_parabolic()) || letters.len() >= x.order() {
            return Ok(FormalExpr::zero());
        }
        if let Some(p) = letters.iter().position(|l| l.inv) {
            // (λ⁻¹ − 1) = −(λ − 1) − (λ − 1)(λ⁻¹ − 1)
            let fwd = letters[p].inverse();
            let mut a = letters.clone();
            a[p] = fwd;
            let mut b = letters[..p].to_vec();
            b.push(fwd);
            b.push(letters[p]);
            b.extend_from_slice(&letters[p + 1..]);
            let mut out = self.partial(x, a)?.neg();
            out.sub_assign(&self.partial(x, b)?);
            return Ok(out);
        }
        if let Atom::Axiom { slots, terminal } = x {
            if letters.len() == slots.len() {
                let symbols = slots
                    .iter()
                    .zip(&letters)
                    .map(|(&j, l)| PeriodSymbol::basic(j, l.kind))
                    .collect();
                return Ok(FormalExpr::term(BigRational::one(), symbols, terminal.atom()));
            }
        }
        if letters.is_empty() {
            return Ok(FormalExpr::atom(x.clone()));
        }
        Ok(FormalExpr::atom(Atom::Partial(Box::new(x.clone()), letters)))
    }

    /// ⟨f_j, λ⟩ as an expression, handling orientation and parabolic letters.
    pub fn basic_period(&self, j: i32, l: Letter) -> FormalExpr {
        if let LetterKind::Parabolic(k) = l.kind {
            let mut out = FormalExpr::zero();
            let label = j.unsigned_abs();
            if j > 0 && self.is_eisenstein(label) {
                let i = label - self.g;
                let sign = if l.inv { -BigRational::one() } else { BigRational::one() };
                if k == i {
                    out.add_assign(&eis(i).scale(&sign));
                }
                if k == self.m {
                    out.sub_assign(&eis(self.m).scale(&sign));
                }
            }
            return out;
        }
        let s = FormalExpr::symbol(PeriodSymbol::basic(j, l.kind));
        if l.inv {
            s.neg()
        } else {
            s
        }
    }

    /// Π(v, λ) = ∫_{i∞}^{λ i∞} F_v, expanded through the Chen rule for inverse letters.
    pub fn iterated_period(&self, v: &[u32], l: Letter) -> Result<FormalExpr> {
        if v.len() == 1 {
            return Ok(self.basic_period(v[0] as i32, l));
        }
        if l.kind.is_parabolic() {
            return Ok(FormalExpr::zero());
        }
        let fwd = FormalExpr::symbol(PeriodSymbol {
            letter: Some(l.kind),
            kind: SymbolKind::Iterated(v.to_vec()),
        });
        if !l.inv {
            return Ok(fwd);
        }
        // 0 = Π(v,γ) + Π(v,γ⁻¹) + Σ_r Π(v[..r],γ⁻¹)·Π(v[r..],γ)
        let mut out = fwd.neg();
        for r in 1..v.len() {
            let a = self.iterated_period(&v[..r], l)?;
            let b = self.iterated_period(&v[r..], l.inverse())?;
            out.sub_assign(&a.mul(&b));
        }
        Ok(out)
    }

    /// ∫_i^{λ i} X, linear in X.
    pub fn period_i(&self, x: &FormalExpr, l: Letter) -> Result<FormalExpr> {
        self.period_with(x, l, &|s: &Self, a: &Atom, l: Letter| s.period_i_atom(a, l))
    }

    /// ∫_{i∞}^{λ i∞} X, linear in X.
    pub fn period_cusp(&self, x: &FormalExpr, l: Letter) -> Result<FormalExpr> {
        self.period_with(x, l, &|s: &Self, a: &Atom, l: Letter| s.period_cusp_atom(a, l))
    }

    fn period_with(
        &self,
        x: &FormalExpr,
        l: Letter,
        per: &dyn Fn(&Self, &Atom, Letter) -> Result<FormalExpr>,
    ) -> Result<FormalExpr> {
        let mut out = FormalExpr::zero();
        for (t, c) in x.terms() {
            let p = per(self, &t.atom, l)?;
            let prefix = FormalExpr::term(c.clone(), t.symbols.clone(), Atom::One);
            out.add_assign(&prefix.mul(&p));
        }
        Ok(out)
    }

    fn period_i_atom(&self, a: &Atom, l: Letter) -> Result<FormalExpr> {
        match a {
            Atom::One => Err(FormalError::NoLaw(
                "the period of a weight-0 constant is not a form period".into(),
            )),
            Atom::Cusp(j) => Ok(self.basic_period(*j as i32, l)),
            _ if l.kind.is_parabolic() => Ok(FormalExpr::zero()),
            _ if l.inv => {
                // ∫_i^{γ⁻¹i} X = −∫_i^{γ i} X|γ⁻¹
                let img = self.atom_slash(a, l)?;
                Ok(self.period_i(&img, l.inverse())?.neg())
            }
            _ => Ok(FormalExpr::symbol(PeriodSymbol {
                letter: Some(l.kind),
                kind: SymbolKind::Opaque(a.clone()),
            })),
        }
    }

    fn period_cusp_atom(&self, a: &Atom, l: Letter) -> Result<FormalExpr> {
        match a {
            Atom::One => Err(FormalError::NoLaw(
                "the period of a weight-0 constant is not a form period".into(),
            )),
            Atom::Cusp(j) if self.is_eisenstein(*j) => Err(FormalError::NoLaw(format!(
                "Eisenstein label {j} has no period from the cusp"
            ))),
            Atom::Cusp(j) => Ok(self.basic_period(*j as i32, l)),
            _ if l.kind.is_parabolic() => Ok(FormalExpr::zero()),
            _ if l.inv => {
                let img = self.atom_slash(a, l)?;
                Ok(self.period_cusp(&img, l.inverse())?.neg())
            }
            _ => Ok(FormalExpr::symbol(PeriodSymbol {
                letter: Some(l.kind),
                kind: SymbolKind::CuspPeriod(a.clone()),
            })),
        }
    }
}

fn eis(k: u32) -> FormalExpr {
    FormalExpr::symbol(PeriodSymbol { letter: None, kind: SymbolKind::EisConst(k) })
}

/// Pushes an integral through a sum: ∫ Σ c·s·X = Σ c·s·∫X.
pub fn integrate(e: &FormalExpr, wrap: fn(Box<Atom>) -> Atom) -> Result<FormalExpr> {
    let mut out = FormalExpr::zero();
    for (t, c) in e.terms() {
        if t.atom == Atom::One {
            return Err(FormalError::NoLaw("cannot integrate a weight-0 constant".into()));
        }
        out.add_term(
            Term { atom: wrap(Box::new(t.atom.clone())), symbols: t.symbols.clone() },
            c.clone(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(i: u32) -> Letter {
        Letter::gen(i)
    }

    #[test]
    fn cusp_forms_are_invariant() {
        let e = Engine::new(2, 2);
        let f = FormalExpr::atom(Atom::Cusp(1));
        assert!(e.difference(&f, g(1)).unwrap().is_zero());
    }

    #[test]
    fn f_law_order_two() {
        let e = Engine::new(2, 2);
        let f = FormalExpr::atom(Atom::F(vec![1, 2]));
        let got = e.difference(&f, g(1)).unwrap();
        let want = FormalExpr::term(
            BigRational::one(),
            vec![PeriodSymbol::basic(2, LetterKind::Gen(1))],
            Atom::Cusp(1),
        );
        assert_eq!(got, want);
        assert_eq!(got.to_string(), "<f2,g1>*f1");
    }

    #[test]
    fn f_annihilated_by_order_many_factors() {
        let e = Engine::new(2, 2);
        for v in [vec![1, 2], vec![2, 1, 1], vec![1, 2, 2, 1]] {
            let t = v.len() as u32;
            let f = FormalExpr::atom(Atom::F(v));
            let letters: Vec<Letter> = (1..=t).map(g).collect();
            assert!(e.slash_differences(&f, &letters).unwrap().is_zero());
            let fewer: Vec<Letter> = (1..t).map(g).collect();
            assert!(!e.slash_differences(&f, &fewer).unwrap().is_zero());
        }
    }

    #[test]
    fn inverse_letters_cancel() {
        let e = Engine::new(2, 2);
        let x = FormalExpr::atom(Atom::product(
            &Atom::Axiom { slots: vec![-2], terminal: super::super::expr::Terminal::Cusp(1) },
            &Atom::integral(Atom::F(vec![2, 1])),
        ));
        let w = FormalWord::new([g(1), g(1).inverse()]);
        assert_eq!(e.slash_word(&x, &w).unwrap(), x);
    }

    #[test]
    fn eisenstein_parabolic_constants() {
        let e = Engine::new(1, 2);
        // f_2 = P_{a1,0} − P_{a2,0}
        let at1 = e.basic_period(2, Letter::parabolic(1));
        let at2 = e.basic_period(2, Letter::parabolic(2));
        assert_eq!(at1.to_string(), "kappa1");
        assert_eq!(at2.to_string(), "-kappa2");
        assert!(e.basic_period(1, Letter::parabolic(1)).is_zero());
    }

    #[test]
    fn efficient_difference_matches_group_ring() {
        let e = Engine::new(2, 2);
        let x = FormalExpr::atom(Atom::product(
            &Atom::Cusp(2),
            &Atom::integral(Atom::F(vec![1, 2])),
        ));
        let letters = [g(1), g(2).inverse(), g(3)];
        let fast = e.slash_differences(&x, &letters).unwrap();
        let slow = e.slash_apply(&x, &GroupRing::differences(&letters)).unwrap();
        assert_eq!(fast, slow);
    }
}
