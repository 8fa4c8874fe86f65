//! First-principles check of the transformation law of F_{i₁…i_t}.
//!
//! F_v is rebuilt as the nested object f_{i₁}·∫_{i∞}^z(f_{i₂}·∫…), and its
//! slash is expanded using only the product rule and the integral rule
//! (∫_{i∞}^z X)|γ = ∫_{i∞}^{γ i∞} X + ∫_{i∞}^z X|γ. The result, rewritten in
//! terms of F and Π, must equal the law-based expansion exactly.

use num_traits::One;

use super::expr::{Atom, FormalExpr, PeriodSymbol, SymbolKind, Term};
use super::slash::Engine;
use super::word::Letter;
use super::FormalError;
use crate::report::VerificationReport;

pub const ANCHOR: &str = "F_v|(γ-1) = Σ_r F_{v[..r]} · ∫_{i∞}^{γ i∞} F_{v[r..]}";

/// f_{v₁}·∫_{i∞}^z N(v[1..]).
pub fn nested(v: &[u32]) -> Atom {
    if v.len() == 1 {
        Atom::Cusp(v[0])
    } else {
        Atom::product(&Atom::Cusp(v[0]), &Atom::CuspIntegral(Box::new(nested(&v[1..]))))
    }
}

/// Inverse of [`nested`].
pub fn denest(a: &Atom) -> Option<Vec<u32>> {
    match a {
        Atom::Cusp(j) => Some(vec![*j]),
        Atom::Product(fs) if fs.len() == 2 => match (&fs[0], &fs[1]) {
            (Atom::Cusp(j), Atom::CuspIntegral(x)) => {
                let mut v = vec![*j];
                v.extend(denest(x)?);
                Some(v)
            }
            _ => None,
        },
        _ => None,
    }
}

/// Rewrites nested atoms as F_v and their cusp periods as Π(v, ·).
fn to_law_form(e: &FormalExpr) -> Result<FormalExpr, FormalError> {
    let mut out = FormalExpr::zero();
    for (t, c) in e.terms() {
        let atom = match &t.atom {
            Atom::One => Atom::One,
            a => Atom::iterated(&denest(a).ok_or_else(|| {
                FormalError::NoLaw(format!("unexpected atom {a} in nested expansion"))
            })?),
        };
        let mut symbols = Vec::new();
        for s in &t.symbols {
            symbols.push(match &s.kind {
                SymbolKind::CuspPeriod(x) => {
                    let v = denest(x).ok_or_else(|| {
                        FormalError::NoLaw(format!("unexpected period of {x}"))
                    })?;
                    if v.len() == 1 {
                        PeriodSymbol { letter: s.letter, kind: SymbolKind::Basic(v[0] as i32) }
                    } else {
                        PeriodSymbol { letter: s.letter, kind: SymbolKind::Iterated(v) }
                    }
                }
                _ => s.clone(),
            });
        }
        symbols.sort();
        out.add_term(Term { atom, symbols }, c.clone());
    }
    Ok(out)
}

/// Both sides for one vector and letter: (first principles, law).
pub fn f_law_sides(
    engine: &Engine,
    v: &[u32],
    letter: Letter,
) -> Result<(FormalExpr, FormalExpr), FormalError> {
    let direct = engine.difference(&FormalExpr::atom(nested(v)), letter)?;
    let lhs = to_law_form(&direct)?;
    let rhs = engine.difference(&FormalExpr::atom(Atom::iterated(v)), letter)?;
    Ok((lhs, rhs))
}

fn all_vectors(g: u32, t: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=g).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}

/// Checks the law for every v ∈ {1..g}^t, against γ and γ⁻¹.
pub fn verify_f_law(g: u32, t: usize) -> Result<VerificationReport, FormalError> {
    if g == 0 || t == 0 {
        return Err(FormalError::NotAdmissible(format!("g={g}, t={t}")));
    }
    let count = (g as u128).pow(t as u32);
    if count > crate::index::SIZE_GUARD {
        return Err(crate::index::IndexError::TooLarge(count).into());
    }
    let engine = Engine::new(g, 2);
    let mut report = VerificationReport::new("flaw", ANCHOR).param("g", g).param("t", t);
    let gamma = Letter::gen(1);
    for v in all_vectors(g, t) {
        for l in [gamma, gamma.inverse()] {
            let (lhs, rhs) = f_law_sides(&engine, &v, l)?;
            report.exact_case(format!("{v:?} {l}"), lhs == rhs, &lhs, &rhs);
        }
    }
    Ok(report)
}

/// The order-two instance F_{1,2}|(γ−1) = ⟨f₂,γ⟩·f₁, written out.
pub fn order_two_example() -> FormalExpr {
    FormalExpr::term(
        num_rational::BigRational::one(),
        vec![PeriodSymbol::basic(2, super::word::LetterKind::Gen(1))],
        Atom::Cusp(1),
    )
}
