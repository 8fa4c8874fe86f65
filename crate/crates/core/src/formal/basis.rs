//! Recursive construction of the basis forms 𝒵_v (v ∈ I) and 𝒴_{v;m}
//! (v ∈ I′), with correction terms found by exact linear solving.
//!
//! Every basis form is tracked by its top value: the image under
//! (γ₁−1)⋯(γ_s−1), a combination of monomials ⟨f_{s₁},γ₁⟩⋯⟨f_{s_s},γ_s⟩·terminal.
//! Top values of products come from the shuffle expansion; the expanded
//! expression is then re-verified independently by the slash engine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::{Atom, FormalExpr, SymbolKind, Terminal};
use super::slash::{integrate, Engine};
use super::word::{Letter, LetterKind};
use super::FormalError;
use crate::index::{enumerate_index_vectors, no_forbidden_pair, IndexSet};
use crate::report::VerificationReport;
use crate::shuffle::enumerate_shuffles;

type Result<T> = std::result::Result<T, FormalError>;

pub const Z_ANCHOR: &str = "𝒵_v|(γ₁-1)⋯(γ_{t-1}-1) = ⟨f_{v₁},γ₁⟩⋯⟨f_{v_{t-1}},γ_{t-1}⟩ f_{v_t} + 𝒜";
pub const Y_ANCHOR: &str = "𝒴_{v;m}|(γ₁-1)⋯(γ_t-1) = ⟨f_{v₁},γ₁⟩⋯⟨f_{v_t},γ_t⟩ P_m + 𝒜_k";

/// One top-value monomial: slot labels in letter order, then the terminal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub slots: Vec<i32>,
    pub terminal: Terminal,
}

impl Monomial {
    /// Membership in the residual space: some adjacent pair (−1, 1) among the
    /// slots, with a cusp terminal counted as a final slot.
    pub fn in_residual_space(&self) -> bool {
        let mut labels = self.slots.clone();
        if let Terminal::Cusp(j) = self.terminal {
            labels.push(j as i32);
        }
        !no_forbidden_pair(&labels)
    }

    /// The expression ⟨f_{s₁},γ₁⟩⋯⟨f_{s_l},γ_l⟩·terminal.
    pub fn to_expr(&self) -> FormalExpr {
        let symbols = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, &s)| super::expr::PeriodSymbol::basic(s, LetterKind::Gen(i as u32 + 1)))
            .collect();
        FormalExpr::term(BigRational::one(), symbols, self.terminal.atom())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.slots {
            write!(f, "<{s}>")?;
        }
        write!(f, "{}", self.terminal.atom())
    }
}

pub type TopValue = BTreeMap<Monomial, BigRational>;

fn top_to_string(top: &TopValue) -> String {
    let parts: Vec<String> = top.iter().map(|(m, c)| format!("{c}*{m}")).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKey {
    Z(Vec<i32>),
    Y(Vec<i32>, u32),
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i32]| v.iter().map(i32::to_string).collect::<Vec<_>>().join(",");
        match self {
            BasisKey::Z(v) => write!(f, "Z({})", join(v)),
            BasisKey::Y(v, m) => write!(f, "Y({};{m})", join(v)),
        }
    }
}

/// How a basis form is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    /// f_j, P_m, or an axiomatic atom.
    Atom(Atom),
    /// factor · ∫_i^z 𝒵_head − Σ c·(corrections).
    Seeded { factor: BasisKey, head: Vec<i32>, corrections: Vec<(BigRational, BasisKey)> },
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub recipe: Recipe,
    pub top: TopValue,
    pub expanded: FormalExpr,
}

/// Memoized constructions over a fixed genus and weight.
pub struct BasisEnv {
    pub g: u32,
    pub weight: u32,
    entries: BTreeMap<BasisKey, Construction>,
    in_progress: BTreeSet<BasisKey>,
}

impl BasisEnv {
    pub fn new(g: u32, weight: u32) -> Self {
        BasisEnv { g, weight, entries: BTreeMap::new(), in_progress: BTreeSet::new() }
    }

    pub fn engine(&self) -> Engine {
        Engine::new(self.g, 2)
    }

    pub fn get(&self, key: &BasisKey) -> Option<&Construction> {
        self.entries.get(key)
    }

    fn check_labels(&self, v: &[i32]) -> Result<()> {
        if v.iter().any(|&x| x == 0 || x.unsigned_abs() > self.g) {
            return Err(FormalError::NotAdmissible(format!("{v:?} for genus {}", self.g)));
        }
        Ok(())
    }

    /// Builds (or fetches) 𝒵_v for v ∈ I.
    pub fn z(&mut self, v: &[i32]) -> Result<&Construction> {
        let key = BasisKey::Z(v.to_vec());
        self.ensure(&key)?;
        Ok(&self.entries[&key])
    }

    /// Builds (or fetches) 𝒴_{v;m} for v ∈ I′.
    pub fn y(&mut self, v: &[i32], m: u32) -> Result<&Construction> {
        let key = BasisKey::Y(v.to_vec(), m);
        self.ensure(&key)?;
        Ok(&self.entries[&key])
    }

    fn ensure(&mut self, key: &BasisKey) -> Result<()> {
        if self.entries.contains_key(key) {
            return Ok(());
        }
        if !self.in_progress.insert(key.clone()) {
            return Err(FormalError::Unsolvable(format!("{key} depends on itself")));
        }
        let built = self.build(key);
        self.in_progress.remove(key);
        let c = built?;
        self.entries.insert(key.clone(), c);
        Ok(())
    }

    fn atom_construction(atom: Atom, top: Monomial) -> Construction {
        let mut t = TopValue::new();
        t.insert(top, BigRational::one());
        Construction { recipe: Recipe::Atom(atom.clone()), top: t, expanded: FormalExpr::atom(atom) }
    }

    fn build(&mut self, key: &BasisKey) -> Result<Construction> {
        match key {
            BasisKey::Z(v) => {
                self.check_labels(v)?;
                if v.is_empty() || v[v.len() - 1] < 0 || !no_forbidden_pair(v) {
                    return Err(FormalError::NotAdmissible(format!("{key} (not in I)")));
                }
                let t = v.len();
                let last = v[t - 1] as u32;
                if t == 1 {
                    let top = Monomial { slots: vec![], terminal: Terminal::Cusp(last) };
                    return Ok(Self::atom_construction(Atom::Cusp(last), top));
                }
                let prefix = &v[..t - 1];
                match prefix.iter().rposition(|&x| x > 0) {
                    None => {
                        let terminal = Terminal::Cusp(last);
                        let atom = Atom::Axiom { slots: prefix.to_vec(), terminal: terminal.clone() };
                        let top = Monomial { slots: prefix.to_vec(), terminal };
                        Ok(Self::atom_construction(atom, top))
                    }
                    Some(j) => {
                        let factor = BasisKey::Z(v[j + 1..].to_vec());
                        let leading = Monomial { slots: prefix.to_vec(), terminal: Terminal::Cusp(last) };
                        self.seeded(key, factor, v[..=j].to_vec(), leading)
                    }
                }
            }
            BasisKey::Y(v, m) => {
                self.check_labels(v)?;
                if !no_forbidden_pair(v) {
                    return Err(FormalError::NotAdmissible(format!("{key} (not in I')")));
                }
                let terminal = Terminal::Poincare { m: *m, k: self.weight };
                match v.iter().rposition(|&x| x > 0) {
                    None => {
                        let atom = if v.is_empty() {
                            terminal.atom()
                        } else {
                            Atom::Axiom { slots: v.clone(), terminal: terminal.clone() }
                        };
                        let top = Monomial { slots: v.clone(), terminal };
                        Ok(Self::atom_construction(atom, top))
                    }
                    Some(j) => {
                        let factor = BasisKey::Y(v[j + 1..].to_vec(), *m);
                        let leading = Monomial { slots: v.clone(), terminal };
                        self.seeded(key, factor, v[..=j].to_vec(), leading)
                    }
                }
            }
        }
    }

    /// factor·∫𝒵_head, corrected so that every non-leading monomial of the
    /// top value lies in the residual space.
    fn seeded(
        &mut self,
        key: &BasisKey,
        factor: BasisKey,
        head: Vec<i32>,
        leading: Monomial,
    ) -> Result<Construction> {
        self.ensure(&factor)?;
        self.ensure(&BasisKey::Z(head.clone()))?;
        let ftop = self.entries[&factor].top.clone();
        let htop = integral_top(&self.entries[&BasisKey::Z(head.clone())].top)?;
        let seed_top = shuffle_top(&ftop, &htop)?;

        // Close the set of unknowns under the tops of the corrections.
        let mut unknowns: Vec<Monomial> = Vec::new();
        let mut queue: Vec<Monomial> = bad_monomials(&seed_top, &leading);
        while let Some(x) = queue.pop() {
            if unknowns.contains(&x) {
                continue;
            }
            let xk = self.key_for(key, &x);
            self.ensure(&xk)?;
            queue.extend(bad_monomials(&self.entries[&xk].top, &leading));
            unknowns.push(x);
        }
        unknowns.sort();

        let n = unknowns.len();
        let mut matrix = vec![vec![BigRational::zero(); n + 1]; n];
        for (row, x) in unknowns.iter().enumerate() {
            for (col, y) in unknowns.iter().enumerate() {
                let top = &self.entries[&self.key_for(key, y)].top;
                matrix[row][col] = top.get(x).cloned().unwrap_or_else(BigRational::zero);
            }
            matrix[row][n] = seed_top.get(x).cloned().unwrap_or_else(BigRational::zero);
        }
        let coeffs = solve(matrix).ok_or_else(|| FormalError::Unsolvable(key.to_string()))?;

        let mut top = seed_top;
        let mut corrections = Vec::new();
        for (x, c) in unknowns.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let xk = self.key_for(key, x);
            for (mono, d) in &self.entries[&xk].top {
                add_to(&mut top, mono.clone(), -(&c * d));
            }
            corrections.push((c, xk));
        }

        let head_expr = &self.entries[&BasisKey::Z(head.clone())].expanded;
        let mut expanded = self.entries[&factor].expanded.mul(&integrate(head_expr, Atom::Integral)?);
        for (c, xk) in &corrections {
            expanded.sub_assign(&self.entries[xk].expanded.scale(c));
        }
        Ok(Construction { recipe: Recipe::Seeded { factor, head, corrections }, top, expanded })
    }

    /// The basis form whose leading monomial is x, in the family of `like`.
    fn key_for(&self, like: &BasisKey, x: &Monomial) -> BasisKey {
        match (like, &x.terminal) {
            (BasisKey::Z(_), Terminal::Cusp(j)) => {
                let mut v = x.slots.clone();
                v.push(*j as i32);
                BasisKey::Z(v)
            }
            (_, Terminal::Poincare { m, .. }) => BasisKey::Y(x.slots.clone(), *m),
            (BasisKey::Y(_, m), Terminal::Cusp(_)) => BasisKey::Y(x.slots.clone(), *m),
        }
    }
}

fn add_to(top: &mut TopValue, m: Monomial, c: BigRational) {
    let e = top.entry(m.clone()).or_insert_with(BigRational::zero);
    *e += c;
    if e.is_zero() {
        top.remove(&m);
    }
}

fn bad_monomials(top: &TopValue, leading: &Monomial) -> Vec<Monomial> {
    top.keys().filter(|m| *m != leading && !m.in_residual_space()).cloned().collect()
}

/// Top value of ∫_i^z X for a weight-2 form X: the terminal becomes the last slot.
fn integral_top(top: &TopValue) -> Result<Vec<(Vec<i32>, BigRational)>> {
    top.iter()
        .map(|(m, c)| match m.terminal {
            Terminal::Cusp(j) => {
                let mut s = m.slots.clone();
                s.push(j as i32);
                Ok((s, c.clone()))
            }
            Terminal::Poincare { .. } => {
                Err(FormalError::NoLaw("antiderivative of a weight-k terminal".into()))
            }
        })
        .collect()
}

/// Top value of F·G from the shuffle expansion, F carrying the terminal.
fn shuffle_top(ftop: &TopValue, gtop: &[(Vec<i32>, BigRational)]) -> Result<TopValue> {
    let mut out = TopValue::new();
    for (fm, fc) in ftop {
        for (gs, gc) in gtop {
            let r = fm.slots.len() + 1;
            let t = fm.slots.len() + gs.len() + 1;
            let shuffles = enumerate_shuffles(r, t)
                .map_err(|e| FormalError::NoLaw(format!("shuffle expansion: {e}")))?;
            for sh in shuffles {
                let mut slots = vec![0; t - 1];
                for (i, &p) in sh.phi.iter().enumerate() {
                    slots[p - 1] = fm.slots[i];
                }
                for (i, &p) in sh.psi.iter().enumerate() {
                    slots[p - 1] = gs[i];
                }
                add_to(&mut out, Monomial { slots, terminal: fm.terminal.clone() }, fc * gc);
            }
        }
    }
    Ok(out)
}

/// Gauss–Jordan elimination on an augmented n×(n+1) matrix.
fn solve(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Reads a fully differenced expression back as a top value. Every term must
/// be one basic period per letter γ₁…γ_s times a terminal atom.
pub fn read_top(e: &FormalExpr, s: usize) -> std::result::Result<TopValue, String> {
    let mut out = TopValue::new();
    for (term, c) in e.terms() {
        let terminal = match &term.atom {
            Atom::Cusp(j) => Terminal::Cusp(*j),
            Atom::Poincare { m, k } => Terminal::Poincare { m: *m, k: *k },
            a => return Err(format!("unexpected atom {a}")),
        };
        if term.symbols.len() != s {
            return Err(format!("term with {} period factors, expected {s}", term.symbols.len()));
        }
        let mut slots = Vec::with_capacity(s);
        for (i, sym) in term.symbols.iter().enumerate() {
            match (&sym.letter, &sym.kind) {
                (Some(LetterKind::Gen(l)), SymbolKind::Basic(j)) if *l as usize == i + 1 => slots.push(*j),
                _ => return Err(format!("unexpected period factor {sym}")),
            }
        }
        add_to(&mut out, Monomial { slots, terminal }, c.clone());
    }
    Ok(out)
}

/// The outcome of checking one construction with the slash engine.
#[derive(Clone, Debug)]
pub struct Check {
    pub leading_ok: bool,
    pub residual_ok: bool,
    pub matches_recorded_top: bool,
    pub annihilated: bool,
    pub computed: String,
    pub expected: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.leading_ok && self.residual_ok && self.matches_recorded_top && self.annihilated
    }
}

/// Slashes the expanded expression by s = order−1 differences and checks
/// the leading coefficient, the residual space and annihilation at order s+1.
pub fn check_construction(engine: &Engine, key: &BasisKey, c: &Construction) -> Result<Check> {
    let (s, leading) = match key {
        BasisKey::Z(v) => (
            v.len() - 1,
            Monomial { slots: v[..v.len() - 1].to_vec(), terminal: Terminal::Cusp(v[v.len() - 1] as u32) },
        ),
        BasisKey::Y(v, _) => {
            let terminal = c.top.keys().next().map(|m| m.terminal.clone()).ok_or_else(|| {
                FormalError::Unsolvable(format!("{key} has an empty top value"))
            })?;
            (v.len(), Monomial { slots: v.clone(), terminal })
        }
    };
    let letters: Vec<Letter> = (1..=s as u32 + 1).map(Letter::gen).collect();
    let diffed = engine.slash_differences(&c.expanded, &letters[..s])?;
    let annihilated = engine.difference(&diffed, letters[s])?.is_zero();
    let (computed, top) = match read_top(&diffed, s) {
        Ok(top) => (top_to_string(&top), Some(top)),
        Err(msg) => (format!("{msg}: {}", diffed.excerpt(200)), None),
    };
    let expected = top_to_string(&c.top);
    let Some(top) = top else {
        return Ok(Check {
            leading_ok: false,
            residual_ok: false,
            matches_recorded_top: false,
            annihilated,
            computed,
            expected,
        });
    };
    let leading_ok = top.get(&leading).is_some_and(|x| x.is_one());
    let residual_ok = top.keys().all(|m| *m == leading || m.in_residual_space());
    Ok(Check {
        leading_ok,
        residual_ok,
        matches_recorded_top: top == c.top,
        annihilated,
        computed,
        expected,
    })
}

/// Builds 𝒵_v and checks it.
pub fn construct_basis_z(env: &mut BasisEnv, v: &[i32]) -> Result<(FormalExpr, VerificationReport)> {
    let key = BasisKey::Z(v.to_vec());
    let c = env.z(v)?.clone();
    let mut report = VerificationReport::new("zbasis", Z_ANCHOR).param("v", v).param("g", env.g);
    record(&mut report, &env.engine(), &key, &c)?;
    Ok((c.expanded, report))
}

/// Builds 𝒴_{v;m} and checks it.
pub fn construct_basis_y(
    env: &mut BasisEnv,
    v: &[i32],
    m: u32,
) -> Result<(FormalExpr, VerificationReport)> {
    let key = BasisKey::Y(v.to_vec(), m);
    let c = env.y(v, m)?.clone();
    let mut report = VerificationReport::new("ybasis", Y_ANCHOR)
        .param("v", v)
        .param("m", m)
        .param("g", env.g)
        .param("k", env.weight);
    record(&mut report, &env.engine(), &key, &c)?;
    Ok((c.expanded, report))
}

fn record(report: &mut VerificationReport, engine: &Engine, key: &BasisKey, c: &Construction) -> Result<()> {
    let chk = check_construction(engine, key, c)?;
    report.exact_case(format!("{key} law"), chk.leading_ok && chk.residual_ok, &chk.computed, &chk.expected);
    report.exact_case(format!("{key} recorded top"), chk.matches_recorded_top, &chk.computed, &chk.expected);
    report.exact_case(format!("{key} annihilated"), chk.annihilated, "nonzero", "0");
    Ok(())
}

fn leading_term(key: &BasisKey, weight: u32) -> FormalExpr {
    match key {
        BasisKey::Z(v) => Monomial {
            slots: v[..v.len() - 1].to_vec(),
            terminal: Terminal::Cusp(v[v.len() - 1] as u32),
        }
        .to_expr(),
        BasisKey::Y(v, m) => {
            Monomial { slots: v.clone(), terminal: Terminal::Poincare { m: *m, k: weight } }.to_expr()
        }
    }
}

fn sweep(env: &mut BasisEnv, keys: Vec<BasisKey>, mut report: VerificationReport) -> Result<VerificationReport> {
    use rayon::prelude::*;
    for k in &keys {
        env.ensure(k)?;
    }
    let engine = env.engine();
    let checks: Vec<(BasisKey, Result<Check>)> = keys
        .par_iter()
        .map(|k| (k.clone(), check_construction(&engine, k, &env.entries[k])))
        .collect();
    for (k, chk) in checks {
        let chk = chk?;
        report.exact_case(format!("{k} law"), chk.leading_ok && chk.residual_ok, &chk.computed, &chk.expected);
        report.exact_case(format!("{k} recorded top"), chk.matches_recorded_top, &chk.computed, &chk.expected);
        report.exact_case(format!("{k} annihilated"), chk.annihilated, "nonzero", "0");
    }
    let leads: BTreeSet<String> = keys.iter().map(|k| leading_term(k, env.weight).to_string()).collect();
    report.exact_case("leading terms injective", leads.len() == keys.len(), leads.len(), keys.len());
    Ok(report)
}

/// Checks 𝒵_v for every v ∈ I of order 1..=t.
pub fn verify_zbasis(g: u32, t: usize) -> Result<VerificationReport> {
    let mut keys = Vec::new();
    for order in 1..=t {
        for v in enumerate_index_vectors(g, order, IndexSet::I)? {
            keys.push(BasisKey::Z(v.entries().to_vec()));
        }
    }
    let report = VerificationReport::new("zbasis", Z_ANCHOR).param("g", g).param("t", t);
    sweep(&mut BasisEnv::new(g, 2), keys, report)
}

/// Checks 𝒴_{v;m} for every v ∈ I′ of length 0..=t and m ∈ {1, 2}, at weight 4.
pub fn verify_ybasis(g: u32, t: usize) -> Result<VerificationReport> {
    let mut keys = Vec::new();
    for m in 1..=2 {
        keys.push(BasisKey::Y(vec![], m));
        for order in 1..=t {
            for v in enumerate_index_vectors(g, order, IndexSet::IPrime)? {
                keys.push(BasisKey::Y(v.entries().to_vec(), m));
            }
        }
    }
    let report = VerificationReport::new("ybasis", Y_ANCHOR).param("g", g).param("t", t).param("k", 4);
    sweep(&mut BasisEnv::new(g, 4), keys, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corrections(env: &mut BasisEnv, key: &BasisKey) -> usize {
        env.ensure(key).unwrap();
        match &env.get(key).unwrap().recipe {
            Recipe::Seeded { corrections, .. } => corrections.len(),
            Recipe::Atom(_) => 0,
        }
    }

    #[test]
    fn residual_space_membership() {
        let m = |slots: Vec<i32>, j| Monomial { slots, terminal: Terminal::Cusp(j) };
        assert!(m(vec![-1], 1).in_residual_space());
        assert!(m(vec![2, -1, 1], 2).in_residual_space());
        assert!(!m(vec![1, -1], 2).in_residual_space());
        assert!(!m(vec![-2], 1).in_residual_space());
        let y = Monomial { slots: vec![-1], terminal: Terminal::Poincare { m: 1, k: 4 } };
        assert!(!y.in_residual_space());
    }

    #[test]
    fn order_two_products() {
        let mut env = BasisEnv::new(1, 2);
        let (e, r) = construct_basis_z(&mut env, &[1, 1]).unwrap();
        assert!(r.passed, "{}", r.to_text());
        assert_eq!(e.to_string(), "f1*Int_i[f1]");
    }

    #[test]
    fn axiomatic_prefix_is_unchanged() {
        let mut env = BasisEnv::new(2, 2);
        let (e, r) = construct_basis_z(&mut env, &[-1, -2, 2]).unwrap();
        assert!(r.passed);
        assert_eq!(e, FormalExpr::atom(Atom::Axiom { slots: vec![-1, -2], terminal: Terminal::Cusp(2) }));
    }

    #[test]
    fn single_corrections() {
        let mut env = BasisEnv::new(2, 2);
        assert_eq!(corrections(&mut env, &BasisKey::Z(vec![2, -2, 1])), 1);
        let (_, r) = construct_basis_z(&mut env, &[2, -2, 1]).unwrap();
        assert!(r.passed, "{}", r.to_text());
        let mut env = BasisEnv::new(2, 4);
        assert_eq!(corrections(&mut env, &BasisKey::Y(vec![2, -1], 1)), 1);
        let (_, r) = construct_basis_y(&mut env, &[2, -1], 1).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }

    #[test]
    fn y_base_cases() {
        let mut env = BasisEnv::new(2, 4);
        let (e, _) = construct_basis_y(&mut env, &[], 1).unwrap();
        assert_eq!(e, FormalExpr::atom(Atom::Poincare { m: 1, k: 4 }));
        let (e, r) = construct_basis_y(&mut env, &[1], 2).unwrap();
        assert!(r.passed);
        assert_eq!(e.to_string(), "P2_k4*Int_i[f1]");
    }

    #[test]
    fn rejects_vectors_outside_i() {
        let mut env = BasisEnv::new(2, 2);
        assert!(env.z(&[1, -1]).is_err());
        assert!(env.z(&[-1, 1]).is_err());
        assert!(env.z(&[3]).is_err());
    }

    #[test]
    fn solver_on_small_system() {
        let q = |n: i64| BigRational::from_integer(n.into());
        let x = solve(vec![vec![q(2), q(1), q(5)], vec![q(1), q(3), q(10)]]).unwrap();
        assert_eq!(x, vec![q(1), q(3)]);
        assert!(solve(vec![vec![q(1), q(1), q(0)], vec![q(2), q(2), q(1)]]).is_none());
    }

    #[test]
    fn zbasis_genus_two_order_three() {
        let r = verify_zbasis(2, 3).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }

    #[test]
    fn ybasis_genus_two_order_two() {
        let r = verify_ybasis(2, 2).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }
}
