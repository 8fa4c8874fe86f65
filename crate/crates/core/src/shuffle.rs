//! Shuffles of type (r, t) and the slash expansion of products.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formal::{Atom, Engine, FormalError, FormalExpr, Letter};
use crate::report::VerificationReport;

#[derive(Debug, Error)]
pub enum ShuffleError {
    #[error("shuffle type (r, t) = ({0}, {1}) needs 1 <= r <= t")]
    OutOfRange(usize, usize),
    #[error("orders {0} and {1} do not combine to order {2}")]
    InconsistentOrders(usize, usize, usize),
    #[error(transparent)]
    Formal(#[from] FormalError),
}

/// A pair of order-preserving maps with complementary images in {1, …, t−1}.
/// Only the images are stored; both are strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shuffle {
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
}

impl Shuffle {
    pub fn is_valid(&self, t: usize) -> bool {
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        let mut all: Vec<usize> = self.phi.iter().chain(&self.psi).copied().collect();
        all.sort_unstable();
        increasing(&self.phi) && increasing(&self.psi) && all == (1..t).collect::<Vec<_>>()
    }
}

/// All C(t−1, r−1) shuffles, ordered lexicographically by the image of φ.
pub fn enumerate_shuffles(r: usize, t: usize) -> Result<Vec<Shuffle>, ShuffleError> {
    if r < 1 || r > t {
        return Err(ShuffleError::OutOfRange(r, t));
    }
    let n = t - 1;
    let k = r - 1;
    let mut out = Vec::new();
    let mut comb: Vec<usize> = (1..=k).collect();
    loop {
        let psi = (1..=n).filter(|x| !comb.contains(x)).collect();
        out.push(Shuffle { phi: comb.clone(), psi });
        // Next k-combination of {1..n} in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if comb[i] < n - (k - 1 - i) {
                comb[i] += 1;
                for j in i + 1..k {
                    comb[j] = comb[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Both sides of the product expansion for abstract F (order `f_order`) and
/// G (order `g_order`) under (γ₁−1)⋯(γ_{t−1}−1):
/// the left side by repeated application of the product rule, the right
/// side as Σ over shuffles of F|(γ_φ−1)… · G|(γ_ψ−1)….
pub fn expand_slash_product(
    f_order: usize,
    g_order: usize,
    t: usize,
) -> Result<(FormalExpr, FormalExpr), ShuffleError> {
    if f_order == 0 || g_order == 0 || f_order + g_order != t + 1 {
        return Err(ShuffleError::InconsistentOrders(f_order, g_order, t));
    }
    let engine = Engine::new(0, 2);
    let f = Atom::Abstract { name: "F".into(), order: f_order as u32 };
    let g = Atom::Abstract { name: "G".into(), order: g_order as u32 };
    let letters: Vec<Letter> = (1..t as u32).map(Letter::gen).collect();

    let lhs = engine.slash_differences(&FormalExpr::atom(Atom::product(&f, &g)), &letters)?;

    let mut rhs = FormalExpr::zero();
    for sh in enumerate_shuffles(f_order, t)? {
        let pick = |idx: &[usize]| idx.iter().map(|&i| letters[i - 1]).collect::<Vec<_>>();
        let fp = engine.partial(&f, pick(&sh.phi))?;
        let gp = engine.partial(&g, pick(&sh.psi))?;
        rhs.add_scaled(&fp.mul(&gp), &BigRational::one());
    }
    Ok((lhs, rhs))
}

pub const ANCHOR: &str = "(F·G)|(γ₁-1)⋯(γ_{t-1}-1) = Σ_shuffles F|(γ_φ-1)⋯ · G|(γ_ψ-1)⋯";

/// Checks the expansion for all 1 ≤ r ≤ t ≤ t_max and the shuffle counts.
pub fn verify_lemma_310(t_max: usize) -> Result<VerificationReport, ShuffleError> {
    let mut report = VerificationReport::new("lemma310", ANCHOR).param("t_max", t_max);
    for t in 1..=t_max {
        for r in 1..=t {
            let shuffles = enumerate_shuffles(r, t)?;
            let count_ok = shuffles.len() as u128 == binomial(t - 1, r - 1)
                && shuffles.iter().all(|s| s.is_valid(t));
            report.exact_case(
                format!("count r={r} t={t}"),
                count_ok,
                shuffles.len(),
                binomial(t - 1, r - 1),
            );
            let (lhs, rhs) = expand_slash_product(r, t - r + 1, t)?;
            report.exact_case(format!("expansion r={r} t={t}"), lhs == rhs, &lhs, &rhs);
        }
    }
    Ok(report)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
