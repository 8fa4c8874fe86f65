//! Signed index vectors, the sets I and I′, and their counting sequences.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("enumeration of (2g)^t = {0} vectors exceeds the size guard of 10^7")]
    TooLarge(u128),
    #[error("genus must be at least 1 for enumeration")]
    ZeroGenus,
    #[error("order t must be at least 1")]
    ZeroOrder,
    #[error("weight must be an even integer >= 2, got {0}")]
    BadWeight(i64),
    #[error("entry {0} is not a valid label for genus {1}")]
    BadLabel(i32, u32),
    #[error("weight >= 4 quotient order must be at least 2, got {0}")]
    QuotientOrder(u32),
}

pub const SIZE_GUARD: u128 = 10_000_000;

/// Which of the two index sets to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexSet {
    I,
    IPrime,
}

/// Position of a label in the order 1 < −1 < 2 < −2 < …
pub fn label_rank(label: i32) -> u32 {
    let a = label.unsigned_abs();
    2 * (a - 1) + u32::from(label < 0)
}

fn label_from_rank(rank: u32) -> i32 {
    let a = (rank / 2 + 1) as i32;
    if rank % 2 == 0 {
        a
    } else {
        -a
    }
}

pub fn cmp_labels(a: i32, b: i32) -> Ordering {
    label_rank(a).cmp(&label_rank(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexVector(Vec<i32>);

impl IndexVector {
    pub fn new(entries: Vec<i32>) -> Self {
        IndexVector(entries)
    }

    /// Checks that every entry is a nonzero label bounded by the genus.
    pub fn checked(entries: Vec<i32>, g: u32) -> Result<Self, IndexError> {
        if entries.is_empty() {
            return Err(IndexError::ZeroOrder);
        }
        for &e in &entries {
            if e == 0 || e.unsigned_abs() > g {
                return Err(IndexError::BadLabel(e, g));
            }
        }
        Ok(IndexVector(entries))
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn in_i_prime(&self) -> bool {
        no_forbidden_pair(&self.0)
    }

    pub fn in_i(&self) -> bool {
        self.in_i_prime() && self.0.last().is_some_and(|&x| x > 0)
    }

    pub fn all_positive(&self) -> bool {
        self.0.iter().all(|&x| x > 0)
    }
}

/// True when no adjacent pair has −i_j = i_{j+1} = 1.
pub fn no_forbidden_pair(v: &[i32]) -> bool {
    !v.windows(2).any(|w| w[0] == -1 && w[1] == 1)
}

impl Ord for IndexVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match cmp_labels(*a, *b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for IndexVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i32>> for IndexVector {
    fn from(v: Vec<i32>) -> Self {
        IndexVector(v)
    }
}

/// Enumerates I or I′ in canonical order.
///
/// Vectors are generated as an odometer over label ranks, which visits them
/// in lexicographic label order; inadmissible prefixes are pruned.
pub fn enumerate_index_vectors(
    g: u32,
    t: usize,
    which: IndexSet,
) -> Result<Vec<IndexVector>, IndexError> {
    if g == 0 {
        return Err(IndexError::ZeroGenus);
    }
    if t == 0 {
        return Err(IndexError::ZeroOrder);
    }
    let total = (2 * g as u128).checked_pow(t as u32).unwrap_or(u128::MAX);
    if total > SIZE_GUARD {
        return Err(IndexError::TooLarge(total));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(t);
    extend(g, t, which, &mut prefix, &mut out);
    Ok(out)
}

fn extend(g: u32, t: usize, which: IndexSet, prefix: &mut Vec<i32>, out: &mut Vec<IndexVector>) {
    if prefix.len() == t {
        if which == IndexSet::IPrime || prefix[t - 1] > 0 {
            out.push(IndexVector(prefix.clone()));
        }
        return;
    }
    for rank in 0..2 * g {
        let label = label_from_rank(rank);
        if label == 1 && prefix.last() == Some(&-1) {
            continue;
        }
        prefix.push(label);
        extend(g, t, which, prefix, out);
        prefix.pop();
    }
}

/// Counting sequences b_0..b_{t_max} and a_0..a_{t_max}.
///
/// b_0 = 1, b_1 = 2g, b_t = 2g·b_{t−1} − b_{t−2}, a_t = b_t − g·b_{t−1}.
/// For g = 0 the spaces are trivial and both sequences vanish for t ≥ 1.
pub fn count_sequences(g: u32, t_max: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut b = vec![BigInt::one()];
    let mut a = vec![BigInt::one()];
    if g == 0 {
        b.extend((1..=t_max).map(|_| BigInt::zero()));
        a.extend((1..=t_max).map(|_| BigInt::zero()));
        return (b, a);
    }
    let g = BigInt::from(g);
    let two_g = &g * 2;
    for t in 1..=t_max {
        let prev2 = if t >= 2 { b[t - 2].clone() } else { BigInt::zero() };
        let bt = &two_g * &b[t - 1] - prev2;
        a.push(&bt - &g * &b[t - 1]);
        b.push(bt);
    }
    (b, a)
}

/// dim S_k^t / S_k^{t−1}.
///
/// Weight 2 returns a_t (the count of I at order t). For weight k ≥ 4 the
/// order t counts the Poincaré terminal as one slot, so the quotient is
/// dim S_k · b_{t−1} (the count of I′ at order t − 1).
pub fn dim_quotient(g: u32, t: u32, weight: i64, dim_sk: u64) -> Result<BigInt, IndexError> {
    if weight < 2 || weight % 2 != 0 {
        return Err(IndexError::BadWeight(weight));
    }
    if t == 0 {
        return Err(IndexError::ZeroOrder);
    }
    if weight == 2 {
        let (_, a) = count_sequences(g, t as usize);
        return Ok(a[t as usize].clone());
    }
    if t < 2 {
        return Err(IndexError::QuotientOrder(t));
    }
    if g == 0 {
        return Ok(BigInt::zero());
    }
    let (b, _) = count_sequences(g, t as usize);
    Ok(BigInt::from(dim_sk) * &b[t as usize - 1])
}

/// Floating closed forms: (a_t, b_t) as the first and second kind Chebyshev
/// values T_t(g) and U_t(g). Used only as cross-checks.
pub fn closed_forms(g: u32, t: usize) -> (f64, f64) {
    let x = g as f64;
    if g >= 1 {
        // T_t(x) = ½((x+√(x²−1))^t + (x−√(x²−1))^t) for x ≥ 1.
        let r = (x * x - 1.0).sqrt();
        let tt = 0.5 * ((x + r).powi(t as i32) + (x - r).powi(t as i32));
        let ut = if r > 0.0 {
            ((x + r).powi(t as i32 + 1) - (x - r).powi(t as i32 + 1)) / (2.0 * r)
        } else {
            (t + 1) as f64
        };
        (tt, ut)
    } else {
        (0.0, 0.0)
    }
}

/// Weight-2 quotient dimensions as polynomials in g, one row per t (used for tables).
pub fn dims_table(g_max: u32, t_max: u32) -> Vec<Vec<BigInt>> {
    (1..=t_max)
        .map(|t| {
            (1..=g_max)
                .map(|g| dim_quotient(g, t, 2, 0).expect("valid parameters"))
                .collect()
        })
        .collect()
}

pub fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(g: u32, t: usize, which: IndexSet) -> Vec<Vec<i32>> {
        let labels: Vec<i32> = (1..=g as i32).flat_map(|i| [i, -i]).collect();
        let mut all: Vec<Vec<i32>> = vec![vec![]];
        for _ in 0..t {
            all = all
                .into_iter()
                .flat_map(|p| {
                    labels.iter().map(move |&l| {
                        let mut q = p.clone();
                        q.push(l);
                        q
                    })
                })
                .collect();
        }
        all.retain(|v| {
            let ok = !v.windows(2).any(|w| -w[0] == 1 && w[1] == 1);
            ok && (which == IndexSet::IPrime || *v.last().unwrap() > 0)
        });
        all
    }

    #[test]
    fn enumeration_examples() {
        let v = enumerate_index_vectors(1, 2, IndexSet::I).unwrap();
        assert_eq!(v, vec![IndexVector::new(vec![1, 1])]);
        assert_eq!(enumerate_index_vectors(2, 2, IndexSet::IPrime).unwrap().len(), 15);
        assert_eq!(
            enumerate_index_vectors(1, 1, IndexSet::I).unwrap(),
            vec![IndexVector::new(vec![1])]
        );
    }

    #[test]
    fn enumeration_matches_brute_force_sets() {
        for g in 1..=3 {
            for t in 1..=4 {
                for which in [IndexSet::I, IndexSet::IPrime] {
                    let mut got: Vec<Vec<i32>> = enumerate_index_vectors(g, t, which)
                        .unwrap()
                        .into_iter()
                        .map(|v| v.entries().to_vec())
                        .collect();
                    let mut want = brute_force(g, t, which);
                    got.sort();
                    want.sort();
                    assert_eq!(got, want, "g={g} t={t} {which:?}");
                }
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let v = enumerate_index_vectors(3, 3, IndexSet::IPrime).unwrap();
        for w in v.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(label_rank(1), 0);
        assert_eq!(label_rank(-1), 1);
        assert_eq!(label_rank(2), 2);
        assert_eq!(label_rank(-2), 3);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            enumerate_index_vectors(5, 8, IndexSet::I),
            Err(IndexError::TooLarge(_))
        ));
        assert!(enumerate_index_vectors(0, 2, IndexSet::I).is_err());
    }

    #[test]
    fn membership_predicates() {
        assert!(IndexVector::new(vec![1, -1]).in_i_prime());
        assert!(!IndexVector::new(vec![1, -1]).in_i());
        assert!(!IndexVector::new(vec![-1, 1]).in_i_prime());
        assert!(IndexVector::new(vec![-2, 1]).in_i());
        assert!(IndexVector::new(vec![1, 1]).in_i());
    }

    #[test]
    fn counting_examples() {
        let (b, _) = count_sequences(1, 10);
        for t in 1..=10 {
            assert_eq!(b[t], BigInt::from(t + 1));
        }
        let (b, _) = count_sequences(2, 4);
        assert_eq!(b[1..], [4, 15, 56, 209].map(BigInt::from));
        let (_, a) = count_sequences(0, 6);
        assert!(a[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn counting_identities() {
        for g in 0..=6u32 {
            let (b, a) = count_sequences(g, 12);
            if g > 0 {
                assert_eq!(b[2], BigInt::from(4 * g * g - 1));
            }
            for t in 1..=12 {
                if g > 0 {
                    assert_eq!(&b[t] - &a[t], BigInt::from(g) * &b[t - 1]);
                }
                if g >= 2 && t >= 2 {
                    assert!(a[t] > a[t - 1]);
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_match_recurrence() {
        for g in 1..=3u32 {
            let (b, a) = count_sequences(g, 6);
            for t in 1..=6usize {
                let ip = enumerate_index_vectors(g, t, IndexSet::IPrime).unwrap().len();
                let i = enumerate_index_vectors(g, t, IndexSet::I).unwrap().len();
                assert_eq!(BigInt::from(ip), b[t]);
                assert_eq!(BigInt::from(i), a[t]);
            }
        }
    }

    #[test]
    fn chebyshev_cross_check() {
        for g in 1..=5u32 {
            let (b, a) = count_sequences(g, 8);
            for t in 1..=8 {
                let (ta, ub) = closed_forms(g, t);
                assert!((ta - to_f64(&a[t])).abs() <= 1e-9 * ta.abs().max(1.0));
                assert!((ub - to_f64(&b[t])).abs() <= 1e-9 * ub.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dim_quotient_examples() {
        assert_eq!(dim_quotient(2, 3, 2, 0).unwrap(), BigInt::from(26));
        assert_eq!(dim_quotient(1, 4, 2, 0).unwrap(), BigInt::from(1));
        assert_eq!(dim_quotient(3, 2, 4, 2).unwrap(), BigInt::from(12));
        assert_eq!(dim_quotient(0, 3, 2, 0).unwrap(), BigInt::from(0));
        assert!(dim_quotient(2, 3, 3, 0).is_err());
        assert!(dim_quotient(2, 3, 0, 0).is_err());
    }
}
