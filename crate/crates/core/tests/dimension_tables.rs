//! Quotient dimensions against the printed tables and brute-force counts.

use hof_core::index::{closed_forms, count_sequences, dim_quotient, dims_table, enumerate_index_vectors, to_f64, IndexSet};
use num_bigint::BigInt;

/// The weight-2 block as printed: g, 2g²−1, 4g³−3g, 8g⁴−8g²+1, 16g⁵−20g³+5g.
fn printed_weight_two(g: i64, t: u32) -> i64 {
    match t {
        1 => g,
        2 => 2 * g * g - 1,
        3 => 4 * g.pow(3) - 3 * g,
        4 => 8 * g.pow(4) - 8 * g * g + 1,
        5 => 16 * g.pow(5) - 20 * g.pow(3) + 5 * g,
        _ => unreachable!(),
    }
}

/// The higher-weight block as printed: (2g, 4g²−1, 8g³−4g, 16g⁴−12g²+1)·dim S_k.
fn printed_higher_weight(g: i64, row: u32) -> i64 {
    match row {
        1 => 2 * g,
        2 => 4 * g * g - 1,
        3 => 8 * g.pow(3) - 4 * g,
        4 => 16 * g.pow(4) - 12 * g * g + 1,
        _ => unreachable!(),
    }
}

#[test]
fn weight_two_block() {
    let table = dims_table(5, 5);
    for t in 1..=5u32 {
        for g in 1..=5u32 {
            let want = BigInt::from(printed_weight_two(g as i64, t));
            assert_eq!(table[t as usize - 1][g as usize - 1], want, "t={t} g={g}");
            assert_eq!(dim_quotient(g, t, 2, 0).unwrap(), want);
        }
    }
    assert_eq!(dim_quotient(2, 3, 2, 0).unwrap(), BigInt::from(26));
}

#[test]
fn higher_weight_block() {
    for weight in [4, 6, 12] {
        for dim_sk in [1u64, 2, 7] {
            for g in 1..=5u32 {
                for row in 1..=4u32 {
                    let want = BigInt::from(printed_higher_weight(g as i64, row) * dim_sk as i64);
                    assert_eq!(dim_quotient(g, row + 1, weight, dim_sk).unwrap(), want, "k={weight} g={g} row={row}");
                }
            }
        }
    }
}

#[test]
fn enumeration_matches_recurrence_and_closed_forms() {
    for g in 1..=3u32 {
        let (b, a) = count_sequences(g, 6);
        for t in 1..=6usize {
            let i = enumerate_index_vectors(g, t, IndexSet::I).unwrap();
            let ip = enumerate_index_vectors(g, t, IndexSet::IPrime).unwrap();
            assert_eq!(BigInt::from(i.len()), a[t], "|I({g},{t})|");
            assert_eq!(BigInt::from(ip.len()), b[t], "|I'({g},{t})|");
            let (ca, cb) = closed_forms(g, t);
            assert!((ca - to_f64(&a[t])).abs() <= 1e-9 * ca.abs().max(1.0));
            assert!((cb - to_f64(&b[t])).abs() <= 1e-9 * cb.abs().max(1.0));
        }
    }
}

#[test]
fn enumerated_vectors_are_admissible() {
    let ip = enumerate_index_vectors(2, 4, IndexSet::IPrime).unwrap();
    for v in &ip {
        assert!(v.in_i_prime());
        assert!(v.entries().windows(2).all(|w| !(w[0] == -1 && w[1] == 1)));
    }
    let i = enumerate_index_vectors(2, 4, IndexSet::I).unwrap();
    assert!(i.iter().all(|v| v.in_i() && *v.entries().last().unwrap() > 0));
}
