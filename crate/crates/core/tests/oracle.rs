//! Independent oracles: brute-force graph enumeration and genus-zero point
//! counts, compared against the library.

mod common;

use common::brute_force;
use ftmbar::modgraph::enumerate_stable;
use ftmbar::strata;

#[test]
fn enumeration_matches_brute_force() {
    for g in 0..=1u32 {
        for n in 0..=4usize {
            if 2 * g as usize + n < 3 {
                continue;
            }
            for r in 0..=3 {
                for labeled in [true, false] {
                    let lib = enumerate_stable(g, n, r, labeled).len();
                    let oracle = brute_force(g, n, r, labeled);
                    assert_eq!(lib, oracle, "(g,n,r,labeled) = ({g},{n},{r},{labeled})");
                }
            }
        }
    }
}

#[test]
fn two_and_one_edge_counts_for_one_four() {
    assert_eq!(brute_force(1, 4, 2, false), 9);
    assert_eq!(brute_force(1, 4, 1, false), 4);
}

// Genus zero: |M̄_{0,n}(F_q)| summed over stable trees is a polynomial in q
// whose coefficients are the even Betti numbers.

type Poly = Vec<i64>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

/// Points of the open part M_{0,k}: (q−2)(q−3)…(q−k+2).
fn open_points(k: usize) -> Poly {
    (2..k - 1).fold(vec![1], |acc, j| mul(&acc, &vec![-(j as i64), 1]))
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![first]);
        out.push(q);
    }
    out
}

/// Rooted stable trees on `m` leaves (plus the root), weighted by points.
fn rooted(m: usize) -> Poly {
    if m == 1 {
        return vec![1];
    }
    let items: Vec<usize> = (0..m).collect();
    let mut total = vec![0];
    for p in set_partitions(&items) {
        if p.len() < 2 {
            continue;
        }
        let mut term = open_points(p.len() + 1);
        for block in &p {
            term = mul(&term, &rooted(block.len()));
        }
        total = add(&total, &term);
    }
    total
}

#[test]
fn genus_zero_betti_numbers_from_point_counts() {
    for n in 3..=6 {
        let mut poly = rooted(n - 1);
        while poly.len() > 1 && *poly.last().unwrap() == 0 {
            poly.pop();
        }
        for (i, &c) in poly.iter().enumerate() {
            assert_eq!(strata::betti(0, n, 2 * i).unwrap() as i64, c, "H_{}(M_0,{n})", 2 * i);
        }
        assert_eq!(poly.len(), n - 2);
    }
}
