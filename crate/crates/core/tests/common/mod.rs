//! Brute-force stable-graph enumeration shared by the oracle and acceptance
//! targets.

use std::collections::BTreeSet;

/// A graph as plain data: vertex genera, edge multiset, per-leg vertex.
type Raw = (Vec<u32>, Vec<(usize, usize)>, Vec<usize>);

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest image under all vertex relabelings. Legs are kept in label
/// order when `labeled`, otherwise only the number per vertex survives.
fn brute_canonical(raw: &Raw, labeled: bool) -> Raw {
    let (genus, edges, legs) = raw;
    let v = genus.len();
    permutations(v)
        .into_iter()
        .map(|p| {
            let mut g2 = vec![0; v];
            for i in 0..v {
                g2[p[i]] = genus[i];
            }
            let mut e2: Vec<(usize, usize)> =
                edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e2.sort_unstable();
            let mut l2: Vec<usize> = legs.iter().map(|&x| p[x]).collect();
            if !labeled {
                let mut counts = vec![0; v];
                for &x in &l2 {
                    counts[x] += 1;
                }
                l2 = counts;
            }
            (g2, e2, l2)
        })
        .min()
        .expect("at least one permutation")
}

fn connected(v: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            for (s, t) in [(a, b), (b, a)] {
                if s == x && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.into_iter().all(|x| x)
}

fn multisets(pairs: &[(usize, usize)], k: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..pairs.len() {
        cur.push(pairs[i]);
        multisets(pairs, k, i, cur, out);
        cur.pop();
    }
}

/// Every stable graph of type `(g, n)` with `r` edges, up to isomorphism.
pub fn brute_force(g: u32, n: usize, r: usize, labeled: bool) -> usize {
    let mut found = BTreeSet::new();
    for v in 1..=r + 1 {
        // b1 = r - v + 1 must not exceed g
        if r + 1 < v || (r + 1 - v) as u32 > g {
            continue;
        }
        let b1 = (r + 1 - v) as u32;
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
        let mut edge_sets = Vec::new();
        multisets(&pairs, r, 0, &mut Vec::new(), &mut edge_sets);
        for mask in 0..(1u32 << v) {
            let genus: Vec<u32> = (0..v).map(|i| (mask >> i) & 1).collect();
            if b1 + genus.iter().sum::<u32>() != g {
                continue;
            }
            for edges in &edge_sets {
                if !connected(v, edges) {
                    continue;
                }
                let mut half = vec![0usize; v];
                for &(a, b) in edges {
                    half[a] += 1;
                    half[b] += 1;
                }
                for code in 0..v.pow(n as u32) {
                    let legs: Vec<usize> = (0..n).map(|i| code / v.pow(i as u32) % v).collect();
                    let stable = (0..v).all(|x| {
                        let val = half[x] + legs.iter().filter(|&&y| y == x).count();
                        2 * genus[x] as usize + val >= 3
                    });
                    if stable {
                        found.insert(brute_canonical(&(genus.clone(), edges.clone(), legs), labeled));
                    }
                }
            }
        }
    }
    found.len()
}

