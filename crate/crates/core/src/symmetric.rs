//! Permutations, partitions, and the character theory of S_n.
//!
//! Permutations are stored 0-based in one-line notation: `p[i]` is the image
//! of `i`. Characters use Murnaghan–Nakayama on beta-sets.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exactq::{int, Rational};

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `(p ∘ q)(i) = p[q[i]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// +1 for even permutations, -1 for odd.
pub fn sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut s = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p: Perm = identity(n);
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// Transposition of `a` and `b` in S_n.
pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
    let mut p = identity(n);
    p.swap(a, b);
    p
}

/// All elements of the subgroup of S_n generated by `gens`, sorted.
pub fn closure(n: usize, gens: &[Perm]) -> Vec<Perm> {
    let mut seen = std::collections::BTreeSet::new();
    let mut queue = vec![identity(n)];
    seen.insert(identity(n));
    while let Some(p) = queue.pop() {
        for g in gens {
            let q = compose(g, &p);
            if seen.insert(q.clone()) {
                queue.push(q);
            }
        }
    }
    seen.into_iter().collect()
}

/// Cycle type as a partition (weakly decreasing).
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// Partitions of `n` in reverse lexicographic order, `[n]` first.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            rec(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// A permutation with the given cycle type: consecutive blocks are cycles.
pub fn class_representative(cycle_type: &[usize]) -> Perm {
    let n: usize = cycle_type.iter().sum();
    let mut p = identity(n);
    let mut start = 0;
    for &len in cycle_type {
        for k in 0..len {
            p[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    p
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

/// Number of permutations with the given cycle type.
pub fn class_size(cycle_type: &[usize]) -> BigInt {
    let n: usize = cycle_type.iter().sum();
    let mut denom = BigInt::from(1);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in cycle_type {
        *counts.entry(k).or_default() += 1;
    }
    for (&k, &m) in &counts {
        denom *= BigInt::from(k).pow(m as u32) * factorial(m);
    }
    factorial(n) / denom
}

/// Irreducible character `χ^λ` evaluated on the class of cycle type `mu`.
pub fn character(lambda: &[usize], mu: &[usize]) -> i64 {
    // Beta-set of λ with as many beads as parts.
    let l = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + l - 1 - i).collect();
    mn(&beta, mu)
}

fn mn(beta: &[usize], mu: &[usize]) -> i64 {
    let Some((&k, rest)) = mu.split_first() else {
        return 1;
    };
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        // Beads strictly between b-k and b change the sign.
        let jumped = beta.iter().filter(|&&c| c > b - k && c < b).count();
        let mut next = beta.to_vec();
        next[idx] = b - k;
        let s = if jumped % 2 == 0 { 1 } else { -1 };
        total += s * mn(&next, rest);
    }
    total
}

/// A class function on S_n, indexed by cycle type.
pub type ClassFunction = BTreeMap<Vec<usize>, Rational>;

/// Multiplicities of irreducibles in a class function.
///
/// Returns `Err` with the offending partition if some multiplicity is not a
/// non-negative integer.
pub fn decompose(n: usize, chi: &ClassFunction) -> Result<Vec<(Vec<usize>, u64)>, Vec<usize>> {
    let order = Rational::from_integer(factorial(n));
    let mut out = Vec::new();
    for lambda in partitions(n) {
        let mut acc = Rational::zero();
        for mu in partitions(n) {
            let val = chi.get(&mu).cloned().unwrap_or_else(Rational::zero);
            acc += val * Rational::from_integer(class_size(&mu)) * int(character(&lambda, &mu));
        }
        let m = acc / &order;
        if !m.is_integer() || m < Rational::zero() {
            return Err(lambda);
        }
        let m = m.to_integer().to_u64().ok_or_else(|| lambda.clone())?;
        if m > 0 {
            out.push((lambda, m));
        }
    }
    Ok(out)
}

/// Formats a partition as `V_{3,1}`.
pub fn irrep_name(lambda: &[usize]) -> String {
    let parts: Vec<String> = lambda.iter().map(|p| p.to_string()).collect();
    format!("V_{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_basics() {
        assert_eq!(all_perms(4).len(), 24);
        assert_eq!(sign(&[1, 0, 2]), -1);
        assert_eq!(sign(&[1, 2, 0]), 1);
        let p = vec![2, 0, 1];
        assert_eq!(compose(&p, &inverse(&p)), identity(3));
        assert_eq!(cycle_type(&class_representative(&[2, 1, 1])), vec![2, 1, 1]);
        assert_eq!(closure(4, &[transposition(4, 0, 1), vec![1, 2, 3, 0]]).len(), 24);
        assert_eq!(closure(6, &[transposition(6, 4, 5)]).len(), 2);
    }

    #[test]
    fn s4_character_table_rows() {
        // Classes in order [4],[3,1],[2,2],[2,1,1],[1,1,1,1].
        let classes = partitions(4);
        let row = |lam: &[usize]| classes.iter().map(|mu| character(lam, mu)).collect::<Vec<_>>();
        assert_eq!(row(&[4]), vec![1, 1, 1, 1, 1]);
        assert_eq!(row(&[3, 1]), vec![-1, 0, -1, 1, 3]);
        assert_eq!(row(&[2, 2]), vec![0, -1, 2, 0, 2]);
        assert_eq!(row(&[2, 1, 1]), vec![1, 0, -1, -1, 3]);
        assert_eq!(row(&[1, 1, 1, 1]), vec![-1, 1, 1, -1, 1]);
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..=6 {
            let total: BigInt = partitions(n).iter().map(|mu| class_size(mu)).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn decompose_regular_character() {
        let mut chi = ClassFunction::new();
        chi.insert(vec![1, 1, 1], int(6));
        let d = decompose(3, &chi).unwrap();
        assert_eq!(d, vec![(vec![3], 1), (vec![2, 1], 2), (vec![1, 1, 1], 1)]);
    }
}
