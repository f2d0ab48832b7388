//! Unordered multiplicative partitions of `N` and the two closed-form counts
//! that exist for them (all primes distinct, or a single prime power).

use serde::{Deserialize, Serialize};

/// All unordered ways to write `n` as a product of `k` parts, each at least `min_part`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationSet {
    pub n: u64,
    pub k: usize,
    pub min_part: u64,
    /// Non-decreasing tuples, in lexicographic order.
    pub solutions: Vec<Vec<u64>>,
}

impl FactorizationSet {
    /// The degeneracy `d`.
    pub fn d(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Enumerates unordered factorizations of `n` into exactly `k` parts `>= min_part`.
///
/// Recursive divisor descent: the next part is never smaller than the previous
/// one, which yields each multiset once and in non-decreasing order.
pub fn enumerate_factorizations(n: u64, k: usize, min_part: u64) -> FactorizationSet {
    let min_part = min_part.max(1);
    let mut solutions = Vec::new();
    if n >= 1 && k >= 1 {
        let mut current = Vec::with_capacity(k);
        descend(n, k, min_part, &mut current, &mut solutions);
    }
    FactorizationSet { n, k, min_part, solutions }
}

fn descend(rest: u64, k: usize, lo: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if k == 1 {
        if rest >= lo {
            current.push(rest);
            out.push(current.clone());
            current.pop();
        }
        return;
    }
    let mut d = lo;
    // d^k <= rest, otherwise the remaining parts cannot stay >= d
    while pow_le(d, k as u32, rest) {
        if rest.is_multiple_of(d) {
            current.push(d);
            descend(rest / d, k - 1, d, current, out);
            current.pop();
        }
        d += 1;
    }
}

fn pow_le(base: u64, exp: u32, bound: u64) -> bool {
    match (base as u128).checked_pow(exp) {
        Some(v) => v <= bound as u128,
        None => false,
    }
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    // row-by-row: S(i, j) = j S(i-1, j) + S(i-1, j-1)
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 1..=n {
        for j in (1..=k).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}

/// Number of partitions of `n` into at most `k` parts.
pub fn partitions_at_most(n: usize, k: usize) -> u128 {
    // table[m][j] = partitions of m into at most j parts
    let mut table = vec![vec![0u128; k + 1]; n + 1];
    table[0] = vec![1; k + 1];
    for m in 1..=n {
        for j in 1..=k {
            let with_fewer = table[m][j - 1];
            let all_positive = if m >= j { table[m - j][j] } else { 0 };
            table[m][j] = with_fewer + all_positive;
        }
    }
    table[n][k]
}

/// `p_k(n) - p_{k-1}(n)`: the degeneracy for `N = p^n` split into `k` factors.
pub fn partition_count_diff(n: usize, k: usize) -> u128 {
    if k == 0 || k > n {
        return 0;
    }
    partitions_at_most(n, k) - partitions_at_most(n, k - 1)
}
