//! Small integer helpers: trial division and an incrementally grown prime table.

use std::sync::Arc;

/// Prime factors of `n` with multiplicity, ascending. Trial division up to √n.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    while n.is_multiple_of(2) {
        out.push(2);
        n /= 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n).len() == 1
}

/// Number of prime factors counted with multiplicity.
pub fn big_omega(n: u64) -> usize {
    prime_factors(n).len()
}

/// Smallest prime factor, or `None` for n < 2.
pub fn smallest_prime_factor(n: u64) -> Option<u64> {
    prime_factors(n).first().copied()
}

/// Groups a sorted slice into run lengths, e.g. `[5,5,7]` → `[2,1]`.
pub fn multiplicities<T: PartialEq>(sorted: &[T]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, x) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == *x {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
        }
    }
    out
}

/// Primes `p_1 = 2, p_2 = 3, …`, stored with the `p_0 = 1` convention at index 0.
///
/// The table is immutable once built and cheap to clone; growing it produces a
/// new table, so concurrent readers never observe a partially filled state.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    values: Arc<Vec<u64>>,
}

impl PrimeTable {
    /// Table holding at least `levels` entries (index 0 is the unit level).
    pub fn with_levels(levels: usize) -> Self {
        let mut limit = 16u64;
        loop {
            let primes = sieve(limit);
            if primes.len() + 1 >= levels {
                let mut values = Vec::with_capacity(primes.len() + 1);
                values.push(1);
                values.extend(primes);
                return PrimeTable { values: Arc::new(values) };
            }
            limit *= 2;
        }
    }

    /// Table covering every prime up to `bound`.
    pub fn covering(bound: u64) -> Self {
        let mut values = vec![1];
        values.extend(sieve(bound.max(2)));
        PrimeTable { values: Arc::new(values) }
    }

    /// Returns a table with at least `levels` entries, reusing `self` if it suffices.
    pub fn extended(&self, levels: usize) -> Self {
        if self.values.len() >= levels {
            self.clone()
        } else {
            Self::with_levels(levels.max(2 * self.values.len()))
        }
    }

    /// Number of levels, counting the unit level.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, level: usize) -> Option<u64> {
        self.values.get(level).copied()
    }

    /// Level index of `p` (1 for 1 is 0, 2 is 1, 3 is 2, …), if `p` is in the table.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.values.binary_search(&p).ok()
    }

    pub fn largest(&self) -> u64 {
        *self.values.last().unwrap()
    }
}

fn sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}
