//! Library results against independent brute-force or analytic computations.

mod common;

use logfactor::arith::{is_prime, prime_factors, PrimeTable};
use logfactor::bosonic::{contact_matrix_element, normalization, BosonicConfig};
use logfactor::degeneracy::{enumerate_factorizations, partition_count_diff, stirling_count};
use logfactor::measurement::average_probability;
use logfactor::quadrature::{simpson, trapezoid};
use logfactor::spectra::Spectrum;
use std::collections::BTreeSet;

/// All unordered k-part factorizations by trying every ordered tuple of divisors.
fn brute_factorizations(n: u64, k: usize, min_part: u64) -> BTreeSet<Vec<u64>> {
    let divisors: Vec<u64> = (min_part..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut out = BTreeSet::new();
    let mut stack = vec![(Vec::new(), 1u64)];
    while let Some((tuple, product)) = stack.pop() {
        if tuple.len() == k {
            if product == n {
                let mut t = tuple.clone();
                t.sort_unstable();
                out.insert(t);
            }
            continue;
        }
        for &d in &divisors {
            if n.is_multiple_of(product * d) {
                let mut t = tuple.clone();
                t.push(d);
                stack.push((t, product * d));
            }
        }
    }
    out
}

/// Set partitions of {0..n} with exactly k blocks, via restricted growth strings.
fn set_partitions(n: usize, k: usize) -> u128 {
    fn walk(i: usize, n: usize, blocks: usize, k: usize) -> u128 {
        if i == n {
            return (blocks == k) as u128;
        }
        // element i joins an existing block or opens a new one
        let mut total = blocks as u128 * walk(i + 1, n, blocks, k);
        if blocks < k {
            total += walk(i + 1, n, blocks + 1, k);
        }
        total
    }
    if n == 0 {
        return (k == 0) as u128;
    }
    walk(1, n, 1, k)
}

/// Partitions of n into exactly k positive parts.
fn partitions_exact(n: usize, k: usize, max_part: usize) -> u128 {
    if k == 0 {
        return (n == 0) as u128;
    }
    (1..=max_part.min(n)).map(|p| partitions_exact(n - p, k - 1, p)).sum()
}

#[test]
fn factorizations_match_divisor_search() {
    for n in [35u64, 245, 385, 625, 1001, 1225, 3125, 5005, 9261] {
        for k in 1..=5 {
            let fast: BTreeSet<Vec<u64>> = enumerate_factorizations(n, k, 4).solutions.into_iter().collect();
            assert_eq!(fast, brute_factorizations(n, k, 4), "N={n} k={k}");
        }
    }
}

#[test]
fn squarefree_counts_are_stirling() {
    let primes = [5u64, 7, 11, 13, 17, 19];
    for n in 1..=primes.len() {
        let product: u64 = primes[..n].iter().product();
        for k in 1..=n {
            let oracle = set_partitions(n, k);
            assert_eq!(stirling_count(n, k), oracle, "S({n},{k})");
            assert_eq!(enumerate_factorizations(product, k, 2).d() as u128, oracle);
        }
    }
}

#[test]
fn prime_power_counts_are_partitions() {
    for n in 1..=10usize {
        let big = 5u64.pow(n as u32);
        for k in 1..=n {
            let oracle = partitions_exact(n, k, n);
            assert_eq!(partition_count_diff(n, k), oracle, "p diff ({n},{k})");
            assert_eq!(enumerate_factorizations(big, k, 2).d() as u128, oracle);
        }
    }
}

#[test]
fn trial_division_agrees_with_sieve() {
    let table = PrimeTable::covering(5000);
    let sieved: Vec<u64> = (1..table.len()).map(|i| table.get(i).unwrap()).collect();
    let trial: Vec<u64> = (2..=5000u64).filter(|&n| prime_factors(n) == vec![n]).collect();
    assert_eq!(&sieved[..trial.len()], &trial[..]);
    assert!(trial.iter().all(|&p| is_prime(p)));
}

#[test]
fn quadrature_rules_on_gaussian() {
    let h = 0.01;
    let xs: Vec<f64> = (0..=4000).map(|i| -20.0 + i as f64 * h).collect();
    let f: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
    let exact = std::f64::consts::PI.sqrt();
    assert!((simpson(&f, h) - exact).abs() < 1e-12);
    assert!((trapezoid(&f, h) - exact).abs() < 1e-12);
    // x^4 on [0,1]: Simpson is exact for cubics, error O(h^4) otherwise
    let g: Vec<f64> = (0..=100).map(|i| (i as f64 / 100.0).powi(3)).collect();
    assert!((simpson(&g, 0.01) - 0.25).abs() < 1e-14);
}

/// Builds `𝒩 Σ_P |Pk⟩` in an m-dimensional single-particle space and returns its squared norm.
fn symmetrized_norm(levels: &[usize], m: usize) -> f64 {
    let n = levels.len();
    let mut state = vec![0.0; m.pow(n as u32)];
    let mut seen = BTreeSet::new();
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm over all n! orderings; distinct ones contribute once
    fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, k - 1);
        }
    }
    let mut all = Vec::new();
    heap(n, &mut perm, &mut all);
    let factor = normalization(&BosonicConfig::new(levels.to_vec()).multiplicities());
    for p in all {
        let tuple: Vec<usize> = p.iter().map(|&i| levels[i]).collect();
        if seen.insert(tuple.clone()) {
            let index = tuple.iter().fold(0, |acc, &l| acc * m + l);
            state[index] += factor;
        }
    }
    state.iter().map(|x| x * x).sum()
}

#[test]
fn normalization_gives_unit_states() {
    assert_eq!(normalization(&[2]), 1.0);
    assert!((normalization(&[1, 1]) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    assert!((normalization(&[1, 1, 1]) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    for levels in [vec![1, 1], vec![0, 1], vec![0, 1, 2], vec![0, 0, 2], vec![1, 1, 1, 3], vec![0, 1, 1, 2, 3]] {
        let norm = symmetrized_norm(&levels, 4);
        assert!((norm - 1.0).abs() < 1e-12, "{levels:?}: {norm}");
    }
}

#[test]
fn bosonic_probabilities_match_ordinary_sum() {
    // symmetric ordinary amplitudes b_ij on two levels
    let b = [[0.5, 0.3], [0.3, 0.2]];
    let ordinary: f64 = b.iter().flatten().map(|x| x * x).sum();
    let bosonic: f64 = [vec![0, 0], vec![0, 1], vec![1, 1]]
        .into_iter()
        .map(|l| {
            let c = BosonicConfig::new(l.clone());
            let amp = logfactor::bosonic::bosonic_amplitude_from_ordinary(b[l[0]][l[1]], &c.multiplicities());
            amp * amp
        })
        .sum();
    assert!((ordinary - bosonic).abs() < 1e-15);
}

#[test]
fn contact_element_two_quadratures() {
    let grid = common::log7();
    let bra = BosonicConfig::ground(2);
    let ket = BosonicConfig::new(vec![2, 4]);
    let w = contact_matrix_element(grid, &bra, &ket).unwrap();
    assert!(w > 0.0);
    let product: Vec<f64> = (0..grid.grid.points())
        .map(|i| {
            grid.eigenfunctions[0][i].powi(2) * grid.eigenfunctions[2][i] * grid.eigenfunctions[4][i]
        })
        .collect();
    let trap = trapezoid(&product, grid.grid.step) * 2f64.sqrt();
    assert!((w - trap).abs() < 1e-10 * w, "simpson {w} trapezoid {trap}");

    // a potential rebuilt on a grid twice as fine gives the same element
    let config = logfactor::potential::BuildConfig { step: 0.005, ..Default::default() };
    let fine = logfactor::potential::build_potential(&common::log_spectrum(), 7, &config).unwrap().potential;
    let w_fine = contact_matrix_element(&fine, &bra, &ket).unwrap();
    assert!((w - w_fine).abs() < 1e-4 * w, "h=0.01 {w} h=0.005 {w_fine}");
}

#[test]
fn average_probability_against_quadrature() {
    for omega_t in [0.1, 0.5, std::f64::consts::FRAC_PI_4, 2.0, 5.0, 20.0] {
        // ⟨sin²(Ωt)⟩ over [0, T] with Ω = 1
        let steps = 20000;
        let h = omega_t / steps as f64;
        let values: Vec<f64> = (0..=steps).map(|i| (i as f64 * h).sin().powi(2)).collect();
        let mean = simpson(&values, h) / omega_t;
        assert!((mean - average_probability(omega_t)).abs() < 1e-12, "ΩT={omega_t}");
    }
    let small = 0.1;
    // next Taylor term is -2x⁴/45
    assert!((average_probability(small) - small * small / 3.0).abs() < 2e-3 * small * small / 3.0);
    assert!((average_probability(std::f64::consts::FRAC_PI_4) - (0.5 - 1.0 / std::f64::consts::PI)).abs() < 1e-15);
}

/// Multisets of prime-spectrum levels (1 and the primes) with product `n`, by exhaustive search.
fn prime_level_multisets(n: u64, slots: usize, primes: &[u64]) -> Vec<Vec<u64>> {
    fn walk(rest: u64, slots: usize, from: usize, primes: &[u64], current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            out.push(current.clone());
            return;
        }
        if slots == 0 {
            return;
        }
        for (i, &p) in primes.iter().enumerate().skip(from) {
            if p > rest {
                break;
            }
            if rest.is_multiple_of(p) {
                current.push(p);
                walk(rest / p, slots - 1, i, primes, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(n, slots, 0, primes, &mut Vec::new(), &mut out);
    out
}

#[test]
fn prime_spectrum_decomposition_is_unique() {
    let table = PrimeTable::covering(20_000);
    let primes: Vec<u64> = (1..table.len()).map(|i| table.get(i).unwrap()).collect();
    let spectrum = Spectrum::Prime(table);
    for n in 2..=10_000u64 {
        let m = logfactor::protocol::prime_spectrum_bosons(n);
        let found = prime_level_multisets(n, m, &primes);
        assert_eq!(found.len(), 1, "N={n}");
        let levels = spectrum.decompose_energy(n, m).unwrap();
        assert_eq!(levels.len(), 1);
        let decoded: Vec<u64> =
            levels[0].iter().filter(|&&l| l > 0).map(|&l| spectrum.level_ratio(l).unwrap().0).collect();
        assert_eq!(decoded, found[0], "N={n}");
    }
}
