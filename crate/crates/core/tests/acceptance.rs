//! Acceptance suite. Prints one line per criterion and exits non-zero if any fails.

mod common;

use logfactor::arith::{is_prime, prime_factors};
use logfactor::asymptotics::{
    feasibility_region, max_feasible_n, scaling_exponent_check, scaling_exponent_check_exact, FeasibilityParams,
};
use logfactor::bosonic::{bosonic_configs, contact_matrix_element, contact_matrix_element_with, BosonicConfig};
use logfactor::degeneracy::enumerate_factorizations;
use logfactor::dynamics::{build_rabi_system, integrate_full, rwa_trajectory, AmplitudeTrajectory, FullOdeConfig};
use logfactor::levels::ExtendedLevels;
use logfactor::measurement::{average_probability, monte_carlo};
use logfactor::potential::shooting::shooting_spectrum;
use logfactor::potential::PotentialGrid;
use logfactor::protocol::{run_iterative, ProtocolConfig, Verdict};
use logfactor::quadrature::trapezoid;
use std::time::Instant;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn spectrum_reconstruction() -> Outcome {
    let grid = common::log7();
    let targets: Vec<f64> = (0..7).map(|l| (l as f64 / 3.0 + 1.0).ln()).collect();
    let de = grid.eigenvalues.iter().zip(&targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let shot = shooting_spectrum(&grid.grid, &grid.v, 7);
    let ds = shot.iter().zip(&grid.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        de < 1e-3 && shot.len() == 7 && ds < 1e-5,
        format!("max |dE| = {de:.2e} (< 1e-3), max |E - E_shooting| = {ds:.2e} (< 1e-5)"),
    )
}

fn prime_potential() -> Outcome {
    let grid = common::prime14();
    let primes = [1.0f64, 2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37., 41.];
    let de = grid.eigenvalues.iter().zip(&primes).map(|(e, p)| (e - p.ln()).abs()).fold(0.0, f64::max);
    check(de < 1e-3 && grid.levels() == 14, format!("14 levels, max |E - ln p| = {de:.2e} (< 1e-3)"))
}

fn sup_deviation(full: &AmplitudeTrajectory, closed: &AmplitudeTrajectory) -> f64 {
    (0..full.times.len()).map(|i| (full.prob_ground(i) - closed.prob_ground(i)).abs()).fold(0.0, f64::max)
}

fn ground_trajectory(grid: &PotentialGrid, omega: f64) -> (f64, f64) {
    let spectrum = common::log_spectrum();
    let ext = ExtendedLevels::new(grid, spectrum.clone()).unwrap();
    let base = build_rabi_system(&ext, &spectrum, 35, 2, 1.0).unwrap();
    let system = base.clone().with_gamma(base.gamma_for_omega(omega).unwrap());
    let t_end = std::f64::consts::PI / system.omega;
    let full = integrate_full(&system, grid, &spectrum, &FullOdeConfig::new(t_end, 401)).unwrap();
    let closed = rwa_trajectory(&system, &full.times);
    (sup_deviation(&full, &closed), full.max_norm_drift())
}

fn rwa_validity(drift: &mut f64) -> Outcome {
    let grid = common::log13();
    let (good, d1) = ground_trajectory(grid, 0.05 / 35.0);
    let (bad, d2) = ground_trajectory(grid, 5.0 / 35.0);
    *drift = d1.max(d2);
    check(
        good < 0.05 && bad > 0.15,
        format!("sup |P0 - cos^2| = {good:.4} at Omega = 0.05/N (< 0.05), {bad:.3} at 100x gamma (> 0.15)"),
    )
}

fn measurement_statistics() -> Outcome {
    let spectrum = common::log_spectrum();
    let ext = ExtendedLevels::new(common::log7(), spectrum.clone()).unwrap();
    let base = build_rabi_system(&ext, &spectrum, 35, 2, 1.0).unwrap();
    let system = base.clone().with_gamma(base.gamma_for_omega(0.05 / 35.0).unwrap());
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, omega_t) in [0.5, 2.0, 5.0, 20.0].into_iter().enumerate() {
        let mc = monte_carlo(&system, omega_t / system.omega, 100_000, 1000 + i as u64).unwrap();
        let p = average_probability(omega_t);
        let z = (mc.factor_fraction() - p) / mc.standard_error(p);
        passed &= z.abs() < 3.0;
        parts.push(format!("OmegaT={omega_t}: {:.4} vs {p:.4} ({z:+.2} sd)", mc.factor_fraction()));
    }
    let tail = (average_probability(50.0) - 0.5).abs() / 0.5;
    passed &= tail < 0.01;
    parts.push(format!("OmegaT=50 off 1/2 by {:.2}%", 100.0 * tail));
    check(passed, parts.join("; "))
}

/// S(n, k) from the triangle recurrence.
fn stirling_oracle(n: usize, k: usize) -> usize {
    let mut row = vec![1usize];
    for i in 1..=n {
        let mut next = vec![0usize; i + 1];
        for j in 1..=i {
            next[j] = j * row.get(j).copied().unwrap_or(0) + row[j - 1];
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0)
}

/// Partitions of `n` into exactly `k` parts: p(n, k) = p(n-1, k-1) + p(n-k, k).
fn exact_parts_oracle(n: usize, k: usize) -> usize {
    match (n, k) {
        (0, 0) => 1,
        (_, 0) => 0,
        _ if k > n => 0,
        _ => exact_parts_oracle(n - 1, k - 1) + exact_parts_oracle(n - k, k),
    }
}

fn degeneracy_oracles() -> Outcome {
    let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let mut cases = 0;
    let mut bad = Vec::new();
    for mask in 1u32..(1 << primes.len()) {
        let n = mask.count_ones() as usize;
        if n > 5 {
            continue;
        }
        let big_n: u64 = primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).product();
        for k in 1..=n {
            cases += 1;
            if enumerate_factorizations(big_n, k, 2).d() != stirling_oracle(n, k) {
                bad.push(format!("{big_n}/k={k}"));
            }
        }
    }
    for n in 1..=8u32 {
        for k in 1..=n as usize {
            cases += 1;
            if enumerate_factorizations(5u64.pow(n), k, 2).d() != exact_parts_oracle(n as usize, k) {
                bad.push(format!("5^{n}/k={k}"));
            }
        }
    }
    check(bad.is_empty(), format!("{cases} (N, k) cases, mismatches: {bad:?}"))
}

fn protocol_sweep() -> Outcome {
    let grid = common::log7();
    let config = ProtocolConfig::default();
    let (mut composites, mut primes, mut failures) = (0, 0, Vec::new());
    for n in (5..=10_000u64).filter(|n| n % 2 != 0 && n % 3 != 0) {
        let run = run_iterative(n, 3, grid, &config).unwrap();
        let expected = prime_factors(n);
        let steps_ok = run.successful_steps() == expected.len() - 1 && run.probe_steps() == 1;
        let ok = if is_prime(n) {
            primes += 1;
            run.verdict == Verdict::Prime && steps_ok
        } else {
            composites += 1;
            run.verdict == Verdict::Factored && run.confirmed_factors == expected && steps_ok
        };
        if !ok {
            failures.push(n);
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{composites} composites and {primes} primes; resonant steps k = 2..n then one probe; failures: {:?}",
            &failures[..failures.len().min(10)]
        ),
    )
}

fn scaling_law() -> Outcome {
    let primes = [5u64, 7, 11, 13, 17];
    let ext = ExtendedLevels::new(common::log13(), common::log_spectrum()).unwrap();
    let mut passed = true;
    let mut parts = Vec::new();
    for (n, target) in [(2usize, -0.5), (3, -0.778)] {
        let exact = scaling_exponent_check_exact(&ext, n, 3, &primes).unwrap();
        let asym = scaling_exponent_check(n, 3, &primes).unwrap();
        passed &= (exact.corrected_slope - target).abs() <= 0.05;
        parts.push(format!(
            "n={n}: {:.3} (target {target} +- 0.05; raw {:.3}, closed form {:.3})",
            exact.corrected_slope, exact.raw_slope, asym.corrected_slope
        ));
    }
    check(passed, parts.join("; "))
}

fn feasibility() -> Outcome {
    let params = FeasibilityParams::default();
    let n_max = max_feasible_n(&feasibility_region(&params).unwrap()).unwrap_or(0.0);
    check((0.6e4..=2.4e4).contains(&n_max), format!("max feasible N = {n_max:.0} (in [6000, 24000])"))
}

fn property_suite(drift: f64) -> Outcome {
    let grid = common::log13();
    let m = grid.levels();
    let mut ortho: f64 = 0.0;
    for i in 0..m {
        for j in i..m {
            let prod: Vec<f64> =
                grid.eigenfunctions[i].iter().zip(&grid.eigenfunctions[j]).map(|(a, b)| a * b).collect();
            ortho = ortho.max((trapezoid(&prod, grid.grid.step) - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }

    let ground = BosonicConfig::ground(2);
    let mut odd: f64 = 0.0;
    for a in 0..m {
        for b in a..m {
            if (a + b) % 2 == 1 {
                odd = odd.max(contact_matrix_element(grid, &ground, &BosonicConfig::new(vec![a, b])).unwrap().abs());
            }
        }
    }
    let spectrum = common::log_spectrum();
    let ext = ExtendedLevels::new(grid, spectrum.clone()).unwrap();
    let mut smallest = f64::INFINITY;
    for n in (25..=2000u64).filter(|n| n % 2 != 0 && n % 3 != 0) {
        for k in 2..=4 {
            for w in build_rabi_system(&ext, &spectrum, n, k, 1.0).unwrap().couplings {
                smallest = smallest.min(w.abs());
            }
        }
    }

    let configs = bosonic_configs(2, 6);
    let mut asym: f64 = 0.0;
    for a in &configs {
        for b in &configs {
            let ab = contact_matrix_element_with(grid, a, b).unwrap();
            let ba = contact_matrix_element_with(grid, b, a).unwrap();
            asym = asym.max((ab - ba).abs());
        }
    }

    // |ψ⟩ = |u⟩⊗|u⟩ on 2 bosons over 4 levels: Σ_bosonic |⟨c|ψ⟩|² = 1
    let u = [0.5f64, -0.5, 0.5, 0.5];
    let complete: f64 = bosonic_configs(2, 3)
        .iter()
        .map(|c| {
            let amp: f64 = c.levels().iter().map(|&l| u[l]).product();
            c.permutation_count() as f64 * amp * amp
        })
        .sum();

    let passed = ortho < 1e-8 && drift < 1e-6 && odd == 0.0 && smallest > 1e-10 && asym == 0.0
        && (complete - 1.0).abs() < 1e-14;
    check(
        passed,
        format!(
            "orthonormality {ortho:.1e}, norm drift {drift:.1e}, odd-sum |W| {odd:.0e}, min admissible |W| {smallest:.2e}, \
             bra/ket asymmetry {asym:.0e}, bosonic completeness {complete:.15}"
        ),
    )
}

fn main() {
    let mut drift = f64::NAN;
    let mut all = true;
    let mut report = |label: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        all &= out.passed;
        println!(
            "{} {label} ({:.1} s): {}",
            if out.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    };
    report("1 spectrum reconstruction", &mut spectrum_reconstruction);
    report("2 prime-spectrum potential", &mut prime_potential);
    report("3 rotating-wave validity", &mut || rwa_validity(&mut drift));
    report("4 measurement statistics", &mut measurement_statistics);
    report("5 degeneracy oracles", &mut degeneracy_oracles);
    report("6 protocol sweep", &mut protocol_sweep);
    report("7 scaling law", &mut scaling_law);
    report("8 feasibility region", &mut feasibility);
    report("9 property suite", &mut || property_suite(drift));
    if !all {
        std::process::exit(1);
    }
}
