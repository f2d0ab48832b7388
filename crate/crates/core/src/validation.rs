//! Self-checks run by the command-line `validate` subcommand.

use crate::asymptotics::{beta_bar, matrix_element_asymptotic, matrix_element_asymptotic_shifted, matrix_element_exact};
use crate::bosonic::{bosonic_configs, contact_matrix_element, contact_matrix_element_with, BosonicConfig};
use crate::degeneracy::{enumerate_factorizations, stirling_count};
use crate::dynamics::{build_rabi_system, integrate_full, FullOdeConfig};
use crate::error::Result;
use crate::levels::ExtendedLevels;
use crate::potential::shooting::shooting_spectrum;
use crate::potential::{build_potential, BuildConfig, PotentialGrid};
use crate::quadrature::trapezoid;
use crate::spectra::Spectrum;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Largest `|<φ_i|φ_j> - δ_ij|` over the grid's eigenfunctions.
pub fn orthonormality_error(grid: &PotentialGrid) -> f64 {
    let m = grid.levels();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in i..m {
            let prod: Vec<f64> = grid.eigenfunctions[i]
                .iter()
                .zip(&grid.eigenfunctions[j])
                .map(|(a, b)| a * b)
                .collect();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((trapezoid(&prod, grid.grid.step) - target).abs());
        }
    }
    worst
}

/// Runs the invariant suite. `full_ode` adds a short full-equation integration.
pub fn run(full_ode: bool) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let spectrum = Spectrum::log_integer(3)?;
    let config = BuildConfig { xi_max: 60.0, tolerance: 1e-8, ..Default::default() };
    let built = build_potential(&spectrum, 13, &config)?;
    let grid = built.potential;

    let targets = spectrum.energies(7)?;
    let de = grid.eigenvalues.iter().zip(&targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.push("spectrum", de < 1e-3, format!("max |E - ln(l/3+1)| over l < 7 = {de:.2e}"));
    let shot = shooting_spectrum(&grid.grid, &grid.v, 7);
    let ds = shot.iter().zip(&grid.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.push("shooting", shot.len() == 7 && ds < 1e-5, format!("max |E_matrix - E_shooting| = {ds:.2e}"));

    let ortho = orthonormality_error(&grid);
    report.push("orthonormality", ortho < 1e-8, format!("max deviation {ortho:.2e}"));

    let ground = BosonicConfig::ground(2);
    let mut odd_worst: f64 = 0.0;
    for a in 0..grid.levels() {
        for b in a..grid.levels() {
            if (a + b) % 2 == 1 {
                let w = contact_matrix_element(&grid, &ground, &BosonicConfig::new(vec![a, b]))?;
                odd_worst = odd_worst.max(w.abs());
            }
        }
    }
    report.push("parity zero", odd_worst == 0.0, format!("max |W| over odd index sums = {odd_worst:.1e}"));

    let ext = ExtendedLevels::new(&grid, spectrum.clone())?;
    let mut smallest = f64::INFINITY;
    let mut count = 0;
    for n in [35u64, 245, 385, 1001, 5005, 9095] {
        for k in 2..=4 {
            let system = build_rabi_system(&ext, &spectrum, n, k, 1.0)?;
            for w in &system.couplings {
                smallest = smallest.min(w.abs());
                count += 1;
            }
        }
    }
    report.push(
        "parity nonzero",
        smallest > 1e-10,
        format!("min |W| over {count} admissible factor states = {smallest:.2e}"),
    );

    let configs = bosonic_configs(2, 6);
    let mut asym: f64 = 0.0;
    for a in &configs {
        for b in &configs {
            let ab = contact_matrix_element_with(&grid, a, b)?;
            let ba = contact_matrix_element_with(&grid, b, a)?;
            asym = asym.max((ab - ba).abs());
        }
    }
    report.push("bra/ket symmetry", asym == 0.0, format!("max |W(a,b) - W(b,a)| = {asym:.1e}"));

    // Σ over non-decreasing tuples weighted by permutation count equals the Cartesian sum
    let weights = [0.3, -1.1, 0.7, 2.0];
    let bosonic: f64 = bosonic_configs(2, 3)
        .iter()
        .map(|c| c.permutation_count() as f64 * c.levels().iter().map(|&l| weights[l]).product::<f64>())
        .sum();
    let cartesian: f64 = (0..4).flat_map(|i| (0..4).map(move |j| weights[i] * weights[j])).sum();
    report.push(
        "bosonic completeness",
        (bosonic - cartesian).abs() < 1e-12,
        format!("bosonic {bosonic:.6} vs cartesian {cartesian:.6}"),
    );

    let squarefree = [5u64, 7, 11, 13, 17];
    let mut degeneracy_ok = true;
    for n in 1..=squarefree.len() {
        let product: u64 = squarefree[..n].iter().product();
        for k in 1..=n {
            degeneracy_ok &= enumerate_factorizations(product, k, 2).d() as u128 == stirling_count(n, k);
        }
    }
    report.push("degeneracy", degeneracy_ok, "squarefree enumeration equals S(n,k)".into());

    if full_ode {
        let system = build_rabi_system(&ext, &spectrum, 35, 2, 1.0)?;
        let gamma = system.gamma_for_omega(0.05 / 35.0)?;
        let system = system.with_gamma(gamma);
        let t_end = std::f64::consts::PI / system.omega;
        let traj = integrate_full(&system, &grid, &spectrum, &FullOdeConfig::new(t_end, 201))?;
        let drift = traj.max_norm_drift();
        report.push("norm drift", drift < 1e-6, format!("max |norm - 1| over half a Rabi period = {drift:.2e}"));
    }

    let v0 = grid.v_at_origin();
    let n625 = 625.0;
    let exact = matrix_element_exact(&ext, 5, 4, 3)?;
    let literal = matrix_element_asymptotic(n625, 4, 3)?;
    let shifted = matrix_element_asymptotic_shifted(n625, 4, 3, v0)?;
    report.notes.push(format!(
        "beta_bar for N = 5^4 omits V(0) = {v0:.4}: beta_bar = {:.4}; asymptotic/exact W = {:.3} literal, {:.3} with V(0)",
        beta_bar(n625, 4, 3)?,
        literal / exact,
        shifted / exact
    ));
    report.notes.push(format!("potential converged in {} sweeps", built.sweeps));
    Ok(report)
}
