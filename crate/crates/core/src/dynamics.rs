//! Driven k-boson dynamics: the resonant (rotating-wave) closed form and a
//! direct integration of the full coupled amplitude equations.
//!
//! Time is measured in units of ω₀⁻¹ and energies in ħω₀. The drive is
//! `γ sin(ω_ext t)` times the collective contact interaction.

use crate::bosonic::{bosonic_configs, contact_matrix_element_with, overlap_integral, BosonicConfig};
use crate::error::{Error, Result};
use crate::levels::LevelSource;
use crate::ode::{integrate, Stats, Tolerances};
use crate::potential::PotentialGrid;
use crate::spectra::{Spectrum, SpectrumMode, TotalEnergy};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Ground state coupled to its resonant factor states by one drive frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiSystem {
    pub k: usize,
    pub n: u64,
    pub mode: SpectrumMode,
    /// `L` for the log-integer spectrum.
    pub scale: Option<u64>,
    pub omega_ext: f64,
    pub factor_states: Vec<BosonicConfig>,
    /// Integers read off each factor state (level 0 contributes nothing).
    pub factor_values: Vec<Vec<u64>>,
    /// `W_{0,q}` per factor state.
    pub couplings: Vec<f64>,
    pub gamma: f64,
    pub omega: f64,
}

impl RabiSystem {
    pub fn d(&self) -> usize {
        self.factor_states.len()
    }

    /// No factor state is resonant with the drive.
    pub fn no_resonance(&self) -> bool {
        self.factor_states.is_empty()
    }

    pub fn coupling_norm(&self) -> f64 {
        self.couplings.iter().fold(0.0, |acc, w| acc + w * w).sqrt()
    }

    /// Same system driven with strength `gamma`.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.omega = 0.5 * gamma * self.coupling_norm();
        self
    }

    /// Drive strength giving Rabi frequency `omega`.
    pub fn gamma_for_omega(&self, omega: f64) -> Result<f64> {
        let norm = self.coupling_norm();
        if norm == 0.0 {
            return Err(Error::NoResonance(format!("N = {} with k = {}", self.n, self.k)));
        }
        Ok(2.0 * omega / norm)
    }
}

/// Sets up the resonant system for encoding `n` onto `k` bosons.
///
/// `levels` must serve every factor-state level; use
/// [`ExtendedLevels`](crate::levels::ExtendedLevels) when they lie beyond the grid.
/// A `k` at which the energy cannot be distributed yields `d = 0`.
pub fn build_rabi_system(
    levels: &dyn LevelSource,
    spectrum: &Spectrum,
    n: u64,
    k: usize,
    gamma: f64,
) -> Result<RabiSystem> {
    let mut system = RabiSystem {
        k,
        n,
        mode: spectrum.mode(),
        scale: spectrum.scale(),
        omega_ext: 0.0,
        factor_states: Vec::new(),
        factor_values: Vec::new(),
        couplings: Vec::new(),
        gamma,
        omega: 0.0,
    };
    match TotalEnergy::new(spectrum, n, k) {
        Ok(e) => system.omega_ext = e.value,
        // N <= L^k: no product of k parts above L reaches N
        Err(Error::Domain(_)) => return Ok(system),
        Err(e) => return Err(e),
    }
    let ground = BosonicConfig::ground(k);
    for levels_vec in spectrum.decompose_energy(n, k)? {
        let state = BosonicConfig::new(levels_vec);
        let values = state
            .levels()
            .iter()
            .map(|&l| spectrum.level_ratio(l).map(|(num, _)| num))
            .filter(|v| !matches!(v, Ok(1)))
            .collect::<Result<Vec<u64>>>()?;
        let w = contact_matrix_element_with(levels, &ground, &state)?;
        system.factor_states.push(state);
        system.factor_values.push(values);
        system.couplings.push(w);
    }
    Ok(system.with_gamma(gamma))
}

/// Resonant closed form at time `t`: `(b0, b_j)` with `b0 = cos Ωt`,
/// `b_j = W_j / |W| sin Ωt`.
pub fn rwa_amplitudes(system: &RabiSystem, t: f64) -> (f64, Vec<f64>) {
    let norm = system.coupling_norm();
    let (s, c) = (system.omega * t).sin_cos();
    if norm == 0.0 {
        return (1.0, vec![0.0; system.d()]);
    }
    (c, system.couplings.iter().map(|w| w / norm * s).collect())
}

/// Sampled amplitudes of the ground and factor states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub b0: Vec<Complex64>,
    /// Bosonic amplitudes of each factor state, indexed `[state][sample]`.
    pub b_factors: Vec<Vec<Complex64>>,
    pub factor_states: Vec<BosonicConfig>,
    /// Total probability over the tracked basis.
    pub norm: Vec<f64>,
    pub warnings: Vec<String>,
}

impl AmplitudeTrajectory {
    pub fn prob_ground(&self, i: usize) -> f64 {
        self.b0[i].norm_sqr()
    }

    pub fn prob_factor_total(&self, i: usize) -> f64 {
        self.b_factors.iter().map(|b| b[i].norm_sqr()).sum()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// CSV with `t,re_b0,im_b0,prob_ground,prob_factor_total,norm` and one
    /// probability column per factor state.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "t,re_b0,im_b0,prob_ground,prob_factor_total,norm")?;
        for s in &self.factor_states {
            let tag: Vec<String> = s.levels().iter().map(ToString::to_string).collect();
            write!(out, ",prob_{}", tag.join("_"))?;
        }
        writeln!(out)?;
        for (i, t) in self.times.iter().enumerate() {
            write!(
                out,
                "{:.9e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                t,
                self.b0[i].re,
                self.b0[i].im,
                self.prob_ground(i),
                self.prob_factor_total(i),
                self.norm[i]
            )?;
            for b in &self.b_factors {
                write!(out, ",{:.12e}", b[i].norm_sqr())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Closed-form trajectory at the given times.
pub fn rwa_trajectory(system: &RabiSystem, times: &[f64]) -> AmplitudeTrajectory {
    let mut b0 = Vec::with_capacity(times.len());
    let mut b_factors = vec![Vec::with_capacity(times.len()); system.d()];
    let mut norm = Vec::with_capacity(times.len());
    for &t in times {
        let (g, bs) = rwa_amplitudes(system, t);
        b0.push(Complex64::new(g, 0.0));
        for (col, b) in b_factors.iter_mut().zip(&bs) {
            col.push(Complex64::new(*b, 0.0));
        }
        norm.push(g * g + bs.iter().map(|b| b * b).sum::<f64>());
    }
    AmplitudeTrajectory {
        times: times.to_vec(),
        b0,
        b_factors,
        factor_states: system.factor_states.clone(),
        norm,
        warnings: Vec::new(),
    }
}

/// Settings for [`integrate_full`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullOdeConfig {
    /// Highest single-particle level in the basis; default is the largest
    /// factor-state level plus 8.
    pub basis_cutoff: Option<usize>,
    pub t_end: f64,
    pub samples: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl FullOdeConfig {
    pub fn new(t_end: f64, samples: usize) -> Self {
        let tol = Tolerances::default();
        FullOdeConfig { basis_cutoff: None, t_end, samples, rtol: tol.rtol, atol: tol.atol }
    }

    pub fn cutoff_for(&self, system: &RabiSystem) -> usize {
        self.basis_cutoff.unwrap_or_else(|| {
            system.factor_states.iter().flat_map(|s| s.levels().iter().copied()).max().unwrap_or(0) + 8
        })
    }
}

/// The truncated basis with its coupling matrix, ready to integrate.
pub struct FullSystem {
    pub basis: Vec<BosonicConfig>,
    pub energies: Vec<f64>,
    multiplicity: Vec<f64>,
    /// `mult_n · ∫Πφ_mΠφ_n`, row-major.
    coupling: Vec<f64>,
    pub gamma: f64,
    pub omega_ext: f64,
}

impl FullSystem {
    pub fn new(system: &RabiSystem, grid: &PotentialGrid, spectrum: &Spectrum, cutoff: usize) -> Result<Self> {
        if cutoff >= grid.levels() {
            return Err(Error::LevelOutOfRange { level: cutoff, available: grid.levels() });
        }
        let basis = bosonic_configs(system.k, cutoff);
        let energies = basis.iter().map(|s| spectrum.total(s.levels())).collect::<Result<Vec<_>>>()?;
        let multiplicity: Vec<f64> = basis.iter().map(|s| s.permutation_count() as f64).collect();
        let m = basis.len();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| {
                (0..m)
                    .map(|j| if j < i { Ok(0.0) } else { overlap_integral(grid, &basis[i], &basis[j]) })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let mut coupling = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                coupling[i * m + j] = rows[i][j] * multiplicity[j];
                coupling[j * m + i] = rows[i][j] * multiplicity[i];
            }
        }
        Ok(FullSystem { basis, energies, multiplicity, coupling, gamma: system.gamma, omega_ext: system.omega_ext })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, state: &BosonicConfig) -> Option<usize> {
        self.basis.binary_search(state).ok()
    }

    /// `ḃ_m = -iγ sin(ω t) Σ_n mult_n e^{i(E_m-E_n)t} W_mn b_n`.
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64], work: &mut [Complex64]) {
        let m = self.len();
        let drive = self.gamma * (self.omega_ext * t).sin();
        for (w, (b, e)) in work.iter_mut().zip(y.iter().zip(&self.energies)) {
            *w = b * Complex64::from_polar(1.0, -e * t);
        }
        for i in 0..m {
            let row = &self.coupling[i * m..(i + 1) * m];
            let mut acc = Complex64::default();
            for (c, w) in row.iter().zip(work.iter()) {
                acc += w * *c;
            }
            dy[i] = Complex64::new(0.0, -drive) * Complex64::from_polar(1.0, self.energies[i] * t) * acc;
        }
    }

    /// Probability `Σ mult |b|²` of an ordinary-amplitude vector.
    pub fn norm(&self, y: &[Complex64]) -> f64 {
        y.iter().zip(&self.multiplicity).map(|(b, m)| m * b.norm_sqr()).sum()
    }

    /// Bosonic amplitude of basis state `i`.
    pub fn bosonic(&self, y: &[Complex64], i: usize) -> Complex64 {
        y[i] * self.multiplicity[i].sqrt()
    }

    /// Integrates from the ground state and calls `on_sample` with ordinary amplitudes.
    pub fn evolve<S: FnMut(f64, &[Complex64])>(&self, samples: &[f64], tol: Tolerances, on_sample: S) -> Result<Stats> {
        let mut y0 = vec![Complex64::default(); self.len()];
        y0[0] = Complex64::new(1.0, 0.0);
        let mut work = vec![Complex64::default(); self.len()];
        integrate(|t, y, dy| self.rhs(t, y, dy, &mut work), &y0, 0.0, samples, tol, on_sample)
    }
}

/// Integrates the driven system in a truncated basis without the rotating-wave
/// approximation. Phases use the target spectrum; couplings come from the grid.
pub fn integrate_full(
    system: &RabiSystem,
    grid: &PotentialGrid,
    spectrum: &Spectrum,
    config: &FullOdeConfig,
) -> Result<AmplitudeTrajectory> {
    let full = FullSystem::new(system, grid, spectrum, config.cutoff_for(system))?;
    let samples = config.samples.max(2);
    let times: Vec<f64> = (0..samples).map(|i| config.t_end * i as f64 / (samples - 1) as f64).collect();
    let targets: Vec<usize> = system
        .factor_states
        .iter()
        .map(|s| full.index_of(s).ok_or(Error::LevelOutOfRange { level: s.levels()[s.n() - 1], available: 0 }))
        .collect::<Result<_>>()?;

    let mut tol = Tolerances { rtol: config.rtol, atol: config.atol };
    let mut warnings = Vec::new();
    for attempt in 0..2 {
        let mut traj = AmplitudeTrajectory {
            times: Vec::with_capacity(samples),
            b0: Vec::with_capacity(samples),
            b_factors: vec![Vec::with_capacity(samples); targets.len()],
            factor_states: system.factor_states.clone(),
            norm: Vec::with_capacity(samples),
            warnings: Vec::new(),
        };
        full.evolve(&times, tol, |t, y| {
            traj.times.push(t);
            traj.b0.push(y[0]);
            for (col, &i) in traj.b_factors.iter_mut().zip(&targets) {
                col.push(full.bosonic(y, i));
            }
            traj.norm.push(full.norm(y));
        })?;
        let drift = traj.max_norm_drift();
        if drift <= 1e-6 || attempt == 1 {
            if drift > 1e-4 {
                warnings.push(format!("norm drift {drift:.3e} exceeds 1e-4; basis or tolerance too coarse"));
            }
            traj.warnings = warnings;
            return Ok(traj);
        }
        warnings.push(format!("norm drift {drift:.3e} at rtol {:.1e}; retried with rtol {:.1e}", tol.rtol, tol.rtol * 1e-2));
        tol.rtol *= 1e-2;
        tol.atol *= 1e-2;
    }
    unreachable!()
}
