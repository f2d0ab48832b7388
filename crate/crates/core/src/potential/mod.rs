//! Trap potentials with a prescribed spectrum.
//!
//! Coordinates are dimensionless (`ξ = αx`, `α² = μω₀/ħ`) and energies are in
//! units of ħω₀, so the stationary equation reads `-½φ'' + Vφ = Eφ`.

mod eigen;
pub mod shooting;

use crate::error::{Error, Result};
use crate::quadrature::trapezoid;
use crate::spectra::Spectrum;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub use shooting::{shooting_eigenvalue, shooting_spectrum};

/// Uniform grid on `[-ξ_max, ξ_max]`.
///
/// The half-width is a multiple of `2h`, so the grid contains ξ = 0 and
/// every other point forms the coarse grid used for Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub xi_max: f64,
    pub step: f64,
    half: usize,
}

impl Grid {
    pub fn new(xi_max: f64, step: f64) -> Result<Self> {
        if !(xi_max > 0.0 && step > 0.0 && step < xi_max) {
            return Err(Error::Precondition(format!(
                "grid needs 0 < step < xi_max (got step={step}, xi_max={xi_max})"
            )));
        }
        let mut half = (xi_max / step).round() as usize;
        half += half % 2;
        Ok(Grid { xi_max: half as f64 * step, step, half })
    }

    pub fn points(&self) -> usize {
        2 * self.half + 1
    }

    /// Index of ξ = 0.
    pub fn center(&self) -> usize {
        self.half
    }

    pub fn xi(&self, i: usize) -> f64 {
        (i as f64 - self.half as f64) * self.step
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points()).map(|i| self.xi(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.points()).map(|i| f(self.xi(i))).collect()
    }

    fn coarse(&self) -> Grid {
        Grid { xi_max: self.xi_max, step: 2.0 * self.step, half: self.half / 2 }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(25.0, 0.01).unwrap()
    }
}

/// Lowest eigenpairs of a sampled potential.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Grid-sampled eigenfunctions, `∫φ² dξ = 1` under the trapezoid rule.
    pub functions: Vec<Vec<f64>>,
}

/// A sampled potential with its lowest eigenpairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub grid: Grid,
    /// `V(ξ)/ħω₀` at the grid points.
    pub v: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<Vec<f64>>,
}

impl PotentialGrid {
    pub fn from_potential(grid: Grid, v: Vec<f64>, levels: usize) -> Result<Self> {
        let pairs = solve_eigenproblem(&grid, &v, levels)?;
        Ok(PotentialGrid { grid, v, eigenvalues: pairs.values, eigenfunctions: pairs.functions })
    }

    pub fn levels(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn v_at_origin(&self) -> f64 {
        self.v[self.grid.center()]
    }

    pub fn eigenfunction(&self, level: usize) -> Result<&[f64]> {
        self.eigenfunctions
            .get(level)
            .map(Vec::as_slice)
            .ok_or(Error::LevelOutOfRange { level, available: self.levels() })
    }

    /// Writes `xi,v` rows with 12 significant digits.
    pub fn write_potential_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "xi,v")?;
        for (i, v) in self.v.iter().enumerate() {
            writeln!(out, "{:.11e},{:.11e}", self.grid.xi(i), v)?;
        }
        Ok(())
    }

    /// Writes `xi,phi0,phi1,...` rows with 12 significant digits.
    pub fn write_eigenfunctions_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.levels()).map(|l| format!("phi{l}")).collect();
        writeln!(out, "xi,{}", header.join(","))?;
        for i in 0..self.grid.points() {
            write!(out, "{:.11e}", self.grid.xi(i))?;
            for f in &self.eigenfunctions {
                write!(out, ",{:.11e}", f[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Largest |φ| within the outer 5% of the grid on either side.
pub fn boundary_tail(grid: &Grid, f: &[f64]) -> f64 {
    let band = (grid.points() / 40).max(2);
    f[..band].iter().chain(&f[f.len() - band..]).fold(0.0f64, |m, x| m.max(x.abs()))
}

const TAIL_LIMIT: f64 = 1e-10;

/// Lowest `levels` eigenpairs of `-½φ'' + vφ = Eφ` with φ = 0 at ±ξ_max.
///
/// Eigenvalues are Richardson-extrapolated from the three-point Laplacian on
/// the grid and on its every-other-point subgrid, which removes the O(h²)
/// discretization error. Eigenfunctions come from the fine grid, have exact
/// parity `(-1)^ℓ`, and are signed so that φ(0) > 0 (even) or φ'(0) > 0 (odd).
pub fn solve_eigenproblem(grid: &Grid, v: &[f64], levels: usize) -> Result<Eigenpairs> {
    let pairs = eigenpairs_unchecked(grid, v, levels)?;
    if let Some(last) = pairs.functions.last() {
        let tail = boundary_tail(grid, last);
        if tail > TAIL_LIMIT {
            return Err(Error::GridTooSmall {
                level: levels - 1,
                tail,
                suggested_xi_max: suggest_extent(grid, last),
            });
        }
    }
    Ok(pairs)
}

fn suggest_extent(grid: &Grid, f: &[f64]) -> f64 {
    // position where |φ| last exceeds 1e-3 of its peak, scaled by the decay so far
    let peak = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let c = grid.center();
    let reach = (c..grid.points()).rev().find(|&i| f[i].abs() > 1e-3 * peak).unwrap_or(c);
    (grid.xi(reach) * 2.0).max(grid.xi_max * 1.5)
}

fn fd_diagonal(grid: &Grid, v: &[f64], stride: usize) -> (Vec<f64>, f64) {
    let h = grid.step * stride as f64;
    let kinetic = 1.0 / (h * h);
    let n = grid.points();
    let diag: Vec<f64> = (stride..n - 1).step_by(stride).map(|i| kinetic + v[i]).collect();
    (diag, -0.5 * kinetic)
}

fn eigenpairs_unchecked(grid: &Grid, v: &[f64], levels: usize) -> Result<Eigenpairs> {
    let n = grid.points();
    if v.len() != n {
        return Err(Error::Precondition(format!(
            "potential has {} samples, grid has {n}",
            v.len()
        )));
    }
    if levels == 0 || levels + 2 > grid.coarse().points() {
        return Err(Error::Precondition(format!("cannot resolve {levels} levels on this grid")));
    }
    let (fine_diag, fine_off) = fd_diagonal(grid, v, 1);
    let (coarse_diag, coarse_off) = fd_diagonal(grid, v, 2);
    let fine = eigen::lowest_eigenvalues(&fine_diag, fine_off, levels);
    let coarse = eigen::lowest_eigenvalues(&coarse_diag, coarse_off, levels);
    let values: Vec<f64> = fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect();

    let c = grid.center();
    let h = grid.step;
    let mut functions: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for (level, &value) in fine.iter().enumerate() {
        let odd = level % 2 == 1;
        let start: Vec<f64> = (1..n - 1)
            .map(|i| {
                let x = grid.xi(i);
                let bump = (-x * x / 50.0).exp() * (1.0 + 0.3 * (1.7 * x).cos());
                if odd { x * bump } else { bump }
            })
            .collect();
        let interior = eigen::inverse_iteration(&fine_diag, fine_off, value, &start);
        let mut f = vec![0.0; n];
        f[1..n - 1].copy_from_slice(&interior);
        // project onto the exact parity sector
        for i in 0..c {
            let j = n - 1 - i;
            let avg = if odd { 0.5 * (f[j] - f[i]) } else { 0.5 * (f[j] + f[i]) };
            f[j] = avg;
            f[i] = if odd { -avg } else { avg };
        }
        if odd {
            f[c] = 0.0;
        }
        for other in functions.iter().skip(level % 2).step_by(2) {
            let overlap = h * other.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>();
            f.iter_mut().zip(other).for_each(|(x, o)| *x -= overlap * o);
        }
        let norm = trapezoid(&f.iter().map(|x| x * x).collect::<Vec<_>>(), h).sqrt();
        let sign = if odd { f[c + 1] } else { f[c] };
        let scale = if sign < 0.0 { -1.0 / norm } else { 1.0 / norm };
        f.iter_mut().for_each(|x| *x *= scale);
        functions.push(f);
    }
    Ok(Eigenpairs { values, functions })
}

/// How a sweep turns eigenvalue residuals into a potential correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateRule {
    /// `ΔV = η Σ ΔE_ℓ φ_ℓ² / Σ φ_ℓ²`.
    Diagonal,
    /// Solves the first-order (Hellmann–Feynman) system `Σ_ℓ c_ℓ ⟨φ_m|b_ℓ|φ_m⟩ = ΔE_m`
    /// for the weights of `b_ℓ = φ_ℓ² / Σ φ²`, then applies `η Σ c_ℓ b_ℓ`.
    Newton,
}

/// Settings for [`build_potential`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub xi_max: f64,
    pub step: f64,
    /// Convergence threshold on `max_ℓ |ΔE_ℓ|` in ħω₀.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub damping: f64,
    pub rule: UpdateRule,
    /// Harmonic frequency of the starting potential, in ω₀; `None` picks the
    /// default for the target spectrum.
    pub initial_omega: Option<f64>,
    pub initial_shape: InitialShape,
    /// Rebuild on the suggested extent when the top eigenfunction reaches the wall.
    pub auto_extend: bool,
}

/// Shape of the starting potential, both harmonic with frequency ω near ξ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialShape {
    /// `½ω²ξ²`.
    Harmonic,
    /// `½ ln(1 + ω²ξ²)`: harmonic at the origin, logarithmic far out.
    LogHarmonic,
}

impl InitialShape {
    pub fn sample(self, grid: &Grid, omega: f64) -> Vec<f64> {
        match self {
            InitialShape::Harmonic => grid.sample(|x| 0.5 * omega * omega * x * x),
            InitialShape::LogHarmonic => grid.sample(|x| 0.5 * (omega * omega * x * x).ln_1p()),
        }
    }
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            xi_max: 40.0,
            step: 0.01,
            tolerance: 1e-3,
            max_sweeps: 500,
            damping: 1.0,
            rule: UpdateRule::Newton,
            initial_omega: None,
            initial_shape: InitialShape::LogHarmonic,
            auto_extend: true,
        }
    }
}

/// A built potential plus the per-sweep residual history.
#[derive(Debug, Clone)]
pub struct BuildReport {
    pub potential: PotentialGrid,
    pub residuals: Vec<f64>,
    pub sweeps: usize,
}

/// Target energies and default starting frequency for a spectrum.
pub fn default_initial_omega(target: &Spectrum) -> f64 {
    match target {
        Spectrum::LogInteger { scale } => 1.0 / (*scale as f64 - 0.5),
        Spectrum::Prime(_) => 2.0 * 2f64.ln(),
    }
}

/// Constructs a potential whose lowest `levels` eigenvalues reproduce `target`.
pub fn build_potential(target: &Spectrum, levels: usize, config: &BuildConfig) -> Result<BuildReport> {
    if levels < 2 {
        return Err(Error::Precondition("need at least two levels".into()));
    }
    let energies = target.energies(levels)?;
    let omega = config.initial_omega.unwrap_or_else(|| default_initial_omega(target));
    let mut xi_max = config.xi_max;
    let mut attempts = 0;
    loop {
        let grid = Grid::new(xi_max, config.step)?;
        let v0 = config.initial_shape.sample(&grid, omega);
        match build_potential_from(&energies, grid, v0, config) {
            Err(Error::GridTooSmall { suggested_xi_max, .. }) if config.auto_extend && attempts < 4 => {
                attempts += 1;
                xi_max = suggested_xi_max.max(1.25 * xi_max);
            }
            other => return other,
        }
    }
}

/// Hellmann–Feynman iteration from an explicit starting potential.
pub fn build_potential_from(
    targets: &[f64],
    grid: Grid,
    mut v: Vec<f64>,
    config: &BuildConfig,
) -> Result<BuildReport> {
    let levels = targets.len();
    if levels < 2 || targets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("target energies must be strictly increasing".into()));
    }
    symmetrize(&mut v);
    let mut pairs = eigenpairs_unchecked(&grid, &v, levels)?;
    let mut residual = gauge_and_residual(&mut v, &mut pairs, targets);
    let mut history = vec![residual];
    let mut eta = config.damping;
    let mut sweeps = 0;
    while residual >= config.tolerance {
        if sweeps >= config.max_sweeps {
            return Err(stalled(&grid, &pairs, history));
        }
        sweeps += 1;
        let delta = correction(&grid, &pairs, targets, config.rule);
        let mut accepted = false;
        while eta > 1e-6 {
            let mut trial: Vec<f64> = v.iter().zip(&delta).map(|(a, d)| a + eta * d).collect();
            symmetrize(&mut trial);
            let mut trial_pairs = eigenpairs_unchecked(&grid, &trial, levels)?;
            let trial_residual = gauge_and_residual(&mut trial, &mut trial_pairs, targets);
            if trial_residual < residual {
                v = trial;
                pairs = trial_pairs;
                residual = trial_residual;
                eta = (eta * 2.0).min(config.damping);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        history.push(residual);
        if !accepted {
            return Err(stalled(&grid, &pairs, history));
        }
    }
    let pairs_final = solve_eigenproblem(&grid, &v, levels)?;
    let potential = PotentialGrid {
        grid,
        v,
        eigenvalues: pairs_final.values,
        eigenfunctions: pairs_final.functions,
    };
    Ok(BuildReport { potential, residuals: history, sweeps })
}

/// A stall with the top level pressed against the wall is a box problem, not a convergence one.
fn stalled(grid: &Grid, pairs: &Eigenpairs, history: Vec<f64>) -> Error {
    match pairs.functions.last() {
        Some(top) if boundary_tail(grid, top) > TAIL_LIMIT => Error::GridTooSmall {
            level: pairs.functions.len() - 1,
            tail: boundary_tail(grid, top),
            suggested_xi_max: suggest_extent(grid, top),
        },
        _ => Error::NonConvergence { history },
    }
}

fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    for i in 0..n / 2 {
        let avg = 0.5 * (v[i] + v[n - 1 - i]);
        v[i] = avg;
        v[n - 1 - i] = avg;
    }
}

/// Shifts `v` so the ground level hits its target, then returns `max |ΔE|`.
fn gauge_and_residual(v: &mut [f64], pairs: &mut Eigenpairs, targets: &[f64]) -> f64 {
    let shift = targets[0] - pairs.values[0];
    v.iter_mut().for_each(|x| *x += shift);
    pairs.values.iter_mut().for_each(|e| *e += shift);
    pairs.values.iter().zip(targets).map(|(e, t)| (e - t).abs()).fold(0.0, f64::max)
}

fn correction(grid: &Grid, pairs: &Eigenpairs, targets: &[f64], rule: UpdateRule) -> Vec<f64> {
    let n = grid.points();
    let levels = targets.len();
    let density: Vec<f64> =
        (0..n).map(|i| pairs.functions.iter().map(|f| f[i] * f[i]).sum()).collect();
    let peak = density.iter().copied().fold(0.0, f64::max);
    let floor = 1e-12 * peak;
    let c = grid.center();
    // explored region: contiguous band around ξ = 0 where the density is resolvable
    let mut edge = c;
    while edge + 1 < n && density[edge + 1] > floor {
        edge += 1;
    }
    let residual: Vec<f64> = targets.iter().zip(&pairs.values).map(|(t, e)| t - e).collect();
    let weights: Vec<f64> = match rule {
        UpdateRule::Diagonal => residual,
        UpdateRule::Newton => {
            let h = grid.step;
            let mut a = vec![vec![0.0; levels]; levels];
            for (m, row) in a.iter_mut().enumerate() {
                for (l, entry) in row.iter_mut().enumerate() {
                    let fm = &pairs.functions[m];
                    let fl = &pairs.functions[l];
                    *entry = h * (n - 1 - edge..=edge)
                        .map(|i| fm[i] * fm[i] * fl[i] * fl[i] / density[i])
                        .sum::<f64>();
                }
            }
            solve_dense(a, residual.clone()).unwrap_or(residual)
        }
    };
    let mut delta = vec![0.0; n];
    for i in c..=edge {
        let mut num = 0.0;
        for (w, f) in weights.iter().zip(&pairs.functions) {
            num += w * f[i] * f[i];
        }
        delta[i] = num / density[i];
    }
    for i in edge + 1..n {
        delta[i] = delta[edge];
    }
    for i in 0..c {
        delta[i] = delta[n - 1 - i];
    }
    delta
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Number of sign changes, ignoring samples below `1e-8` of the peak.
pub fn count_nodes(f: &[f64]) -> usize {
    let peak = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &x in f {
        if x.abs() < 1e-8 * peak {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            nodes += 1;
        }
        last = x;
    }
    nodes
}
