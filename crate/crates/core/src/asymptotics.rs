//! Large-N closed forms for `N = pⁿ`, the Rabi-frequency scaling law, and the
//! region of drive strengths where both the rotating-wave and the decoherence
//! constraints hold.

use crate::bosonic::{contact_matrix_element_with, BosonicConfig};
use crate::error::{Error, Result};
use crate::levels::LevelSource;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Binomial coefficient as a float.
fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `j = 0` coefficient of `cosⁿx = Σ_j d_j(n) cos(2jx)`: `C(n, n/2)/2ⁿ` for even `n`.
pub fn d0(n: usize) -> Result<f64> {
    if n % 2 == 1 {
        return Err(Error::Precondition(format!("d0 is defined for even n, got {n}")));
    }
    Ok(binomial(n, n / 2) / 2f64.powi(n as i32))
}

/// `w(L, n) = (2/π)^{n/2} (n/(π(2L-1)))^{(n-2)/4}`.
pub fn w(scale: u64, n: usize) -> f64 {
    let nf = n as f64;
    (2.0 / PI).powf(nf / 2.0) * (nf / (PI * (2.0 * scale as f64 - 1.0))).powf((nf - 2.0) / 4.0)
}

/// Frequency of the harmonic core, `ω_eff = ω₀/(L - 1/2)`, in units of ω₀.
pub fn omega_eff(scale: u64) -> f64 {
    1.0 / (scale as f64 - 0.5)
}

/// `β̄ = [2 ln(N^{1/n}/L) (2L-1)/n]^{1/2}`, as used in the large-N argument
/// (it carries no `V(0)`; the exact WKB exponent does).
pub fn beta_bar(big_n: f64, n: usize, scale: u64) -> Result<f64> {
    let arg = 2.0 * (big_n.ln() / n as f64 - (scale as f64).ln()) * (2.0 * scale as f64 - 1.0) / n as f64;
    if arg <= 0.0 {
        return Err(Error::Domain(format!("N = {big_n} must exceed L^n = {scale}^{n}")));
    }
    Ok(arg.sqrt())
}

/// Asymptotic `W_{0,p-L}` for `N = pⁿ` with all bosons in one excited level.
pub fn matrix_element_asymptotic(big_n: f64, n: usize, scale: u64) -> Result<f64> {
    matrix_element_asymptotic_shifted(big_n, n, scale, 0.0)
}

/// The same closed form with the WKB wavenumber taken relative to the bottom of
/// the potential, `β² = 2 ln(p/L) - 2V(0)`: every `ln(N/Lⁿ)` becomes
/// `ln(N/Lⁿ) - n V(0)`. `v0 = 0` gives [`matrix_element_asymptotic`].
pub fn matrix_element_asymptotic_shifted(big_n: f64, n: usize, scale: u64, v0: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let ratio = big_n / (scale as f64).powi(n as i32);
    if ratio <= 1.0 || !ratio.is_finite() {
        return Err(Error::Domain(format!("N = {big_n} must exceed L^n = {scale}^{n}")));
    }
    let lambda = ratio.ln() - n as f64 * v0;
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("ln(N/L^n) - n V(0) = {lambda} is not positive")));
    }
    let base = w(scale, n) * lambda.powf(-(n as f64) / 4.0) * big_n.powf(-0.5);
    if n.is_multiple_of(2) {
        Ok(base * d0(n)?)
    } else {
        let tail = (-lambda * (2.0 * scale as f64 - 1.0) / (2.0 * (n * n) as f64)).exp();
        Ok(2.0 * base * d0(n + 1)? * tail)
    }
}

/// Exact `W_{0,p-L}` for `N = pⁿ` by quadrature.
pub fn matrix_element_exact(levels: &dyn LevelSource, p: u64, n: usize, scale: u64) -> Result<f64> {
    if p <= scale {
        return Err(Error::Precondition(format!("p = {p} must exceed L = {scale}")));
    }
    let excited = BosonicConfig::new(vec![(p - scale) as usize; n]);
    contact_matrix_element_with(levels, &BosonicConfig::ground(n), &excited)
}

/// Predicted large-N exponent of `Ω_n(N)`.
pub fn expected_exponent(n: usize, scale: u64) -> f64 {
    if n.is_multiple_of(2) {
        -0.5
    } else {
        -(0.5 + (2.0 * scale as f64 - 1.0) / (2.0 * (n * n) as f64))
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / m).sqrt();
    (slope, intercept, rms)
}

/// Log-log fits of `Ω_n ∝ W_{0,p-L}` against `N = pⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub n: usize,
    pub scale: u64,
    pub primes: Vec<u64>,
    pub expected: f64,
    /// Slope of `ln W` against `ln N`.
    pub raw_slope: f64,
    pub raw_residual: f64,
    /// Slope after removing the `[ln(N/Lⁿ)]^{-n/4}` factor.
    pub corrected_slope: f64,
    pub corrected_residual: f64,
}

/// Fits the scaling exponent from matrix elements `values[i]` at `N = primes[i]ⁿ`.
pub fn fit_scaling(n: usize, scale: u64, primes: &[u64], values: &[f64]) -> Result<ScalingFit> {
    if primes.len() < 4 || primes.len() != values.len() {
        return Err(Error::Precondition("need at least 4 primes, one value each".into()));
    }
    let big_n: Vec<f64> = primes.iter().map(|&p| (p as f64).powi(n as i32)).collect();
    let x: Vec<f64> = big_n.iter().map(|v| v.ln()).collect();
    let raw: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let lk = (scale as f64).powi(n as i32);
    let corrected: Vec<f64> = raw
        .iter()
        .zip(&big_n)
        .map(|(r, nn)| r + n as f64 / 4.0 * (nn / lk).ln().ln())
        .collect();
    let (raw_slope, _, raw_residual) = linear_fit(&x, &raw);
    let (corrected_slope, _, corrected_residual) = linear_fit(&x, &corrected);
    Ok(ScalingFit {
        n,
        scale,
        primes: primes.to_vec(),
        expected: expected_exponent(n, scale),
        raw_slope,
        raw_residual,
        corrected_slope,
        corrected_residual,
    })
}

/// Scaling fit on the asymptotic matrix elements.
pub fn scaling_exponent_check(n: usize, scale: u64, primes: &[u64]) -> Result<ScalingFit> {
    let values = primes
        .iter()
        .map(|&p| matrix_element_asymptotic((p as f64).powi(n as i32), n, scale))
        .collect::<Result<Vec<_>>>()?;
    fit_scaling(n, scale, primes, &values)
}

/// Scaling fit on quadrature matrix elements.
pub fn scaling_exponent_check_exact(
    levels: &dyn LevelSource,
    n: usize,
    scale: u64,
    primes: &[u64],
) -> Result<ScalingFit> {
    let values = primes
        .iter()
        .map(|&p| matrix_element_exact(levels, p, n, scale))
        .collect::<Result<Vec<_>>>()?;
    fit_scaling(n, scale, primes, &values)
}

/// Physical parameters of the feasibility scan. Frequencies in Hz, times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityParams {
    pub scale: u64,
    pub n: usize,
    pub t_dec: f64,
    pub nu0: f64,
    /// Minimum `Ω T_dec`.
    pub dec_margin: f64,
    pub n_range: (f64, f64),
    pub n_points: usize,
    pub gamma_range: (f64, f64),
    pub gamma_points: usize,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        FeasibilityParams {
            scale: 3,
            n: 4,
            t_dec: 2.0,
            nu0: 5000.0,
            dec_margin: 5.0,
            n_range: (1e2, 1e5),
            n_points: 200,
            gamma_range: (1e-3, 1e2),
            gamma_points: 200,
        }
    }
}

impl FeasibilityParams {
    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.nu0
    }

    /// `Ω T_dec ≥ margin` with `Ω` in units of ω₀.
    pub fn dec_ok(&self, omega: f64) -> bool {
        omega * self.omega0() * self.t_dec >= self.dec_margin
    }

    fn n_grid(&self) -> Vec<f64> {
        log_grid(self.n_range, self.n_points)
    }

    fn gamma_grid(&self) -> Vec<f64> {
        log_grid(self.gamma_range, self.gamma_points)
    }
}

/// `count` points spaced evenly in `ln` over `[lo, hi]`.
pub fn log_grid((lo, hi): (f64, f64), count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityPoint {
    pub n: f64,
    pub gamma: f64,
    /// Rabi frequency in units of ω₀.
    pub omega_rabi: f64,
    pub rwa_ok: bool,
    pub dec_ok: bool,
    pub feasible: bool,
}

/// Evaluates both constraints on the `(N, γ)` grid with the asymptotic matrix element.
pub fn feasibility_region(params: &FeasibilityParams) -> Result<Vec<FeasibilityPoint>> {
    let gammas = params.gamma_grid();
    let rows: Vec<Vec<FeasibilityPoint>> = params
        .n_grid()
        .into_par_iter()
        .map(|big_n| {
            let w = matrix_element_asymptotic(big_n, params.n, params.scale)?;
            Ok(gammas
                .iter()
                .map(|&gamma| {
                    let omega = 0.5 * gamma * w;
                    let rwa_ok = omega <= 1.0 / big_n;
                    let dec_ok = params.dec_ok(omega);
                    FeasibilityPoint { n: big_n, gamma, omega_rabi: omega, rwa_ok, dec_ok, feasible: rwa_ok && dec_ok }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Largest `N` with at least one feasible `γ`.
pub fn max_feasible_n(points: &[FeasibilityPoint]) -> Option<f64> {
    points.iter().filter(|p| p.feasible).map(|p| p.n).fold(None, |m, n| Some(m.map_or(n, |m: f64| m.max(n))))
}

/// Boundary curves in `γ` at each `N`: `Ω = ω₀/N` (RWA) and `Ω T_dec = margin` (dec).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub n: f64,
    pub gamma_rwa: f64,
    pub gamma_dec: f64,
}

pub fn boundary_curves(params: &FeasibilityParams) -> Result<Vec<BoundaryPoint>> {
    params
        .n_grid()
        .into_iter()
        .map(|big_n| {
            let w = matrix_element_asymptotic(big_n, params.n, params.scale)?;
            Ok(BoundaryPoint {
                n: big_n,
                gamma_rwa: 2.0 / (big_n * w),
                gamma_dec: 2.0 * params.dec_margin / (params.omega0() * params.t_dec * w),
            })
        })
        .collect()
}

/// Largest `N` at which the two constraints can hold together: `ω₀ T_dec / margin`.
pub fn feasibility_limit(params: &FeasibilityParams) -> f64 {
    params.omega0() * params.t_dec / params.dec_margin
}

/// Writes `N,gamma,omega_rabi,rwa_ok,dec_ok,feasible`.
pub fn write_feasibility_csv<W: Write>(points: &[FeasibilityPoint], mut out: W) -> Result<()> {
    writeln!(out, "N,gamma,omega_rabi,rwa_ok,dec_ok,feasible")?;
    for p in points {
        writeln!(
            out,
            "{:.6e},{:.6e},{:.6e},{},{},{}",
            p.n, p.gamma, p.omega_rabi, p.rwa_ok as u8, p.dec_ok as u8, p.feasible as u8
        )?;
    }
    Ok(())
}

/// Exact detuning to the nearest neighbours `N ± 1` and the `1/N` estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffResonance {
    pub upper: f64,
    pub lower: f64,
    pub estimate: f64,
}

impl OffResonance {
    /// Largest relative deviation of the two exact gaps from `1/N`.
    pub fn relative_error(&self) -> f64 {
        ((self.upper - self.estimate) / self.estimate)
            .abs()
            .max(((self.lower - self.estimate) / self.estimate).abs())
    }
}

/// `|ln((N±1)/Lⁿ) - ln(N/Lⁿ)|`; the `Lⁿ` cancels.
pub fn off_resonance_gap(big_n: u64) -> Result<OffResonance> {
    if big_n < 2 {
        return Err(Error::Domain(format!("N must be at least 2, got {big_n}")));
    }
    let n = big_n as f64;
    Ok(OffResonance { upper: (1.0 / n).ln_1p(), lower: -(-1.0 / n).ln_1p(), estimate: 1.0 / n })
}
