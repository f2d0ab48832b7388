//! Single-particle spectra and the distribution of a total energy onto
//! several subsystems.
//!
//! Energies are in units of ħω₀. Every yes/no decision about whether an
//! energy can be distributed is made on the integer arguments of the
//! logarithms; floating-point values are only produced for reporting.

use crate::arith::{prime_factors, PrimeTable};
use crate::degeneracy::enumerate_factorizations;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMode {
    LogInteger,
    Prime,
}

/// A level scheme `ℓ ↦ E_ℓ` with `E_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `E_ℓ = ln(ℓ/L + 1)` with odd scale `L >= 3`.
    LogInteger { scale: u64 },
    /// `E_ℓ = ln p_ℓ` with `p_0 = 1`.
    Prime(PrimeTable),
}

impl Spectrum {
    pub fn log_integer(scale: u64) -> Result<Self> {
        if scale < 3 || scale.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "scale L must be odd and >= 3, got {scale}"
            )));
        }
        Ok(Spectrum::LogInteger { scale })
    }

    /// Prime spectrum with a table covering at least `levels` levels.
    pub fn prime(levels: usize) -> Self {
        Spectrum::Prime(PrimeTable::with_levels(levels))
    }

    pub fn mode(&self) -> SpectrumMode {
        match self {
            Spectrum::LogInteger { .. } => SpectrumMode::LogInteger,
            Spectrum::Prime(_) => SpectrumMode::Prime,
        }
    }

    pub fn scale(&self) -> Option<u64> {
        match self {
            Spectrum::LogInteger { scale } => Some(*scale),
            Spectrum::Prime(_) => None,
        }
    }

    /// Integer ratio `(numerator, denominator)` with `E_ℓ = ln(numerator/denominator)`.
    pub fn level_ratio(&self, level: usize) -> Result<(u64, u64)> {
        match self {
            Spectrum::LogInteger { scale } => Ok((level as u64 + scale, *scale)),
            Spectrum::Prime(table) => table
                .get(level)
                .map(|p| (p, 1))
                .ok_or(Error::ExtendTable { requested: level, available: table.len() }),
        }
    }

    pub fn energy(&self, level: usize) -> Result<f64> {
        let (num, den) = self.level_ratio(level)?;
        Ok(if num == den { 0.0 } else { (num as f64 / den as f64).ln() })
    }

    /// The first `count` energies.
    pub fn energies(&self, count: usize) -> Result<Vec<f64>> {
        (0..count).map(|l| self.energy(l)).collect()
    }

    /// Sum of level energies, reported in floating point.
    pub fn total(&self, levels: &[usize]) -> Result<f64> {
        levels.iter().map(|&l| self.energy(l)).sum()
    }

    /// All non-decreasing `k`-vectors of levels whose energies sum to the
    /// drive energy associated with `n` (`ln(N/L^k)` or `ln N`).
    pub fn decompose_energy(&self, n: u64, k: usize) -> Result<Vec<Vec<usize>>> {
        if n < 2 || k == 0 {
            return Err(Error::Precondition(format!("need N >= 2 and k >= 1 (N={n}, k={k})")));
        }
        match self {
            Spectrum::LogInteger { scale } => {
                if let Some(p) = prime_factors(n).into_iter().find(|&p| p <= *scale) {
                    return Err(Error::Precondition(format!(
                        "N = {n} has the factor {p} <= L = {scale}; strip it before factoring"
                    )));
                }
                Ok(enumerate_factorizations(n, k, scale + 1)
                    .solutions
                    .into_iter()
                    .map(|parts| parts.into_iter().map(|q| (q - scale) as usize).collect())
                    .collect())
            }
            Spectrum::Prime(table) => {
                let primes = prime_factors(n);
                if primes.len() > k {
                    return Ok(Vec::new());
                }
                let mut levels = vec![0usize; k - primes.len()];
                for p in primes {
                    let idx = table.index_of(p).ok_or(Error::ExtendTable {
                        requested: p as usize,
                        available: table.len(),
                    })?;
                    levels.push(idx);
                }
                Ok(vec![levels])
            }
        }
    }

    /// Exact check that `levels` carry the energy of `n` on `levels.len()` subsystems.
    pub fn hosts(&self, levels: &[usize], n: u64) -> Result<bool> {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for &l in levels {
            let (a, b) = self.level_ratio(l)?;
            num = num.checked_mul(a as u128).ok_or_else(overflow)?;
            den = den.checked_mul(b as u128).ok_or_else(overflow)?;
        }
        // LogInteger: prod(ℓ+L) / L^k == N / L^k, same denominator on both sides
        Ok(match self {
            Spectrum::LogInteger { scale } => {
                den == (*scale as u128).pow(levels.len() as u32) && num == n as u128
            }
            Spectrum::Prime(_) => den == 1 && num == n as u128,
        })
    }
}

fn overflow() -> Error {
    Error::Domain("level product overflows 128 bits".into())
}

/// The drive energy `ħω_ext` for `n` distributed over `k` subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalEnergy {
    pub n: u64,
    pub k: usize,
    pub value: f64,
}

impl TotalEnergy {
    pub fn new(spectrum: &Spectrum, n: u64, k: usize) -> Result<Self> {
        let value = match spectrum {
            Spectrum::LogInteger { scale } => {
                let lk = (*scale as u128).checked_pow(k as u32);
                if lk.is_none_or(|lk| n as u128 <= lk) {
                    return Err(Error::Domain(format!("N = {n} must exceed L^k = {scale}^{k}")));
                }
                (n as f64).ln() - k as f64 * (*scale as f64).ln()
            }
            Spectrum::Prime(_) => (n as f64).ln(),
        };
        Ok(TotalEnergy { n, k, value })
    }
}
