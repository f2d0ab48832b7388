//! Symmetrized many-boson states and contact-interaction matrix elements.
//!
//! A bosonic state `|k⟩_B` is stored as its non-decreasing level vector. Its
//! normalization is `𝒩 = sqrt(ν₁!⋯ν_m!/n!)`, the inverse square root of the
//! number of distinct permutations, so that `|k⟩_B = 𝒩 Σ_P |Pk⟩` has unit norm.
//! Matrix elements of the collective contact interaction collapse all
//! coordinates onto one, `W = 𝒩_bra⁻¹ 𝒩_ket⁻¹ ∫ Π φ_braᵢ Π φ_ketⱼ dξ`.

use crate::arith::multiplicities;
use crate::error::{Error, Result};
use crate::levels::LevelSource;
use crate::potential::PotentialGrid;
use crate::quadrature::simpson;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Levels of `n` identical bosons, kept non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BosonicConfig {
    levels: Vec<usize>,
}

impl BosonicConfig {
    /// Builds the configuration from levels in any order.
    pub fn new(mut levels: Vec<usize>) -> Self {
        levels.sort_unstable();
        BosonicConfig { levels }
    }

    /// All `n` bosons in level 0.
    pub fn ground(n: usize) -> Self {
        BosonicConfig { levels: vec![0; n] }
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn is_ground(&self) -> bool {
        self.levels.iter().all(|&l| l == 0)
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        multiplicities(&self.levels)
    }

    /// Number of distinct orderings, `n!/(ν₁!⋯ν_m!)`.
    pub fn permutation_count(&self) -> u128 {
        permutation_count(&self.multiplicities())
    }

    pub fn norm_factor(&self) -> f64 {
        normalization(&self.multiplicities())
    }

    pub fn index_sum(&self) -> usize {
        self.levels.iter().sum()
    }

    /// Spatial parity `(-1)^{Σℓ}` as a bool (true = even).
    pub fn is_even(&self) -> bool {
        self.index_sum().is_multiple_of(2)
    }
}

impl fmt::Display for BosonicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(ToString::to_string).collect();
        write!(f, "|{}⟩", parts.join(","))
    }
}

/// `n!/(ν₁!⋯ν_m!)` as a product of binomials.
pub fn permutation_count(multiplicities: &[usize]) -> u128 {
    let mut total = 0u128;
    let mut count = 1u128;
    for &nu in multiplicities {
        for i in 1..=nu as u128 {
            total += 1;
            count = count * total / i;
        }
    }
    count
}

/// `𝒩({ν}) = sqrt(ν₁!⋯ν_m!/n!)`.
pub fn normalization(multiplicities: &[usize]) -> f64 {
    1.0 / (permutation_count(multiplicities) as f64).sqrt()
}

/// Bosonic amplitude `b^B = 𝒩⁻¹ b` from an ordinary (symmetric) amplitude.
pub fn bosonic_amplitude_from_ordinary(b: f64, multiplicities: &[usize]) -> f64 {
    b / normalization(multiplicities)
}

/// Every non-decreasing `n`-vector with entries `<= max_level`, in lexicographic order.
pub fn bosonic_configs(n: usize, max_level: usize) -> Vec<BosonicConfig> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn fill(n: usize, lo: usize, hi: usize, current: &mut Vec<usize>, out: &mut Vec<BosonicConfig>) {
        if current.len() == n {
            out.push(BosonicConfig { levels: current.clone() });
            return;
        }
        for l in lo..=hi {
            current.push(l);
            fill(n, l, hi, current, out);
            current.pop();
        }
    }
    fill(n, 0, max_level, &mut current, &mut out);
    out
}

/// Integral `∫ Π φ_braᵢ Π φ_ketⱼ dξ` without bosonic prefactors.
pub fn overlap_integral(source: &dyn LevelSource, bra: &BosonicConfig, ket: &BosonicConfig) -> Result<f64> {
    if bra.n() != ket.n() {
        return Err(Error::Precondition(format!(
            "bra has {} bosons, ket has {}",
            bra.n(),
            ket.n()
        )));
    }
    if (bra.index_sum() + ket.index_sum()) % 2 == 1 {
        return Ok(0.0);
    }
    let grid = source.grid();
    let range = if bra.levels.contains(&0) || ket.levels.contains(&0) {
        source.ground_support()?
    } else {
        0..grid.points()
    };
    // fixed multiplication order makes W(a, b) and W(b, a) bitwise equal
    let mut all: Vec<usize> = bra.levels.iter().chain(&ket.levels).copied().collect();
    all.sort_unstable();
    let mut product = vec![1.0; range.len()];
    for &l in &all {
        let f = source.sample(l, range.clone())?;
        product.iter_mut().zip(f.iter()).for_each(|(p, x)| *p *= x);
    }
    Ok(simpson(&product, grid.step))
}

/// Bosonic contact matrix element `W^B(bra, ket)` from a level source.
pub fn contact_matrix_element_with(
    source: &dyn LevelSource,
    bra: &BosonicConfig,
    ket: &BosonicConfig,
) -> Result<f64> {
    let raw = overlap_integral(source, bra, ket)?;
    Ok(raw / (bra.norm_factor() * ket.norm_factor()))
}

/// Bosonic contact matrix element using only the grid's solved eigenfunctions.
pub fn contact_matrix_element(grid: &PotentialGrid, bra: &BosonicConfig, ket: &BosonicConfig) -> Result<f64> {
    let top = bra.levels.iter().chain(&ket.levels).copied().max().unwrap_or(0);
    if top >= grid.levels() {
        return Err(Error::LevelOutOfRange { level: top, available: grid.levels() });
    }
    contact_matrix_element_with(grid, bra, ket)
}
