//! Single-particle wavefunctions on a grid, by level index.
//!
//! [`PotentialGrid`] serves only the levels it solved for. [`ExtendedLevels`]
//! adds every higher level through the near-centre WKB form
//! `φ_ℓ(ξ) ≈ sqrt(2ω_ℓ/π) cos(β_ℓ ξ) / sqrt(β_ℓ)` (sin for odd ℓ), with
//! `β_ℓ = sqrt(2(E_ℓ - V(0)))` and `ω_ℓ` the local level spacing. The form is
//! only meaningful inside integrals that also contain the ground state, which
//! confines the integrand to the harmonic core.

use crate::error::{Error, Result};
use crate::potential::{Grid, PotentialGrid};
use crate::spectra::Spectrum;
use std::borrow::Cow;
use std::f64::consts::PI;
use std::ops::Range;

/// Anything that can sample `φ_ℓ` on a grid.
pub trait LevelSource: Sync {
    fn grid(&self) -> &Grid;

    /// Samples of `φ_ℓ` at grid indices `range`.
    fn sample(&self, level: usize, range: Range<usize>) -> Result<Cow<'_, [f64]>>;

    /// Grid indices outside of which the ground state is negligible (`< 1e-17` of its peak).
    fn ground_support(&self) -> Result<Range<usize>> {
        let n = self.grid().points();
        let f = self.sample(0, 0..n)?;
        let peak = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lo = f.iter().position(|x| x.abs() > 1e-17 * peak).unwrap_or(0);
        let hi = f.iter().rposition(|x| x.abs() > 1e-17 * peak).map_or(n, |i| i + 1);
        Ok(lo..hi)
    }
}

impl LevelSource for PotentialGrid {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn sample(&self, level: usize, range: Range<usize>) -> Result<Cow<'_, [f64]>> {
        Ok(Cow::Borrowed(&self.eigenfunction(level)?[range]))
    }
}

/// Grid eigenfunctions, extended to arbitrary levels by the WKB core form.
pub struct ExtendedLevels<'a> {
    potential: &'a PotentialGrid,
    spectrum: Spectrum,
    support: Range<usize>,
}

impl<'a> ExtendedLevels<'a> {
    pub fn new(potential: &'a PotentialGrid, spectrum: Spectrum) -> Result<Self> {
        let support = potential.ground_support()?;
        Ok(ExtendedLevels { potential, spectrum, support })
    }

    pub fn potential(&self) -> &PotentialGrid {
        self.potential
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// True when `level` is served by the WKB form rather than the grid.
    pub fn is_approximate(&self, level: usize) -> bool {
        level >= self.potential.levels()
    }

    fn spacing(&self, level: usize) -> Result<f64> {
        match self.spectrum {
            // dE/dℓ of ln(ℓ/L + 1)
            Spectrum::LogInteger { scale } => Ok(1.0 / (level as f64 + scale as f64)),
            Spectrum::Prime(_) => Ok(0.5
                * (self.spectrum.energy(level + 1)? - self.spectrum.energy(level.saturating_sub(1))?)),
        }
    }

    fn wkb(&self, level: usize, range: Range<usize>) -> Result<Vec<f64>> {
        let beta2 = 2.0 * (self.spectrum.energy(level)? - self.potential.v_at_origin());
        if beta2 <= 0.0 {
            return Err(Error::Domain(format!("level {level} lies below V(0)")));
        }
        let beta = beta2.sqrt();
        let amp = (2.0 * self.spacing(level)? / PI).sqrt() / beta.sqrt();
        let grid = &self.potential.grid;
        let odd = level % 2 == 1;
        Ok(range
            .map(|i| {
                let arg = beta * grid.xi(i);
                amp * if odd { arg.sin() } else { arg.cos() }
            })
            .collect())
    }
}

impl LevelSource for ExtendedLevels<'_> {
    fn grid(&self) -> &Grid {
        &self.potential.grid
    }

    fn sample(&self, level: usize, range: Range<usize>) -> Result<Cow<'_, [f64]>> {
        if !self.is_approximate(level) {
            return self.potential.sample(level, range);
        }
        if range.start < self.support.start || range.end > self.support.end {
            return Err(Error::Precondition(format!(
                "level {level} is approximated only on the ground-state core"
            )));
        }
        Ok(Cow::Owned(self.wkb(level, range)?))
    }

    fn ground_support(&self) -> Result<Range<usize>> {
        Ok(self.support.clone())
    }
}
