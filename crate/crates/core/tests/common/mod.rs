#![allow(dead_code)]

use logfactor::potential::{build_potential, BuildConfig, PotentialGrid};
use logfactor::spectra::Spectrum;
use std::sync::OnceLock;

pub fn log_spectrum() -> Spectrum {
    Spectrum::log_integer(3).unwrap()
}

/// L = 3, seven levels, default build settings.
pub fn log7() -> &'static PotentialGrid {
    static CELL: OnceLock<PotentialGrid> = OnceLock::new();
    CELL.get_or_init(|| build_potential(&log_spectrum(), 7, &BuildConfig::default()).unwrap().potential)
}

/// L = 3, thirteen levels on a wider box (enough for a full-equation basis up to level 12).
pub fn log13() -> &'static PotentialGrid {
    static CELL: OnceLock<PotentialGrid> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = BuildConfig { xi_max: 60.0, tolerance: 1e-8, ..Default::default() };
        build_potential(&log_spectrum(), 13, &config).unwrap().potential
    })
}

/// Prime spectrum, fourteen levels.
pub fn prime14() -> &'static PotentialGrid {
    static CELL: OnceLock<PotentialGrid> = OnceLock::new();
    CELL.get_or_init(|| build_potential(&Spectrum::prime(14), 14, &BuildConfig::default()).unwrap().potential)
}
