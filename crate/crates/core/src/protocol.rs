//! Factorization protocols built on the driven boson system.
//!
//! * iterative: raise the boson count `k = 2, 3, …` until the drive finds
//!   no resonance; the factors of the last excited step are the primes.
//! * known-n: a single step at the true prime count.
//! * prime spectrum: a single step with `⌊log₂ N⌋ + 1` bosons on the
//!   spectrum `E_ℓ = ln p_ℓ`, driven at `ln N` and `ln 2N`.
//!
//! Whether a step is resonant is decided in exact integer arithmetic; the
//! measurements that find the factor state are simulated with the
//! rotating-wave closed form (or the full equations on request).

use crate::arith::{is_prime, prime_factors, PrimeTable};
use crate::bosonic::BosonicConfig;
use crate::dynamics::{build_rabi_system, FullOdeConfig, FullSystem, RabiSystem};
use crate::error::{Error, Result};
use crate::levels::ExtendedLevels;
use crate::measurement::{average_probability, measure_at_pi_half, measure_random_time, MeasurementOutcome};
use crate::ode::Tolerances;
use crate::potential::PotentialGrid;
use crate::spectra::Spectrum;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolMode {
    Iterative,
    KnownN,
    PrimeSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Running,
    Factored,
    Prime,
    /// A resonant step never produced a factor state within the repeat budget.
    Exhausted,
    /// The supplied prime count does not fit `N`.
    Inconsistent,
}

/// How the drive strength of each step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GammaPolicy {
    /// Largest `γ` with `Ω ≤ safety · ω₀/N`.
    RwaSafe { safety: f64 },
    Fixed { gamma: f64 },
}

impl Default for GammaPolicy {
    fn default() -> Self {
        GammaPolicy::RwaSafe { safety: 0.05 }
    }
}

impl GammaPolicy {
    pub fn gamma_for(&self, system: &RabiSystem) -> Result<f64> {
        match *self {
            GammaPolicy::RwaSafe { safety } => system.gamma_for_omega(safety / system.n as f64),
            GammaPolicy::Fixed { gamma } => Ok(gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub gamma_policy: GammaPolicy,
    pub max_repeats: usize,
    /// Measurement window in units of the step's Rabi period scale, `ΩT`.
    pub omega_t: f64,
    pub seed: u64,
    /// Sample measurements from the full equations instead of the closed form.
    pub full_ode: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            gamma_policy: GammaPolicy::default(),
            max_repeats: 40,
            omega_t: 50.0,
            seed: 0,
            full_ode: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepResult {
    Excited,
    NoResonance,
    Exhausted,
}

/// One drive setting and the measurements made under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    /// Integer whose energy the drive encodes (`N`, or `2N` in prime-spectrum mode).
    pub target: u64,
    pub omega_ext: f64,
    pub d: usize,
    pub factor_states: Vec<BosonicConfig>,
    pub couplings: Vec<f64>,
    pub gamma: f64,
    pub omega_rabi: f64,
    pub window: f64,
    pub measurements: Vec<MeasurementOutcome>,
    pub result: StepResult,
}

/// Parity bookkeeping of the two prime-spectrum drive frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCheck {
    pub index_sum_n: usize,
    pub index_sum_2n: usize,
    pub exactly_one_even: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub n: u64,
    pub scale: Option<u64>,
    pub mode: ProtocolMode,
    pub config: ProtocolConfig,
    pub k_current: usize,
    pub history: Vec<StepRecord>,
    pub confirmed_factors: Vec<u64>,
    pub verdict: Verdict,
    /// Chance that `max_repeats` random-time measurements all miss a resonant
    /// factor state, `(1 - P_T)^max_repeats`.
    pub miss_probability: f64,
    pub parity: Option<ParityCheck>,
    pub notes: Vec<String>,
}

impl ProtocolRun {
    fn new(n: u64, scale: Option<u64>, mode: ProtocolMode, config: &ProtocolConfig) -> Self {
        let miss = (1.0 - average_probability(config.omega_t)).powi(config.max_repeats as i32);
        ProtocolRun {
            n,
            scale,
            mode,
            config: config.clone(),
            k_current: 0,
            history: Vec::new(),
            confirmed_factors: Vec::new(),
            verdict: Verdict::Running,
            miss_probability: miss,
            parity: None,
            notes: Vec::new(),
        }
    }

    pub fn successful_steps(&self) -> usize {
        self.history.iter().filter(|s| s.result == StepResult::Excited).count()
    }

    pub fn probe_steps(&self) -> usize {
        self.history.iter().filter(|s| s.result == StepResult::NoResonance).count()
    }

    pub fn measurement_count(&self) -> usize {
        self.history.iter().map(|s| s.measurements.len()).sum()
    }

    /// Post-hoc check: factors multiply to `N` and each is prime.
    pub fn factors_verified(&self) -> bool {
        let product = self.confirmed_factors.iter().try_fold(1u64, |acc, &f| acc.checked_mul(f));
        product == Some(self.n) && self.confirmed_factors.iter().all(|&f| is_prime(f))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Runs one step: sets the drive, then measures until a factor state shows up.
struct Stepper<'a> {
    levels: &'a ExtendedLevels<'a>,
    config: &'a ProtocolConfig,
    rng: ChaCha8Rng,
}

impl<'a> Stepper<'a> {
    fn new(levels: &'a ExtendedLevels<'a>, config: &'a ProtocolConfig) -> Self {
        Stepper { levels, config, rng: ChaCha8Rng::seed_from_u64(config.seed) }
    }

    fn system(&self, target: u64, k: usize) -> Result<RabiSystem> {
        let system = build_rabi_system(self.levels, self.levels.spectrum(), target, k, 0.0)?;
        if system.no_resonance() {
            return Ok(system);
        }
        let gamma = self.config.gamma_policy.gamma_for(&system)?;
        Ok(system.with_gamma(gamma))
    }

    fn record(system: &RabiSystem, target: u64, window: f64, result: StepResult) -> StepRecord {
        StepRecord {
            k: system.k,
            target,
            omega_ext: system.omega_ext,
            d: system.d(),
            factor_states: system.factor_states.clone(),
            couplings: system.couplings.clone(),
            gamma: system.gamma,
            omega_rabi: system.omega,
            window,
            measurements: Vec::new(),
            result,
        }
    }

    /// Measures at random times until a factor state appears or the budget runs out.
    fn measure(&mut self, system: &RabiSystem, target: u64, pi_half: bool) -> Result<StepRecord> {
        if system.no_resonance() {
            return Ok(Self::record(system, target, 0.0, StepResult::NoResonance));
        }
        let window = self.config.omega_t / system.omega;
        let mut step = Self::record(system, target, window, StepResult::Exhausted);
        let full = if self.config.full_ode {
            let cutoff = FullOdeConfig::new(0.0, 2).cutoff_for(system);
            Some(FullSystem::new(system, self.levels.potential(), self.levels.spectrum(), cutoff)?)
        } else {
            None
        };
        for _ in 0..self.config.max_repeats {
            let seed = self.rng.next_u64();
            let outcome = match (&full, pi_half) {
                (None, true) => measure_at_pi_half(system, seed)?,
                (None, false) => measure_random_time(system, window, seed)?,
                (Some(full), _) => {
                    let t = if pi_half {
                        std::f64::consts::FRAC_PI_2 / system.omega
                    } else {
                        ChaCha8Rng::seed_from_u64(seed).random::<f64>() * window
                    };
                    measure_full(full, system, t, seed)?
                }
            };
            let found = outcome.found_factor_state();
            step.measurements.push(outcome);
            if found {
                step.result = StepResult::Excited;
                break;
            }
        }
        Ok(step)
    }
}

/// Collapse sampled from the full equations at time `t`. States outside the
/// resonant set decode to no factors.
fn measure_full(full: &FullSystem, system: &RabiSystem, t: f64, seed: u64) -> Result<MeasurementOutcome> {
    let mut probs = Vec::new();
    if t > 0.0 {
        full.evolve(&[t], Tolerances::default(), |_, y| {
            probs = (0..full.len()).map(|i| full.bosonic(y, i).norm_sqr()).collect();
        })?;
    } else {
        probs = vec![0.0; full.len()];
        probs[0] = 1.0;
    }
    let total: f64 = probs.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let _ = rng.random::<f64>();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            pick = i;
            break;
        }
    }
    let state = full.basis[pick].clone();
    let factors = system
        .factor_states
        .iter()
        .position(|s| *s == state)
        .map(|j| system.factor_values[j].clone());
    Ok(MeasurementOutcome { seed, t_m: t, outcome: state, factors })
}

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v
}

fn check_log_input(n: u64, scale: u64) -> Result<Spectrum> {
    let spectrum = Spectrum::log_integer(scale)?;
    if n < 2 {
        return Err(Error::Precondition(format!("N must be at least 2, got {n}")));
    }
    if let Some(p) = prime_factors(n).into_iter().find(|&p| p <= scale) {
        return Err(Error::Precondition(format!(
            "N = {n} has the factor {p} <= L = {scale}; remove small factors first"
        )));
    }
    Ok(spectrum)
}

/// Iterative protocol on the log-integer spectrum with scale `scale`.
pub fn run_iterative(n: u64, scale: u64, grid: &PotentialGrid, config: &ProtocolConfig) -> Result<ProtocolRun> {
    let spectrum = check_log_input(n, scale)?;
    let levels = ExtendedLevels::new(grid, spectrum)?;
    let mut stepper = Stepper::new(&levels, config);
    let mut run = ProtocolRun::new(n, Some(scale), ProtocolMode::Iterative, config);
    let mut last: Option<Vec<u64>> = None;
    let mut k = 2;
    loop {
        run.k_current = k;
        let system = stepper.system(n, k)?;
        let step = stepper.measure(&system, n, false)?;
        let result = step.result;
        let factors = step.measurements.last().and_then(|m| m.factors.clone());
        run.history.push(step);
        match result {
            StepResult::NoResonance => {
                match last.take() {
                    Some(f) => {
                        run.confirmed_factors = f;
                        run.verdict = Verdict::Factored;
                    }
                    None => {
                        run.confirmed_factors = vec![n];
                        run.verdict = Verdict::Prime;
                    }
                }
                return Ok(run);
            }
            StepResult::Exhausted => {
                run.verdict = Verdict::Exhausted;
                run.notes.push(format!(
                    "step k = {k} is resonant but {} measurements found only the ground state",
                    config.max_repeats
                ));
                return Ok(run);
            }
            StepResult::Excited => {
                last = factors.map(sorted);
                k += 1;
            }
        }
    }
}

/// Single step at the supplied prime count `n_factors`. With `multiplicities`
/// the measurement is made at `π/(2Ω)`, otherwise at random times.
pub fn run_known_n(
    n: u64,
    scale: u64,
    n_factors: usize,
    multiplicities: Option<&[usize]>,
    grid: &PotentialGrid,
    config: &ProtocolConfig,
) -> Result<ProtocolRun> {
    let spectrum = check_log_input(n, scale)?;
    let levels = ExtendedLevels::new(grid, spectrum)?;
    let mut stepper = Stepper::new(&levels, config);
    let mut run = ProtocolRun::new(n, Some(scale), ProtocolMode::KnownN, config);
    run.k_current = n_factors;
    let system = stepper.system(n, n_factors)?;
    if let Some(m) = multiplicities {
        if m.iter().sum::<usize>() != n_factors {
            return Err(Error::Precondition(format!(
                "multiplicities {m:?} do not add up to n = {n_factors}"
            )));
        }
    }
    let pi_half = multiplicities.is_some() && system.d() == 1;
    if multiplicities.is_some() && system.d() > 1 {
        run.notes.push(format!("{} degenerate factor states; fell back to random-time measurement", system.d()));
    }
    let step = stepper.measure(&system, n, pi_half)?;
    let result = step.result;
    let factors = step.measurements.last().and_then(|m| m.factors.clone());
    run.history.push(step);
    match result {
        StepResult::NoResonance => {
            run.verdict = Verdict::Inconsistent;
            run.notes.push(format!("no resonance: {n} has no factorization into {n_factors} parts above {scale}"));
        }
        StepResult::Exhausted => run.verdict = Verdict::Exhausted,
        StepResult::Excited => {
            run.confirmed_factors = sorted(factors.unwrap_or_default());
            run.verdict = if run.confirmed_factors.iter().all(|&f| is_prime(f)) {
                Verdict::Factored
            } else {
                run.notes.push("n is below the prime count; the factor state holds composites".into());
                Verdict::Inconsistent
            };
        }
    }
    Ok(run)
}

/// Number of bosons needed for the prime-spectrum protocol, `⌊log₂ N⌋ + 1`.
pub fn prime_spectrum_bosons(n: u64) -> usize {
    (63 - n.leading_zeros()) as usize + 1
}

/// Single-step protocol on the prime spectrum. `grid` must have been built for
/// `E_ℓ = ln p_ℓ`.
pub fn run_prime_spectrum(n: u64, grid: &PotentialGrid, config: &ProtocolConfig) -> Result<ProtocolRun> {
    if n < 2 {
        return Err(Error::Precondition(format!("N must be at least 2, got {n}")));
    }
    let doubled = n.checked_mul(2).ok_or_else(|| Error::Domain("2N overflows".into()))?;
    let spectrum = Spectrum::Prime(PrimeTable::covering(doubled));
    let m = prime_spectrum_bosons(n);
    let decompose = |target: u64| -> Result<Vec<usize>> {
        let mut found = spectrum.decompose_energy(target, m)?;
        found.pop().ok_or_else(|| Error::NoResonance(format!("{target} on {m} bosons")))
    };
    let (levels_n, levels_2n) = (decompose(n)?, decompose(doubled)?);
    let (sum_n, sum_2n) = (levels_n.iter().sum::<usize>(), levels_2n.iter().sum::<usize>());
    let parity = ParityCheck {
        index_sum_n: sum_n,
        index_sum_2n: sum_2n,
        exactly_one_even: (sum_n % 2 == 0) != (sum_2n % 2 == 0),
    };
    let target = if sum_n % 2 == 0 { n } else { doubled };

    let levels = ExtendedLevels::new(grid, spectrum)?;
    let mut stepper = Stepper::new(&levels, config);
    let mut run = ProtocolRun::new(n, None, ProtocolMode::PrimeSpectrum, config);
    run.k_current = m;
    if !parity.exactly_one_even {
        run.notes.push(format!(
            "parity claim violated: index sums {sum_n} (N) and {sum_2n} (2N)"
        ));
    }
    run.parity = Some(parity);
    let system = stepper.system(target, m)?;
    let step = stepper.measure(&system, target, false)?;
    let result = step.result;
    let factors = step.measurements.last().and_then(|mm| mm.factors.clone());
    run.history.push(step);
    match result {
        StepResult::Excited => {
            let mut f = sorted(factors.unwrap_or_default());
            if target == doubled {
                if let Some(i) = f.iter().position(|&p| p == 2) {
                    f.remove(i);
                }
            }
            run.verdict = if f.len() == 1 { Verdict::Prime } else { Verdict::Factored };
            run.confirmed_factors = f;
        }
        StepResult::Exhausted => run.verdict = Verdict::Exhausted,
        StepResult::NoResonance => {
            run.verdict = Verdict::Inconsistent;
            run.notes.push("parity-allowed target has vanishing coupling".into());
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boson_count() {
        assert_eq!(prime_spectrum_bosons(35), 6);
        assert_eq!(prime_spectrum_bosons(8), 4);
        assert_eq!(prime_spectrum_bosons(2), 2);
        assert_eq!(prime_spectrum_bosons(1023), 10);
        assert_eq!(prime_spectrum_bosons(1024), 11);
    }

    #[test]
    fn miss_probability_at_default() {
        let run = ProtocolRun::new(35, Some(3), ProtocolMode::Iterative, &ProtocolConfig::default());
        let p = average_probability(50.0);
        assert!((run.miss_probability - (1.0 - p).powi(40)).abs() < 1e-20);
        assert!(run.miss_probability < 1e-11);
    }
}
