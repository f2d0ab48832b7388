//! Projective energy measurements on the driven system.
//!
//! Outcomes are sampled from the bosonic probabilities of the resonant
//! closed form. Every record carries the 64-bit seed that produced it.

use crate::bosonic::BosonicConfig;
use crate::dynamics::{rwa_amplitudes, RabiSystem};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::io::Write;

/// One measurement: when it happened, where the system collapsed, and the
/// integers read off a factor state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub seed: u64,
    pub t_m: f64,
    pub outcome: BosonicConfig,
    pub factors: Option<Vec<u64>>,
}

impl MeasurementOutcome {
    pub fn found_factor_state(&self) -> bool {
        self.factors.is_some()
    }
}

/// `[P(ground), P(state 1), …, P(state d)]` at time `t`.
pub fn outcome_probabilities(system: &RabiSystem, t: f64) -> Vec<f64> {
    let (b0, bs) = rwa_amplitudes(system, t);
    std::iter::once(b0 * b0).chain(bs.iter().map(|b| b * b)).collect()
}

fn collapse(system: &RabiSystem, t: f64, u: f64, seed: u64) -> MeasurementOutcome {
    let probs = outcome_probabilities(system, t);
    let mut acc = 0.0;
    let mut pick = 0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            pick = i;
            break;
        }
        pick = i;
    }
    if pick == 0 {
        MeasurementOutcome { seed, t_m: t, outcome: BosonicConfig::ground(system.k), factors: None }
    } else {
        MeasurementOutcome {
            seed,
            t_m: t,
            outcome: system.factor_states[pick - 1].clone(),
            factors: Some(system.factor_values[pick - 1].clone()),
        }
    }
}

/// Measures at a time drawn uniformly from `[0, window]`.
pub fn measure_random_time(system: &RabiSystem, window: f64, seed: u64) -> Result<MeasurementOutcome> {
    if window.is_nan() || window <= 0.0 {
        return Err(Error::Precondition(format!("measurement window must be positive, got {window}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.random::<f64>() * window;
    let u = rng.random::<f64>();
    Ok(collapse(system, t, u, seed))
}

/// Measures at a fixed time `t`.
pub fn measure_at(system: &RabiSystem, t: f64, seed: u64) -> MeasurementOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = rng.random::<f64>();
    collapse(system, t, u, seed)
}

/// Measures at `π/(2Ω)`, where a non-degenerate factor state is fully populated.
pub fn measure_at_pi_half(system: &RabiSystem, seed: u64) -> Result<MeasurementOutcome> {
    match system.d() {
        0 => Err(Error::NoResonance(format!("N = {} with k = {}", system.n, system.k))),
        1 => Ok(measure_at(system, FRAC_PI_2 / system.omega, seed)),
        d => Err(Error::Refused(format!(
            "{d} degenerate factor states; the Rabi frequency does not single one out"
        ))),
    }
}

/// Probability of finding a factor state at a uniformly random time in
/// `[0, T]`: `1/2 - sin(2ΩT)/(4ΩT)`.
pub fn average_probability(omega_t: f64) -> f64 {
    if omega_t == 0.0 {
        return 0.0;
    }
    0.5 - (2.0 * omega_t).sin() / (4.0 * omega_t)
}

/// Success probability `1 - 2^{1-m}` of the period-finding route for `m` distinct primes.
pub fn shor_success_probability(m: u32) -> f64 {
    1.0 - 0.5f64.powi(m as i32 - 1)
}

/// Monte-Carlo tallies over many random-time measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub samples: usize,
    pub seed: u64,
    pub window: f64,
    pub factor_hits: usize,
    /// Hits per factor state, in system order.
    pub state_hits: Vec<usize>,
}

impl MonteCarloSummary {
    pub fn factor_fraction(&self) -> f64 {
        self.factor_hits as f64 / self.samples as f64
    }

    /// Binomial standard error of the factor fraction at probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

const STREAMS: u64 = 64;

/// Runs `samples` random-time measurements. Independent ChaCha streams keep
/// the result independent of the thread count.
pub fn monte_carlo(system: &RabiSystem, window: f64, samples: usize, seed: u64) -> Result<MonteCarloSummary> {
    if window.is_nan() || window <= 0.0 {
        return Err(Error::Precondition(format!("measurement window must be positive, got {window}")));
    }
    let d = system.d();
    let chunk = samples.div_ceil(STREAMS as usize);
    let tallies: Vec<Vec<usize>> = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let start = stream as usize * chunk;
            let count = chunk.min(samples.saturating_sub(start));
            let mut hits = vec![0usize; d + 1];
            for _ in 0..count {
                let t = rng.random::<f64>() * window;
                let u = rng.random::<f64>();
                let probs = outcome_probabilities(system, t);
                let mut acc = 0.0;
                let mut pick = probs.len() - 1;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                hits[pick] += 1;
            }
            hits
        })
        .collect();
    let mut total = vec![0usize; d + 1];
    for t in &tallies {
        total.iter_mut().zip(t).for_each(|(a, b)| *a += b);
    }
    Ok(MonteCarloSummary {
        samples,
        seed,
        window,
        factor_hits: total[1..].iter().sum(),
        state_hits: total[1..].to_vec(),
    })
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write>(records: &[MeasurementOutcome], mut out: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
