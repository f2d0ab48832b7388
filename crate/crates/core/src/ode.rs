//! Adaptive Dormand–Prince 5(4) for complex-valued systems.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-8, atol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0`, calling `on_sample` at each of the
/// ascending `samples` (all `>= t0`). Steps are clipped to land exactly on them.
pub fn integrate<F, S>(
    mut f: F,
    y0: &[Complex64],
    t0: f64,
    samples: &[f64],
    tol: Tolerances,
    mut on_sample: S,
) -> Result<Stats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    S: FnMut(f64, &[Complex64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut stats = Stats::default();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n]; 7];
    let mut stage = vec![Complex64::default(); n];
    let mut y_new = vec![Complex64::default(); n];
    let end = samples.last().copied().unwrap_or(t0);
    let mut h = ((end - t0) * 1e-3).clamp(1e-6, 1e-2);
    f(t, &y, &mut k[0]);
    stats.evaluations += 1;

    for &target in samples {
        while t < target {
            let landing = h >= target - t;
            let step = if landing { target - t } else { h };
            if step < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t });
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += kj[i] * (step * A[s][j]);
                        }
                    }
                    stage[i] = acc;
                }
                let (_, rest) = k.split_at_mut(s);
                f(t + C[s] * step, &stage, &mut rest[0]);
            }
            stats.evaluations += 6;
            // the last stage is evaluated at the fifth-order solution (FSAL)
            y_new.copy_from_slice(&stage);
            let mut err = 0.0;
            for i in 0..n {
                let mut e = Complex64::default();
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        e += kj[i] * E[j];
                    }
                }
                let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                err += (e.norm() * step / scale).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            let factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
            if err <= 1.0 {
                t = if landing { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                stats.accepted += 1;
                // a short landing step says nothing about the usable step size
                if !landing || step >= 0.5 * h {
                    h = step * factor.clamp(0.2, 5.0);
                }
            } else {
                stats.rejected += 1;
                h = step * factor.clamp(0.1, 0.9);
            }
        }
        on_sample(t, &y);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let samples: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
        let mut got = Vec::new();
        integrate(
            |_, y, dy| dy[0] = -y[0],
            &[Complex64::new(1.0, 0.0)],
            0.0,
            &samples,
            Tolerances::default(),
            |t, y| got.push((t, y[0].re)),
        )
        .unwrap();
        for (t, v) in got {
            assert!((v - (-t).exp()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn harmonic_rotation_conserves_norm() {
        // y' = -i y has |y| = 1 and phase -t
        let samples = [100.0];
        let mut last = Complex64::default();
        integrate(
            |_, y, dy| dy[0] = Complex64::new(0.0, -1.0) * y[0],
            &[Complex64::new(1.0, 0.0)],
            0.0,
            &samples,
            Tolerances::default(),
            |_, y| last = y[0],
        )
        .unwrap();
        let exact = Complex64::from_polar(1.0, -100.0);
        assert!((last - exact).norm() < 1e-6);
    }
}
