//! Composite quadrature on uniformly spaced samples.

/// Trapezoid rule.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Composite Simpson rule; an even number of samples falls back to Simpson
/// plus one trapezoid panel at the right end.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 3 {
        return trapezoid(values, step);
    }
    let odd_len = if n % 2 == 1 { n } else { n - 1 };
    let mut acc = values[0] + values[odd_len - 1];
    for (i, v) in values[1..odd_len - 1].iter().enumerate() {
        acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = acc * step / 3.0;
    if odd_len != n {
        total += 0.5 * step * (values[n - 2] + values[n - 1]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_under_simpson() {
        let h = 0.1;
        let ys: Vec<f64> = (0..=20).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&ys, h) - 2f64.powi(4) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_linear() {
        let ys = [1.0, 2.0, 3.0];
        assert_eq!(trapezoid(&ys, 0.5), 2.0);
        assert_eq!(trapezoid(&[4.0], 1.0), 0.0);
    }

    #[test]
    fn even_sample_count() {
        let h = 0.01;
        let ys: Vec<f64> = (0..100).map(|i| (i as f64 * h).sin()).collect();
        let exact = 1.0 - (99.0 * h).cos();
        assert!((simpson(&ys, h) - exact).abs() < 1e-5);
    }
}
