//! Lowest eigenpairs of a symmetric tridiagonal matrix with a constant
//! off-diagonal, as produced by the three-point Laplacian.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a pivoted tridiagonal solve.

/// Number of eigenvalues strictly below `x`.
pub(crate) fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - off2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (off.abs() + d.abs()).max(1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues, ascending.
pub(crate) fn lowest_eigenvalues(diag: &[f64], off: f64, count: usize) -> Vec<f64> {
    let lo0 = diag.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let hi0 = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0 * off.abs();
    let mut out = Vec::with_capacity(count);
    let mut lo = lo0;
    for k in 0..count {
        let mut a = lo;
        let mut b = hi0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b || (b - a) <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
            if sturm_count(diag, off, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        out.push(value);
        lo = a;
    }
    out
}

/// Solves `(T - shift) x = rhs` in place, with partial pivoting.
fn solve_shifted(diag: &[f64], off: f64, shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let tiny = f64::EPSILON * off.abs().max(1.0);
    let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
    let mut dl = vec![off; n.saturating_sub(1)];
    let mut du = vec![off; n.saturating_sub(1)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                // dl[i] now holds the second superdiagonal entry of row i
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            rhs.swap(i, i + 1);
            rhs[i + 1] -= fact * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    rhs[n - 1] /= d[n - 1];
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - dl[i] * rhs[i + 2]) / d[i];
    }
}

/// Eigenvector for `value` by inverse iteration from `start`; Euclidean norm 1.
pub(crate) fn inverse_iteration(diag: &[f64], off: f64, value: f64, start: &[f64]) -> Vec<f64> {
    let shift = value + 1e-13 * value.abs().max(1.0);
    let mut x = start.to_vec();
    normalize(&mut x);
    for _ in 0..4 {
        solve_shifted(diag, off, shift, &mut x);
        normalize(&mut x);
    }
    x
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_check(diag: &[f64], off: f64, value: f64, vec: &[f64]) -> f64 {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut tv = diag[i] * vec[i];
                if i > 0 {
                    tv += off * vec[i - 1];
                }
                if i + 1 < n {
                    tv += off * vec[i + 1];
                }
                (tv - value * vec[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(kπ/(n+1))
        let n = 50;
        let diag = vec![2.0; n];
        let vals = lowest_eigenvalues(&diag, -1.0, 5);
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn vectors_satisfy_eigen_equation() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + ((i as f64) * 0.05 - 5.0).powi(2) * 0.01).collect();
        let vals = lowest_eigenvalues(&diag, -1.0, 4);
        let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect();
        for v in vals {
            let vec = inverse_iteration(&diag, -1.0, v, &start);
            assert!(dense_check(&diag, -1.0, v, &vec) < 1e-10);
        }
    }
}
