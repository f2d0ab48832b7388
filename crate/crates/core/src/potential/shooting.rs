//! Numerov shooting for even potentials, used as an independent check on the
//! matrix eigenvalues.
//!
//! Integration starts at ξ = 0 with the parity-appropriate initial data and
//! runs outward to the Dirichlet wall at ξ_max; the eigenvalue is the energy
//! at which the solution vanishes there.

use super::Grid;

/// Value at the outer wall of the parity-`odd` Numerov solution at energy `e`,
/// together with its number of sign changes on (0, ξ_max).
fn shoot(grid: &Grid, v: &[f64], e: f64, odd: bool) -> (f64, usize) {
    let h2 = grid.step * grid.step;
    let c = grid.center();
    let n = grid.points();
    let g = |i: usize| 2.0 * (v[i] - e);
    let mut prev;
    let mut cur;
    if odd {
        prev = 0.0;
        cur = grid.step;
    } else {
        // symmetric start: y(-h) = y(h)
        prev = 1.0;
        cur = (1.0 + 5.0 * h2 * g(c) / 12.0) * prev / (1.0 - h2 * g(c + 1) / 12.0);
    }
    let mut nodes = 0;
    for i in (c + 1)..(n - 1) {
        let next = (2.0 * (1.0 + 5.0 * h2 * g(i) / 12.0) * cur
            - (1.0 - h2 * g(i - 1) / 12.0) * prev)
            / (1.0 - h2 * g(i + 1) / 12.0);
        if i + 1 < n - 1 && next != 0.0 && cur != 0.0 && next.signum() != cur.signum() {
            nodes += 1;
        }
        prev = cur;
        cur = next;
        let scale = cur.abs().max(prev.abs());
        if scale > 1e100 {
            prev /= scale;
            cur /= scale;
        }
    }
    let scale = cur.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
    (cur / scale, nodes)
}

/// Refines the eigenvalue of level `level` inside `[lo, hi]` by bisection on
/// the wall value. Returns `None` if the bracket does not straddle a root.
pub fn shooting_eigenvalue(grid: &Grid, v: &[f64], level: usize, lo: f64, hi: f64) -> Option<f64> {
    let odd = level % 2 == 1;
    let (mut a, mut b) = (lo, hi);
    let (mut fa, _) = shoot(grid, v, a, odd);
    let (fb, _) = shoot(grid, v, b, odd);
    if fa == 0.0 {
        return Some(a);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let (fm, _) = shoot(grid, v, mid, odd);
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Eigenvalues of the lowest `count` levels by shooting, each bracketed by
/// node counting alone (no input from the matrix solver).
pub fn shooting_spectrum(grid: &Grid, v: &[f64], count: usize) -> Vec<f64> {
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..count)
        .filter_map(|level| {
            let odd = level % 2 == 1;
            let target_nodes = level / 2;
            // the half-line solution of the level-th state has level/2 interior nodes;
            // find an energy window where the node count crosses target_nodes
            let (mut lo, mut hi) = (vmin, vmax);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (_, nodes) = shoot(grid, v, mid, odd);
                if nodes > target_nodes {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-6 {
                    break;
                }
            }
            // widen slightly and let the wall-value bisection finish
            let width = 1e-3;
            shooting_eigenvalue(grid, v, level, lo - width, hi + width)
                .or_else(|| shooting_eigenvalue(grid, v, level, lo, hi))
        })
        .collect()
}
