//! Three-point finite-difference radial operator with Dirichlet ends and
//! Sturm-sequence bisection for the eigenvalues (of `2E`) in a window.

use super::PotentialSpec;
use crate::error::{QesError, Result};
use crate::families::QesSolution;
use crate::wavefunction;

/// `n` interior points of a uniform grid on `[r_min, r_max]`; `r_min = 0` is allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

impl FdGrid {
    pub fn step(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n + 1) as f64
    }
}

/// Forbidden-region WKB action needed at each end (`e^-27.6 ≈ 1e-12`).
const MIN_ACTION: f64 = 27.6;
/// Grid ends sit where `ln|Ψ|` is this far below its maximum.
const LOG_DROP: f64 = 45.0;

/// Number of eigenvalues below `x`.
fn sturm_count(diag: &[f64], off2: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = d - x - if i == 0 { 0.0 } else { off2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (d.abs() + x.abs()).max(1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn forbidden_action(pot: &PotentialSpec, level: f64, from: f64, toward: f64) -> f64 {
    // WKB action from `from` toward the interior until the classically allowed region
    let steps = 4000;
    let h = (toward - from) / steps as f64;
    let mut action = 0.0;
    let mut prev = (pot.effective(from) - level).max(0.0).sqrt();
    for i in 1..=steps {
        let r = from + h * i as f64;
        let gap = pot.effective(r) - level;
        if gap <= 0.0 {
            break;
        }
        let cur = gap.sqrt();
        action += 0.5 * (prev + cur) * h.abs();
        prev = cur;
    }
    action
}

/// Eigenvalues of `−d²/dr² + ℓ(ℓ+1)/r² + ω²r² + 2V` in `window`, ascending.
pub fn fd_spectrum(pot: &PotentialSpec, window: (f64, f64), grid: &FdGrid) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(grid.r_min >= 0.0 && grid.r_max > grid.r_min && grid.n >= 2000 && hi > lo) {
        return Err(QesError::InvalidArgument(format!(
            "need 0 <= r_min < r_max, N >= 2000 and a non-empty window (got {grid:?}, {window:?})"
        )));
    }
    let mid = 0.5 * (grid.r_min + grid.r_max);
    // r_min = 0 is the physical boundary and needs no margin
    let ends = [(grid.r_min, "r_min"), (grid.r_max, "r_max")];
    for &(end, name) in ends.iter().filter(|e| e.0 > 0.0) {
        let a = forbidden_action(pot, hi, end, mid);
        if a < MIN_ACTION {
            return Err(QesError::GridInsufficient(format!(
                "forbidden-region action {a:.2} at {name} = {end} is below {MIN_ACTION}"
            )));
        }
    }
    let h = grid.step();
    let diag: Vec<f64> = (1..=grid.n)
        .map(|i| 2.0 / (h * h) + pot.effective(grid.r_min + h * i as f64))
        .collect();
    let off2 = 1.0 / (h * h * h * h);
    let (c_lo, c_hi) = (sturm_count(&diag, off2, lo), sturm_count(&diag, off2, hi));
    if c_hi == c_lo {
        return Err(QesError::WindowEmpty { lo, hi });
    }
    let mut out = Vec::with_capacity(c_hi - c_lo);
    for k in c_lo..c_hi {
        // the k-th eigenvalue (0-based) is the smallest x with count(x) > k
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-13 * b.abs().max(1.0) {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if sturm_count(&diag, off2, m) > k {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Window around `2E` searched by the membership check; a negative level sits
/// below the continuum at 0, so the window stays under it.
pub fn membership_window(two_e: f64) -> (f64, f64) {
    let tol = 1e-3 * two_e.abs().max(1.0);
    let half = if two_e < 0.0 { (10.0 * tol).min(0.5 * two_e.abs()) } else { 10.0 * tol };
    (two_e - half, two_e + half)
}

/// Grid ends where `ln|Ψ|` has dropped well below its peak, pushed outward until
/// the forbidden-region precondition of [`fd_spectrum`] holds at the top of
/// [`membership_window`]. The step of the initial `N = 4000` grid is kept.
pub fn fd_grid_for(sol: &QesSolution) -> Result<FdGrid> {
    let wf = &sol.waveform;
    let (u0, u1, du) = (-12.0_f64, 8.0_f64, 1e-3);
    let steps = ((u1 - u0) / du) as usize;
    let logs: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let r = (u0 + du * i as f64).exp();
            (r, wavefunction::eval_log_psi(wf, r).map(|x| x.0).unwrap_or(f64::NEG_INFINITY))
        })
        .collect();
    let peak = logs.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let first = logs.iter().position(|x| x.1 >= peak - LOG_DROP);
    let last = logs.iter().rposition(|x| x.1 >= peak - LOG_DROP);
    let (mut r_min, mut r_max) = match (first, last) {
        (Some(i), Some(j)) if i > 0 && j < steps => (logs[i - 1].0, logs[j + 1].0),
        _ => return Err(QesError::GridInsufficient("wavefunction support not resolved on r in [e^-12, e^8]".into())),
    };
    let h = (r_max - r_min) / 4001.0;
    let pot = super::assemble_potential(sol)?;
    let (_, top) = membership_window(2.0 * sol.energy);
    let mid = 0.5 * (r_min + r_max);
    // small margin over the precondition; each pass moves an end by 25% in r
    for _ in 0..40 {
        if forbidden_action(&pot, top, r_max, mid) >= MIN_ACTION + 1.0 {
            break;
        }
        r_max *= 1.25;
    }
    for _ in 0..40 {
        if forbidden_action(&pot, top, r_min, mid) >= MIN_ACTION + 1.0 {
            break;
        }
        r_min *= 0.8;
    }
    let n = (((r_max - r_min) / h).ceil() as usize).max(4001) - 1;
    Ok(FdGrid { r_min, r_max, n })
}
