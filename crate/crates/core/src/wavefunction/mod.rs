//! Closed-form wavefunctions `Ψ = r^λ exp(Σ c_k r^k) ∏ (v(r) − t_i)`, their
//! logarithmic derivatives, nodes and normalization integrals.

pub mod bessel;
pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::Variable;
use crate::error::{QesError, Result};
use crate::families::WaveForm;

/// Roots with `|Im| ≤ REAL_TOL·max(1, |t|)` count as real.
const REAL_TOL: f64 = 1e-8;

fn is_real(t: Complex64) -> bool {
    t.im.abs() <= REAL_TOL * t.norm().max(1.0)
}

fn exponent_poly(wf: &WaveForm, r: f64) -> f64 {
    wf.exp_coeffs.iter().map(|(&k, &c)| c * r.powi(k)).sum()
}

/// `(log|Ψ(r)|, sign)`; `(−∞, 0)` exactly at a node.
pub fn eval_log_psi(wf: &WaveForm, r: f64) -> Result<(f64, i8)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(QesError::InvalidArgument(format!("r = {r} must be positive")));
    }
    let (v, _, _) = wf.poly_variable.map(r);
    let mut log = wf.leading_exponent * r.ln() + exponent_poly(wf, r);
    let mut sign = 1_i8;
    for &t in &wf.poly_roots {
        if is_real(t) {
            let x = v - t.re;
            if x.abs() <= 4.0 * f64::EPSILON * v.abs().max(t.re.abs()) {
                return Ok((f64::NEG_INFINITY, 0));
            }
            if x < 0.0 {
                sign = -sign;
            }
            log += x.abs().ln();
        } else {
            // the conjugate partner contributes the same magnitude, no sign
            log += (Complex64::new(v, 0.0) - t).norm().ln();
        }
    }
    Ok((log, sign))
}

/// `(Ψ'/Ψ, Ψ''/Ψ)` from the analytic derivatives of the closed form.
///
/// With `A = (ln r^λ e^…)'` and `S` the polynomial factor,
/// `Ψ''/Ψ = A' + A² + (2A v' + v'') Σ 1/(v−t_i) + v'² Σ_{i≠j} 1/((v−t_i)(v−t_j))`;
/// the double poles cancel symbolically so nothing large is subtracted near a node.
pub fn eval_psi_log_derivatives(wf: &WaveForm, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(QesError::InvalidArgument(format!("r = {r} must be positive")));
    }
    let lam = wf.leading_exponent;
    let mut a = lam / r;
    let mut da = -lam / (r * r);
    for (&k, &c) in &wf.exp_coeffs {
        let kf = k as f64;
        a += c * kf * r.powi(k - 1);
        da += c * kf * (kf - 1.0) * r.powi(k - 2);
    }
    let (v, dv, ddv) = wf.poly_variable.map(r);
    let mut inv = Vec::with_capacity(wf.poly_roots.len());
    for &t in &wf.poly_roots {
        let x = Complex64::new(v, 0.0) - if is_real(t) { Complex64::new(t.re, 0.0) } else { t };
        if x.norm() <= 4.0 * f64::EPSILON * v.abs().max(t.norm()) {
            return Err(QesError::NodeSingularity { r });
        }
        inv.push(x.inv());
    }
    let s1: Complex64 = inv.iter().sum();
    let mut pairs = Complex64::new(0.0, 0.0);
    for i in 0..inv.len() {
        for j in 0..i {
            pairs += inv[i] * inv[j];
        }
    }
    let d1 = a + dv * s1.re;
    let d2 = da + a * a + (2.0 * a * dv + ddv) * s1.re + 2.0 * dv * dv * pairs.re;
    Ok((d1, d2))
}

/// Positive real `r` at which the polynomial factor vanishes, ascending.
pub fn node_positions(wf: &WaveForm) -> Vec<f64> {
    let mut out: Vec<f64> = wf
        .poly_roots
        .iter()
        .filter(|t| is_real(**t) && t.re > 0.0)
        .map(|t| match wf.poly_variable {
            Variable::R => t.re,
            Variable::TEqR2 | Variable::ZEqR2 => t.re.sqrt(),
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn count_nodes(wf: &WaveForm) -> usize {
    node_positions(wf).len()
}

const U_MIN: f64 = -40.0;
const U_MAX: f64 = 40.0;
const U_STEP: f64 = 0.01;
const CUT: f64 = 60.0;

/// `∫₀^∞ Ψ² dr` on `u = ln r`, truncated where `2 ln|Ψ| + u` falls `60` below its maximum.
pub fn norm_quadrature(wf: &WaveForm) -> Result<f64> {
    wf.check_invariants()?;
    let phi = |u: f64| -> f64 {
        let (l, _) = eval_log_psi(wf, u.exp()).expect("r > 0");
        2.0 * l + u
    };
    let steps = ((U_MAX - U_MIN) / U_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| phi(U_MIN + U_STEP * i as f64)).collect();
    let peak = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(QesError::NotIntegrable("integrand has no finite maximum".into()));
    }
    let first = grid.iter().position(|&p| p >= peak - CUT).expect("peak present");
    let last = grid.iter().rposition(|&p| p >= peak - CUT).expect("peak present");
    if first == 0 || last == steps {
        return Err(QesError::NotIntegrable(format!(
            "integrand does not decay within r in [e^{U_MIN}, e^{U_MAX}]"
        )));
    }
    let lo = U_MIN + U_STEP * (first - 1) as f64;
    let hi = U_MIN + U_STEP * (last + 1) as f64;
    let pieces = ((hi - lo) / 0.25).ceil() as usize;
    let tol = quadrature::Tolerance { rel: 1e-12, ..Default::default() };
    let (v, _) = quadrature::integrate(|u| (phi(u) - peak).exp(), lo, hi, pieces.max(8), tol)?;
    Ok(v * peak.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntegralKind {
    /// `∫ r^ν exp(−μ₁ r² − μ₂/r) dr`
    GaussInv1,
    /// `∫ r^ν exp(−μ₁ r − μ₂/r) dr`
    ExpInv1,
    /// `∫ r^ν exp(−μ₁ r² − μ₂/r²) dr`
    GaussInv2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormIntegralSpec {
    pub nu: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub kind: IntegralKind,
}

impl NormIntegralSpec {
    fn check(&self) -> Result<()> {
        for (name, v) in [("nu", self.nu), ("mu1", self.mu1), ("mu2", self.mu2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QesError::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Nodeless waveform whose square is the integrand.
    pub fn waveform(&self) -> WaveForm {
        let (p1, p2) = match self.kind {
            IntegralKind::GaussInv1 => (2, -1),
            IntegralKind::ExpInv1 => (1, -1),
            IntegralKind::GaussInv2 => (2, -2),
        };
        WaveForm {
            leading_exponent: 0.5 * self.nu,
            exp_coeffs: [(p1, -0.5 * self.mu1), (p2, -0.5 * self.mu2)].into_iter().collect(),
            poly_roots: Vec::new(),
            poly_variable: Variable::R,
        }
    }
}

/// Bessel-K closed forms of the `ExpInv1` and `GaussInv2` integrals.
pub fn norm_closed_form(spec: &NormIntegralSpec) -> Result<f64> {
    spec.check()?;
    let x = 2.0 * (spec.mu1 * spec.mu2).sqrt();
    let ratio = spec.mu2 / spec.mu1;
    let nu1 = spec.nu + 1.0;
    match spec.kind {
        IntegralKind::GaussInv1 => Err(QesError::UnsupportedKind),
        IntegralKind::ExpInv1 => Ok(2.0 * ratio.powf(0.5 * nu1) * bessel::bessel_k(nu1, x)?),
        IntegralKind::GaussInv2 => Ok(ratio.powf(0.25 * nu1) * bessel::bessel_k(0.5 * nu1, x)?),
    }
}
