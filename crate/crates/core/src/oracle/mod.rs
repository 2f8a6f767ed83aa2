//! Checks that a constructed `(E, Ψ, V)` solves the untransformed radial
//! equation `−Ψ'' + [ℓ(ℓ+1)/r² + ω²r² + 2V(r)] Ψ = 2E Ψ`.
//!
//! Two routes: the pointwise residual with the analytic `Ψ''/Ψ`, and a
//! finite-difference spectrum of the assembled potential in which `2E` must
//! appear.

mod spectrum;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bethe::{self, SolverConfig};
use crate::error::{QesError, Result};
use crate::families::{self, QesSolution};
use crate::wavefunction;

pub use spectrum::{fd_grid_for, fd_spectrum, membership_window, FdGrid};

/// Coefficients of the radial operator: `inverse_powers[k]` multiplies `r^-k`
/// in `2V(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub ell: f64,
    pub omega: f64,
    pub inverse_powers: BTreeMap<u32, f64>,
}

impl PotentialSpec {
    pub fn new(ell: f64, omega: f64, inverse_powers: BTreeMap<u32, f64>) -> Result<Self> {
        let spec = Self { ell, omega, inverse_powers };
        if let Some((k, v)) = spec.inverse_powers.iter().rev().find(|(_, v)| **v != 0.0) {
            if *v <= 0.0 {
                return Err(QesError::InvalidArgument(format!("r^-{k} coefficient {v} must be positive")));
            }
        }
        Ok(spec)
    }

    pub fn ell_term(&self) -> f64 {
        self.ell * (self.ell + 1.0)
    }

    /// `2V(r)`.
    pub fn two_v(&self, r: f64) -> f64 {
        self.inverse_powers.iter().map(|(&k, &c)| c * r.powi(-(k as i32))).sum()
    }

    /// `ℓ(ℓ+1)/r² + ω²r² + 2V(r)`.
    pub fn effective(&self, r: f64) -> f64 {
        self.ell_term() / (r * r) + self.omega * self.omega * r * r + self.two_v(r)
    }
}

pub fn assemble_potential(sol: &QesSolution) -> Result<PotentialSpec> {
    let all = sol.couplings();
    let mut powers = BTreeMap::new();
    for (name, k) in families::potential_terms(sol.problem.family) {
        let v = all.get(*name).ok_or_else(|| QesError::MissingCoupling((*name).to_string()))?;
        powers.insert(*k, 2.0 * v);
    }
    PotentialSpec::new(sol.ell(), sol.omega(), powers)
}

/// Log-spaced evaluation grid; points within `node_excl` of a node are skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub node_excl: f64,
}

impl ResidualGrid {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        Self { r_min, r_max, points: 2000, node_excl: 1e-6 }
    }

    /// `[1e-2, 20]·max(1, largest root radius)`.
    pub fn default_for(sol: &QesSolution) -> Self {
        let scale = sol
            .waveform
            .poly_roots
            .iter()
            .map(|t| match sol.waveform.poly_variable {
                bethe::Variable::R => t.norm(),
                _ => t.norm().sqrt(),
            })
            .fold(1.0_f64, f64::max);
        Self::new(1e-2 * scale, 20.0 * scale)
    }

    fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let m = self.points.max(2);
        (0..m).map(move |i| (a + (b - a) * i as f64 / (m - 1) as f64).exp())
    }
}

/// `max |−Ψ''/Ψ + U(r) − 2E| / (|2E| + |ℓ(ℓ+1)|/r² + ω²r² + |2V(r)|)` over the grid.
pub fn schrodinger_residual(sol: &QesSolution, grid: &ResidualGrid) -> Result<f64> {
    if !(grid.r_min > 0.0 && grid.r_max > grid.r_min) {
        return Err(QesError::InvalidArgument(format!("grid [{}, {}]", grid.r_min, grid.r_max)));
    }
    let pot = assemble_potential(sol)?;
    let nodes = wavefunction::node_positions(&sol.waveform);
    let two_e = 2.0 * sol.energy;
    let w2 = pot.omega * pot.omega;
    let mut worst = 0.0_f64;
    for r in grid.radii() {
        if nodes.iter().any(|&x| (r - x).abs() <= grid.node_excl) {
            continue;
        }
        let (_, d2) = wavefunction::eval_psi_log_derivatives(&sol.waveform, r)?;
        let two_v = pot.two_v(r);
        let cent = pot.ell_term() / (r * r);
        let res = -d2 + cent + w2 * r * r + two_v - two_e;
        let scale = two_e.abs() + cent.abs() + w2 * r * r + two_v.abs();
        worst = worst.max(res.abs() / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, value: f64, tolerance: f64, passed: bool) {
        // non-finite values do not survive JSON; clamp them
        let value = if value.is_finite() { value } else { f64::MAX };
        self.checks.push(Check { name: name.into(), value, tolerance, passed });
    }

    /// `value < tolerance`, failing on errors.
    fn below(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        match value {
            Ok(v) => self.push(name, v, tolerance, v < tolerance),
            Err(e) => {
                self.notes.push(format!("{name}: {e}"));
                self.push(name, f64::INFINITY, tolerance, false);
            }
        }
    }
}

pub const BAE_TOL: f64 = 1e-10;
pub const IDENT_TOL: f64 = 1e-10;
pub const RES_TOL: f64 = 1e-9;
pub const DERIVED_TOL: f64 = 1e-10;

pub fn verify_solution(sol: &QesSolution, level: Level) -> VerificationReport {
    let mut rep = VerificationReport { checks: Vec::new(), notes: Vec::new(), passed: false };
    let cfg = SolverConfig::default();
    let ode = sol.ode();
    rep.below(
        "bae_residual",
        ode.as_ref().map_err(Clone::clone).and_then(|ode| {
            let res = bethe::bae_residuals(ode, &sol.roots, &cfg.tol)?;
            Ok(res.iter().fold(0.0_f64, |m, z| m.max(z.norm())))
        }),
        BAE_TOL,
    );
    rep.below(
        "identity_residual",
        ode.as_ref().map_err(Clone::clone).map(|ode| bethe::verify_polynomial_identity(ode, &sol.roots)),
        IDENT_TOL,
    );
    rep.below("derived_consistency", derived_gap(sol), DERIVED_TOL);
    rep.below("schrodinger_residual", schrodinger_residual(sol, &ResidualGrid::default_for(sol)), RES_TOL);

    if level == Level::Full {
        match wavefunction::norm_quadrature(&sol.waveform) {
            Ok(v) => rep.push("norm", v, 0.0, v.is_finite() && v > 0.0),
            Err(e) => {
                rep.notes.push(format!("norm: {e}"));
                rep.push("norm", f64::INFINITY, 0.0, false);
            }
        }
        let nodes = wavefunction::count_nodes(&sol.waveform);
        rep.push("node_count", nodes as f64, sol.problem.n as f64, true);
        if nodes != sol.problem.n {
            rep.notes.push(format!(
                "energy ordering: solution labeled n = {} has {nodes} node(s) on r > 0",
                sol.problem.n
            ));
        }
        let two_e = 2.0 * sol.energy;
        let tol = 1e-3 * two_e.abs().max(1.0);
        let nearest = fd_grid_for(sol).and_then(|g| {
            let pot = assemble_potential(sol)?;
            let vals = fd_spectrum(&pot, membership_window(two_e), &g)?;
            Ok(vals.iter().map(|v| (v - two_e).abs()).fold(f64::INFINITY, f64::min))
        });
        rep.below("fd_membership", nearest, tol);
    }
    rep.passed = rep.checks.iter().all(|c| c.passed);
    rep
}

/// Largest relative gap between stored and recomputed energy/derived couplings.
fn derived_gap(sol: &QesSolution) -> Result<f64> {
    let cfg = SolverConfig::default();
    let (energy, derived) = if sol.problem.match_ell {
        let mut p = sol.problem.clone();
        p.free.remove("omega_guess");
        p.free.insert("omega".into(), sol.omega());
        p.match_ell = false;
        let d = families::derive_parameters(&p, &sol.roots, &cfg)?;
        let l = sol.problem.ell as f64 + 0.5;
        let mismatch = (d.derived["ell_half_sq"] - l * l).abs();
        if mismatch > 1e-8 {
            return Ok(mismatch);
        }
        (d.energy, d.derived)
    } else {
        let d = families::derive_parameters(&sol.problem, &sol.roots, &cfg)?;
        (d.energy, d.derived)
    };
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    let mut gap = rel(energy, sol.energy);
    for (k, v) in &derived {
        let stored = sol.derived.get(k).ok_or_else(|| QesError::MissingCoupling(k.clone()))?;
        gap = gap.max(rel(*v, *stored));
    }
    Ok(gap)
}
