//! Front-ends for the four inverse-power potential families.
//!
//! Each family maps its couplings to a [`PolyOde`] in its working variable,
//! hands the ODE to [`crate::bethe`], and turns root power sums back into the
//! constrained couplings, the energy and the closed-form wavefunction shape.
//!
//! Input/output direction per family:
//!
//! | family  | case      | free                 | derived                  |
//! |---------|-----------|----------------------|--------------------------|
//! | quartic | harmonic  | omega, c, d          | a, b                     |
//! | quartic | coulombic | a, c, d              | B, b                     |
//! | sextic  | harmonic  | omega, e, d          | ell_half_sq, ell         |
//! | octic   | harmonic  | omega, e, f, g, h    | a, b, c, d               |
//! | octic   | coulombic | a, e, f, g, h        | B, b, c, d               |
//! | decatic | harmonic  | omega, b, c, d       | ell_half_sq, ell, a      |
//!
//! In match-ℓ mode (sextic, decatic) `omega` moves from free to derived and
//! the optional free entry `omega_guess` seeds the outer solve.

mod decatic;
mod octic;
mod quartic;
mod reduction;
mod sextic;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::{self, PolyOde, PowerSums, RootSet, SolverConfig, Variable};
use crate::error::{QesError, Result};

pub use reduction::{reduction_check, ReductionLimit, ReductionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quartic,
    Sextic,
    Octic,
    Decatic,
}

impl std::str::FromStr for Family {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quartic" => Ok(Family::Quartic),
            "sextic" => Ok(Family::Sextic),
            "octic" => Ok(Family::Octic),
            "decatic" => Ok(Family::Decatic),
            other => Err(QesError::InvalidProblem(format!("unknown family `{other}`"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Quartic => "quartic",
            Family::Sextic => "sextic",
            Family::Octic => "octic",
            Family::Decatic => "decatic",
        })
    }
}

/// `Harmonic`: `omega > 0`, no linear exponent term. `Coulombic`: `omega = 0`,
/// linear exponent term `B r` with `B < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Harmonic,
    Coulombic,
}

impl std::str::FromStr for Case {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "harmonic" => Ok(Case::Harmonic),
            "coulombic" => Ok(Case::Coulombic),
            other => Err(QesError::InvalidProblem(format!("unknown case `{other}`"))),
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Case::Harmonic => "harmonic",
            Case::Coulombic => "coulombic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyProblem {
    pub family: Family,
    pub case: Case,
    pub n: usize,
    /// Angular momentum. For sextic/decatic only read in match-ℓ mode.
    pub ell: i32,
    pub free: BTreeMap<String, f64>,
    #[serde(default)]
    pub match_ell: bool,
}

impl FamilyProblem {
    pub fn new(family: Family, case: Case, n: usize, ell: i32) -> Self {
        Self { family, case, n, ell, free: BTreeMap::new(), match_ell: false }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.free.insert(name.to_string(), value);
        self
    }

    pub fn matching_ell(mut self) -> Self {
        self.match_ell = true;
        self
    }

    /// Names of the free couplings this problem must carry.
    pub fn free_names(&self) -> &'static [&'static str] {
        use {Case::*, Family::*};
        match (self.family, self.case, self.match_ell) {
            (Quartic, Harmonic, _) => &["omega", "c", "d"],
            (Quartic, Coulombic, _) => &["a", "c", "d"],
            (Sextic, _, false) => &["omega", "e", "d"],
            (Sextic, _, true) => &["e", "d"],
            (Octic, Harmonic, _) => &["omega", "e", "f", "g", "h"],
            (Octic, Coulombic, _) => &["a", "e", "f", "g", "h"],
            (Decatic, _, false) => &["omega", "b", "c", "d"],
            (Decatic, _, true) => &["b", "c", "d"],
        }
    }

    /// Checks the domain invariants; messages name the violated constraint.
    pub fn validate(&self) -> Result<()> {
        use {Case::*, Family::*};
        if let (Sextic | Decatic, Coulombic) = (self.family, self.case) {
            return Err(QesError::InvalidCase(format!("{} supports the harmonic case only", self.family)));
        }
        if self.match_ell && !matches!(self.family, Sextic | Decatic) {
            return Err(QesError::InvalidProblem("match-ell mode applies to sextic and decatic only".into()));
        }
        if self.ell < -1 {
            return Err(QesError::InvalidProblem("ell >= -1 required".into()));
        }
        let required = self.free_names();
        for name in required {
            match self.free.get(*name) {
                None => return Err(QesError::MissingCoupling((*name).to_string())),
                Some(v) if !v.is_finite() => {
                    return Err(QesError::InvalidProblem(format!("coupling `{name}` is not finite")))
                }
                _ => {}
            }
        }
        for (name, v) in &self.free {
            let guess = self.match_ell && name == "omega_guess";
            if !required.contains(&name.as_str()) && !guess {
                let hint = if self.match_ell && name == "omega" {
                    "; omega is derived in match-ell mode (use omega_guess)"
                } else {
                    ""
                };
                return Err(QesError::InvalidProblem(format!("unexpected coupling `{name}`{hint}")));
            }
            if guess && !(v.is_finite() && *v > 0.0) {
                return Err(QesError::InvalidProblem("omega_guess > 0 required".into()));
            }
        }
        let positive = match self.family {
            Quartic | Sextic | Decatic => "d",
            Octic => "h",
        };
        if self.free[positive] <= 0.0 {
            return Err(QesError::InvalidProblem(format!("{positive} > 0 required")));
        }
        match self.case {
            Harmonic if !self.match_ell && self.free["omega"] <= 0.0 => {
                Err(QesError::InvalidProblem("omega > 0 required in the harmonic case".into()))
            }
            Coulombic if self.free["a"] >= 0.0 => {
                Err(QesError::InvalidProblem("a < 0 required in the coulombic case".into()))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn get(&self, name: &str) -> f64 {
        self.free[name]
    }

    pub(crate) fn ell_term(&self) -> f64 {
        let l = self.ell as f64;
        l * (l + 1.0)
    }
}

/// Closed-form wavefunction `Ψ = r^λ exp(Σ_k c_k r^k) ∏ (v(r) − t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveForm {
    pub leading_exponent: f64,
    /// Power `k` to coefficient `c_k`; `k = 0` is a constant amplitude term.
    pub exp_coeffs: BTreeMap<i32, f64>,
    #[serde(with = "crate::document::complex_list")]
    pub poly_roots: Vec<Complex64>,
    pub poly_variable: Variable,
}

impl WaveForm {
    /// Leading exponent positive, decay at infinity and at the origin.
    pub fn check_invariants(&self) -> Result<()> {
        if !(self.leading_exponent > 0.0) {
            return Err(QesError::InvalidExponent { name: "leading exponent", value: self.leading_exponent });
        }
        let c = |k: i32| self.exp_coeffs.get(&k).copied().unwrap_or(0.0);
        let top = self.exp_coeffs.iter().rev().find(|(&k, &v)| k > 0 && v != 0.0);
        if !matches!(top, Some((_, &v)) if v < 0.0) {
            return Err(QesError::NotIntegrable(format!(
                "no decay at infinity (r^2 coefficient {}, r coefficient {})",
                c(2),
                c(1)
            )));
        }
        let bottom = self.exp_coeffs.iter().find(|(&k, &v)| k < 0 && v != 0.0);
        if let Some((&k, &v)) = bottom {
            if v >= 0.0 {
                return Err(QesError::NotIntegrable(format!("coefficient of r^{k} is {v}, not negative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QesSolution {
    pub problem: FamilyProblem,
    pub roots: RootSet,
    pub derived: BTreeMap<String, f64>,
    pub energy: f64,
    pub waveform: WaveForm,
    pub diagnostics: BTreeMap<String, f64>,
}

impl QesSolution {
    /// All couplings (free and derived) keyed by name.
    pub fn couplings(&self) -> BTreeMap<String, f64> {
        let mut all = self.derived.clone();
        for (k, v) in &self.problem.free {
            if k != "omega_guess" {
                all.insert(k.clone(), *v);
            }
        }
        all
    }

    /// `ω`, free or derived; 0 in the coulombic case.
    pub fn omega(&self) -> f64 {
        self.couplings().get("omega").copied().unwrap_or(0.0)
    }

    /// `ℓ` as a real: derived for sextic/decatic, the problem's integer otherwise.
    pub fn ell(&self) -> f64 {
        self.derived.get("ell").copied().unwrap_or(self.problem.ell as f64)
    }

    /// Rebuilds the working ODE (with `W` from the roots).
    pub fn ode(&self) -> Result<PolyOde> {
        let front = front(&self.problem, Some(self.omega()))?;
        let ode = front.ode();
        let w = bethe::compute_w_coefficients(&ode, &self.roots, 1e-8)?;
        Ok(ode.with_w(w))
    }
}

/// Inverse powers `k` of `2V` keyed by coupling name.
pub fn potential_terms(family: Family) -> &'static [(&'static str, u32)] {
    match family {
        Family::Quartic => &[("a", 1), ("b", 2), ("c", 3), ("d", 4)],
        Family::Sextic => &[("e", 4), ("d", 6)],
        Family::Octic => &[("a", 1), ("b", 2), ("c", 3), ("d", 4), ("e", 5), ("f", 6), ("g", 7), ("h", 8)],
        Family::Decatic => &[("a", 4), ("b", 6), ("c", 8), ("d", 10)],
    }
}

/// Working ODE (p, q; no w) and its variable.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOde {
    pub ode: PolyOde,
    pub variable: Variable,
}

/// Derived couplings, energy and wavefunction shape for one root set.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub derived: BTreeMap<String, f64>,
    pub energy: f64,
    pub waveform: WaveForm,
}

pub(crate) struct Shape {
    pub exponent: f64,
    pub exp_coeffs: BTreeMap<i32, f64>,
}

/// Per-family closed forms at fixed couplings.
pub(crate) trait Front {
    fn ode(&self) -> PolyOde;
    fn variable(&self) -> Variable;
    /// `(derived, energy)` from power sums.
    fn derive(&self, ps: &PowerSums) -> Result<(BTreeMap<String, f64>, f64)>;
    fn shape(&self) -> Shape;
    /// `W` written directly from the couplings and energy of the potential.
    fn w_from_couplings(&self, all: &BTreeMap<String, f64>, energy: f64, ell_term: f64) -> [f64; 5];
    /// `∂Q/∂ω` and the constant `K` in `(ℓ+½)² = … − 2ω(K + 2 s1)` for match-ℓ families.
    fn match_data(&self) -> Option<([f64; 6], f64)> {
        None
    }
    /// Unclamped `(ℓ+½)²` for match-ℓ families.
    fn ell_half_sq(&self, _ps: &PowerSums) -> f64 {
        f64::NAN
    }
}

/// `omega` overrides the free value (match-ℓ iterates).
pub(crate) fn front(problem: &FamilyProblem, omega: Option<f64>) -> Result<Box<dyn Front>> {
    let omega = omega.or_else(|| problem.free.get("omega").copied()).unwrap_or(0.0);
    Ok(match problem.family {
        Family::Quartic => Box::new(quartic::Quartic::new(problem, omega)?),
        Family::Sextic => Box::new(sextic::Sextic::new(problem, omega)?),
        Family::Octic => Box::new(octic::Octic::new(problem, omega)?),
        Family::Decatic => Box::new(decatic::Decatic::new(problem, omega)?),
    })
}

fn omega_start(problem: &FamilyProblem) -> Option<f64> {
    problem.match_ell.then(|| problem.free.get("omega_guess").copied().unwrap_or(1.0))
}

pub fn build_ode(problem: &FamilyProblem) -> Result<FamilyOde> {
    problem.validate()?;
    let f = front(problem, omega_start(problem))?;
    Ok(FamilyOde { ode: f.ode(), variable: f.variable() })
}

/// Closed-form constraints on `roots` (which must solve the family BAE).
pub fn derive_parameters(problem: &FamilyProblem, roots: &RootSet, cfg: &SolverConfig) -> Result<Derived> {
    problem.validate()?;
    if problem.match_ell {
        return Err(QesError::InvalidProblem(
            "match-ell problems derive omega jointly with the roots; use solve_family".into(),
        ));
    }
    let f = front(problem, None)?;
    derive_with(problem, f.as_ref(), roots, cfg)
}

fn derive_with(problem: &FamilyProblem, f: &dyn Front, roots: &RootSet, cfg: &SolverConfig) -> Result<Derived> {
    if roots.n != problem.n {
        return Err(QesError::InvalidArgument(format!("root set has degree {}, problem has {}", roots.n, problem.n)));
    }
    let ode = f.ode();
    let res = bethe::bae_residuals(&ode, roots, &cfg.tol)?;
    let worst = res.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if !(worst < cfg.tol.bae) {
        return Err(QesError::InvalidArgument(format!("roots do not solve the BAE (residual {worst:e})")));
    }
    let ps = PowerSums::of(&roots.roots, cfg.tol.conj)?;
    let (derived, energy) = f.derive(&ps)?;
    let shape = f.shape();
    let waveform = WaveForm {
        leading_exponent: shape.exponent,
        exp_coeffs: shape.exp_coeffs,
        poly_roots: roots.roots.clone(),
        poly_variable: f.variable(),
    };
    waveform.check_invariants()?;
    Ok(Derived { derived, energy, waveform })
}

/// A branch dropped by [`solve_family`], with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedBranch {
    pub roots: Vec<Complex64>,
    pub error: QesError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySolve {
    pub solutions: Vec<QesSolution>,
    pub skipped: Vec<SkippedBranch>,
}

/// One solution per BAE branch, canonically ordered.
pub fn solve_family(problem: &FamilyProblem, cfg: &SolverConfig) -> Result<FamilySolve> {
    problem.validate()?;
    if problem.match_ell {
        return solve_match_ell(problem, cfg);
    }
    let f = front(problem, None)?;
    let ode = f.ode();
    let branches = bethe::solve_bae(&ode, problem.n, f.variable(), cfg)?;
    let mut out = FamilySolve { solutions: Vec::new(), skipped: Vec::new() };
    for roots in branches {
        match assemble(problem.clone(), f.as_ref(), roots.clone(), BTreeMap::new(), cfg) {
            Ok(sol) => out.solutions.push(sol),
            Err(error) => out.skipped.push(SkippedBranch { roots: roots.roots, error }),
        }
    }
    Ok(out)
}

fn assemble(
    problem: FamilyProblem,
    f: &dyn Front,
    roots: RootSet,
    extra: BTreeMap<String, f64>,
    cfg: &SolverConfig,
) -> Result<QesSolution> {
    let Derived { mut derived, energy, waveform } = derive_with(&problem, f, &roots, cfg)?;
    derived.extend(extra);
    let ode = f.ode();
    let w = bethe::compute_w_coefficients(&ode, &roots, cfg.tol.conj)?;
    let full = ode.with_w(w);
    let mut sol = QesSolution { problem, roots, derived, energy, waveform, diagnostics: BTreeMap::new() };
    let ell = sol.ell();
    let w_direct = f.w_from_couplings(&sol.couplings(), energy, ell * (ell + 1.0));
    let w_scale = w.iter().chain(w_direct.iter()).fold(1.0_f64, |m, x| m.max(x.abs()));
    let w_gap = w.iter().zip(&w_direct).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / w_scale;
    let mut diag = BTreeMap::new();
    diag.insert("bae_residual".to_string(), sol.roots.bae_residual);
    diag.insert("identity_residual".to_string(), bethe::verify_polynomial_identity(&full, &sol.roots));
    diag.insert("w_consistency".to_string(), w_gap);
    if let Ok(r) = crate::oracle::schrodinger_residual(&sol, &crate::oracle::ResidualGrid::default_for(&sol)) {
        diag.insert("schrodinger_residual".to_string(), r);
    }
    if let Ok(norm) = crate::wavefunction::norm_quadrature(&sol.waveform) {
        diag.insert("norm".to_string(), norm);
    }
    diag.retain(|_, v| v.is_finite());
    sol.diagnostics = diag;
    Ok(sol)
}

const OMEGA_MAX: f64 = 1e3;
const MATCH_TOL: f64 = 1e-10;

fn solve_match_ell(problem: &FamilyProblem, cfg: &SolverConfig) -> Result<FamilySolve> {
    let l = problem.ell as f64 + 0.5;
    let target = l * l;
    let omega0 = omega_start(problem).unwrap_or(1.0);
    let f0 = front(problem, Some(omega0))?;
    let branches = bethe::solve_bae(&f0.ode(), problem.n, f0.variable(), cfg)?;
    let mut out = FamilySolve { solutions: Vec::new(), skipped: Vec::new() };
    for branch in branches {
        let tracked = track_branch(problem, cfg, omega0, branch.clone(), target).and_then(|(omega, roots)| {
            let f = front(problem, Some(omega))?;
            let extra = BTreeMap::from([("omega".to_string(), omega)]);
            assemble(problem.clone(), f.as_ref(), roots, extra, cfg)
        });
        match tracked {
            Ok(sol) => {
                let dup = out.solutions.iter().any(|s| {
                    (s.omega() - sol.omega()).abs() <= cfg.tol.dedup * sol.omega().max(1.0)
                        && s.roots.roots.len() == sol.roots.roots.len()
                        && s.roots.roots.iter().zip(&sol.roots.roots).all(|(a, b)| (a - b).norm() <= cfg.tol.dedup)
                });
                if !dup {
                    out.solutions.push(sol);
                }
            }
            Err(error) => out.skipped.push(SkippedBranch { roots: branch.roots, error }),
        }
    }
    out.solutions.sort_by(|a, b| {
        bethe::canonical_cmp(&a.roots.roots, &b.roots.roots).then(a.omega().total_cmp(&b.omega()))
    });
    Ok(out)
}

/// Newton with bisection fallback on `g(ω) = (ℓ+½)²(ω) − target`, moving the
/// roots along the branch by predictor (sensitivity) plus corrector (refine).
fn track_branch(
    problem: &FamilyProblem,
    cfg: &SolverConfig,
    omega0: f64,
    start: RootSet,
    target: f64,
) -> Result<(f64, RootSet)> {
    let infeasible = || QesError::ConstraintInfeasible(format!("no omega in (0, {OMEGA_MAX}] matches ell = {}", problem.ell));
    let mut omega = omega0;
    let mut roots = start;
    // brackets: g > 0 at `pos`, g < 0 at `neg`
    let mut pos: Option<f64> = None;
    let mut neg: Option<f64> = None;
    for _ in 0..200 {
        let f = front(problem, Some(omega))?;
        let ode = f.ode();
        let (dq, k) = f.match_data().ok_or_else(|| QesError::InvalidProblem("match-ell unsupported".into()))?;
        let ps = PowerSums::of(&roots.roots, cfg.tol.conj)?;
        let lsq = f.ell_half_sq(&ps);
        let g = lsq - target;
        if g.abs() < MATCH_TOL {
            return Ok((omega, roots));
        }
        if g > 0.0 {
            pos = Some(omega);
        } else {
            neg = Some(omega);
        }
        let dt = bethe::root_sensitivity(&ode, &roots.roots, &dq).ok_or_else(infeasible)?;
        let ds1: f64 = dt.iter().map(|z| z.re).sum();
        let slope = -2.0 * (k + 2.0 * ps.s1) - 4.0 * omega * ds1;
        let mut next = if slope != 0.0 { omega - g / slope } else { f64::NAN };
        let bracket = match (pos, neg) {
            (Some(p), Some(q)) => Some((p.min(q), p.max(q))),
            _ => None,
        };
        let inside = |x: f64| match bracket {
            Some((lo, hi)) => x > lo && x < hi,
            None => x > 0.0 && x <= OMEGA_MAX,
        };
        if !next.is_finite() || !inside(next) {
            next = match bracket {
                Some((lo, hi)) => 0.5 * (lo + hi),
                None if next.is_finite() && next > OMEGA_MAX => 0.5 * (omega + OMEGA_MAX),
                None => 0.5 * omega,
            };
        }
        if !(next > 1e-300) || (omega >= OMEGA_MAX && next >= OMEGA_MAX) {
            return Err(infeasible());
        }
        // Move along the branch; shrink the step if the corrector loses it.
        let mut step = next - omega;
        let mut moved = None;
        for _ in 0..30 {
            let trial = omega + step;
            let guess: Vec<Complex64> = roots.roots.iter().zip(&dt).map(|(t, d)| t + d * step).collect();
            let ft = front(problem, Some(trial))?;
            if let Ok(r) = bethe::refine_roots(&ft.ode(), &guess, ft.variable(), cfg) {
                if r.roots.len() == roots.roots.len() {
                    moved = Some((trial, r));
                    break;
                }
            }
            step *= 0.5;
        }
        let (w, r) = moved.ok_or_else(|| {
            QesError::ConstraintInfeasible(format!("root branch lost while tracking omega near {omega}"))
        })?;
        if (w - omega).abs() <= 1e-15 * omega.max(1.0) && bracket.is_some() {
            return Err(infeasible());
        }
        omega = w;
        roots = r;
    }
    Err(infeasible())
}

/// `(ℓ+½)² ≥ 0`, reported with the resulting real `ℓ`.
pub(crate) fn ell_from_half_sq(lsq: f64, out: &mut BTreeMap<String, f64>) -> Result<()> {
    if lsq < 0.0 {
        return Err(QesError::ConstraintInfeasible(format!("derived (ell+1/2)^2 = {lsq}")));
    }
    out.insert("ell_half_sq".into(), lsq);
    out.insert("ell".into(), lsq.sqrt() - 0.5);
    Ok(())
}

pub(crate) fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub(crate) fn exps(pairs: &[(i32, f64)]) -> BTreeMap<i32, f64> {
    pairs.iter().copied().collect()
}

#[cfg(test)]
mod tests;
