//! Functional Bethe ansatz for `P S'' + Q S' + W S = 0` with `deg P <= 4`,
//! `deg Q <= 5`, `deg W <= 4`.
//!
//! A degree-`n` polynomial solution `S(t) = prod (t - t_i)` exists exactly when
//! the distinct roots satisfy
//!
//! ```text
//! sum_{j != i} 2 / (t_i - t_j) + Q(t_i) / P(t_i) = 0,   i = 1..n
//! ```
//!
//! and `W` is then fixed by the root power sums (`compute_w_coefficients`).
//! [`solve_bae`] finds root sets by multi-start damped Newton with deflation;
//! [`verify_polynomial_identity`] re-checks each one by expanding the ODE.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};
use crate::poly;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Radial variable the polynomial factor lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "r")]
    R,
    #[serde(rename = "t=r^2")]
    TEqR2,
    #[serde(rename = "z=r^2")]
    ZEqR2,
}

impl Variable {
    /// `(v(r), v'(r), v''(r))`.
    pub fn map(self, r: f64) -> (f64, f64, f64) {
        match self {
            Variable::R => (r, 1.0, 0.0),
            Variable::TEqR2 | Variable::ZEqR2 => (r * r, 2.0 * r, 2.0),
        }
    }
}

/// Polynomial coefficients of the ODE, ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyOde {
    pub p: [f64; 5],
    pub q: [f64; 6],
    pub w: Option<[f64; 5]>,
}

impl PolyOde {
    pub fn new(p: [f64; 5], q: [f64; 6]) -> Result<Self> {
        if p.iter().all(|&c| c == 0.0) {
            return Err(QesError::InvalidArgument("P(t) is identically zero".into()));
        }
        if p.iter().chain(q.iter()).any(|c| !c.is_finite()) {
            return Err(QesError::InvalidArgument("non-finite ODE coefficient".into()));
        }
        Ok(Self { p, q, w: None })
    }

    pub fn with_w(mut self, w: [f64; 5]) -> Self {
        self.w = Some(w);
        self
    }

    fn q_over_p(&self, t: C) -> (C, C) {
        let p = poly::eval_complex(&self.p, t);
        let q = poly::eval_complex(&self.q, t);
        let dp = poly::eval_complex(&poly::derivative(&self.p), t);
        let dq = poly::eval_complex(&poly::derivative(&self.q), t);
        let ratio = q / p;
        (ratio, (dq - ratio * dp) / p)
    }

    fn scale(&self) -> f64 {
        let w = self.w.unwrap_or([0.0; 5]);
        poly::max_abs(&self.p).max(poly::max_abs(&self.q)).max(poly::max_abs(&w))
    }
}

/// Numerical tolerances; see the crate README for the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub bae: f64,
    pub ident: f64,
    pub sep: f64,
    pub conj: f64,
    pub dedup: f64,
    pub denom: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bae: 1e-10,
            ident: 1e-10,
            sep: 1e-8,
            conj: 1e-8,
            dedup: 1e-6,
            denom: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    pub starts: usize,
    /// Real parts of starts are drawn from `[-box_half_width, box_half_width]`.
    pub box_half_width: f64,
    pub max_iter: usize,
    pub tol: Tolerances,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 12345,
            starts: 200,
            box_half_width: 20.0,
            max_iter: 200,
            tol: Tolerances::default(),
        }
    }
}

/// A solution of the Bethe ansatz equations.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub n: usize,
    /// Canonically sorted (real part, then imaginary part).
    pub roots: Vec<C>,
    pub variable: Variable,
    /// Max-norm of the BAE residuals.
    pub bae_residual: f64,
    /// Minimum pairwise distance (`inf` for fewer than two roots).
    pub separation: f64,
}

impl RootSet {
    pub fn empty(variable: Variable) -> Self {
        Self {
            n: 0,
            roots: Vec::new(),
            variable,
            bae_residual: 0.0,
            separation: f64::INFINITY,
        }
    }

    /// Builds a root set and fills in the diagnostics against `ode`.
    pub fn from_roots(ode: &PolyOde, mut roots: Vec<C>, variable: Variable) -> Self {
        canonical_sort(&mut roots);
        let separation = min_separation(&roots);
        let bae_residual = residual_vec(ode, &roots)
            .map(|f| inf_norm(&f))
            .unwrap_or(f64::INFINITY);
        Self {
            n: roots.len(),
            roots,
            variable,
            bae_residual,
            separation,
        }
    }

    pub fn is_real(&self, conj_tol: f64) -> bool {
        self.roots.iter().all(|z| z.im.abs() <= conj_tol)
    }
}

/// Power sums `s_k = sum t_i^k` (k = 1..4) and the pair sum `e2 = sum_{i<j} t_i t_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSums {
    pub n: usize,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub e2: f64,
}

impl PowerSums {
    pub fn zero() -> Self {
        Self { n: 0, s1: 0.0, s2: 0.0, s3: 0.0, s4: 0.0, e2: 0.0 }
    }

    pub fn of(roots: &[C], conj_tol: f64) -> Result<Self> {
        let mut sums = [ZERO; 4];
        let mut scale = [0.0_f64; 4];
        for &t in roots {
            let mut pow = t;
            for k in 0..4 {
                sums[k] += pow;
                scale[k] += pow.norm();
                pow *= t;
            }
        }
        let names = ["sum t", "sum t^2", "sum t^3", "sum t^4"];
        for k in 0..4 {
            if sums[k].im.abs() > conj_tol * scale[k].max(1.0) {
                return Err(QesError::NonRealCoefficients {
                    which: names[k],
                    imag: sums[k].im,
                });
            }
        }
        let s1 = sums[0].re;
        let s2 = sums[1].re;
        Ok(Self {
            n: roots.len(),
            s1,
            s2,
            s3: sums[2].re,
            s4: sums[3].re,
            e2: 0.5 * (s1 * s1 - s2),
        })
    }
}

/// The five `W` coefficients `(w0..w4)` for which `S = prod (t - t_i)` solves the ODE.
pub fn compute_w_coefficients(ode: &PolyOde, roots: &RootSet, conj_tol: f64) -> Result<[f64; 5]> {
    let ps = PowerSums::of(&roots.roots, conj_tol)?;
    Ok(w_from_power_sums(&ode.p, &ode.q, &ps))
}

pub fn w_from_power_sums(p: &[f64; 5], q: &[f64; 6], ps: &PowerSums) -> [f64; 5] {
    let n = ps.n as f64;
    let nn1 = n * (n - 1.0);
    let w4 = -n * q[5];
    let w3 = -q[5] * ps.s1 - n * q[4];
    let w2 = -q[5] * ps.s2 - q[4] * ps.s1 - nn1 * p[4] - n * q[3];
    let w1 = -q[5] * ps.s3 - q[4] * ps.s2 - (2.0 * (n - 1.0) * p[4] + q[3]) * ps.s1 - nn1 * p[3] - n * q[2];
    let w0 = -q[5] * ps.s4 - q[4] * ps.s3 - (q[3] + 2.0 * (n - 1.0) * p[4]) * ps.s2 - 2.0 * p[4] * ps.e2
        - (2.0 * (n - 1.0) * p[3] + q[2]) * ps.s1
        - nn1 * p[2]
        - n * q[1];
    [w0, w1, w2, w3, w4]
}

/// `sum_{j != i} 2/(t_i - t_j) + Q(t_i)/P(t_i)` for each root.
pub fn bae_residuals(ode: &PolyOde, roots: &RootSet, tol: &Tolerances) -> Result<Vec<C>> {
    let t = &roots.roots;
    for (i, &ti) in t.iter().enumerate() {
        let p = poly::eval_complex(&ode.p, ti);
        if p.norm() < tol.denom {
            return Err(QesError::DenominatorBlowup {
                index: i,
                detail: format!("|P(t_i)| = {:e}", p.norm()),
            });
        }
        for (j, &tj) in t.iter().enumerate() {
            if j != i && (ti - tj).norm() < tol.sep {
                return Err(QesError::DenominatorBlowup {
                    index: i,
                    detail: format!("|t_i - t_{j}| = {:e}", (ti - tj).norm()),
                });
            }
        }
    }
    residual_vec(ode, t).ok_or_else(|| QesError::DenominatorBlowup {
        index: 0,
        detail: "non-finite residual".into(),
    })
}

/// Expands `P S'' + Q S' + W S` and returns its largest coefficient relative to
/// `max(|p|, |q|, |w|) * max |S_k|`.
pub fn verify_polynomial_identity(ode: &PolyOde, roots: &RootSet) -> f64 {
    let w = ode.w.unwrap_or([0.0; 5]);
    let s = poly::from_roots(&roots.roots);
    let ds = poly::derivative(&s);
    let dds = poly::derivative(&ds);
    let lift = |c: &[f64]| c.iter().map(|&x| C::new(x, 0.0)).collect::<Vec<_>>();
    let lhs = poly::add(
        &poly::add(&poly::mul(&lift(&ode.p), &dds), &poly::mul(&lift(&ode.q), &ds)),
        &poly::mul(&lift(&w), &s),
    );
    let worst = lhs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let s_scale = s.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let scale = ode.scale() * s_scale;
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// All distinct conjugation-closed BAE solutions reachable from `cfg.starts`
/// seeded starts, canonically ordered.
pub fn solve_bae(ode: &PolyOde, n: usize, variable: Variable, cfg: &SolverConfig) -> Result<Vec<RootSet>> {
    if n == 0 {
        return Ok(vec![RootSet::empty(variable)]);
    }
    let mut found: Vec<Vec<C>> = Vec::new();
    for start in 0..cfg.starts {
        let x0 = draw_start(cfg, n, start as u64);
        let deflators: Vec<Deflator> = found.iter().map(|y| Deflator::new(y)).collect();
        let Some(x) = newton(ode, x0, &deflators, cfg) else { continue };
        let Some(x) = finalize(ode, x, cfg) else { continue };
        if !found.iter().any(|y| same_set(y, &x, cfg.tol.dedup)) {
            found.push(x);
        }
    }
    if found.is_empty() {
        return Err(QesError::NoSolutionFound { n, starts: cfg.starts });
    }
    let mut sets: Vec<RootSet> = found
        .into_iter()
        .map(|x| RootSet::from_roots(ode, x, variable))
        .collect();
    sets.sort_by(|a, b| canonical_cmp(&a.roots, &b.roots));
    Ok(sets)
}

/// Undeflated damped Newton from a given root guess (branch tracking).
pub fn refine_roots(ode: &PolyOde, initial: &[C], variable: Variable, cfg: &SolverConfig) -> Result<RootSet> {
    if initial.is_empty() {
        return Ok(RootSet::empty(variable));
    }
    newton(ode, initial.to_vec(), &[], cfg)
        .and_then(|x| finalize(ode, x, cfg))
        .map(|x| RootSet::from_roots(ode, x, variable))
        .ok_or(QesError::NoSolutionFound { n: initial.len(), starts: 1 })
}

/// Sensitivity `dt/dλ` of a BAE solution to a parameter entering `Q` linearly
/// with `dQ/dλ = dq`: solves `J dt = -dF/dλ`.
pub fn root_sensitivity(ode: &PolyOde, roots: &[C], dq: &[f64; 6]) -> Option<Vec<C>> {
    let jac = jacobian(ode, roots)?;
    let rhs: Vec<C> = roots
        .iter()
        .map(|&t| -poly::eval_complex(dq, t) / poly::eval_complex(&ode.p, t))
        .collect();
    solve_linear(jac, rhs)
}

fn residual_vec(ode: &PolyOde, t: &[C]) -> Option<Vec<C>> {
    let mut out = Vec::with_capacity(t.len());
    for (i, &ti) in t.iter().enumerate() {
        let mut f = ode.q_over_p(ti).0;
        for (j, &tj) in t.iter().enumerate() {
            if j != i {
                f += 2.0 / (ti - tj);
            }
        }
        if !(f.re.is_finite() && f.im.is_finite()) {
            return None;
        }
        out.push(f);
    }
    Some(out)
}

fn jacobian(ode: &PolyOde, t: &[C]) -> Option<Vec<Vec<C>>> {
    let n = t.len();
    let mut jac = vec![vec![ZERO; n]; n];
    for i in 0..n {
        let mut diag = ode.q_over_p(t[i]).1;
        for j in 0..n {
            if j != i {
                let inv = 1.0 / (t[i] - t[j]);
                let v = 2.0 * inv * inv;
                jac[i][j] = v;
                diag -= v;
            }
        }
        jac[i][i] = diag;
    }
    jac.iter()
        .flatten()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(jac)
}

fn solve_linear(mut a: Vec<Vec<C>>, mut b: Vec<C>) -> Option<Vec<C>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![ZERO; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
}

fn inf_norm(v: &[C]) -> f64 {
    v.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

fn two_norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Start `index` of the multi-start sequence. Each start owns the ChaCha stream
/// `index` under `cfg.seed`; a random number of leading entries form conjugate pairs.
/// Real parts cycle through the nested half-widths `w, w/2, w/4, w/8` so that
/// compact root clouds are reached without shrinking the configured box. Real
/// roots cannot cross a real pole of `Q/P`, so the sign pattern of a start fixes
/// what it can reach; every other block of four starts is folded into `[0, w]`
/// to keep the all-positive pattern sampled at large `n`.
fn draw_start(cfg: &SolverConfig, n: usize, index: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let pairs = rng.gen_range(0..=n / 2);
    let w = cfg.box_half_width / f64::from(1u32 << (index % 4));
    let lo = if (index / 4) % 2 == 1 { 0.0 } else { -w };
    let mut x = Vec::with_capacity(n);
    for _ in 0..pairs {
        let re = rng.gen_range(lo..=w);
        let im = rng.gen_range(0.5..=1.5);
        x.push(C::new(re, im));
        x.push(C::new(re, -im));
    }
    while x.len() < n {
        x.push(C::new(rng.gen_range(lo..=w), 0.0));
    }
    x
}

/// Multiplicative deflation `m(x) = 1/phi(x) + 1` with the permutation-invariant
/// `phi(x) = sum_i |S_k(x_i)|^2 / nu^2`, `S_k` the polynomial of a known solution.
struct Deflator {
    roots: Vec<C>,
    nu2: f64,
}

impl Deflator {
    fn new(roots: &[C]) -> Self {
        let nu: f64 = roots.iter().map(|z| 1.0 + z.norm()).product();
        Self { roots: roots.to_vec(), nu2: nu * nu }
    }

    /// `(phi, D phi[d])`.
    fn phi(&self, x: &[C], d: Option<&[C]>) -> (f64, f64) {
        let mut phi = 0.0;
        let mut dphi = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let s: C = self.roots.iter().map(|&y| xi - y).product();
            phi += s.norm_sqr();
            if let Some(d) = d {
                let log_d: C = self.roots.iter().map(|&y| 1.0 / (xi - y)).sum();
                let ds = s * log_d;
                dphi += 2.0 * (s.conj() * ds * d[i]).re;
            }
        }
        (phi / self.nu2, dphi / self.nu2)
    }

    fn factor(&self, x: &[C]) -> f64 {
        1.0 / self.phi(x, None).0 + 1.0
    }
}

fn deflation_factor(defl: &[Deflator], x: &[C]) -> f64 {
    defl.iter().map(|d| d.factor(x)).product()
}

fn newton(ode: &PolyOde, mut x: Vec<C>, defl: &[Deflator], cfg: &SolverConfig) -> Option<Vec<C>> {
    let target = 1e-3 * cfg.tol.bae;
    let mut f = residual_vec(ode, &x)?;
    let mut merit = two_norm(&f) * deflation_factor(defl, &x);
    for _ in 0..cfg.max_iter {
        if inf_norm(&f) < target {
            break;
        }
        let jac = jacobian(ode, &x)?;
        let d = solve_linear(jac, f.iter().map(|&v| -v).collect())?;
        let mut tau = 1.0;
        if !defl.is_empty() {
            let mut dlogm = 0.0;
            for df in defl {
                let (phi, dphi) = df.phi(&x, Some(&d));
                if phi < 1e-300 {
                    return None;
                }
                dlogm += -dphi / (phi * (1.0 + phi));
            }
            let denom = 1.0 - dlogm;
            tau = if denom.abs() < 0.1 { 10.0 * denom.signum() } else { 1.0 / denom };
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1.0 / 4096.0 {
            let trial: Vec<C> = x.iter().zip(&d).map(|(&xi, &di)| xi + di * (tau * lambda)).collect();
            if let Some(ft) = residual_vec(ode, &trial) {
                let mt = two_norm(&ft) * deflation_factor(defl, &trial);
                if mt.is_finite() && mt < merit * (1.0 - 1e-4 * lambda) {
                    accepted = Some((trial, ft, mt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let (xn, fnew, mnew) = accepted?;
        if xn.iter().any(|z| z.norm() > 1e8) {
            return None;
        }
        x = xn;
        f = fnew;
        merit = mnew;
    }
    polish(ode, x, cfg)
}

/// A few pure Newton steps while the residual keeps shrinking.
fn polish(ode: &PolyOde, mut x: Vec<C>, cfg: &SolverConfig) -> Option<Vec<C>> {
    let mut f = residual_vec(ode, &x)?;
    for _ in 0..4 {
        let Some(jac) = jacobian(ode, &x) else { break };
        let Some(d) = solve_linear(jac, f.iter().map(|&v| -v).collect()) else { break };
        let trial: Vec<C> = x.iter().zip(&d).map(|(&a, &b)| a + b).collect();
        match residual_vec(ode, &trial) {
            Some(ft) if inf_norm(&ft) < inf_norm(&f) => {
                x = trial;
                f = ft;
            }
            _ => break,
        }
    }
    (inf_norm(&f) < cfg.tol.bae).then_some(x)
}

/// Enforces exact conjugate symmetry and the distinctness/denominator conditions.
fn finalize(ode: &PolyOde, x: Vec<C>, cfg: &SolverConfig) -> Option<Vec<C>> {
    let tol = &cfg.tol;
    let x = symmetrize(x, tol.conj)?;
    let x = polish(ode, x, cfg).and_then(|x| symmetrize(x, tol.conj))?;
    if min_separation(&x) <= tol.sep {
        return None;
    }
    if x.iter().any(|&t| poly::eval_complex(&ode.p, t).norm() < tol.denom) {
        return None;
    }
    let f = residual_vec(ode, &x)?;
    (inf_norm(&f) < tol.bae).then_some(x)
}

fn symmetrize(x: Vec<C>, conj_tol: f64) -> Option<Vec<C>> {
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in x {
        let tol = conj_tol * z.norm().max(1.0);
        if z.im.abs() <= tol {
            reals.push(C::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    if upper.len() != lower.len() {
        return None;
    }
    let mut out = reals;
    for z in upper {
        let (k, dist) = lower
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (w.conj() - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if dist > conj_tol * z.norm().max(1.0) {
            return None;
        }
        let w = lower.swap_remove(k);
        let re = 0.5 * (z.re + w.re);
        let im = 0.5 * (z.im - w.im);
        out.push(C::new(re, im));
        out.push(C::new(re, -im));
    }
    canonical_sort(&mut out);
    Some(out)
}

fn min_separation(x: &[C]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            sep = sep.min((x[i] - x[j]).norm());
        }
    }
    sep
}

pub(crate) fn canonical_sort(x: &mut [C]) {
    x.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Lexicographic on sorted real parts, then imaginary parts.
pub(crate) fn canonical_cmp(a: &[C], b: &[C]) -> std::cmp::Ordering {
    let re = a.iter().map(|z| z.re).zip(b.iter().map(|z| z.re));
    for (x, y) in re {
        match x.total_cmp(&y) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    let im = a.iter().map(|z| z.im).zip(b.iter().map(|z| z.im));
    for (x, y) in im {
        match x.total_cmp(&y) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn same_set(a: &[C], b: &[C], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).norm() <= tol * x.norm().max(1.0))
}
