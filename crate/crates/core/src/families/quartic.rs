//! `V = a/r + b/r² + c/r³ + d/r⁴` in the variable `r`, `P = r²`.
//!
//! With `s = √(2d)` and `γ = 1 + c/s` the harmonic case has
//! `Q = 2(−ω r³ + γ r + s)` and the coulombic case `Q = 2(B r² + γ r + s)`.

use std::collections::BTreeMap;

use super::{exps, map, Case, FamilyProblem, Front, Shape};
use crate::bethe::{PolyOde, PowerSums, Variable};
use crate::error::{QesError, Result};

pub(crate) struct Quartic {
    case: Case,
    n: f64,
    ell_term: f64,
    omega: f64,
    s: f64,
    gamma: f64,
    /// Coulombic input `a`, `B = a/(n+γ)`.
    a: f64,
    big_b: f64,
}

impl Quartic {
    pub fn new(pb: &FamilyProblem, omega: f64) -> Result<Self> {
        let s = (2.0 * pb.get("d")).sqrt();
        let gamma = 1.0 + pb.get("c") / s;
        if !(gamma > 0.0) {
            return Err(QesError::InvalidExponent { name: "gamma", value: gamma });
        }
        let n = pb.n as f64;
        let (omega, a, big_b) = match pb.case {
            Case::Harmonic => (omega, f64::NAN, 0.0),
            Case::Coulombic => {
                let a = pb.get("a");
                (0.0, a, a / (n + gamma))
            }
        };
        Ok(Self { case: pb.case, n, ell_term: pb.ell_term(), omega, s, gamma, a, big_b })
    }
}

impl Front for Quartic {
    fn ode(&self) -> PolyOde {
        let q = [2.0 * self.s, 2.0 * self.gamma, 2.0 * self.big_b, -2.0 * self.omega, 0.0, 0.0];
        PolyOde { p: [0.0, 0.0, 1.0, 0.0, 0.0], q, w: None }
    }

    fn variable(&self) -> Variable {
        Variable::R
    }

    fn derive(&self, ps: &PowerSums) -> Result<(BTreeMap<String, f64>, f64)> {
        let (n, g, s) = (self.n, self.gamma, self.s);
        let base = g * (g - 1.0) + n * (n + 2.0 * g - 1.0) - self.ell_term;
        Ok(match self.case {
            Case::Harmonic => {
                let w = self.omega;
                let a = -w * (s + ps.s1);
                let b = 0.5 * (base - 2.0 * w * ps.s2);
                (map(&[("a", a), ("b", b)]), w * (n + 0.5 + g))
            }
            Case::Coulombic => {
                let bb = self.big_b;
                let b = 0.5 * base + bb * (s + ps.s1);
                (map(&[("B", bb), ("b", b)]), -0.5 * bb * bb)
            }
        })
    }

    fn shape(&self) -> Shape {
        let lead = match self.case {
            Case::Harmonic => (2, -0.5 * self.omega),
            Case::Coulombic => (1, self.big_b),
        };
        Shape { exponent: self.gamma, exp_coeffs: exps(&[lead, (-1, -self.s)]) }
    }

    fn w_from_couplings(&self, all: &BTreeMap<String, f64>, energy: f64, ell_term: f64) -> [f64; 5] {
        let (g, s, w, bb) = (self.gamma, self.s, self.omega, self.big_b);
        let a = all["a"];
        let b = all["b"];
        debug_assert!(self.case == Case::Harmonic || a == self.a);
        [
            g * (g - 1.0) + 2.0 * bb * s - ell_term - 2.0 * b,
            2.0 * (bb * g - a - w * s),
            2.0 * energy + bb * bb - w * (1.0 + 2.0 * g),
            0.0,
            0.0,
        ]
    }
}
