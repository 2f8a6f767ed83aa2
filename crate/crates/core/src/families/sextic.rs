//! `V = e/r⁴ + d/r⁶` in `t = r²`, `P = t²`, `Q = −ω t² + (2+ε) t + s` with
//! `s = √(2d)` and `ε = e/s`.

use std::collections::BTreeMap;

use super::{ell_from_half_sq, exps, FamilyProblem, Front, Shape};
use crate::bethe::{PolyOde, PowerSums, Variable};
use crate::error::{QesError, Result};

pub(crate) struct Sextic {
    n: f64,
    omega: f64,
    s: f64,
    eps: f64,
}

impl Sextic {
    pub fn new(pb: &FamilyProblem, omega: f64) -> Result<Self> {
        let s = (2.0 * pb.get("d")).sqrt();
        let eps = pb.get("e") / s;
        let gamma = 1.5 + eps;
        if !(gamma > 0.0) {
            return Err(QesError::InvalidExponent { name: "gamma", value: gamma });
        }
        Ok(Self { n: pb.n as f64, omega, s, eps })
    }
}

impl Front for Sextic {
    fn ode(&self) -> PolyOde {
        PolyOde { p: [0.0, 0.0, 1.0, 0.0, 0.0], q: [self.s, 2.0 + self.eps, -self.omega, 0.0, 0.0, 0.0], w: None }
    }

    fn variable(&self) -> Variable {
        Variable::TEqR2
    }

    fn derive(&self, ps: &PowerSums) -> Result<(BTreeMap<String, f64>, f64)> {
        let mut out = BTreeMap::new();
        ell_from_half_sq(self.ell_half_sq(ps), &mut out)?;
        Ok((out, self.omega * (2.0 * self.n + 2.0 + self.eps)))
    }

    fn ell_half_sq(&self, ps: &PowerSums) -> f64 {
        let (n, e) = (self.n, self.eps);
        4.0 * n * (n + 1.0 + e) + (e + 1.0) * (e + 1.0) - 2.0 * self.omega * (self.s + 2.0 * ps.s1)
    }

    fn shape(&self) -> Shape {
        Shape { exponent: 1.5 + self.eps, exp_coeffs: exps(&[(2, -0.5 * self.omega), (-2, -0.5 * self.s)]) }
    }

    fn w_from_couplings(&self, _all: &BTreeMap<String, f64>, energy: f64, ell_term: f64) -> [f64; 5] {
        let (w, e) = (self.omega, self.eps);
        let lsq = ell_term + 0.25;
        [
            -0.25 * (2.0 * w * self.s + lsq - (e + 1.0) * (e + 1.0)),
            0.5 * (energy - w * (2.0 + e)),
            0.0,
            0.0,
            0.0,
        ]
    }

    fn match_data(&self) -> Option<([f64; 6], f64)> {
        Some(([0.0, 0.0, -1.0, 0.0, 0.0, 0.0], self.s))
    }
}
