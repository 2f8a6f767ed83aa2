//! `V = a/r⁴ + b/r⁶ + c/r⁸ + d/r¹⁰` in `z = r²`, `P = z³`,
//! `Q = −ω z³ + (η+½) z² + (c/s) z + s` with `s = √(2d)` and
//! `η = 5/2 + b/s − c²/(2s³)`.

use std::collections::BTreeMap;

use super::{ell_from_half_sq, exps, FamilyProblem, Front, Shape};
use crate::bethe::{PolyOde, PowerSums, Variable};
use crate::error::{QesError, Result};

pub(crate) struct Decatic {
    n: f64,
    omega: f64,
    s: f64,
    /// `c/s`
    k: f64,
    eta: f64,
}

impl Decatic {
    pub fn new(pb: &FamilyProblem, omega: f64) -> Result<Self> {
        let s = (2.0 * pb.get("d")).sqrt();
        let c = pb.get("c");
        let eta = 2.5 + pb.get("b") / s - c * c / (2.0 * s * s * s);
        if !(eta > 0.0) {
            return Err(QesError::InvalidExponent { name: "eta", value: eta });
        }
        Ok(Self { n: pb.n as f64, omega, s, k: c / s, eta })
    }
}

impl Front for Decatic {
    fn ode(&self) -> PolyOde {
        PolyOde {
            p: [0.0, 0.0, 0.0, 1.0, 0.0],
            q: [self.s, self.k, self.eta + 0.5, -self.omega, 0.0, 0.0],
            w: None,
        }
    }

    fn variable(&self) -> Variable {
        Variable::ZEqR2
    }

    fn derive(&self, ps: &PowerSums) -> Result<(BTreeMap<String, f64>, f64)> {
        let (n, w, s, k, eta) = (self.n, self.omega, self.s, self.k, self.eta);
        let mut out = BTreeMap::new();
        ell_from_half_sq(self.ell_half_sq(ps), &mut out)?;
        let a = -2.0 * w * ps.s2 + 2.0 * (2.0 * n - 1.5 + eta) * ps.s1 + 2.0 * n * k - w * s + k * (eta - 1.5);
        out.insert("a".into(), a);
        Ok((out, w * (2.0 * n + eta + 0.5)))
    }

    fn ell_half_sq(&self, ps: &PowerSums) -> f64 {
        let (n, eta) = (self.n, self.eta);
        (eta - 0.5) * (eta - 0.5) + 4.0 * n * (n + eta - 0.5) - 2.0 * self.omega * (self.k + 2.0 * ps.s1)
    }

    fn shape(&self) -> Shape {
        Shape {
            exponent: self.eta,
            exp_coeffs: exps(&[(2, -0.5 * self.omega), (-2, -0.5 * self.k), (-4, -0.25 * self.s)]),
        }
    }

    fn w_from_couplings(&self, all: &BTreeMap<String, f64>, energy: f64, ell_term: f64) -> [f64; 5] {
        let (w, s, k, eta) = (self.omega, self.s, self.k, self.eta);
        let a = all["a"];
        [
            -0.5 * (a + w * s + k * (1.5 - eta)),
            0.25 * (eta * (eta - 1.0) - ell_term - 2.0 * w * k),
            0.5 * (energy - w * (eta + 0.5)),
            0.0,
            0.0,
        ]
    }

    fn match_data(&self) -> Option<([f64; 6], f64)> {
        Some(([0.0, 0.0, 0.0, -1.0, 0.0, 0.0], self.k))
    }
}
