//! `V = a/r + … + h/r⁸` in the variable `r`, `P = r⁴`.
//!
//! With `s = √(2h)`, `κ = (f − g²/4h)/s`, `G = g/s` and
//! `β = 2 + e/s + (g/4)√(2/h³)(g²/4h − f)`:
//! harmonic `Q = 2(−ω r⁵ + β r³ + κ r² + G r + s)`,
//! coulombic `Q = 2(B r⁴ + β r³ + κ r² + G r + s)` with `B = a/(n+β)`.

use std::collections::BTreeMap;

use super::{exps, map, Case, FamilyProblem, Front, Shape};
use crate::bethe::{PolyOde, PowerSums, Variable};
use crate::error::{QesError, Result};

pub(crate) struct Octic {
    case: Case,
    n: f64,
    ell_term: f64,
    omega: f64,
    s: f64,
    kappa: f64,
    g: f64,
    beta: f64,
    big_b: f64,
}

impl Octic {
    pub fn new(pb: &FamilyProblem, omega: f64) -> Result<Self> {
        let h = pb.get("h");
        let (e, f, g) = (pb.get("e"), pb.get("f"), pb.get("g"));
        let s = (2.0 * h).sqrt();
        let beta = 2.0 + e / s + 0.25 * g * (2.0 / (h * h * h)).sqrt() * (g * g / (4.0 * h) - f);
        if !(beta > 0.0) {
            return Err(QesError::InvalidExponent { name: "beta", value: beta });
        }
        let n = pb.n as f64;
        let (omega, big_b) = match pb.case {
            Case::Harmonic => (omega, 0.0),
            Case::Coulombic => (0.0, pb.get("a") / (n + beta)),
        };
        Ok(Self {
            case: pb.case,
            n,
            ell_term: pb.ell_term(),
            omega,
            s,
            kappa: (f - g * g / (4.0 * h)) / s,
            g: g / s,
            beta,
            big_b,
        })
    }
}

impl Front for Octic {
    fn ode(&self) -> PolyOde {
        let q = [
            2.0 * self.s,
            2.0 * self.g,
            2.0 * self.kappa,
            2.0 * self.beta,
            2.0 * self.big_b,
            -2.0 * self.omega,
        ];
        PolyOde { p: [0.0, 0.0, 0.0, 0.0, 1.0], q, w: None }
    }

    fn variable(&self) -> Variable {
        Variable::R
    }

    fn derive(&self, ps: &PowerSums) -> Result<(BTreeMap<String, f64>, f64)> {
        let (n, w, s, k, g, be, bb) = (self.n, self.omega, self.s, self.kappa, self.g, self.beta, self.big_b);
        let m = n + be - 1.0;
        let b0 = 0.5 * (be * (be - 1.0) - self.ell_term + n * (n + 2.0 * be - 1.0));
        let d0 = m * ps.s2 + ps.e2 + k * ps.s1 + 0.5 * k * k + 0.5 * g * (2.0 * n + 2.0 * be - 3.0);
        Ok(match self.case {
            Case::Harmonic => {
                let a = -w * (k + ps.s1);
                let b = b0 - g * w - w * ps.s2;
                let c = -w * ps.s3 + m * (ps.s1 + k) - w * s;
                let d = -w * ps.s4 + d0;
                (map(&[("a", a), ("b", b), ("c", c), ("d", d)]), w * (n + 0.5 + be))
            }
            Case::Coulombic => {
                let b = b0 + bb * (k + ps.s1);
                let c = bb * (g + ps.s2) + m * (k + ps.s1);
                let d = bb * ps.s3 + bb * s + d0;
                (map(&[("B", bb), ("b", b), ("c", c), ("d", d)]), -0.5 * bb * bb)
            }
        })
    }

    fn shape(&self) -> Shape {
        let lead = match self.case {
            Case::Harmonic => (2, -0.5 * self.omega),
            Case::Coulombic => (1, self.big_b),
        };
        Shape {
            exponent: self.beta,
            exp_coeffs: exps(&[lead, (-1, -self.kappa), (-2, -0.5 * self.g), (-3, -self.s / 3.0)]),
        }
    }

    fn w_from_couplings(&self, all: &BTreeMap<String, f64>, energy: f64, ell_term: f64) -> [f64; 5] {
        let (w, s, k, g, be, bb) = (self.omega, self.s, self.kappa, self.g, self.beta, self.big_b);
        let (a, b, c, d) = (all["a"], all["b"], all["c"], all["d"]);
        [
            -(2.0 * d - g * (2.0 * be - 3.0) - k * k - 2.0 * bb * s),
            -2.0 * (c - (be - 1.0) * k + w * s - bb * g),
            be * (be - 1.0) - ell_term - 2.0 * b + 2.0 * bb * k - 2.0 * w * g,
            2.0 * (be * bb - a - w * k),
            2.0 * energy + bb * bb - w * (1.0 + 2.0 * be),
        ]
    }
}
