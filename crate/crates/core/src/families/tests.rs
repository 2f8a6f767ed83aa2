use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> SolverConfig {
    SolverConfig { starts: 60, ..SolverConfig::default() }
}

fn quartic_h(n: usize) -> FamilyProblem {
    FamilyProblem::new(Family::Quartic, Case::Harmonic, n, 0).with("omega", 1.0).with("c", 0.0).with("d", 0.5)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn quartic_harmonic_ode_coefficients() {
    let o = build_ode(&quartic_h(0)).unwrap();
    assert_eq!(o.ode.p, [0.0, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(o.ode.q, [2.0, 2.0, 0.0, -2.0, 0.0, 0.0]);
    assert_eq!(o.variable, Variable::R);
}

#[test]
fn sextic_and_decatic_ode_coefficients() {
    let sx = FamilyProblem::new(Family::Sextic, Case::Harmonic, 0, 0).with("omega", 1.0).with("e", 0.5).with("d", 0.5);
    let o = build_ode(&sx).unwrap();
    assert_eq!(o.ode.p, [0.0, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(o.ode.q, [1.0, 2.5, -1.0, 0.0, 0.0, 0.0]);
    // η = 5/2 + b/s − c²/(2s³) = 2 at b = 0, c = 1, s = 1
    let dc = FamilyProblem::new(Family::Decatic, Case::Harmonic, 0, 0)
        .with("omega", 1.0)
        .with("b", 0.0)
        .with("c", 1.0)
        .with("d", 0.5);
    let o = build_ode(&dc).unwrap();
    assert_eq!(o.ode.p, [0.0, 0.0, 0.0, 1.0, 0.0]);
    assert_eq!(o.ode.q, [1.0, 1.0, 2.5, -1.0, 0.0, 0.0]);
    assert_eq!(o.variable, Variable::ZEqR2);
}

#[test]
fn quartic_ground_state() {
    let sols = solve_family(&quartic_h(0), &cfg()).unwrap().solutions;
    assert_eq!(sols.len(), 1);
    let s = &sols[0];
    assert!(close(s.energy, 1.5, 1e-14));
    assert!(close(s.derived["a"], -1.0, 1e-14));
    assert!(s.derived["b"].abs() < 1e-14);
    assert_eq!(s.waveform.leading_exponent, 1.0);
    assert_eq!(s.waveform.exp_coeffs, exps(&[(2, -0.5), (-1, -1.0)]));
}

#[test]
fn quartic_first_level_single_real_branch() {
    let out = solve_family(&quartic_h(1), &cfg()).unwrap();
    assert_eq!(out.solutions.len(), 1);
    let s = &out.solutions[0];
    let r1 = s.roots.roots[0].re;
    // real root of r³ − r − 1
    assert!(close(r1, 1.324_717_957_244_746, 1e-13));
    assert!(close(s.energy, 2.5, 1e-14));
    assert!(close(s.derived["a"], -(1.0 + r1), 1e-13));
    assert!(close(s.derived["b"], 1.0 - r1 * r1, 1e-13));
}

#[test]
fn quartic_coulombic_ground_state() {
    let p = FamilyProblem::new(Family::Quartic, Case::Coulombic, 0, 0).with("a", -1.0).with("c", 0.0).with("d", 0.5);
    let s = &solve_family(&p, &cfg()).unwrap().solutions[0];
    assert!(close(s.derived["B"], -1.0, 1e-15));
    assert!(close(s.energy, -0.5, 1e-15));
    assert!(close(s.derived["b"], -1.0, 1e-15));
    assert!(s.diagnostics["schrodinger_residual"] < 1e-10);
}

#[test]
fn sextic_examples() {
    let p = FamilyProblem::new(Family::Sextic, Case::Harmonic, 1, 0).with("omega", 1.0).with("e", 0.0).with("d", 0.5);
    let out = solve_family(&p, &cfg()).unwrap();
    let sq2 = 2.0_f64.sqrt();
    // both BAE branches exist; t = 1 + √2 gives (ℓ+½)² = 5 − 2(3 + 2√2) < 0
    assert_eq!(out.solutions.len(), 1);
    assert!(close(out.solutions[0].roots.roots[0].re, 1.0 - sq2, 1e-13));
    assert_eq!(out.skipped.len(), 1);
    assert!(close(out.skipped[0].roots[0].re, 1.0 + sq2, 1e-13));
    assert!(matches!(out.skipped[0].error, QesError::ConstraintInfeasible(_)));

    let p0 = FamilyProblem::new(Family::Sextic, Case::Harmonic, 0, 0).with("omega", 1.0).with("e", 0.5).with("d", 0.5);
    let s = &solve_family(&p0, &cfg()).unwrap().solutions[0];
    assert!(close(s.derived["ell_half_sq"], 0.25, 1e-15));
    assert!(s.derived["ell"].abs() < 1e-15);
    assert!(close(s.energy, 2.5, 1e-15));
}

#[test]
fn octic_ground_state() {
    let p = FamilyProblem::new(Family::Octic, Case::Harmonic, 0, 0)
        .with("omega", 1.0)
        .with("e", 0.0)
        .with("f", 0.0)
        .with("g", 0.0)
        .with("h", 0.5);
    let s = &solve_family(&p, &cfg()).unwrap().solutions[0];
    assert_eq!(s.waveform.leading_exponent, 2.0);
    assert!(close(s.energy, 2.5, 1e-15));
    for (k, v) in [("a", 0.0), ("b", 1.0), ("c", -1.0), ("d", 0.0)] {
        assert!(close(s.derived[k], v, 1e-15), "{k} = {}", s.derived[k]);
    }
}

#[test]
fn decatic_match_ell_ground_state() {
    let p = FamilyProblem::new(Family::Decatic, Case::Harmonic, 0, 0)
        .with("b", 0.0)
        .with("c", 1.0)
        .with("d", 0.5)
        .matching_ell();
    let out = solve_family(&p, &cfg()).unwrap();
    let s = &out.solutions[0];
    assert!(close(s.derived["omega"], 1.0, 1e-12));
    assert!(close(s.derived["a"], -0.5, 1e-12));
    assert!(close(s.energy, 2.5, 1e-12));
    assert_eq!(s.waveform.leading_exponent, 2.0);
}

#[test]
fn sextic_match_ell_tracks_branch() {
    let p = FamilyProblem::new(Family::Sextic, Case::Harmonic, 2, 1).with("e", 0.7).with("d", 0.8).matching_ell();
    let out = solve_family(&p, &cfg()).unwrap();
    assert!(!out.solutions.is_empty());
    for s in &out.solutions {
        assert!((s.derived["ell_half_sq"] - 2.25).abs() < 1e-10);
        assert!(s.diagnostics["identity_residual"] < 1e-10);
        assert!(s.diagnostics["schrodinger_residual"] < 1e-9);
    }
}

fn random_problem(rng: &mut ChaCha8Rng, family: Family, case: Case, n: usize) -> FamilyProblem {
    let ell = rng.gen_range(-1..=2);
    let mut p = FamilyProblem::new(family, case, n, ell);
    let mut u = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let lead = if case == Case::Harmonic { ("omega", u(0.3, 2.0)) } else { ("a", u(-2.0, -0.3)) };
    p = p.with(lead.0, lead.1);
    match family {
        Family::Quartic => p.with("c", u(-0.5, 1.0)).with("d", u(0.2, 2.0)),
        Family::Sextic => p.with("e", u(-0.5, 1.0)).with("d", u(0.2, 2.0)),
        Family::Octic => p.with("e", u(-0.5, 1.0)).with("f", u(-1.0, 1.0)).with("g", u(-0.5, 0.5)).with("h", u(0.2, 2.0)),
        Family::Decatic => p.with("b", u(-0.5, 1.0)).with("c", u(-1.0, 1.0)).with("d", u(0.2, 2.0)),
    }
}

#[test]
fn direct_w_matches_power_sum_w() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let combos = [
        (Family::Quartic, Case::Harmonic),
        (Family::Quartic, Case::Coulombic),
        (Family::Sextic, Case::Harmonic),
        (Family::Octic, Case::Harmonic),
        (Family::Octic, Case::Coulombic),
        (Family::Decatic, Case::Harmonic),
    ];
    for (family, case) in combos {
        for n in 0..=3 {
            let p = random_problem(&mut rng, family, case, n);
            let out = solve_family(&p, &cfg()).unwrap();
            for s in &out.solutions {
                let d = &s.diagnostics;
                assert!(d["w_consistency"] < 1e-10, "{family} {case} n={n}: {d:?}");
                assert!(d["identity_residual"] < 1e-10, "{family} {case} n={n}: {d:?}");
            }
        }
    }
}

#[test]
fn energy_ladder() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (family, step) in [(Family::Quartic, 1.0), (Family::Sextic, 2.0), (Family::Octic, 1.0), (Family::Decatic, 2.0)] {
        let mut base = random_problem(&mut rng, family, Case::Harmonic, 0);
        // small ω keeps the derived (ℓ+½)² positive for the ℓ-deriving families
        base.free.insert("omega".into(), rng.gen_range(0.05..0.2));
        let omega = base.free["omega"];
        let mut prev = None;
        for n in 0..=3 {
            let mut p = base.clone();
            p.n = n;
            let e = solve_family(&p, &cfg()).unwrap().solutions[0].energy;
            if let Some(pe) = prev {
                assert!(close(e - pe, step * omega, 1e-14), "{family} n={n}");
            }
            prev = Some(e);
        }
    }
}

#[test]
fn invariant_violations_name_the_constraint() {
    let bad = quartic_h(0).with("d", -1.0);
    let msg = bad.validate().unwrap_err().to_string();
    assert!(msg.contains("d > 0"), "{msg}");
    let coul = FamilyProblem::new(Family::Quartic, Case::Coulombic, 0, 0).with("a", 1.0).with("c", 0.0).with("d", 0.5);
    assert!(coul.validate().unwrap_err().to_string().contains("a < 0"));
    let sx = FamilyProblem::new(Family::Sextic, Case::Coulombic, 0, 0);
    assert!(matches!(sx.validate(), Err(QesError::InvalidCase(_))));
    let missing = FamilyProblem::new(Family::Octic, Case::Harmonic, 0, 0).with("omega", 1.0);
    assert!(matches!(missing.validate(), Err(QesError::MissingCoupling(_))));
    let neg_gamma = quartic_h(0).with("c", -2.0);
    assert!(matches!(build_ode(&neg_gamma), Err(QesError::InvalidExponent { .. })));
}

#[test]
fn infeasible_sextic_constraint_is_reported() {
    // (ε+1)² − 2ωs < 0 at ω = 3, s = 1
    let p = FamilyProblem::new(Family::Sextic, Case::Harmonic, 0, 0).with("omega", 3.0).with("e", 0.0).with("d", 0.5);
    let out = solve_family(&p, &cfg()).unwrap();
    assert!(out.solutions.is_empty());
    assert!(matches!(out.skipped[0].error, QesError::ConstraintInfeasible(_)));
}

#[test]
fn coulombic_b_negative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for family in [Family::Quartic, Family::Octic] {
        for n in 0..=2 {
            let p = random_problem(&mut rng, family, Case::Coulombic, n);
            for s in solve_family(&p, &cfg()).unwrap().solutions {
                assert!(s.derived["B"] < 0.0);
            }
        }
    }
}

#[test]
fn reduction_differences_shrink() {
    let c = cfg();
    let q = quartic_h(1).with("c", 0.3).with("d", 0.7);
    let qroots = solve_family(&q, &c).unwrap().solutions[0].roots.roots.clone();
    let sx = FamilyProblem::new(Family::Sextic, Case::Harmonic, 1, 0).with("omega", 1.0).with("e", 0.4).with("d", 0.6);
    let sroots = solve_family(&sx, &c).unwrap().solutions[0].roots.roots.clone();
    for (target, roots, limit) in [(&q, &qroots, ReductionLimit::ToQuartic), (&sx, &sroots, ReductionLimit::ToSextic)] {
        let zero = reduction_check(target, roots, limit, 0.0, &c).unwrap();
        assert_eq!(zero.max_difference, 0.0);
        let a = reduction_check(target, roots, limit, 1e-3, &c).unwrap();
        let b = reduction_check(target, roots, limit, 1e-4, &c).unwrap();
        assert!(b.max_difference < 0.2 * a.max_difference, "{limit:?}: {a:?} {b:?}");
        assert!(a.max_difference < 1e-1);
    }
}
