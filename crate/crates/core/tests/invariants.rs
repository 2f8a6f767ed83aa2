use nalgebra::DMatrix;
use proptest::prelude::*;
use qes_core::bethe::{self, SolverConfig};
use qes_core::document::{parse_documents, SolutionDocument};
use qes_core::families::{build_ode, solve_family, Case, Family, FamilyProblem};
use qes_core::oracle::{verify_solution, Level};

fn cfg() -> SolverConfig {
    SolverConfig { starts: 80, ..SolverConfig::default() }
}

/// Real eigenvalues of the companion matrix of `q` (ascending coefficients).
fn real_zeros(q: &[f64]) -> Vec<f64> {
    let deg = q.iter().rposition(|c| *c != 0.0).expect("nonzero polynomial");
    let m = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -q[i] / q[deg]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut out: Vec<f64> = m.complex_eigenvalues().iter().filter(|z| z.im.abs() < 1e-9).map(|z| z.re).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn octic(case: Case, lead: f64, e: f64, f: f64, g: f64, h: f64) -> FamilyProblem {
    let name = if case == Case::Harmonic { "omega" } else { "a" };
    FamilyProblem::new(Family::Octic, case, 1, 0).with(name, lead).with("e", e).with("f", f).with("g", g).with("h", h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // a single root solves the BAE iff it is a real zero of Q away from the poles
    #[test]
    fn single_root_branches_are_companion_eigenvalues(
        harmonic in any::<bool>(),
        lead in 0.3f64..2.0,
        e in -0.5f64..1.0,
        f in -1.0f64..1.0,
        g in -0.5f64..0.5,
        h in 0.2f64..2.0,
    ) {
        let (case, lead) = if harmonic { (Case::Harmonic, lead) } else { (Case::Coulombic, -lead) };
        let p = octic(case, lead, e, f, g, h);
        let o = build_ode(&p).unwrap();
        let mut got: Vec<f64> = bethe::solve_bae(&o.ode, 1, o.variable, &cfg())
            .unwrap()
            .iter()
            .map(|r| r.roots[0].re)
            .collect();
        got.sort_by(f64::total_cmp);
        let want = real_zeros(&o.ode.q);
        prop_assert_eq!(got.len(), want.len(), "{:?} vs {:?}", got, want);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn quartic_branches_verify_and_survive_serialization(
        n in 0usize..4,
        omega in 0.3f64..2.0,
        c in -0.5f64..1.0,
        d in 0.2f64..2.0,
    ) {
        let p = FamilyProblem::new(Family::Quartic, Case::Harmonic, n, 0).with("omega", omega).with("c", c).with("d", d);
        let sols = solve_family(&p, &cfg()).unwrap().solutions;
        prop_assert!(!sols.is_empty());
        for sol in &sols {
            let report = verify_solution(sol, Level::Fast);
            prop_assert!(report.passed, "{:?}", report);
            let doc = SolutionDocument::new(sol, Some(report.clone()));
            let text = serde_json::to_string(&vec![doc]).unwrap();
            let back = parse_documents(&text).unwrap().remove(0).to_solution().unwrap();
            prop_assert_eq!(back.energy, sol.energy);
            prop_assert_eq!(&back.roots.roots, &sol.roots.roots);
            prop_assert_eq!(verify_solution(&back, Level::Fast), report);
        }
    }
}

#[test]
fn solutions_are_seed_deterministic() {
    let p = FamilyProblem::new(Family::Sextic, Case::Harmonic, 3, 0).with("omega", 0.4).with("e", 0.2).with("d", 0.9);
    let a = solve_family(&p, &cfg()).unwrap();
    let b = solve_family(&p, &cfg()).unwrap();
    assert_eq!(a.solutions, b.solutions);
}

#[test]
fn full_verification_on_each_family() {
    let problems = [
        FamilyProblem::new(Family::Quartic, Case::Coulombic, 2, 1).with("a", -1.1).with("c", 0.2).with("d", 0.6),
        FamilyProblem::new(Family::Sextic, Case::Harmonic, 2, 0).with("omega", 0.3).with("e", 0.4).with("d", 0.7),
        FamilyProblem::new(Family::Octic, Case::Harmonic, 2, 0).with("omega", 0.8).with("e", 0.1).with("f", 0.3).with("g", 0.1).with("h", 0.6),
        FamilyProblem::new(Family::Decatic, Case::Harmonic, 1, 1).with("b", 0.2).with("c", 0.5).with("d", 0.7).matching_ell(),
    ];
    for p in problems {
        let sols = solve_family(&p, &cfg()).unwrap().solutions;
        assert!(!sols.is_empty(), "{p:?}");
        for sol in &sols {
            let report = verify_solution(sol, Level::Full);
            assert!(report.passed, "{:?}: {report:?}", p.family);
            assert!(report.check("fd_membership").is_some());
        }
    }
}
