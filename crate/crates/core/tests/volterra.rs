#![allow(clippy::excessive_precision)]

mod common;

use std::f64::consts::{FRAC_1_PI, PI};

use common::{num, rel_err, table};
use frac_spectra::special::gamma_recip;
use frac_spectra::volterra::*;
use frac_spectra::Error;
use proptest::prelude::*;

fn b(c1: f64, c2: f64) -> BoundaryData {
    BoundaryData::new(c1, c2).unwrap()
}

fn potential(name: &str) -> Potential {
    match name {
        "zero" => Potential::Zero,
        "const:1" => Potential::Constant(1.0),
        "poly:0,1" => Potential::Polynomial(vec![0.0, 1.0]),
        _ => panic!("unknown potential {name}"),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Max nodewise difference of `coarse` against every `ratio`-th node of `fine`.
fn mesh_error(coarse: &Solution, fine: &Solution, ratio: usize) -> f64 {
    coarse
        .y
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, y)| (y - fine.y[i * ratio]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn kernel_examples() {
    let k = kernel(1.0, PI * PI, 0.5).unwrap();
    assert!((k - FRAC_1_PI).abs() <= 1e-14);
    assert!((kernel(0.5, 10.0, 1e-9).unwrap() - 1.0).abs() <= 1e-3);
    assert!(kernel(0.75, 10.0, 1e-9).unwrap().abs() <= 1e-3);
    assert!(matches!(kernel(0.75, 10.0, -0.1), Err(Error::Domain(_))));
}

#[test]
fn kernel_is_bounded_by_one() {
    for &alpha in &[0.5, 0.55, 0.6, 0.75, 0.9, 1.0] {
        let solver = Solver::new(alpha).unwrap();
        for &lambda in &[1.0, 10.0, 100.0, 1000.0] {
            for i in 1..=4096 {
                let u = i as f64 / 4096.0;
                let k = solver.kernel_at(lambda, u).unwrap();
                assert!(k.abs() <= 1.0 + 1e-12, "α={alpha} λ={lambda} u={u}: {k}");
            }
        }
    }
}

#[test]
fn kernel_limits_at_the_origin() {
    // K(u) = u^{2α-1}/Γ(2α) + O(u^{4α-1}): tends to 0 for α > 1/2, to 1 at α = 1/2
    for &alpha in &[0.6, 0.75, 0.9, 1.0] {
        for &u in &[1e-6, 1e-9, 1e-12] {
            let k = kernel(alpha, 10.0, u).unwrap();
            let lead = u.powf(2.0 * alpha - 1.0) * gamma_recip(2.0 * alpha);
            assert!(rel_err(k, lead) <= 1e-4, "α={alpha} u={u}: {k} vs {lead}");
        }
    }
    assert!(kernel(0.9, 10.0, 1e-6).unwrap().abs() <= 1e-3);
    assert!(kernel(1.0, 10.0, 1e-6).unwrap().abs() <= 1e-3);
    assert!((kernel(0.5, 10.0, 1e-6).unwrap() - 1.0).abs() <= 1e-3);
}

#[test]
fn free_solution_examples() {
    let v = free_solution(1.0, PI * PI, b(0.0, 1.0), 0.5).unwrap();
    assert!((v - FRAC_1_PI).abs() <= 1e-14);
    let v = free_solution(0.75, 20.0, b(0.0, 1.0), 1.0).unwrap();
    assert!(rel_err(v, 1.3814352318067615563e-2) <= 1e-12);
    // t^α/Γ(α+1) near the origin
    let t: f64 = 1e-8;
    let v = free_solution(0.75, 20.0, b(0.0, 1.0), t).unwrap();
    assert!(rel_err(v, t.powf(0.75) / 0.9190625268488832) <= 1e-6);
    assert!(matches!(
        free_solution(0.75, 20.0, b(1.0, 0.0), 0.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn zero_potential_reproduces_the_free_solution() {
    for &(alpha, lambda) in &[(0.5, 3.0), (0.75, 40.0), (0.9, 200.0), (1.0, 15.0)] {
        let sol = solve(alpha, lambda, &Potential::Zero, b(0.0, 1.0), 257).unwrap();
        for (&t, &y) in sol.mesh.iter().zip(&sol.y).skip(1) {
            let want = free_solution(alpha, lambda, b(0.0, 1.0), t).unwrap();
            assert!((y - want).abs() <= 1e-12, "α={alpha} t={t}");
        }
    }
    let sol = solve(1.0, PI * PI, &Potential::Zero, b(0.0, 1.0), 1024).unwrap();
    assert!(sol.end_value().abs() <= 1e-14);
}

#[test]
fn classical_solve_examples() {
    for &(lambda, n) in &[(PI * PI, 1.0), (4.0 * PI * PI, 2.0)] {
        let sol = classical_solve(lambda, &Potential::Zero, b(0.0, 1.0), 513).unwrap();
        assert!(sol.end_value().abs() <= 1e-14);
        let t = sol.mesh[100];
        assert!((sol.y[100] - (n * PI * t).sin() / (n * PI)).abs() <= 1e-14);
    }
}

#[test]
fn alpha_one_agrees_with_independent_shooting() {
    let rows = table("shooting_reference.csv");
    assert_eq!(rows.len(), 48);
    for r in rows {
        let (q, lambda, t, want) = (potential(&r[0]), num(&r[1]), num(&r[2]), num(&r[3]));
        let i = (t * 4096.0).round() as usize;
        let frac = solve(1.0, lambda, &q, b(0.0, 1.0), 4097).unwrap();
        let classical = classical_solve(lambda, &q, b(0.0, 1.0), 4097).unwrap();
        assert!(
            rel_err(frac.y[i], want) <= 1e-6,
            "{} λ={lambda} t={t}: {} vs {want}",
            r[0],
            frac.y[i]
        );
        assert!(
            rel_err(classical.y[i], want) <= 1e-6,
            "{} λ={lambda} t={t}",
            r[0]
        );
    }
}

#[test]
fn fractional_solver_reduces_to_the_classical_one() {
    let cases = [
        (Potential::Zero, 1e-9),
        (Potential::Polynomial(vec![0.0, 1.0]), 1e-6),
        (Potential::Polynomial(vec![2.0, -1.0, 3.0]), 1e-6),
    ];
    for (q, tol) in cases {
        for &lambda in &[5.0, 30.0, 120.0] {
            let frac = solve(1.0, lambda, &q, b(0.0, 1.0), 1025).unwrap();
            let classical = classical_solve(lambda, &q, b(0.0, 1.0), 1025).unwrap();
            let scale = max_abs(&classical.y);
            for (x, y) in frac.y.iter().zip(&classical.y) {
                assert!(
                    (x - y).abs() <= tol * scale,
                    "{} λ={lambda}",
                    q.descriptor()
                );
            }
        }
    }
}

#[test]
fn convergence_order_against_a_finer_self_solution() {
    let q = Potential::Polynomial(vec![1.0, 2.0, -1.0]);
    for &(alpha, need) in &[
        (0.5, 1.0),
        (0.6, 1.0),
        (0.7, 1.0),
        (0.75, 1.5),
        (0.85, 1.5),
        (1.0, 1.5),
    ] {
        let solver = Solver::new(alpha).unwrap();
        let fine = solver.solve(20.0, &q, b(0.0, 1.0), 4 * 256 + 1).unwrap();
        let e1 = mesh_error(&solver.solve(20.0, &q, b(0.0, 1.0), 65).unwrap(), &fine, 16);
        let e2 = mesh_error(&solver.solve(20.0, &q, b(0.0, 1.0), 129).unwrap(), &fine, 8);
        let order = (e1 / e2).log2();
        assert!(
            order >= need,
            "α={alpha}: errors {e1:.3e} {e2:.3e}, order {order:.2}"
        );
    }
}

#[test]
fn constant_potential_is_a_spectral_shift() {
    // q ≡ c solves exactly like q ≡ 0 at λ - c, for both boundary modes
    for &alpha in &[0.6, 0.8, 1.0] {
        for bd in [b(0.0, 1.0), b(1.0, 0.0)] {
            let solver = Solver::new(alpha).unwrap();
            let mut errs = vec![];
            for n in [129, 257, 513] {
                let sol = solver
                    .solve(30.0, &Potential::Constant(3.0), bd, n)
                    .unwrap();
                let mut e: f64 = 0.0;
                for (&t, &y) in sol.mesh.iter().zip(&sol.y).skip(n / 8) {
                    e = e.max((y - solver.free_solution(27.0, bd, t).unwrap()).abs());
                }
                errs.push(e);
            }
            assert!(errs[2] <= 1e-3, "α={alpha} {bd:?}: {errs:?}");
            assert!(errs[0] / errs[2] >= 2.5, "α={alpha} {bd:?}: {errs:?}");
        }
    }
}

#[test]
fn residual_examples() {
    let sol = solve(1.0, PI * PI, &Potential::Zero, b(0.0, 1.0), 1024).unwrap();
    assert!(residual(&sol, &Potential::Zero).unwrap() <= 1e-3);
    let sol = solve(0.8, 5.0, &Potential::Zero, b(0.0, 1.0), 2048).unwrap();
    let r = residual(&sol, &Potential::Zero).unwrap();
    assert!(r.is_finite() && r <= 1e-2, "{r}");
}

fn residuals(alpha: f64, q: &Potential) -> Vec<f64> {
    [128, 256, 512, 1024]
        .iter()
        .map(|&n| residual(&solve(alpha, 12.0, q, b(0.0, 1.0), n).unwrap(), q).unwrap())
        .collect()
}

#[test]
fn residual_halves_under_refinement() {
    for q in [Potential::Zero, Potential::Polynomial(vec![0.0, 1.0])] {
        let rs = residuals(1.0, &q);
        for w in rs.windows(2) {
            assert!(w[1] <= 0.5 * w[0], "{}: {rs:?}", q.descriptor());
        }
    }
}

#[test]
fn residual_decreases_at_order_alpha_below_one() {
    // P = 𝓘^{1-α}y carries a t^{2α+1} term, so node stencils for P'' lose
    // accuracy near the origin and the residual converges like h^α
    let q = Potential::Polynomial(vec![0.0, 1.0]);
    for &alpha in &[0.6, 0.75, 0.9] {
        let rs = residuals(alpha, &q);
        for w in rs.windows(2) {
            assert!((w[0] / w[1]).log2() >= 0.9 * alpha, "α={alpha}: {rs:?}");
        }
    }
}

#[test]
fn residual_refuses_small_meshes_and_the_singular_mode() {
    let sol = solve(0.8, 5.0, &Potential::Zero, b(0.0, 1.0), 32).unwrap();
    assert!(matches!(
        residual(&sol, &Potential::Zero),
        Err(Error::Domain(_))
    ));
    let sol = solve(0.8, 5.0, &Potential::Zero, b(1.0, 0.0), 128).unwrap();
    assert!(matches!(
        residual(&sol, &Potential::Zero),
        Err(Error::Domain(_))
    ));
}

#[test]
fn free_solution_decays_like_inverse_square_root() {
    for &alpha in &[0.6, 0.75, 0.9, 1.0] {
        let solver = Solver::new(alpha).unwrap();
        let cs: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&lambda: &f64| {
                // resolve the oscillation scale λ^{-1/(2α)}
                let scale = lambda.powf(-0.5 / alpha);
                let top = (60.0 * scale).min(1.0);
                let peak = (1..=4000)
                    .map(|i| {
                        solver
                            .free_solution(lambda, b(0.0, 1.0), top * i as f64 / 4000.0)
                            .unwrap()
                            .abs()
                    })
                    .fold(0.0, f64::max);
                peak * lambda.sqrt()
            })
            .collect();
        let (lo, hi) = cs
            .iter()
            .fold((f64::MAX, 0.0_f64), |(l, h), &c| (l.min(c), h.max(c)));
        assert!(hi / lo <= 2.0, "α={alpha}: {cs:?}");
    }
}

#[test]
fn invalid_inputs() {
    assert!(matches!(Solver::new(0.4), Err(Error::Domain(_))));
    assert!(matches!(Solver::new(1.1), Err(Error::Domain(_))));
    assert!(solve(0.8, 5.0, &Potential::Zero, b(0.0, 1.0), 8).is_err());
    assert!(BoundaryData::new(f64::NAN, 1.0).is_err());
    assert!(solve(
        0.8,
        5.0,
        &Potential::Constant(f64::INFINITY),
        b(0.0, 1.0),
        64
    )
    .is_err());
    assert!(classical_solve(-1.0, &Potential::Zero, b(0.0, 1.0), 64).is_err());
}

#[test]
fn potential_serializes_with_a_kind_tag() {
    let q = Potential::Polynomial(vec![0.0, 1.0]);
    let json = serde_json::to_string(&q).unwrap();
    assert_eq!(json, r#"{"kind":"polynomial","data":[0.0,1.0]}"#);
    assert_eq!(serde_json::from_str::<Potential>(&json).unwrap(), q);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_is_linear_in_the_boundary_data(
        alpha in 0.5f64..=1.0,
        lambda in 1.0f64..200.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
    ) {
        let q = Potential::Polynomial(vec![0.5, -1.0]);
        let s = Solver::new(alpha).unwrap();
        let both = s.solve(lambda, &q, b(c1, c2), 65).unwrap();
        let one = s.solve(lambda, &q, b(c1, 0.0), 65).unwrap();
        let two = s.solve(lambda, &q, b(0.0, c2), 65).unwrap();
        for i in 0..65 {
            let sum = one.y[i] + two.y[i];
            prop_assert!((both.y[i] - sum).abs() <= 1e-10 * (1.0 + sum.abs()));
        }
    }

    #[test]
    fn solve_is_deterministic(alpha in 0.5f64..=1.0, lambda in 1.0f64..200.0) {
        let q = Potential::Constant(2.0);
        let a = solve(alpha, lambda, &q, b(0.0, 1.0), 33).unwrap();
        let c = solve(alpha, lambda, &q, b(0.0, 1.0), 33).unwrap();
        prop_assert_eq!(a, c);
    }
}
