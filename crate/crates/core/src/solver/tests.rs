use super::*;
use crate::gamma::gamma;

fn heat_problem(u0_mode: f64) -> FracProblem {
    // gamma = beta = 1, A = 1, c = 0 on (0,1): the classical heat equation
    FracProblem::new(
        1.0,
        1.0,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(
            move |x| (u0_mode * PI * x).sin(),
            move |x| u0_mode * PI * (u0_mode * PI * x).cos(),
        ),
        SourceTerm::Zero,
    )
    .unwrap()
}

fn l2_error_against<F: Fn(f64) -> f64>(u: &FemFunction, exact: F) -> f64 {
    let rule = crate::timequad::gauss_rule(20);
    let mut err2 = 0.0;
    for e in 0..u.space.mesh.element_count() {
        let (xl, xr) = u.space.mesh.element(e);
        let jac = 0.5 * (xr - xl);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let x = 0.5 * (xl + xr) + jac * xi;
            let d = u.eval_real(x) - exact(x);
            err2 += rule.weights[q] * jac * d * d;
        }
    }
    err2.sqrt()
}

#[test]
fn zero_data_gives_zero_node_vectors() {
    let problem = FracProblem::new(
        0.6,
        0.75,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(|_| 0.0, |_| 0.0),
        SourceTerm::Zero,
    )
    .unwrap();
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(3)).unwrap();
    for v in &sol.node_vectors {
        for x in v {
            assert!(x.norm() < 1e-13);
        }
    }
    let u = sol.eval(0.5).unwrap();
    assert!(u.coeffs.iter().all(|c| c.norm() < 1e-13));
}

#[test]
fn factorization_count_is_contour_size() {
    let problem = heat_problem(2.0);
    let config = DiscretizationConfig::from_degree(4);
    let sol = prepare(&problem, &config).unwrap();
    assert_eq!(sol.factorization_count(), 2 * config.n_q as u64 + 1);
    // prepare also performed one back-substitution per node
    assert_eq!(sol.backsub_count(), 2 * config.n_q as u64 + 1);
}

#[test]
fn node_vectors_conjugate_pairs_for_real_data() {
    let problem = heat_problem(1.0);
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(4)).unwrap();
    let m = sol.contour.len();
    for n in 0..m {
        let opp = m - 1 - n;
        for i in 0..sol.space.ndof {
            let a = sol.node_vectors[n][i];
            let b = sol.node_vectors[opp][i].conj();
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}

#[test]
fn heat_mode_matches_closed_form() {
    // u(t, x) = exp(-4 pi^2 t) sin(2 pi x)
    let problem = heat_problem(2.0);
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(8)).unwrap();
    for t in [0.05, 0.2] {
        let u = sol.eval_homogeneous(t).unwrap();
        let scale = (-4.0 * PI * PI * t).exp();
        let err = l2_error_against(&u, |x| scale * (2.0 * PI * x).sin());
        // the floor is the projected initial datum: at p=8 the single
        // polynomial carries sin(2 pi x) to ~1e-4, damped by the decay
        assert!(
            err <= 2e-4 * scale.max(1e-3),
            "t={t}: L2 error {err:.3e} vs amplitude {scale:.3e}"
        );
    }
    // t = 0 returns the projected initial datum itself
    let u0 = sol.eval_homogeneous(0.0).unwrap();
    for i in 0..u0.coeffs.len() {
        assert_eq!(u0.coeffs[i], sol.u_h0.coeffs[i]);
    }
}

#[test]
fn fractional_mode_matches_series_oracle() {
    // gamma=0.6, beta=0.75, u0 = sin(2 pi x): exact scalar factor
    // e_{0.6,1}(-t^0.6 (4 pi^2)^0.75) from the series oracle
    let problem = FracProblem::new(
        0.6,
        0.75,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(
            |x| (2.0 * PI * x).sin(),
            |x| 2.0 * PI * (2.0 * PI * x).cos(),
        ),
        SourceTerm::Zero,
    )
    .unwrap();
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(8)).unwrap();
    let oracle = crate::mlf::MlOracle::new(MLParams::new(0.6, 1.0).unwrap());
    let lambda_beta = (4.0 * PI * PI).powf(0.75);
    let t = 1.0f64;
    let factor = oracle
        .eval(Complex64::new(-t.powf(0.6) * lambda_beta, 0.0))
        .unwrap()
        .re;
    let u = sol.eval_homogeneous(t).unwrap();
    let err = l2_error_against(&u, |x| factor * (2.0 * PI * x).sin());
    assert!(err < 1e-5, "L2 error {err:.3e}, factor {factor:.6e}");
}

#[test]
fn manufactured_inhomogeneous_solution() {
    // u(t,x) = t^3 sin(pi x) solves the problem with u0 = 0 and
    // f = Gamma(4)/Gamma(4-gamma) t^(3-gamma) sin(pi x) + t^3 pi^(2 beta) sin(pi x)
    let g = 0.6;
    let beta = 0.75;
    let lam_b = (PI * PI).powf(beta);
    let c0 = gamma(4.0) / gamma(4.0 - g);
    let problem = FracProblem::new(
        g,
        beta,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(|_| 0.0, |_| 0.0),
        SourceTerm::Separable {
            time: Arc::new(move |t: f64| c0 * t.powf(3.0 - g) + t.powi(3) * lam_b),
            space: AnalyticFn::with_derivative(|x| (PI * x).sin(), |x| PI * (PI * x).cos()),
        },
    )
    .unwrap();
    let mut errs = Vec::new();
    for p in [3usize, 6] {
        let sol = prepare(&problem, &DiscretizationConfig::from_degree(p)).unwrap();
        let u = sol.eval(1.0).unwrap();
        errs.push(l2_error_against(&u, |x| (PI * x).sin()));
    }
    assert!(
        errs[1] < errs[0] * 0.05,
        "no decay in p: {errs:?}"
    );
    assert!(errs[1] < 2e-3, "error too large: {errs:?}");
}

#[test]
fn linearity_of_eval() {
    let g = 0.7;
    let beta = 0.8;
    let u0 = AnalyticFn::with_derivative(|x| (PI * x).sin(), |x| PI * (PI * x).cos());
    let src = SourceTerm::Separable {
        time: Arc::new(|t: f64| t.sin()),
        space: AnalyticFn::with_derivative(|x| x * (1.0 - x), |x| 1.0 - 2.0 * x),
    };
    let full = FracProblem::new(
        g,
        beta,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        u0.clone(),
        src.clone(),
    )
    .unwrap();
    let hom_only = FracProblem::new(
        g,
        beta,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        u0,
        SourceTerm::Zero,
    )
    .unwrap();
    let inhom_only = FracProblem::new(
        g,
        beta,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(|_| 0.0, |_| 0.0),
        src,
    )
    .unwrap();
    let config = DiscretizationConfig::from_degree(4);
    let s_full = prepare(&full, &config).unwrap();
    let s_hom = prepare(&hom_only, &config).unwrap();
    let s_inhom = prepare(&inhom_only, &config).unwrap();
    let t = 0.8;
    let a = s_full.eval(t).unwrap();
    let b = s_hom.eval(t).unwrap();
    let c = s_inhom.eval(t).unwrap();
    for i in 0..a.coeffs.len() {
        let sum = b.coeffs[i] + c.coeffs[i];
        assert!((a.coeffs[i] - sum).norm() <= 1e-12 * (1.0 + sum.norm()));
    }
}

#[test]
fn apply_w_zero_and_heat_semigroup() {
    let problem = heat_problem(1.0);
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(6)).unwrap();
    let zero = FemFunction::zero(Arc::clone(&sol.space));
    let wz = sol.apply_w(0.5, &zero).unwrap();
    assert!(wz.coeffs.iter().all(|c| c.norm() == 0.0));
    // gamma = beta = 1: W(tau) g = heat semigroup e^{-pi^2 tau} on mode 1
    let g_load = load_vector(&sol.space, |x| (PI * x).sin());
    let g_coeffs = {
        // L2 projection of sin(pi x): solve M c = load
        let m = crate::hpfem::resolvent_matrix(
            &sol.space,
            &Matrices {
                stiff: crate::hpfem::RealBanded::zeros(sol.space.ndof, sol.space.half_bandwidth()),
                massc: crate::hpfem::RealBanded::zeros(sol.space.ndof, sol.space.half_bandwidth()),
                mass: sol.mats.mass.clone(),
                unit_stiff: crate::hpfem::RealBanded::zeros(
                    sol.space.ndof,
                    sol.space.half_bandwidth(),
                ),
            },
            Complex64::new(1.0, 0.0),
        );
        let lu = m.factor().unwrap();
        lu.solve(&g_load.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
    };
    let g = FemFunction::from_complex(Arc::clone(&sol.space), g_coeffs);
    let tau = 0.3;
    let w = sol.apply_w(tau, &g).unwrap();
    let expect = (-PI * PI * tau).exp();
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let x = i as f64 / 40.0;
        worst = worst.max((w.eval(x).re - expect * (PI * x).sin()).abs());
    }
    assert!(worst < 1e-5 * expect, "semigroup error {worst:.3e}");
    assert!(w.relative_imag() < 1e-10);
}

#[test]
fn eval_inhomogeneous_counts_backsubs() {
    let problem = FracProblem::new(
        0.6,
        0.75,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(|_| 0.0, |_| 0.0),
        SourceTerm::Separable {
            time: Arc::new(|t: f64| t.sin()),
            space: AnalyticFn::with_derivative(|x| (PI * x).sin(), |x| PI * (PI * x).cos()),
        },
    )
    .unwrap();
    let config = DiscretizationConfig::from_degree(3);
    let sol = prepare(&problem, &config).unwrap();
    let nodes = 2 * config.n_q as u64 + 1;
    assert_eq!(sol.backsub_count(), nodes);
    sol.eval_inhomogeneous(1.0).unwrap();
    let tq = sol.time_rule_nodes() as u64;
    assert_eq!(sol.backsub_count(), nodes * (1 + tq));
}

#[test]
fn homogeneous_stability_sweep() {
    // ||u^{q,h}(t)||_L2 <= C min(sqrt(n_q), t^-(eps gamma)) t^(-gamma/2) ||u_h0||
    let problem = FracProblem::new(
        std::f64::consts::FRAC_1_SQRT_2,
        3f64.sqrt() / 3.0,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(|_| 1.0, |_| 0.0),
        SourceTerm::Zero,
    )
    .unwrap();
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(6)).unwrap();
    let g = problem.gamma;
    let u0_l2 = crate::hpfem::l2_norm(&sol.mats, &sol.u_h0.coeffs);
    let eps = 0.25;
    let mut c_max: f64 = 0.0;
    for i in 0..=8 {
        let t = 10f64.powf(-4.0 + 4.0 * i as f64 / 8.0);
        let u = sol.eval_homogeneous(t).unwrap();
        let n = crate::hpfem::l2_norm(&sol.mats, &u.coeffs);
        let bound =
            (sol.config.n_q as f64).sqrt().min(t.powf(-eps * g)) * t.powf(-g / 2.0) * u0_l2;
        c_max = c_max.max(n / bound);
    }
    println!("homogeneous stability constant = {c_max:.3}");
    assert!(c_max < 10.0);
}

#[test]
fn rejects_out_of_range_time() {
    let problem = heat_problem(1.0);
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(3)).unwrap();
    assert!(sol.eval_homogeneous(-0.1).is_err());
    assert!(sol.eval_inhomogeneous(2.0).is_err());
}
