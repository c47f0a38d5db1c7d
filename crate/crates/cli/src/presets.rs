//! Named problem presets for the experiment harness.
//!
//! The two benchmark families from the experiments, transposed to the
//! interval (0,1):
//!
//! * `example71-1d` — compatible data with a known closed-form solution
//!   u(t,x) = e_{gamma,1}(-t^gamma (4 pi^2)^beta) sin(2 pi x) + t^3 sin(pi x),
//!   defaults gamma = 0.6, beta = 0.75 (also available as the pure
//!   `-hom` / `-inhom` splits);
//! * `example72-1d` — incompatible data u0 = 1, f = sin(t), defaults
//!   gamma = sqrt(2)/2, beta = sqrt(3)/3; no closed form, so convergence
//!   studies run against the finest sweep member.

use fracsinc::gamma::gamma;
use fracsinc::hpfem::AnalyticFn;
use fracsinc::mlf::{MLParams, MlOracle};
use fracsinc::solver::SourceTerm;
use fracsinc::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

pub struct Preset {
    pub name: &'static str,
    pub default_gamma: f64,
    pub default_beta: f64,
    pub u0: AnalyticFn,
    pub source_for: fn(gamma: f64, beta: f64) -> SourceTerm,
    /// closed-form solution when the data are compatible
    pub exact_for: Option<fn(gamma: f64, beta: f64) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>>,
}

fn source_zero(_gamma: f64, _beta: f64) -> SourceTerm {
    SourceTerm::Zero
}

fn source_manufactured(g: f64, beta: f64) -> SourceTerm {
    // makes u = t^3 sin(pi x) exact: Caputo of t^3 plus lambda^beta t^3
    let c0 = gamma(4.0) / gamma(4.0 - g);
    let lam_b = (PI * PI).powf(beta);
    SourceTerm::Separable {
        time: Arc::new(move |t: f64| c0 * t.powf(3.0 - g) + t.powi(3) * lam_b),
        space: AnalyticFn::with_derivative(|x| (PI * x).sin(), |x| PI * (PI * x).cos()),
    }
}

fn source_sin_t(_gamma: f64, _beta: f64) -> SourceTerm {
    SourceTerm::Separable {
        time: Arc::new(|t: f64| t.sin()),
        space: AnalyticFn::with_derivative(|_| 1.0, |_| 0.0),
    }
}

fn exact_hom(g: f64, beta: f64) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
    let oracle = MlOracle::new(MLParams::new(g, 1.0).expect("valid order"));
    let lam_b = (4.0 * PI * PI).powf(beta);
    Arc::new(move |t: f64, x: f64| {
        let ml = if t == 0.0 {
            1.0
        } else {
            oracle
                .eval(Complex64::new(-t.powf(g) * lam_b, 0.0))
                .expect("oracle range")
                .re
        };
        ml * (2.0 * PI * x).sin()
    })
}

fn exact_inhom(_g: f64, _beta: f64) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
    Arc::new(|t: f64, x: f64| t.powi(3) * (PI * x).sin())
}

fn exact_combined(g: f64, beta: f64) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
    let hom = exact_hom(g, beta);
    let inhom = exact_inhom(g, beta);
    Arc::new(move |t, x| hom(t, x) + inhom(t, x))
}

fn u0_sin2pi() -> AnalyticFn {
    AnalyticFn::with_derivative(
        |x| (2.0 * PI * x).sin(),
        |x| 2.0 * PI * (2.0 * PI * x).cos(),
    )
}

fn u0_zero() -> AnalyticFn {
    AnalyticFn::with_derivative(|_| 0.0, |_| 0.0)
}

fn u0_one() -> AnalyticFn {
    AnalyticFn::with_derivative(|_| 1.0, |_| 0.0)
}

pub fn lookup(name: &str) -> Option<Preset> {
    match name {
        "example71-1d" => Some(Preset {
            name: "example71-1d",
            default_gamma: 0.6,
            default_beta: 0.75,
            u0: u0_sin2pi(),
            source_for: source_manufactured,
            exact_for: Some(exact_combined),
        }),
        "example71-1d-hom" => Some(Preset {
            name: "example71-1d-hom",
            default_gamma: 0.6,
            default_beta: 0.75,
            u0: u0_sin2pi(),
            source_for: source_zero,
            exact_for: Some(exact_hom),
        }),
        "example71-1d-inhom" => Some(Preset {
            name: "example71-1d-inhom",
            default_gamma: 0.6,
            default_beta: 0.75,
            u0: u0_zero(),
            source_for: source_manufactured,
            exact_for: Some(exact_inhom),
        }),
        "example72-1d" => Some(Preset {
            name: "example72-1d",
            default_gamma: std::f64::consts::FRAC_1_SQRT_2,
            default_beta: 3f64.sqrt() / 3.0,
            u0: u0_one(),
            source_for: source_sin_t,
            exact_for: None,
        }),
        "zero" => Some(Preset {
            name: "zero",
            default_gamma: 0.6,
            default_beta: 0.75,
            u0: u0_zero(),
            source_for: source_zero,
            exact_for: None,
        }),
        _ => None,
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "example71-1d",
    "example71-1d-hom",
    "example71-1d-inhom",
    "example72-1d",
    "zero",
];
