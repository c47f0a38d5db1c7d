//! The assembled discretization: homogeneous part u^{q,h}(t),
//! inhomogeneous part u_i^{q,q,h}(t), and their sum.
//!
//! Everything expensive happens once in [`prepare`]: mesh, space,
//! contour, one banded factorization per contour node, the projected
//! initial datum u_{h,0}, and the homogeneous node vectors
//! v_n = R_h(z_n) (M u_{h,0}). After that,
//!
//! * u^{q,h}(t) = (k / 2 pi i) sum_n e_{gamma,1}(-t^gamma z_n^beta) z'_n v_n
//!   costs 2 n_q + 1 scalar Mittag-Leffler evaluations and axpys;
//! * u_i^{q,q,h}(t) runs the composite time rule on (0, t) with the outer
//!   loop over contour nodes, so each factorization streams its
//!   back-substitutions over all time nodes.
//!
//! Contour-node work is data-parallel (rayon under the `parallel`
//! feature); the final reductions always run in ascending node order, so
//! results are bit-identical across thread counts.

use crate::contour::{
    build_contour, default_step, validate_sector, HyperbolicContour, SectorParams,
};
use crate::hpfem::{
    assemble, load_vector, project_initial_condition, AnalyticFn, Coefficients1D, FemFunction,
    HpSpace1D, Matrices, ResolventCache,
};
use crate::mlf::{ml_kernel, MLParams};
use crate::timequad::build_hp_rule;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Right-hand side f(t, x). The separable form lets the load vector of
/// the space factor be assembled once; the general form assembles one
/// load vector per time-quadrature node.
#[derive(Clone)]
pub enum SourceTerm {
    Zero,
    Separable {
        time: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        space: AnalyticFn,
    },
    General(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl SourceTerm {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            SourceTerm::Zero => 0.0,
            SourceTerm::Separable { time, space } => time(t) * space.eval(x),
            SourceTerm::General(f) => f(t, x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SourceTerm::Zero)
    }
}

impl std::fmt::Debug for SourceTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceTerm::Zero => write!(f, "SourceTerm::Zero"),
            SourceTerm::Separable { .. } => write!(f, "SourceTerm::Separable"),
            SourceTerm::General(_) => write!(f, "SourceTerm::General"),
        }
    }
}

/// The continuous problem: Caputo order gamma, spectral power beta,
/// horizon T, elliptic coefficients, initial datum and source.
#[derive(Debug, Clone)]
pub struct FracProblem {
    pub gamma: f64,
    pub beta: f64,
    pub t_end: f64,
    pub domain: (f64, f64),
    pub coeffs: Coefficients1D,
    pub u0: AnalyticFn,
    pub source: SourceTerm,
}

impl FracProblem {
    pub fn new(
        gamma: f64,
        beta: f64,
        t_end: f64,
        domain: (f64, f64),
        coeffs: Coefficients1D,
        u0: AnalyticFn,
        source: SourceTerm,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0 && beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!(
                "orders must lie in (0,1]: gamma={gamma}, beta={beta}"
            )));
        }
        if !(t_end > 0.0) || !(domain.0 < domain.1) {
            return Err(Error::Domain(format!(
                "invalid horizon {t_end} or domain {domain:?}"
            )));
        }
        Ok(FracProblem {
            gamma,
            beta,
            t_end,
            domain,
            coeffs,
            u0,
            source,
        })
    }
}

/// All discretization knobs with the experiment couplings as defaults:
/// n_q = 6 p^2, k = sqrt(pi H/(beta n_q)) at H = pi/5, mesh layers = p,
/// time-rule layers n_hp = p, both gradings 0.125.
#[derive(Debug, Clone)]
pub struct DiscretizationConfig {
    pub p: usize,
    pub mesh_layers: usize,
    pub mesh_sigma: f64,
    pub n_q: usize,
    pub k: Option<f64>,
    pub n_hp: usize,
    pub quad_sigma: f64,
    pub b: Option<f64>,
}

impl DiscretizationConfig {
    pub fn from_degree(p: usize) -> Self {
        DiscretizationConfig {
            p,
            mesh_layers: p,
            mesh_sigma: 0.125,
            n_q: 6 * p * p,
            k: None,
            n_hp: p,
            quad_sigma: 0.125,
            b: None,
        }
    }
}

/// The prepared discrete solution; evaluation at any t is deterministic
/// given this handle.
pub struct DiscreteSolution {
    pub space: Arc<HpSpace1D>,
    pub mats: Matrices,
    pub contour: HyperbolicContour,
    pub sector: SectorParams,
    cache: ResolventCache,
    pub u_h0: FemFunction,
    node_vectors: Vec<Vec<Complex64>>,
    pub problem: FracProblem,
    pub config: DiscretizationConfig,
}

/// Build mesh, space, contour, factorization cache, the projected initial
/// datum and the homogeneous node vectors. Exactly 2 n_q + 1 systems are
/// factorized.
pub fn prepare(problem: &FracProblem, config: &DiscretizationConfig) -> Result<DiscreteSolution> {
    let (a, b) = problem.domain;
    let sector = SectorParams::for_interval(a, b, problem.coeffs.a_min)?;
    let b_contour = config.b.unwrap_or_else(|| sector.default_b());
    let k = config
        .k
        .unwrap_or_else(|| default_step(problem.beta, config.n_q, PI / 5.0));
    let contour = build_contour(b_contour, config.n_q, k)?;
    if !validate_sector(&contour, &sector) {
        return Err(Error::Domain(format!(
            "contour (b={b_contour}, n_q={}, k={k}) leaves the resolvent sector",
            config.n_q
        )));
    }
    let mesh = crate::hpfem::build_mesh(a, b, config.mesh_sigma, config.mesh_layers)?;
    let space = Arc::new(HpSpace1D::new(mesh, config.p)?);
    let mats = assemble(&space, &problem.coeffs)?;
    let u_h0 = project_initial_condition(&space, &problem.u0)?;
    let cache = ResolventCache::build(Arc::clone(&space), &mats, &contour, &sector)?;
    let rhs0 = mats.mass.matvec_complex(&u_h0.coeffs);
    let node_vectors = crate::par::map_indexed(contour.len(), |n| cache.solve(n, &rhs0));
    Ok(DiscreteSolution {
        space,
        mats,
        contour,
        sector,
        cache,
        u_h0,
        node_vectors,
        problem: problem.clone(),
        config: config.clone(),
    })
}

impl DiscreteSolution {
    pub fn factorization_count(&self) -> u64 {
        self.cache.factorization_count()
    }

    pub fn backsub_count(&self) -> u64 {
        self.cache.backsub_count()
    }

    /// Number of nodes of the composite time rule built on any (0, t].
    pub fn time_rule_nodes(&self) -> usize {
        (0..=self.config.n_hp).map(|l| l + 1).sum()
    }

    fn quadrature_weight(&self) -> Complex64 {
        // k / (2 pi i), with the sign that orients the hyperbola
        // counterclockwise around the spectrum (y ascending winds the
        // other way)
        Complex64::new(0.0, self.contour.k / (2.0 * PI))
    }

    fn assert_real(&self, coeffs: Vec<Complex64>, what: &str) -> Result<FemFunction> {
        let f = FemFunction::from_complex(Arc::clone(&self.space), coeffs);
        let rel = f.relative_imag();
        if rel > 1e-10 {
            return Err(Error::Domain(format!(
                "{what}: imaginary residual {rel:.3e} exceeds 1e-10; data not real or contour asymmetric"
            )));
        }
        Ok(f.into_real())
    }

    /// u^{q,h}(t); at t = 0 returns u_{h,0} by convention (the contour
    /// representation is a limit there).
    pub fn eval_homogeneous(&self, t: f64) -> Result<FemFunction> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(self.u_h0.clone());
        }
        let params = MLParams::new(self.problem.gamma, 1.0)?;
        let beta = self.problem.beta;
        let weights: Vec<Result<Complex64>> = crate::par::map_indexed(self.contour.len(), |n| {
            let ml = ml_kernel(params, t, self.contour.nodes[n], beta)?;
            Ok(self.quadrature_weight() * ml * self.contour.dweights[n])
        });
        let mut acc = vec![Complex64::new(0.0, 0.0); self.space.ndof];
        for (n, w) in weights.into_iter().enumerate() {
            let w = w?;
            for (a, v) in acc.iter_mut().zip(&self.node_vectors[n]) {
                *a += w * v;
            }
        }
        self.assert_real(acc, "eval_homogeneous")
    }

    /// W^{q,h}(tau) g = tau^{gamma-1} (k/2 pi i) sum_n
    /// e_{gamma,gamma}(-tau^gamma z_n^beta) z'_n R_h(z_n)(M g); cached
    /// back-substitutions only, linear in g. Complex-valued.
    pub fn apply_w(&self, tau: f64, g: &FemFunction) -> Result<FemFunction> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        let params = MLParams::new(self.problem.gamma, self.problem.gamma)?;
        let beta = self.problem.beta;
        let rhs = self.mats.mass.matvec_complex(&g.coeffs);
        let pieces: Vec<Result<Vec<Complex64>>> =
            crate::par::map_indexed(self.contour.len(), |n| {
                let ml = ml_kernel(params, tau, self.contour.nodes[n], beta)?;
                let w = self.quadrature_weight() * ml * self.contour.dweights[n];
                let mut v = self.cache.solve(n, &rhs);
                for x in &mut v {
                    *x *= w;
                }
                Ok(v)
            });
        let mut acc = vec![Complex64::new(0.0, 0.0); self.space.ndof];
        for piece in pieces {
            let piece = piece?;
            for (a, v) in acc.iter_mut().zip(&piece) {
                *a += v;
            }
        }
        let scale = tau.powf(self.problem.gamma - 1.0);
        for x in &mut acc {
            *x *= scale;
        }
        Ok(FemFunction::from_complex(Arc::clone(&self.space), acc))
    }

    /// u_i^{q,q,h}(t) = Q^{hp}_{(0,t)}[ W^{q,h}(.) f_h(t - .) ] with the
    /// composite rule built on (0, t) with n_hp layers and degree n_hp.
    /// The outer loop runs over contour nodes so each factorization
    /// streams its back-substitutions over all time nodes.
    pub fn eval_inhomogeneous(&self, t: f64) -> Result<FemFunction> {
        if !(t >= 0.0 && t <= self.problem.t_end * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "time {t} outside (0, T = {}]",
                self.problem.t_end
            )));
        }
        if t == 0.0 || self.problem.source.is_zero() {
            return Ok(FemFunction::zero(Arc::clone(&self.space)));
        }
        let rule = build_hp_rule(t, self.config.quad_sigma, self.config.n_hp, self.config.n_hp)?;
        let mut taus: Vec<(f64, f64)> = Vec::with_capacity(rule.node_count());
        for el in &rule.elements {
            for (&x, &w) in el.nodes.iter().zip(&el.weights) {
                taus.push((x, w));
            }
        }
        let gamma = self.problem.gamma;
        let beta = self.problem.beta;
        let params = MLParams::new(gamma, gamma)?;
        // load vectors of f(t - tau_j, .), one per time node
        let loads: Vec<Vec<Complex64>> = match &self.problem.source {
            SourceTerm::Zero => unreachable!(),
            SourceTerm::Separable { time, space } => {
                let base = load_vector(&self.space, |x| space.eval(x));
                taus.iter()
                    .map(|&(tau, _)| {
                        let s = time(t - tau);
                        base.iter().map(|&v| Complex64::new(s * v, 0.0)).collect()
                    })
                    .collect()
            }
            SourceTerm::General(f) => taus
                .iter()
                .map(|&(tau, _)| {
                    load_vector(&self.space, |x| f(t - tau, x))
                        .into_iter()
                        .map(|v| Complex64::new(v, 0.0))
                        .collect()
                })
                .collect(),
        };
        let pieces: Vec<Result<Vec<Complex64>>> =
            crate::par::map_indexed(self.contour.len(), |n| {
                let z = self.contour.nodes[n];
                let mut acc = vec![Complex64::new(0.0, 0.0); self.space.ndof];
                for (j, &(tau, w)) in taus.iter().enumerate() {
                    let ml = ml_kernel(params, tau, z, beta)?;
                    let factor = w * tau.powf(gamma - 1.0) * ml;
                    let u = self.cache.solve(n, &loads[j]);
                    for (a, v) in acc.iter_mut().zip(&u) {
                        *a += factor * v;
                    }
                }
                let w_node = self.quadrature_weight() * self.contour.dweights[n];
                for a in &mut acc {
                    *a *= w_node;
                }
                Ok(acc)
            });
        let mut acc = vec![Complex64::new(0.0, 0.0); self.space.ndof];
        for piece in pieces {
            let piece = piece?;
            for (a, v) in acc.iter_mut().zip(&piece) {
                *a += v;
            }
        }
        self.assert_real(acc, "eval_inhomogeneous")
    }

    /// u^fd(t) = u^{q,h}(t) + u_i^{q,q,h}(t).
    pub fn eval(&self, t: f64) -> Result<FemFunction> {
        let hom = self.eval_homogeneous(t)?;
        if self.problem.source.is_zero() {
            return Ok(hom);
        }
        let inhom = self.eval_inhomogeneous(t)?;
        let coeffs = hom
            .coeffs
            .iter()
            .zip(&inhom.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FemFunction::from_complex(Arc::clone(&self.space), coeffs))
    }
}

#[cfg(test)]
mod tests;
