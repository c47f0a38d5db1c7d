//! Reference solutions and spectrally weighted norms.
//!
//! Two eigenbases back everything: closed-form Dirichlet sine modes for
//! constant coefficients, and the discrete generalized eigenproblem
//! (K + M_c) phi = lambda M phi otherwise (or when a norm on V_h itself
//! is wanted). The exact solution of the model problem expands as
//!
//!   u(t) = sum_j [ e_{gamma,1}(-t^gamma lambda_j^beta) u_{0,j}
//!        + int_0^t tau^{gamma-1} e_{gamma,gamma}(-tau^gamma lambda_j^beta)
//!          f_j(t-tau) dtau ] phi_j,
//!
//! with the convolution integrated by a deep composite geometric rule
//! (layers = degree = 30, doubled-resolution self-check), so the
//! reference dominates every discretization the tests compare against.
//! The H~^theta norm is the spectral sum (sum lambda_j^theta |v_j|^2)^1/2.

use crate::hpfem::{FemFunction, HpSpace1D, Matrices, RealBanded};
use crate::mlf::{ml_eval, MLParams, DEFAULT_TOL};
use crate::solver::{FracProblem, SourceTerm};
use crate::timequad::{build_hp_rule, gauss_rule, hp_integrate};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

pub enum SpectralBasis {
    /// lambda_j = A0 ((j+1) pi / (b-a))^2 + c0, phi_j = sqrt(2/(b-a)) sin((j+1) pi (x-a)/(b-a))
    Exact {
        a: f64,
        b: f64,
        a0: f64,
        c0: f64,
        lambdas: Vec<f64>,
    },
    /// mass-orthonormal eigenvectors of (K + M_c) phi = lambda M phi
    Discrete {
        space: Arc<HpSpace1D>,
        mass: RealBanded,
        lambdas: Vec<f64>,
        /// rows are coefficient vectors of the modes
        vectors: Vec<Vec<f64>>,
    },
}

impl SpectralBasis {
    pub fn count(&self) -> usize {
        match self {
            SpectralBasis::Exact { lambdas, .. } => lambdas.len(),
            SpectralBasis::Discrete { lambdas, .. } => lambdas.len(),
        }
    }

    pub fn lambda(&self, j: usize) -> f64 {
        match self {
            SpectralBasis::Exact { lambdas, .. } => lambdas[j],
            SpectralBasis::Discrete { lambdas, .. } => lambdas[j],
        }
    }

    pub fn mode_eval(&self, j: usize, x: f64) -> f64 {
        match self {
            SpectralBasis::Exact { a, b, .. } => {
                let l = b - a;
                (2.0 / l).sqrt() * ((j + 1) as f64 * PI * (x - a) / l).sin()
            }
            SpectralBasis::Discrete { space, vectors, .. } => {
                let f = FemFunction::from_real(Arc::clone(space), &vectors[j]);
                f.eval_real(x)
            }
        }
    }

    /// (f, phi_j) for a callable; exact modes integrate with panels scaled
    /// to the mode's oscillation.
    pub fn mode_coefficient<F: Fn(f64) -> f64>(&self, f: F, j: usize) -> f64 {
        match self {
            SpectralBasis::Exact { a, b, .. } => {
                let l = b - a;
                let panels = 2 * (j + 2);
                let rule = gauss_rule(7);
                let mut acc = 0.0;
                for p in 0..panels {
                    let xl = a + l * p as f64 / panels as f64;
                    let xr = a + l * (p + 1) as f64 / panels as f64;
                    let jac = 0.5 * (xr - xl);
                    for (q, &xi) in rule.nodes.iter().enumerate() {
                        let x = 0.5 * (xl + xr) + jac * xi;
                        acc += rule.weights[q] * jac * f(x) * self.mode_eval(j, x);
                    }
                }
                acc
            }
            SpectralBasis::Discrete { space, vectors, .. } => {
                let load = crate::hpfem::load_vector(space, f);
                load.iter().zip(&vectors[j]).map(|(a, b)| a * b).sum()
            }
        }
    }

    /// Coefficients (v, phi_j) of a finite element function on the same
    /// space (Discrete variant only uses the stored mass matrix).
    pub fn fem_coefficients(&self, v: &FemFunction) -> Vec<f64> {
        match self {
            SpectralBasis::Exact { .. } => (0..self.count())
                .map(|j| self.mode_coefficient(|x| v.eval_real(x), j))
                .collect(),
            SpectralBasis::Discrete { mass, vectors, .. } => {
                let mv = mass.matvec_complex(&v.coeffs);
                vectors
                    .iter()
                    .map(|phi| phi.iter().zip(&mv).map(|(p, m)| p * m.re).sum())
                    .collect()
            }
        }
    }
}

/// Closed-form eigenpairs for constant coefficients A0, c0.
pub fn exact_eigenpairs(a: f64, b: f64, a0: f64, c0: f64, count: usize) -> SpectralBasis {
    let l = b - a;
    let lambdas = (0..count)
        .map(|j| a0 * ((j + 1) as f64 * PI / l).powi(2) + c0)
        .collect();
    SpectralBasis::Exact {
        a,
        b,
        a0,
        c0,
        lambdas,
    }
}

/// First `count` pairs of the discrete generalized eigenproblem, with a
/// residual check ||(K' - lambda M) phi|| <= 1e-8 ||K' phi||.
pub fn discrete_eigenpairs(
    space: &Arc<HpSpace1D>,
    mats: &Matrices,
    count: usize,
) -> Result<SpectralBasis> {
    let n = space.ndof;
    if count > n {
        return Err(Error::Domain(format!(
            "requested {count} modes from a space of dimension {n}"
        )));
    }
    // dense copies
    let mut m = vec![vec![0.0; n]; n];
    let mut kp = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = mats.mass.get(i, j);
            kp[i][j] = mats.stiff.get(i, j) + mats.massc.get(i, j);
        }
    }
    // M = L L^T; C = L^-1 K' L^-T
    let mut l = m.clone();
    crate::dense::cholesky(&mut l)?;
    let fwd = |l: &Vec<Vec<f64>>, b: &mut Vec<f64>| {
        for i in 0..b.len() {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i][k] * b[k];
            }
            b[i] = s / l[i][i];
        }
    };
    // W = L^-1 K'
    let mut w = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut c: Vec<f64> = (0..n).map(|r| kp[r][col]).collect();
        fwd(&l, &mut c);
        for r in 0..n {
            w[r][col] = c[r];
        }
    }
    // C = W L^-T = (L^-1 W^T)^T
    let mut cmat = vec![vec![0.0; n]; n];
    for row in 0..n {
        let mut c: Vec<f64> = w[row].clone();
        fwd(&l, &mut c);
        cmat[row] = c;
    }
    // symmetrize roundoff
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (cmat[i][j] + cmat[j][i]);
            cmat[i][j] = avg;
            cmat[j][i] = avg;
        }
    }
    let (lambdas_all, y_all) = crate::dense::jacobi_eigen(cmat)?;
    let back = |l: &Vec<Vec<f64>>, b: &mut Vec<f64>| {
        for i in (0..b.len()).rev() {
            let mut s = b[i];
            for k in i + 1..b.len() {
                s -= l[k][i] * b[k];
            }
            b[i] = s / l[i][i];
        }
    };
    let mut lambdas = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for j in 0..count {
        let mut phi = y_all[j].clone();
        back(&l, &mut phi);
        // residual check against the banded originals
        let phic: Vec<crate::Complex64> = phi
            .iter()
            .map(|&x| crate::Complex64::new(x, 0.0))
            .collect();
        let kphi: Vec<f64> = {
            let s = mats.stiff.matvec_complex(&phic);
            let c = mats.massc.matvec_complex(&phic);
            s.iter().zip(&c).map(|(a, b)| a.re + b.re).collect()
        };
        let mphi: Vec<f64> = mats
            .mass
            .matvec_complex(&phic)
            .iter()
            .map(|v| v.re)
            .collect();
        let res: f64 = kphi
            .iter()
            .zip(&mphi)
            .map(|(k, m)| (k - lambdas_all[j] * m).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = kphi.iter().map(|k| k * k).sum::<f64>().sqrt();
        if res > 1e-8 * scale.max(1e-300) {
            return Err(Error::EigenConvergence(format!(
                "mode {j}: residual {res:.3e} vs scale {scale:.3e}"
            )));
        }
        lambdas.push(lambdas_all[j]);
        vectors.push(phi);
    }
    Ok(SpectralBasis::Discrete {
        space: Arc::clone(space),
        mass: mats.mass.clone(),
        lambdas,
        vectors,
    })
}

/// Sum of all eigenvalues equals trace(M^-1 K'); used as a completeness
/// cross-check when count = ndof.
pub fn eigenvalue_trace_identity(space: &HpSpace1D, mats: &Matrices) -> f64 {
    let n = space.ndof;
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = mats.mass.get(i, j);
        }
    }
    let mut l = m;
    crate::dense::cholesky(&mut l).expect("mass is SPD");
    let mut trace = 0.0;
    for col in 0..n {
        let mut c: Vec<f64> = (0..n)
            .map(|r| mats.stiff.get(r, col) + mats.massc.get(r, col))
            .collect();
        crate::dense::cholesky_solve(&l, &mut c);
        trace += c[col];
    }
    trace
}

// ---------------------------------------------------------------------------
// reference solution
// ---------------------------------------------------------------------------

/// Depth of the reference convolution rule; dominates every tested
/// discretization by several digits.
const REFERENCE_LAYERS: usize = 30;
const REFERENCE_DEGREE: usize = 30;

pub struct ReferenceSolution {
    pub basis: Arc<SpectralBasis>,
    pub gamma: f64,
    pub beta: f64,
    u0_coefs: Vec<f64>,
    source: SourceTerm,
    /// (X, phi_j) for separable sources
    source_space_coefs: Option<Vec<f64>>,
    pub time_tol: f64,
}

impl ReferenceSolution {
    /// Expand the data in the basis; fails with a truncation report when
    /// the u0 tail estimate exceeds time_tol.
    pub fn new(basis: Arc<SpectralBasis>, problem: &FracProblem, time_tol: f64) -> Result<Self> {
        let count = basis.count();
        let u0_coefs: Vec<f64> = (0..count)
            .map(|j| basis.mode_coefficient(|x| problem.u0.eval(x), j))
            .collect();
        // tail estimate: energy of the last decade of computed modes
        let tail_start = count - (count / 10).max(1);
        let tail: f64 = u0_coefs[tail_start..]
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt();
        let total: f64 = u0_coefs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if tail > time_tol * total.max(1.0) && total > 0.0 {
            return Err(Error::Truncation {
                tail,
                tol: time_tol * total.max(1.0),
                modes: count,
            });
        }
        let source_space_coefs = match &problem.source {
            SourceTerm::Separable { space, .. } => Some(
                (0..count)
                    .map(|j| basis.mode_coefficient(|x| space.eval(x), j))
                    .collect(),
            ),
            _ => None,
        };
        Ok(ReferenceSolution {
            basis,
            gamma: problem.gamma,
            beta: problem.beta,
            u0_coefs,
            source: problem.source.clone(),
            source_space_coefs,
            time_tol,
        })
    }

    fn convolution_mode(&self, t: f64, j: usize, layers: usize, degree: usize) -> Result<f64> {
        let lambda_beta = self.basis.lambda(j).powf(self.beta);
        let params = MLParams::new(self.gamma, self.gamma)?;
        let g = self.gamma;
        let rule = build_hp_rule(t, 0.125, layers, degree)?;
        let f_j = |s: f64| -> f64 {
            match &self.source {
                SourceTerm::Zero => 0.0,
                SourceTerm::Separable { time, .. } => {
                    time(s) * self.source_space_coefs.as_ref().unwrap()[j]
                }
                SourceTerm::General(f) => self.basis.mode_coefficient(|x| f(s, x), j),
            }
        };
        hp_integrate(&rule, |tau| {
            let ml = ml_eval(
                params,
                crate::Complex64::new(-tau.powf(g) * lambda_beta, 0.0),
                DEFAULT_TOL,
            )
            .map(|v| v.re)
            .unwrap_or(f64::NAN);
            tau.powf(g - 1.0) * ml * f_j(t - tau)
        })
    }

    /// Mode coefficients of u(t), with the doubled-resolution
    /// self-consistency check on the convolution when a source is present.
    pub fn mode_values(&self, t: f64) -> Result<Vec<f64>> {
        let params = MLParams::new(self.gamma, 1.0)?;
        let g = self.gamma;
        let beta = self.beta;
        let count = self.basis.count();
        let values: Vec<Result<f64>> = crate::par::map_indexed(count, |j| {
            let lambda_beta = self.basis.lambda(j).powf(beta);
            let hom = if t == 0.0 {
                self.u0_coefs[j]
            } else {
                self.u0_coefs[j]
                    * ml_eval(
                        params,
                        crate::Complex64::new(-t.powf(g) * lambda_beta, 0.0),
                        DEFAULT_TOL,
                    )?
                    .re
            };
            if self.source.is_zero() || t == 0.0 {
                return Ok(hom);
            }
            let conv = self.convolution_mode(t, j, REFERENCE_LAYERS, REFERENCE_DEGREE)?;
            if j == 0 {
                // self-check the quadrature depth once per call
                let finer =
                    self.convolution_mode(t, j, REFERENCE_LAYERS + 4, REFERENCE_DEGREE + 8)?;
                if (conv - finer).abs() > self.time_tol * (1.0 + conv.abs()) {
                    return Err(Error::Truncation {
                        tail: (conv - finer).abs(),
                        tol: self.time_tol,
                        modes: REFERENCE_LAYERS,
                    });
                }
            }
            Ok(hom + conv)
        });
        values.into_iter().collect()
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        let modes = self.mode_values(t)?;
        Ok(modes
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.basis.mode_eval(j, x))
            .sum())
    }
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

/// (sum_j lambda_j^theta v_j^2)^(1/2) from precomputed coefficients;
/// returns (value, tail_fraction) where the tail is the contribution of
/// the last decade of modes — above 1e-3 the truncation is suspect.
pub fn htilde_norm_from_coefs(basis: &SpectralBasis, coefs: &[f64], theta: f64) -> (f64, f64) {
    let n = coefs.len();
    let tail_start = n - (n / 10).max(1);
    let mut total = 0.0;
    let mut tail = 0.0;
    for (j, c) in coefs.iter().enumerate() {
        let term = basis.lambda(j).powf(theta) * c * c;
        total += term;
        if j >= tail_start {
            tail += term;
        }
    }
    let value = total.max(0.0).sqrt();
    let frac = if total > 0.0 { (tail / total).sqrt() } else { 0.0 };
    (value, frac)
}

/// H~^theta norm of a callable.
pub fn htilde_norm<F: Fn(f64) -> f64>(basis: &SpectralBasis, v: F, theta: f64) -> (f64, f64) {
    let coefs: Vec<f64> = (0..basis.count())
        .map(|j| basis.mode_coefficient(&v, j))
        .collect();
    htilde_norm_from_coefs(basis, &coefs, theta)
}

/// H~^theta norm of a finite element function.
pub fn htilde_norm_fem(basis: &SpectralBasis, v: &FemFunction, theta: f64) -> (f64, f64) {
    let coefs = basis.fem_coefficients(v);
    htilde_norm_from_coefs(basis, &coefs, theta)
}

/// Space-time energy functional int_0^T t^{gamma-1} E2(t) dt by the
/// composite geometric rule with layers = degree = n_samples, where E2
/// supplies the squared H~^beta error at time t.
pub fn spacetime_error<F>(gamma: f64, t_end: f64, n_samples: usize, err_norm2: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let rule = build_hp_rule(t_end, 0.125, n_samples, n_samples)?;
    let mut acc = 0.0;
    for el in &rule.elements {
        for (&tau, &w) in el.nodes.iter().zip(&el.weights) {
            let e2 = err_norm2(tau)?;
            if !e2.is_finite() {
                return Err(Error::NonFinite { node: tau });
            }
            acc += w * tau.powf(gamma - 1.0) * e2;
        }
    }
    Ok(acc)
}
