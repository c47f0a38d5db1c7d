//! 1D hp finite elements on geometrically graded meshes.
//!
//! The space is S^{p,1}_0: continuous piecewise polynomials of uniform
//! degree p vanishing at both endpoints, built from integrated-Legendre
//! shape functions (two vertex hats plus p-1 internal bubbles per
//! element). With dofs ordered element by element the matrices are banded
//! with half-bandwidth p, so the shifted resolvent systems
//! (z M - M_c - K) u = f factor by complex banded LU; one factorization
//! per contour node is cached and every later application is a pair of
//! triangular sweeps.
//!
//! The initial-condition projection follows the two-step construction:
//! H^1-best approximation by a single degree-p polynomial on the
//! unrefined interval (no boundary conditions), then the boundary cutoff
//! on the outermost geometric layer, which in this basis is exactly
//! dropping the two boundary-vertex coefficients.
//!
//! The discrete interpolation-scale norm on V_h has no computable closed
//! form; tests cover its L2 approximation half and the sigma^{-L/2}
//! H^1-growth proxy of the cutoff only.

pub mod banded;
pub mod mesh;

pub use banded::{BandedLu, BandedMatrix};
pub use mesh::{build_mesh, GeometricMesh1D};

use crate::timequad::gauss_rule;
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

// ---------------------------------------------------------------------------
// shape functions
// ---------------------------------------------------------------------------

/// Legendre values P_0..P_n at xi.
fn legendre_upto(n: usize, xi: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n == 0 {
        return p;
    }
    p.push(xi);
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * xi * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
        p.push(next);
    }
    p
}

/// Values and xi-derivatives of the p+1 local shapes at xi, ordered
/// [left vertex, right vertex, bubbles 2..=p]. Bubble j is
/// (P_j - P_{j-2}) / sqrt(2(2j-1)), whose derivative is
/// sqrt((2j-1)/2) P_{j-1}; the gradients are orthonormal on (-1,1).
pub fn shape_values(p: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let leg = legendre_upto(p, xi);
    let mut vals = Vec::with_capacity(p + 1);
    let mut ders = Vec::with_capacity(p + 1);
    vals.push(0.5 * (1.0 - xi));
    ders.push(-0.5);
    vals.push(0.5 * (1.0 + xi));
    ders.push(0.5);
    for j in 2..=p {
        let scale = 1.0 / (2.0 * (2 * j - 1) as f64).sqrt();
        vals.push((leg[j] - leg[j - 2]) * scale);
        ders.push(((2 * j - 1) as f64 / 2.0).sqrt() * leg[j - 1]);
    }
    (vals, ders)
}

// ---------------------------------------------------------------------------
// coefficients and data
// ---------------------------------------------------------------------------

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Diffusion A(x) > 0 and reaction c(x) >= 0 with a certified lower bound
/// on A.
#[derive(Clone)]
pub struct Coefficients1D {
    pub a_fn: RealFn,
    pub c_fn: RealFn,
    pub a_min: f64,
}

impl Coefficients1D {
    pub fn new(a_fn: RealFn, c_fn: RealFn, a_min: f64) -> Result<Self> {
        if !(a_min > 0.0) {
            return Err(Error::Domain(format!("a_min must be positive, got {a_min}")));
        }
        Ok(Coefficients1D { a_fn, c_fn, a_min })
    }

    pub fn constant(a0: f64, c0: f64) -> Self {
        Coefficients1D {
            a_fn: Arc::new(move |_| a0),
            c_fn: Arc::new(move |_| c0),
            a_min: a0,
        }
    }
}

impl std::fmt::Debug for Coefficients1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Coefficients1D {{ a_min: {} }}", self.a_min)
    }
}

/// A user-asserted analytic function with an optional exact derivative;
/// without one, a fourth-order central difference stands in.
#[derive(Clone)]
pub struct AnalyticFn {
    f: RealFn,
    df: Option<RealFn>,
}

impl AnalyticFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        AnalyticFn {
            f: Arc::new(f),
            df: None,
        }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticFn {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.df {
            Some(d) => d(x),
            None => {
                let h = 1e-5;
                (-self.eval(x + 2.0 * h) + 8.0 * self.eval(x + h) - 8.0 * self.eval(x - h)
                    + self.eval(x - 2.0 * h))
                    / (12.0 * h)
            }
        }
    }
}

impl std::fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AnalyticFn")
    }
}

// ---------------------------------------------------------------------------
// the space
// ---------------------------------------------------------------------------

/// Degree-p space on a geometric mesh with homogeneous Dirichlet
/// conditions; ndof = (2L+1) p - 1.
#[derive(Debug, Clone)]
pub struct HpSpace1D {
    pub mesh: GeometricMesh1D,
    pub degree: usize,
    pub ndof: usize,
}

impl HpSpace1D {
    pub fn new(mesh: GeometricMesh1D, degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::Domain("polynomial degree must be >= 1".into()));
        }
        let ndof = mesh.element_count() * degree - 1;
        if ndof == 0 {
            return Err(Error::Domain(
                "space is empty: single element at degree 1 has no interior dofs".into(),
            ));
        }
        Ok(HpSpace1D { mesh, degree, ndof })
    }

    /// Global index of a local dof (0 = left vertex, 1 = right vertex,
    /// 2.. = bubbles); None for the two boundary vertices.
    pub fn global_dof(&self, element: usize, local: usize) -> Option<usize> {
        let p = self.degree;
        match local {
            0 => {
                if element == 0 {
                    None
                } else {
                    Some(element * p - 1)
                }
            }
            1 => {
                if element == self.mesh.element_count() - 1 {
                    None
                } else {
                    Some((element + 1) * p - 1)
                }
            }
            m => Some(element * p + (m - 2)),
        }
    }

    /// Half-bandwidth of the assembled matrices.
    pub fn half_bandwidth(&self) -> usize {
        self.degree
    }
}

// ---------------------------------------------------------------------------
// real banded matrices from assembly
// ---------------------------------------------------------------------------

/// Symmetric real matrix in banded storage (both triangles kept).
#[derive(Debug, Clone)]
pub struct RealBanded {
    pub n: usize,
    pub hbw: usize,
    data: Vec<f64>,
}

impl RealBanded {
    pub fn zeros(n: usize, hbw: usize) -> Self {
        RealBanded {
            n,
            hbw,
            data: vec![0.0; (2 * hbw + 1) * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.hbw + i - j) * self.n + j
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.hbw && j <= i + self.hbw
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j));
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.hbw);
            let hi = (i + self.hbw).min(self.n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn matvec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.hbw);
            let hi = (i + self.hbw).min(self.n - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..=hi {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Hermitian quadratic form conj(x)^T A x (real for symmetric A).
    pub fn quad_form(&self, x: &[Complex64]) -> f64 {
        let ax = self.matvec_complex(x);
        x.iter().zip(&ax).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Assembled bilinear forms: stiff = (A u', v'), massc = (c u, v),
/// mass = (u, v), unit_stiff = (u', v').
#[derive(Debug, Clone)]
pub struct Matrices {
    pub stiff: RealBanded,
    pub massc: RealBanded,
    pub mass: RealBanded,
    pub unit_stiff: RealBanded,
}

/// Assemble with per-element Gauss quadrature of p + extra points
/// (extra >= 4 over-integrates analytic coefficients safely; exact for
/// constant ones).
pub fn assemble_with_order(
    space: &HpSpace1D,
    coeffs: &Coefficients1D,
    extra: usize,
) -> Result<Matrices> {
    let p = space.degree;
    let hbw = space.half_bandwidth();
    let n = space.ndof;
    let rule = gauss_rule(p + extra - 1); // p + extra points
    let shapes: Vec<(Vec<f64>, Vec<f64>)> =
        rule.nodes.iter().map(|&xi| shape_values(p, xi)).collect();
    let mut stiff = RealBanded::zeros(n, hbw);
    let mut massc = RealBanded::zeros(n, hbw);
    let mut mass = RealBanded::zeros(n, hbw);
    let mut unit_stiff = RealBanded::zeros(n, hbw);
    let nloc = p + 1;
    for e in 0..space.mesh.element_count() {
        let (xl, xr) = space.mesh.element(e);
        let h = xr - xl;
        if h <= 0.0 {
            return Err(Error::Assembly(format!("degenerate element {e}")));
        }
        let jac = 0.5 * h;
        let dmap = 2.0 / h;
        let globals: Vec<Option<usize>> = (0..nloc).map(|l| space.global_dof(e, l)).collect();
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let x = 0.5 * (xl + xr) + jac * xi;
            let a_q = (coeffs.a_fn)(x);
            let c_q = (coeffs.c_fn)(x);
            if !(a_q > 0.0) {
                return Err(Error::Assembly(format!(
                    "A({x}) = {a_q} violates positivity"
                )));
            }
            if c_q < 0.0 {
                return Err(Error::Assembly(format!("c({x}) = {c_q} is negative")));
            }
            let w = rule.weights[q] * jac;
            let (vals, ders) = &shapes[q];
            for li in 0..nloc {
                let Some(gi) = globals[li] else { continue };
                for lj in 0..nloc {
                    let Some(gj) = globals[lj] else { continue };
                    let grad = ders[li] * ders[lj] * dmap * dmap;
                    stiff.add(gi, gj, w * a_q * grad);
                    unit_stiff.add(gi, gj, w * grad);
                    massc.add(gi, gj, w * c_q * vals[li] * vals[lj]);
                    mass.add(gi, gj, w * vals[li] * vals[lj]);
                }
            }
        }
    }
    Ok(Matrices {
        stiff,
        massc,
        mass,
        unit_stiff,
    })
}

pub fn assemble(space: &HpSpace1D, coeffs: &Coefficients1D) -> Result<Matrices> {
    assemble_with_order(space, coeffs, 4)
}

/// Load vector (g, phi_i) by per-element Gauss quadrature of p+6 points.
pub fn load_vector<F: Fn(f64) -> f64>(space: &HpSpace1D, g: F) -> Vec<f64> {
    load_vector_with_order(space, g, 6)
}

pub fn load_vector_with_order<F: Fn(f64) -> f64>(
    space: &HpSpace1D,
    g: F,
    extra: usize,
) -> Vec<f64> {
    let p = space.degree;
    let rule = gauss_rule(p + extra - 1);
    let shapes: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|&xi| shape_values(p, xi).0)
        .collect();
    let mut out = vec![0.0; space.ndof];
    let nloc = p + 1;
    for e in 0..space.mesh.element_count() {
        let (xl, xr) = space.mesh.element(e);
        let jac = 0.5 * (xr - xl);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let x = 0.5 * (xl + xr) + jac * xi;
            let w = rule.weights[q] * jac * g(x);
            for li in 0..nloc {
                if let Some(gi) = space.global_dof(e, li) {
                    out[gi] += w * shapes[q][li];
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// finite element functions
// ---------------------------------------------------------------------------

/// Coefficient vector over the interior dofs of a shared space.
#[derive(Debug, Clone)]
pub struct FemFunction {
    pub space: Arc<HpSpace1D>,
    pub coeffs: Vec<Complex64>,
}

impl FemFunction {
    pub fn zero(space: Arc<HpSpace1D>) -> Self {
        let n = space.ndof;
        FemFunction {
            space,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_real(space: Arc<HpSpace1D>, v: &[f64]) -> Self {
        assert_eq!(v.len(), space.ndof);
        FemFunction {
            space,
            coeffs: v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_complex(space: Arc<HpSpace1D>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), space.ndof);
        FemFunction { space, coeffs }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let e = self.space.mesh.locate(x);
        let (xl, xr) = self.space.mesh.element(e);
        let xi = 2.0 * (x - xl) / (xr - xl) - 1.0;
        let (vals, _) = shape_values(self.space.degree, xi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, v) in vals.iter().enumerate() {
            if let Some(g) = self.space.global_dof(e, l) {
                acc += self.coeffs[g] * v;
            }
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(x).re
    }

    /// Largest imaginary component relative to the coefficient scale.
    pub fn relative_imag(&self) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.coeffs
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0f64, f64::max)
            / scale
    }

    /// Drop imaginary parts (after asserting they are residual-sized).
    pub fn into_real(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = Complex64::new(c.re, 0.0);
        }
        self
    }
}

/// sqrt of conj(x)^T M x.
pub fn l2_norm(mats: &Matrices, coeffs: &[Complex64]) -> f64 {
    mats.mass.quad_form(coeffs).max(0.0).sqrt()
}

/// sqrt of conj(x)^T K_1 x with the unweighted stiffness.
pub fn h1_seminorm(mats: &Matrices, coeffs: &[Complex64]) -> f64 {
    mats.unit_stiff.quad_form(coeffs).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// resolvent systems
// ---------------------------------------------------------------------------

/// The complex system matrix z M - M_c - K.
pub fn resolvent_matrix(space: &HpSpace1D, mats: &Matrices, z: Complex64) -> BandedMatrix {
    let n = space.ndof;
    let hbw = space.half_bandwidth();
    let mut out = BandedMatrix::zeros(n, hbw, hbw);
    for i in 0..n {
        let lo = i.saturating_sub(hbw);
        let hi = (i + hbw).min(n - 1);
        for j in lo..=hi {
            let m = mats.mass.get(i, j);
            let v = z * m - mats.massc.get(i, j) - mats.stiff.get(i, j);
            out.set(i, j, v);
        }
    }
    out
}

/// One-shot Galerkin resolvent solve: find u_h with
/// ((z - c) u_h, v) - (A u_h', v') = rhs-functional(v) for all v in V_h.
pub fn resolvent_solve(
    space: &Arc<HpSpace1D>,
    mats: &Matrices,
    z: Complex64,
    rhs: &[Complex64],
) -> Result<FemFunction> {
    if rhs.len() != space.ndof {
        return Err(Error::Domain(format!(
            "rhs length {} does not match ndof {}",
            rhs.len(),
            space.ndof
        )));
    }
    let lu = resolvent_matrix(space, mats, z).factor()?;
    Ok(FemFunction {
        space: Arc::clone(space),
        coeffs: lu.solve(rhs),
    })
}

/// One factorized system per contour node; solves afterwards are
/// back-substitutions only. Instrumented with factorization and
/// back-substitution counters.
pub struct ResolventCache {
    pub nodes: Vec<Complex64>,
    space: Arc<HpSpace1D>,
    factors: Vec<BandedLu>,
    factorizations: AtomicU64,
    backsubs: AtomicU64,
}

impl ResolventCache {
    /// Factor z_n M - M_c - K for every contour node. The contour must
    /// already have passed sector validation; each factorization is
    /// probed for backward error <= 1e-12 before being admitted.
    pub fn build(
        space: Arc<HpSpace1D>,
        mats: &Matrices,
        contour: &crate::contour::HyperbolicContour,
        sector: &crate::contour::SectorParams,
    ) -> Result<Self> {
        if !crate::contour::validate_sector(contour, sector) {
            return Err(Error::Domain(
                "contour fails sector validation; resolvent systems may be singular".into(),
            ));
        }
        let count = AtomicU64::new(0);
        let factors: Vec<Result<BandedLu>> = crate::par::map_indexed(contour.len(), |idx| {
            let z = contour.nodes[idx];
            let matrix = resolvent_matrix(&space, mats, z);
            let probe_rhs = matrix.matvec(&vec![Complex64::new(1.0, 0.0); space.ndof]);
            let lu = matrix
                .factor()
                .map_err(|_| Error::SingularSystem {
                    node_index: idx,
                    detail: format!("factorization failed at z = {z}"),
                })?;
            count.fetch_add(1, Ordering::Relaxed);
            // backward-error probe: solve A x = A*ones, then ||A x - A*ones||
            let x = lu.solve(&probe_rhs);
            let back = resolvent_matrix(&space, mats, z).matvec(&x);
            let num: f64 = back
                .iter()
                .zip(&probe_rhs)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let den: f64 = probe_rhs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if num > 1e-12 * den.max(1e-300) {
                return Err(Error::SingularSystem {
                    node_index: idx,
                    detail: format!("backward error {:.3e} at z = {z}", num / den),
                });
            }
            Ok(lu)
        });
        let factors = factors.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(ResolventCache {
            nodes: contour.nodes.clone(),
            space,
            factors,
            factorizations: count,
            backsubs: AtomicU64::new(0),
        })
    }

    pub fn space(&self) -> &Arc<HpSpace1D> {
        &self.space
    }

    /// Back-substitution with the cached factorization of node idx.
    pub fn solve(&self, idx: usize, rhs: &[Complex64]) -> Vec<Complex64> {
        self.backsubs.fetch_add(1, Ordering::Relaxed);
        self.factors[idx].solve(rhs)
    }

    pub fn factorization_count(&self) -> u64 {
        self.factorizations.load(Ordering::Relaxed)
    }

    pub fn backsub_count(&self) -> u64 {
        self.backsubs.load(Ordering::Relaxed)
    }
}

// ---------------------------------------------------------------------------
// initial condition projection
// ---------------------------------------------------------------------------

/// u_{h,0} = cutoff(Pi_{H1} u0): H^1-best approximation by one global
/// degree-p polynomial on (a,b) without boundary conditions, re-expressed
/// on the geometric mesh, then the boundary-vertex coefficients dropped
/// so the result lies in V_h. For compatible data the cutoff is a no-op
/// to roundoff; for u0 = 1 it subtracts the two outermost vertex hats.
fn h1_projection_poly(space: &HpSpace1D, u0: &AnalyticFn) -> Result<Vec<f64>> {
    let p = space.degree;
    let (a, b) = (space.mesh.a, space.mesh.b);
    let nloc = p + 1;
    let rule = gauss_rule(p + 12);
    let jac = 0.5 * (b - a);
    let dmap = 1.0 / jac;
    let mut gram = vec![vec![0.0; nloc]; nloc];
    let mut rhs = vec![0.0; nloc];
    for (q, &xi) in rule.nodes.iter().enumerate() {
        let x = 0.5 * (a + b) + jac * xi;
        let w = rule.weights[q] * jac;
        let (vals, ders) = shape_values(p, xi);
        let u = u0.eval(x);
        let du = u0.deriv(x);
        for i in 0..nloc {
            rhs[i] += w * (u * vals[i] + du * ders[i] * dmap);
            for j in 0..nloc {
                gram[i][j] += w * (vals[i] * vals[j] + ders[i] * ders[j] * dmap * dmap);
            }
        }
    }
    crate::dense::solve_spd(gram, &mut rhs)?;
    Ok(rhs)
}

/// u_{h,0} = cutoff(Pi_{H1} u0): H^1-best approximation by one global
/// degree-p polynomial on (a,b) without boundary conditions, re-expressed
/// on the geometric mesh, then the boundary-vertex coefficients dropped
/// so the result lies in V_h. For compatible data the cutoff is a no-op
/// to roundoff; for u0 = 1 it subtracts the two outermost vertex hats.
pub fn project_initial_condition(space: &Arc<HpSpace1D>, u0: &AnalyticFn) -> Result<FemFunction> {
    let p = space.degree;
    let (a, b) = (space.mesh.a, space.mesh.b);
    let nloc = p + 1;
    let poly = h1_projection_poly(space, u0)?;
    let eval_poly = |x: f64| -> f64 {
        let xi = (2.0 * x - (a + b)) / (b - a);
        let (vals, _) = shape_values(p, xi);
        vals.iter().zip(&poly).map(|(v, c)| v * c).sum()
    };
    // exact re-representation per element by local L2 projection
    let proj_rule = gauss_rule(p + 2);
    let mut mass_ref = vec![vec![0.0; nloc]; nloc];
    let local_shapes: Vec<Vec<f64>> = proj_rule
        .nodes
        .iter()
        .map(|&xi| shape_values(p, xi).0)
        .collect();
    for (q, vals) in local_shapes.iter().enumerate() {
        let w = proj_rule.weights[q];
        for i in 0..nloc {
            for j in 0..nloc {
                mass_ref[i][j] += w * vals[i] * vals[j];
            }
        }
    }
    let mut chol = mass_ref;
    crate::dense::cholesky(&mut chol)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); space.ndof];
    for e in 0..space.mesh.element_count() {
        let (xl, xr) = space.mesh.element(e);
        let mid = 0.5 * (xl + xr);
        let half = 0.5 * (xr - xl);
        let mut local_rhs = vec![0.0; nloc];
        for (q, &xi) in proj_rule.nodes.iter().enumerate() {
            let v = eval_poly(mid + half * xi);
            for i in 0..nloc {
                local_rhs[i] += proj_rule.weights[q] * v * local_shapes[q][i];
            }
        }
        crate::dense::cholesky_solve(&chol, &mut local_rhs);
        for (l, c) in local_rhs.iter().enumerate() {
            // boundary vertices fall out here: that IS the cutoff
            if let Some(g) = space.global_dof(e, l) {
                coeffs[g] = Complex64::new(*c, 0.0);
            }
        }
    }
    Ok(FemFunction {
        space: Arc::clone(space),
        coeffs,
    })
}

/// Boundary values of the H^1-best polynomial before the cutoff; used to
/// check that compatible data make the cutoff a no-op.
pub fn projection_boundary_values(space: &HpSpace1D, u0: &AnalyticFn) -> Result<(f64, f64)> {
    let poly = h1_projection_poly(space, u0)?;
    Ok((poly[0], poly[1]))
}
