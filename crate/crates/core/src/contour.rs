//! Hyperbolic integration contour and sinc quadrature.
//!
//! The resolvent integrals run over z(y) = b (cosh y + i sinh y), sampled
//! at the sinc points y_n = n k, n = -n_q..n_q. The contour must stay in
//! the sector S = C minus (a cone of half-angle pi/8 rooted at z0 on the
//! positive real axis, union the ball of radius eps0 at the origin); that
//! holds exactly when eps0 < b < z0, and [`validate_sector`] checks it
//! node by node as well.

use crate::mlf::{ml_kernel, MLParams};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Contour nodes z(y_n) and parameterization derivatives z'(y_n).
#[derive(Debug, Clone)]
pub struct HyperbolicContour {
    pub b: f64,
    pub k: f64,
    pub n_q: usize,
    /// z(n k) for n = -n_q..=n_q, ascending in n.
    pub nodes: Vec<Complex64>,
    /// z'(n k), same order.
    pub dweights: Vec<Complex64>,
}

impl HyperbolicContour {
    /// Number of nodes, 2 n_q + 1.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node with n = 0.
    pub fn center(&self) -> usize {
        self.n_q
    }
}

/// Parameters of the sector S from the problem data: z0 bounded by
/// min(a_min / (2 C_P), 1)^2 with C_P the Poincare constant of the
/// interval, eps0 < z0.
#[derive(Debug, Clone, Copy)]
pub struct SectorParams {
    pub z0: f64,
    pub eps0: f64,
    pub poincare_const: f64,
    pub a_min: f64,
}

impl SectorParams {
    /// Sharp Poincare constant (b - a)/pi for an interval, z0 at its upper
    /// bound and eps0 = z0/10.
    pub fn for_interval(a: f64, b: f64, a_min: f64) -> Result<Self> {
        if !(b > a) || !(a_min > 0.0) {
            return Err(Error::Domain(format!(
                "interval ({a}, {b}) with a_min = {a_min} is not admissible"
            )));
        }
        let c_p = (b - a) / PI;
        let z0 = (a_min / (2.0 * c_p)).min(1.0).powi(2);
        Ok(SectorParams {
            z0,
            eps0: z0 / 10.0,
            poincare_const: c_p,
            a_min,
        })
    }

    /// Default contour scale: the midpoint of the admissible (eps0, z0).
    pub fn default_b(&self) -> f64 {
        0.5 * (self.eps0 + self.z0)
    }

    /// Whether w avoids both the excluded cone and the excluded ball.
    pub fn contains(&self, w: Complex64) -> bool {
        if w.norm() <= self.eps0 {
            return false;
        }
        let d = w - self.z0;
        if d.norm() == 0.0 {
            return false;
        }
        d.arg().abs() > PI / 8.0
    }
}

/// z(y) = b(cosh y + i sinh y) for complex y in the strip |Im y| < pi/4.
pub fn contour_point(b: f64, y: Complex64) -> Complex64 {
    b * (y.cosh() + Complex64::i() * y.sinh())
}

/// z'(y) = b(sinh y + i cosh y).
pub fn contour_derivative(b: f64, y: Complex64) -> Complex64 {
    b * (y.sinh() + Complex64::i() * y.cosh())
}

/// Populate the contour with 2 n_q + 1 nodes at y_n = n k.
pub fn build_contour(b: f64, n_q: usize, k: f64) -> Result<HyperbolicContour> {
    if !(b > 0.0 && k > 0.0) || n_q == 0 {
        return Err(Error::Domain(format!(
            "build_contour requires b > 0, k > 0, n_q >= 1 (got b={b}, k={k}, n_q={n_q})"
        )));
    }
    if b.ln() + n_q as f64 * k > 700.0 {
        return Err(Error::Range(format!(
            "contour magnitude b e^(n_q k) overflows: b={b}, n_q={n_q}, k={k}"
        )));
    }
    let mut nodes = Vec::with_capacity(2 * n_q + 1);
    let mut dweights = Vec::with_capacity(2 * n_q + 1);
    for i in 0..=2 * n_q {
        let n = i as isize - n_q as isize;
        let y = Complex64::new(n as f64 * k, 0.0);
        nodes.push(contour_point(b, y));
        dweights.push(contour_derivative(b, y));
    }
    Ok(HyperbolicContour {
        b,
        k,
        n_q,
        nodes,
        dweights,
    })
}

/// Sinc step k = sqrt(pi H / (beta n_q)); with H = pi/5 this is the
/// step used in the experiments, k = pi sqrt(1/(5 beta n_q)).
pub fn default_step(beta: f64, n_q: usize, h: f64) -> f64 {
    debug_assert!(beta > 0.0 && beta <= 1.0 && n_q >= 1 && h > 0.0 && h < PI / 4.0);
    (PI * h / (beta * n_q as f64)).sqrt()
}

/// True iff eps0 < b < z0 and every node lies in the sector.
pub fn validate_sector(contour: &HyperbolicContour, sector: &SectorParams) -> bool {
    if !(sector.eps0 < contour.b && contour.b < sector.z0) {
        return false;
    }
    contour.nodes.iter().all(|&z| sector.contains(z))
}

/// The scalar kernel of the homogeneous problem,
/// g_lambda(y, t) = (1/2 pi i) e_{gamma,1}(-t^gamma z(y)^beta) z'(y) (z(y) - lambda)^{-1},
/// defined on the strip |Im y| < pi/4, oriented so that the sinc sum
/// k sum_n g_lambda(n k, t) converges to e_{gamma,1}(-t^gamma lambda^beta):
/// with y ascending the hyperbola winds clockwise around the spectrum, so
/// the residue convention absorbs a minus sign.
pub fn g_lambda(
    lambda: f64,
    y: Complex64,
    t: f64,
    gamma: f64,
    beta: f64,
    b: f64,
) -> Result<Complex64> {
    if y.im.abs() >= PI / 4.0 {
        return Err(Error::Domain(format!(
            "y = {y} outside the strip |Im y| < pi/4"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let z = contour_point(b, y);
    let dz = contour_derivative(b, y);
    let denom = z - lambda;
    if denom.norm() == 0.0 {
        return Err(Error::Domain(format!(
            "z(y) = lambda = {lambda}: kernel pole"
        )));
    }
    let params = MLParams::new(gamma, 1.0)?;
    let ml = ml_kernel(params, t, z, beta)?;
    let minus_two_pi_i = Complex64::new(0.0, -2.0 * PI);
    Ok(ml * dz / (minus_two_pi_i * denom))
}

/// Truncated sinc quadrature k * sum_{n=-n_q}^{n_q} f(n k), summed in
/// ascending n for reproducibility.
pub fn sinc_integrate<F>(f: F, k: f64, n_q: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..=2 * n_q {
        let n = i as isize - n_q as isize;
        let y = n as f64 * k;
        let v = f(y);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { node: y });
        }
        sum += v;
    }
    Ok(sum * k)
}
