//! Composite geometric Gauss quadrature on (0, T).
//!
//! The partition is K_0 = (0, T sigma^L), K_l = (T sigma^{L-l+1},
//! T sigma^{L-l}) for l = 1..L, with Gauss degree p - L + l on K_l: the
//! order decreases linearly toward the singular endpoint tau = 0, and K_0
//! carries the single midpoint node of the degree-0 rule. Endpoint
//! singularities tau^{-alpha}, alpha < 1, integrate with exponential
//! accuracy in p under the coupling p = L.

use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre rule on (-1, 1): a degree-d rule has d+1 points and is
/// exact through polynomial degree 2d+1.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_gauss(degree: usize) -> GaussRule {
    let n = degree + 1;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // odd point count: force the middle node exactly to 0
        if n % 2 == 1 && i == n / 2 {
            x = 0.0;
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n == 1 {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    GaussRule { nodes, weights }
}

/// Gauss-Legendre nodes/weights for the given degree, computed once per
/// degree and cached process-wide.
pub fn gauss_rule(degree: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    Arc::clone(
        guard
            .entry(degree)
            .or_insert_with(|| Arc::new(compute_gauss(degree))),
    )
}

/// One element of the composite rule, with push-forward nodes/weights.
#[derive(Debug, Clone)]
pub struct QuadElement {
    pub left: f64,
    pub right: f64,
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Geometric composite Gauss rule on (0, T).
#[derive(Debug, Clone)]
pub struct CompositeGaussRule {
    pub t_end: f64,
    pub sigma: f64,
    pub layers: usize,
    pub degree: usize,
    /// Elements ascending from the singular endpoint.
    pub elements: Vec<QuadElement>,
}

impl CompositeGaussRule {
    pub fn node_count(&self) -> usize {
        self.elements.iter().map(|e| e.nodes.len()).sum()
    }
}

/// Build the rule: layers L, top degree p >= L, grading sigma.
pub fn build_hp_rule(t_end: f64, sigma: f64, layers: usize, p: usize) -> Result<CompositeGaussRule> {
    if !(t_end > 0.0) || !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!(
            "build_hp_rule requires T > 0 and sigma in (0,1), got T={t_end}, sigma={sigma}"
        )));
    }
    if p < layers {
        return Err(Error::Domain(format!(
            "composite rule requires p >= layers, got p={p}, layers={layers}"
        )));
    }
    let smallest = t_end * sigma.powi(layers as i32);
    if smallest < f64::MIN_POSITIVE * 16.0 {
        return Err(Error::Range(format!(
            "T sigma^L = {smallest:e} underflows; reduce layers"
        )));
    }
    let mut elements = Vec::with_capacity(layers + 1);
    for l in 0..=layers {
        let (left, right) = if l == 0 {
            (0.0, smallest)
        } else {
            (
                t_end * sigma.powi((layers - l + 1) as i32),
                t_end * sigma.powi((layers - l) as i32),
            )
        };
        let degree = p - layers + l;
        let reference = gauss_rule(degree);
        let half = 0.5 * (right - left);
        let mid = 0.5 * (right + left);
        let nodes: Vec<f64> = reference.nodes.iter().map(|&x| mid + half * x).collect();
        let weights: Vec<f64> = reference.weights.iter().map(|&w| w * half).collect();
        debug_assert!(weights.iter().all(|&w| w > 0.0));
        elements.push(QuadElement {
            left,
            right,
            degree,
            nodes,
            weights,
        });
    }
    Ok(CompositeGaussRule {
        t_end,
        sigma,
        layers,
        degree: p,
        elements,
    })
}

/// Values the composite rule can accumulate.
pub trait QuadValue: Clone {
    fn zero() -> Self;
    fn add_scaled(&mut self, w: f64, v: &Self);
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, w: f64, v: &Self) {
        *self += w * v;
    }
    fn is_finite(&self) -> bool {
        (*self).is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, w: f64, v: &Self) {
        *self += w * v;
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Apply the rule: sum of weights * g(nodes), elements ascending, nodes
/// ascending within each element. g is never evaluated at tau = 0.
pub fn hp_integrate<T, F>(rule: &CompositeGaussRule, mut g: F) -> Result<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut acc = T::zero();
    for el in &rule.elements {
        for (&x, &w) in el.nodes.iter().zip(&el.weights) {
            let v = g(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { node: x });
            }
            acc.add_scaled(w, &v);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gauss_low_degrees() {
        let r = gauss_rule(0);
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);
        let r = gauss_rule(1);
        assert_relative_eq!(r.nodes[1], 1.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(r.nodes[0], -1.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_exactness_degree_nine() {
        // degree-4 rule (5 points) integrates x^8 exactly: 2/9
        let r = gauss_rule(4);
        let q: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(&x, &w)| w * x.powi(8))
            .sum();
        assert_relative_eq!(q, 2.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_symmetry_and_weight_sum() {
        for d in [2usize, 5, 9, 16, 33] {
            let r = gauss_rule(d);
            let s: f64 = r.weights.iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-13);
            for i in 0..r.nodes.len() {
                assert_abs_diff_eq!(r.nodes[i], -r.nodes[r.nodes.len() - 1 - i], epsilon = 1e-14);
                assert!(r.weights[i] > 0.0);
            }
            for i in 1..r.nodes.len() {
                assert!(r.nodes[i] > r.nodes[i - 1]);
            }
        }
    }

    #[test]
    fn rule_layout_matches_definition() {
        let r = build_hp_rule(1.0, 0.5, 1, 1).unwrap();
        assert_eq!(r.elements.len(), 2);
        assert_eq!((r.elements[0].left, r.elements[0].right), (0.0, 0.5));
        assert_eq!((r.elements[1].left, r.elements[1].right), (0.5, 1.0));
        assert_eq!(r.elements[0].degree, 0);
        assert_eq!(r.elements[1].degree, 1);
        // K_0 carries exactly the midpoint
        assert_eq!(r.elements[0].nodes, vec![0.25]);
        // weight sums equal element lengths; nodes strictly inside (0, T)
        let r = build_hp_rule(2.0, 0.125, 6, 9).unwrap();
        for el in &r.elements {
            let s: f64 = el.weights.iter().sum();
            assert_relative_eq!(s, el.right - el.left, max_relative = 1e-12);
            for &x in &el.nodes {
                assert!(x > 0.0 && x < 2.0);
            }
        }
        assert_eq!(
            r.node_count(),
            (0..=6).map(|l| 9 - 6 + l + 1).sum::<usize>()
        );
    }

    #[test]
    fn rule_rejects_bad_parameters() {
        assert!(build_hp_rule(1.0, 0.5, 5, 3).is_err());
        assert!(build_hp_rule(-1.0, 0.5, 2, 3).is_err());
        assert!(matches!(
            build_hp_rule(1.0, 0.01, 200, 200),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn constants_integrate_exactly() {
        let r = build_hp_rule(1.0, 0.125, 4, 7).unwrap();
        let q: f64 = hp_integrate(&r, |_| 1.0).unwrap();
        assert_relative_eq!(q, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        // exact antiderivative 2 sqrt(tau). At sigma=0.125, L=p=15 the K_0
        // deficiency floors the error near 0.59 sigma^{L/2} ~ 1e-7; the
        // spec's 1e-10 at these parameters is not reachable (see the
        // acceptance suite, criterion 4, for the faithful assert and the
        // measured value).
        let r = build_hp_rule(1.0, 0.125, 15, 15).unwrap();
        let q: f64 = hp_integrate(&r, |t| 1.0 / t.sqrt()).unwrap();
        println!("Q(tau^-1/2) error = {:.3e}", (q - 2.0).abs());
        assert!((q - 2.0).abs() < 5e-7);
        // more layers reach deeper: L = p = 26 crosses 1e-10
        let r = build_hp_rule(1.0, 0.125, 26, 26).unwrap();
        let q: f64 = hp_integrate(&r, |t| 1.0 / t.sqrt()).unwrap();
        assert!((q - 2.0).abs() < 1e-10, "err = {:.3e}", (q - 2.0).abs());
    }

    #[test]
    fn stability_constant() {
        // |Q(tau^-alpha)| <= C_stab T^{1-alpha}
        let mut worst: f64 = 0.0;
        for alpha in [0.25, 0.5, 0.9] {
            for t_end in [0.1, 1.0, 10.0] {
                let r = build_hp_rule(t_end, 0.125, 12, 12).unwrap();
                let q: f64 = hp_integrate(&r, |t| t.powf(-alpha)).unwrap();
                worst = worst.max(q.abs() / t_end.powf(1.0 - alpha));
            }
        }
        println!("hp stability constant = {worst:.3}");
        assert!(worst <= 20.0);
    }

    #[test]
    fn exponential_convergence_on_singular_integrand() {
        // tau^{-1/2} e^tau on (0,1); exact = sum 2/(k! (2k+1))
        let exact: f64 = (0..30)
            .map(|k| {
                2.0 / ((1..=k).map(|j| j as f64).product::<f64>() * (2 * k + 1) as f64)
            })
            .sum();
        let mut errs = Vec::new();
        for p in 2..=16 {
            let r = build_hp_rule(1.0, 0.125, p, p).unwrap();
            let q: f64 = hp_integrate(&r, |t| t.powf(-0.5) * t.exp()).unwrap();
            errs.push(((q - exact).abs().max(1e-16)).ln());
        }
        // least-squares slope of ln(err) against p
        let n = errs.len() as f64;
        let xm = (2..=16).map(|p| p as f64).sum::<f64>() / n;
        let ym = errs.iter().sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &e) in errs.iter().enumerate() {
            let x = (i + 2) as f64;
            num += (x - xm) * (e - ym);
            den += (x - xm) * (x - xm);
        }
        let omega = -num / den;
        println!("fitted decay rate omega = {omega:.3}");
        assert!(omega > 0.5, "expected exponential decay, omega = {omega}");
    }

    #[test]
    fn affine_covariance() {
        let t_end = 3.7;
        let g = |t: f64| (1.0 + t).recip() + t.sqrt();
        let big = build_hp_rule(t_end, 0.25, 6, 8).unwrap();
        let unit = build_hp_rule(1.0, 0.25, 6, 8).unwrap();
        let a: f64 = hp_integrate(&big, g).unwrap();
        let b: f64 = hp_integrate(&unit, |s| g(t_end * s)).unwrap();
        assert_relative_eq!(a, t_end * b, max_relative = 1e-13);
    }

    #[test]
    fn non_finite_sample_names_the_node() {
        let r = build_hp_rule(1.0, 0.5, 2, 3).unwrap();
        let res: Result<f64> = hp_integrate(&r, |t| if t > 0.5 { f64::NAN } else { 1.0 });
        match res {
            Err(Error::NonFinite { node }) => assert!(node > 0.5),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn complex_integrand() {
        let r = build_hp_rule(1.0, 0.25, 3, 5).unwrap();
        let q: Complex64 = hp_integrate(&r, |t| Complex64::new(t, t * t)).unwrap();
        assert_relative_eq!(q.re, 0.5, max_relative = 1e-13);
        assert_relative_eq!(q.im, 1.0 / 3.0, max_relative = 1e-13);
    }
}
