//! Mittag-Leffler function e_{gamma,mu}(w) on the sector away from the
//! positive real axis.
//!
//! # Definition
//!
//! e_{gamma,mu}(w) = sum_{n>=0} w^n / Gamma(n gamma + mu)
//!
//! Special cases: e_{1,1}(w) = exp(w); e_{gamma,mu}(0) = 1/Gamma(mu).
//!
//! # Evaluation strategy
//!
//! The scale that decides everything is rho = |w|^{1/gamma}: the Taylor
//! series terms peak near e^{rho}, so summing it costs about
//! rho*log10(e) digits of cancellation, while the algebraic asymptotic
//! expansion -sum_{k>=1} w^{-k}/Gamma(mu - gamma k) is accurate to about
//! e^{-rho} at optimal truncation. Accordingly:
//!
//! * rho <= [`RHO_TAYLOR_MAX`]: Taylor series in double-double arithmetic
//!   with a cached per-(gamma,mu) table of Gamma ratios;
//! * rho >= [`RHO_ASYM_MIN`]: asymptotic expansion, with the exponential
//!   (Stokes) term exp(w^{1/gamma}) w^{(1-mu)/gamma} / gamma added when
//!   |Arg w| <= gamma*pi, where it is decaying but not yet negligible;
//! * in the overlap both run and the one with the smaller internal error
//!   estimate wins.
//!
//! Both thresholds are module constants, exposed for tuning. The test
//! oracle [`ml_series`] follows the same series but escalates to adaptive
//! arbitrary-precision arithmetic (see [`oracle`]) once double-double
//! cannot absorb the cancellation, which is what makes it trustworthy up
//! to |w| = 50 even for gamma = 0.5 (rho = 2500).

use crate::dd::{Cdd, Dd, DD_EPS};
use crate::gamma::{dd_lgamma, recip_gamma};
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

pub mod oracle;
pub use oracle::MlOracle;

/// Largest rho = |w|^{1/gamma} the double-double Taylor branch accepts.
pub const RHO_TAYLOR_MAX: f64 = 36.0;
/// Smallest rho at which the asymptotic candidate is attempted; its honest
/// first-omitted-term estimate keeps it from winning until it deserves to
/// (for gamma = 1 it is exact at any rho, being just exp(w)).
pub const RHO_ASYM_MIN: f64 = 12.0;
/// Default relative tolerance of [`ml_eval`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Parameters (gamma, mu) of e_{gamma,mu}; the method uses mu in {1, gamma}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub gamma: f64,
    pub mu: f64,
}

impl MLParams {
    pub fn new(gamma: f64, mu: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) || !gamma.is_finite() || !mu.is_finite() {
            return Err(Error::Domain(format!(
                "MLParams require 0 < gamma <= 1 and finite mu, got gamma={gamma}, mu={mu}"
            )));
        }
        Ok(MLParams { gamma, mu })
    }
}

/// A point w together with the sector bound zeta: accuracy is guaranteed
/// for |Arg w| >= zeta with zeta > gamma*pi/2.
#[derive(Debug, Clone, Copy)]
pub struct SectorPoint {
    pub w: Complex64,
    pub arg_bound: f64,
}

impl SectorPoint {
    pub fn new(w: Complex64, arg_bound: f64) -> Self {
        SectorPoint { w, arg_bound }
    }

    /// Whether w actually satisfies its own sector bound.
    pub fn in_sector(&self) -> bool {
        self.w.arg().abs() >= self.arg_bound
    }
}

// ---------------------------------------------------------------------------
// per-(gamma, mu) ratio table for the dd series
// ---------------------------------------------------------------------------

struct RatioTable {
    /// ratios[n] = Gamma(n g + mu) / Gamma((n+1) g + mu), double-double.
    ratios: Vec<Dd>,
    /// 1 / Gamma(mu)
    first: Dd,
}

fn ratio_table(params: MLParams, need: usize) -> Arc<RatioTable> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<RatioTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (params.gamma.to_bits(), params.mu.to_bits());
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.get(&key) {
        if t.ratios.len() >= need {
            return Arc::clone(t);
        }
    }
    let n_build = need.next_power_of_two().max(256);
    let g = Dd::from_f64(params.gamma);
    let mu = Dd::from_f64(params.mu);
    let mut ratios = Vec::with_capacity(n_build);
    let mut lg_a = dd_lgamma(mu);
    for n in 0..n_build {
        let arg_b = g.mul_f64((n + 1) as f64).add(mu);
        let lg_b = dd_lgamma(arg_b);
        ratios.push(lg_a.sub(lg_b).exp());
        lg_a = lg_b;
    }
    let table = Arc::new(RatioTable {
        ratios,
        first: dd_lgamma(mu).neg().exp(),
    });
    guard.insert(key, Arc::clone(&table));
    table
}

/// Truncation index after which series terms are negligible for w.
pub(crate) fn suggested_terms(params: MLParams, abs_w: f64) -> usize {
    if abs_w <= 1.0 {
        return 80;
    }
    let rho = abs_w.powf(1.0 / params.gamma);
    let ln_w = abs_w.ln();
    // drop terms once ln|t_n| falls this far below the peak (~rho)
    let cutoff = rho.min(3000.0) + 100.0 * std::f64::consts::LN_10;
    let mut n = (rho / params.gamma) as usize + 8;
    loop {
        let ln_t = n as f64 * ln_w - crate::gamma::lgamma(n as f64 * params.gamma + params.mu);
        if ln_t < rho - cutoff || n > 2_000_000 {
            return n;
        }
        n += 1 + n / 8;
    }
}

/// Double-double Taylor sum with an internal roundoff estimate.
/// Returns (value, absolute error estimate).
fn series_dd(params: MLParams, w: Complex64, nmax: usize) -> (Complex64, f64) {
    let table = ratio_table(params, nmax + 1);
    let wd = Cdd::from_f64(w.re, w.im);
    let mut term = Cdd {
        re: table.first,
        im: Dd::ZERO,
    };
    let mut sum = term;
    let mut max_term = term.abs_f64();
    let mut n_used = 1usize;
    for n in 0..nmax {
        term = term.mul(wd).scale(table.ratios[n]);
        sum = sum.add(term);
        n_used += 1;
        let a = term.abs_f64();
        if a > max_term {
            max_term = a;
        }
        if a < 1e-40 * max_term {
            break;
        }
    }
    let err = DD_EPS * max_term * (8.0 + n_used as f64 * 0.5);
    (sum.to_c64(), err)
}

/// max |sin(pi (mu - g k'))| over the next few omitted indices; 0 when
/// they all land on Gamma poles.
fn pole_window(g: f64, mu: f64, k: usize) -> f64 {
    (k..k + 6)
        .map(|j| crate::gamma::sinpi(mu - g * j as f64).abs())
        .fold(0.0, f64::max)
        .max(1e-30)
        .min(1.0)
}

fn in_growth_sector(params: MLParams, w: Complex64) -> bool {
    w.arg().abs() < params.gamma * PI / 2.0
}

/// Algebraic large-|w| expansion plus the decaying exponential term.
/// Returns (value, absolute error bound).
fn asymptotic_impl(params: MLParams, w: Complex64, kmax: usize) -> (Complex64, f64) {
    let g = params.gamma;
    let mu = params.mu;
    let abs_w = w.norm();
    // sin-stripped magnitude envelope of the k-th term: by reflection,
    // |w^{-k} / Gamma(mu - g k)| = |w|^{-k} Gamma(1 + g k - mu) |sin(pi(mu - g k))| / pi
    // and the sin factor is <= 1, so this bounds every term and is
    // monotone down to the optimal truncation index near g k = |w|^{1/g}
    let envelope = |k: usize| -> f64 {
        let x = 1.0 + g * k as f64 - mu;
        if x > 0.0 {
            (crate::gamma::lgamma(x) - k as f64 * abs_w.ln()).exp() / PI
        } else {
            abs_w.powi(-(k as i32)) * recip_gamma(mu - g * k as f64).abs()
        }
    };
    let w_inv = w.inv();
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0f64;
    let mut err;
    let mut k = 1usize;
    let mut prev_env = f64::INFINITY;
    loop {
        let env = envelope(k);
        if env > prev_env && k >= 2 {
            // past optimal truncation; the omitted tail is of the order of
            // the first omitted envelope times its sin factor (exactly zero
            // when the remaining terms all sit on Gamma poles, e.g. gamma=1)
            err = 2.0 * env * pole_window(g, mu, k);
            break;
        }
        pow *= w_inv;
        let term = pow * recip_gamma(mu - g * k as f64);
        sum -= term;
        abs_sum += term.norm();
        prev_env = env;
        if k >= kmax {
            err = 2.0 * envelope(k + 1).min(prev_env) * pole_window(g, mu, k);
            break;
        }
        if env < 1e-22 * (sum.norm() + 1e-300) && k >= 3 {
            err = 2.0 * env * pole_window(g, mu, k);
            break;
        }
        k += 1;
    }
    // exponential (Stokes) contribution, decaying for |Arg w| > gamma*pi/2,
    // asymptotically absent for |Arg w| > gamma*pi
    if w.arg().abs() <= g * PI + 1e-14 {
        let root = w.powf(1.0 / g);
        if root.re < 700.0 {
            let stokes = root.exp() * w.powf((1.0 - mu) / g) / g;
            sum += stokes;
            // the Stokes line correction is itself asymptotic; keep a slice
            // of its magnitude in the error budget
            err += 1e-14 * stokes.norm();
        }
    }
    err += 4e-16 * (sum.norm() + abs_sum);
    (sum, err)
}

/// Truncated asymptotic expansion; error bound reported alongside.
///
/// Domain error inside the sector of exponential growth
/// (|Arg w| < gamma*pi/2), where the algebraic expansion does not apply.
pub fn ml_asymptotic(params: MLParams, w: Complex64, kmax: usize) -> Result<(Complex64, f64)> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if in_growth_sector(params, w) {
        return Err(Error::Domain(format!(
            "w = {w} lies in the growth sector |Arg w| < gamma*pi/2"
        )));
    }
    Ok(asymptotic_impl(params, w, kmax))
}

/// Power series sum_{n=0}^{nmax} w^n / Gamma(n gamma + mu) in extended
/// precision: double-double while that absorbs the cancellation
/// (|w|^{1/gamma} <= [`RHO_TAYLOR_MAX`]), adaptive arbitrary precision
/// beyond. This is the test oracle for [`ml_eval`] at moderate |w|.
pub fn ml_series(params: MLParams, w: Complex64, nmax: usize) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if params.mu <= 0.0 {
        return Err(Error::Domain(
            "series oracle requires mu > 0 (no poles on the Gamma ladder)".into(),
        ));
    }
    let rho = w.norm().powf(1.0 / params.gamma);
    if rho > 4000.0 {
        return Err(Error::Range(format!(
            "w^n overflows any practical precision: |w|^(1/gamma) = {rho:.3e}"
        )));
    }
    if rho <= RHO_TAYLOR_MAX {
        Ok(series_dd(params, w, nmax).0)
    } else {
        Ok(oracle::hp_series(params, w, nmax))
    }
}

/// Evaluate e_{gamma,mu}(w) to relative tolerance `tol`.
///
/// Accuracy is guaranteed on the sector |Arg w| >= zeta for some
/// zeta > gamma*pi/2; outside it the result is best effort and the error
/// estimate is still honest. Fails with [`Error::Accuracy`] carrying the
/// best estimate when neither branch meets `tol`.
pub fn ml_eval(params: MLParams, w: Complex64, tol: f64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::Domain(format!(
            "tol must lie in [1e-14, 1e-6], got {tol:.3e}"
        )));
    }
    if w.norm() == 0.0 {
        return Ok(Complex64::new(recip_gamma(params.mu), 0.0));
    }
    let rho = w.norm().powf(1.0 / params.gamma);
    let mut best: Option<(Complex64, f64)> = None;
    if rho <= RHO_TAYLOR_MAX {
        let nmax = suggested_terms(params, w.norm());
        let (v, e) = series_dd(params, w, nmax);
        best = Some((v, e));
    }
    if rho >= RHO_ASYM_MIN {
        let (v, e) = asymptotic_impl(params, w, 400);
        best = match best {
            Some((bv, be)) if be <= e => Some((bv, be)),
            _ => Some((v, e)),
        };
    }
    let (value, err) = best.expect("branch windows overlap; one always applies");
    if err <= tol * value.norm().max(1e-290) {
        Ok(value)
    } else {
        Err(Error::Accuracy {
            estimate: value,
            achieved: err / value.norm().max(1e-290),
            requested: tol,
        })
    }
}

/// The composed kernel e_{gamma,mu}(-t^gamma z^beta) with the principal
/// branch of z^beta. At t = 0 the argument is 0 and the value is
/// 1/Gamma(mu).
pub fn ml_kernel(params: MLParams, t: f64, z: Complex64, beta: f64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("ml_kernel requires z != 0".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("ml_kernel requires t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(recip_gamma(params.mu), 0.0));
    }
    let w = -t.powf(params.gamma) * z.powf(beta);
    ml_eval(params, w, DEFAULT_TOL)
}
