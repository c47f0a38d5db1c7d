//! Adaptive-precision backend for the Mittag-Leffler series oracle.
//!
//! Summing sum w^n / Gamma(n gamma + mu) near the negative real axis
//! cancels about |w|^{1/gamma} * log10(e) decimal digits (the terms peak
//! at ~e^{|w|^{1/gamma}} while the result is O(1/|w|)), so the working
//! precision here scales with |w|^{1/gamma}. Building blocks:
//!
//! * pi by Machin's formula,
//! * Stirling's series for ln Gamma with an argument shift, Bernoulli
//!   coefficients generated exactly from tangent numbers (integer
//!   triangle, Brent-Harvey style),
//! * per-(gamma, mu) tables of 1/Gamma(n gamma + mu); when q*gamma is an
//!   integer for small q (gamma = 1/2, 3/4, ...) the table climbs the
//!   exact ladder Gamma(x + q gamma) = x (x+1) ... Gamma(x), otherwise
//!   every entry is an independent Stirling evaluation.
//!
//! Everything is cached per precision bucket; the series itself is a
//! plain product recurrence over the cached reciprocals.

use super::MLParams;
use crate::{Error, Result};
use dashu_float::{round::mode::Zero, FBig};
use dashu_int::IBig;
use dashu_base::bit::BitTest;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type F = FBig<Zero, 2>;

fn fp(x: f64, bits: usize) -> F {
    F::try_from(x)
        .expect("finite f64")
        .with_precision(bits)
        .value()
}

fn fone(bits: usize) -> F {
    F::ONE.with_precision(bits).value()
}

fn to_f64(x: &F) -> f64 {
    x.to_f64().value()
}

/// pi = 16 atan(1/5) - 4 atan(1/239), Machin.
fn machin_pi(bits: usize) -> F {
    let p = bits + 32;
    let atan_inv = |m: i64| -> F {
        let m2 = F::from(m * m).with_precision(p).value();
        let mut t = fone(p) / F::from(m).with_precision(p).value();
        let mut sum = t.clone();
        let mut k = 1i64;
        loop {
            t = t / &m2;
            if t.repr().exponent() + (t.repr().significand().bit_len() as isize)
                < -(p as isize + 16)
            {
                break;
            }
            let term = &t / F::from(2 * k + 1);
            if k % 2 == 1 {
                sum = sum - term;
            } else {
                sum = sum + term;
            }
            k += 1;
        }
        sum
    };
    let pi = atan_inv(5) * F::from(16) - atan_inv(239) * F::from(4);
    pi.with_precision(bits).value()
}

/// Tangent numbers T_1..T_k as exact integers.
fn tangent_numbers(kmax: usize) -> Vec<IBig> {
    let mut t: Vec<IBig> = vec![IBig::ZERO; kmax + 1];
    if kmax >= 1 {
        t[1] = IBig::ONE;
    }
    for k in 2..=kmax {
        t[k] = &t[k - 1] * IBig::from(k as u64 - 1);
    }
    for k in 2..=kmax {
        for j in k..=kmax {
            t[j] = &t[j - 1] * IBig::from((j - k) as u64) + &t[j] * IBig::from((j - k + 2) as u64);
        }
    }
    t
}

/// Stirling machinery at one precision.
struct HpCtx {
    vmin: f64,
    /// B_{2k} / (2k (2k-1)), k = 1..=K
    coeffs: Vec<F>,
    ln_sqrt_2pi: F,
    half: F,
    one: F,
}

impl HpCtx {
    fn new(bits: usize) -> Self {
        let work = bits + 64;
        let vmin = 0.45 * work as f64;
        // smallest K with (K/(pi e vmin))^(2K) <= 2^-(work+40)
        let mut k_terms = 8usize;
        while 2.0
            * k_terms as f64
            * (std::f64::consts::PI * std::f64::consts::E * vmin / k_terms as f64).log2()
            < (work + 40) as f64
        {
            k_terms += 8;
        }
        let tangents = tangent_numbers(k_terms);
        let mut coeffs = Vec::with_capacity(k_terms);
        for k in 1..=k_terms {
            // B_{2k}/(2k(2k-1)) = (-1)^{k-1} T_k / ((2k-1) 4^k (4^k - 1))
            let den =
                (((IBig::ONE << (2 * k)) - IBig::ONE) * IBig::from(2 * k as u64 - 1)) << (2 * k);
            let mut c = F::from_parts(tangents[k].clone(), 0)
                .with_precision(work)
                .value()
                / F::from_parts(den, 0).with_precision(work).value();
            if k % 2 == 0 {
                c = -c;
            }
            coeffs.push(c);
        }
        let pi = machin_pi(work);
        let ln_sqrt_2pi = (pi * F::from(2)).ln() / F::from(2);
        HpCtx {
            vmin,
            coeffs,
            ln_sqrt_2pi,
            half: fone(work) / F::from(2),
            one: fone(work),
        }
    }

    /// ln Gamma(x) for x > 0.
    fn lgamma(&self, x: &F) -> F {
        let xf = to_f64(x);
        let m = if xf < self.vmin {
            (self.vmin - xf).ceil() as usize
        } else {
            0
        };
        let mut v = x.clone();
        let mut prod: Option<F> = None;
        for _ in 0..m {
            prod = Some(match prod {
                None => v.clone(),
                Some(p) => p * &v,
            });
            v = v + &self.one;
        }
        let ln_v = v.ln();
        let v2inv = &self.one / (&v * &v);
        let mut s = (&v - &self.half) * &ln_v - &v + &self.ln_sqrt_2pi;
        let mut pw = &self.one / &v;
        for c in &self.coeffs {
            s = s + c * &pw;
            pw = &pw * &v2inv;
        }
        match prod {
            Some(p) => s - p.ln(),
            None => s,
        }
    }

    fn recip_gamma(&self, x: &F) -> F {
        (-self.lgamma(x)).exp()
    }
}

fn hp_ctx(bits: usize) -> Arc<HpCtx> {
    static CTXS: OnceLock<Mutex<HashMap<usize, Arc<HpCtx>>>> = OnceLock::new();
    let bucket = bits.next_multiple_of(256);
    let cache = CTXS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    Arc::clone(
        guard
            .entry(bucket)
            .or_insert_with(|| Arc::new(HpCtx::new(bucket))),
    )
}

/// Reciprocal-gamma table 1/Gamma(n gamma + mu), n = 0..len, at `bits`.
struct GammaTable {
    bits: usize,
    recip: Vec<F>,
}

fn build_table(params: MLParams, total: usize, bits: usize) -> GammaTable {
    let ctx = hp_ctx(bits + 64);
    let g = params.gamma;
    let gf = fp(g, bits + 64);
    let muf = fp(params.mu, bits + 64);
    // exact integer ladder step? q*gamma must be an integer in exact dyadic
    // arithmetic, not merely after f64 rounding (5 * fl(0.6) rounds to 3.0
    // but is not 3), so test the exact product's binary exponent
    let mut ladder: Option<(usize, u64)> = None;
    for q in 1..=8usize {
        let gq = &gf * F::from(q as u64);
        if gq.repr().exponent() >= 0 && g * q as f64 >= 1.0 {
            ladder = Some((q, (g * q as f64) as u64));
            break;
        }
    }
    let mut recip: Vec<F> = Vec::with_capacity(total);
    match ladder {
        Some((q, step)) => {
            for n in 0..q.min(total) {
                let x = &gf * F::from(n as u64) + &muf;
                recip.push(ctx.recip_gamma(&x));
            }
            for n in q..total {
                let x0 = &gf * F::from((n - q) as u64) + &muf;
                let mut prod = x0.clone();
                let mut xx = x0;
                for _ in 1..step {
                    xx = xx + &ctx.one;
                    prod = prod * &xx;
                }
                recip.push(&recip[n - q] / &prod);
            }
        }
        None => {
            // entries are independent Stirling evaluations; build them
            // data-parallel (this is the hot path for irrational gamma)
            recip = crate::par::map_indexed(total, |n| {
                let x = &gf * F::from(n as u64) + &muf;
                ctx.recip_gamma(&x)
            });
        }
    }
    GammaTable { bits, recip }
}

fn gamma_table(params: MLParams, total: usize, bits: usize) -> Arc<GammaTable> {
    static TABLES: OnceLock<Mutex<HashMap<(u64, u64), Arc<GammaTable>>>> = OnceLock::new();
    let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (params.gamma.to_bits(), params.mu.to_bits());
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.get(&key) {
        if t.bits >= bits && t.recip.len() >= total {
            return Arc::clone(t);
        }
    }
    let grown = match guard.get(&key) {
        Some(t) => build_table(params, total.max(t.recip.len()), bits.max(t.bits)),
        None => build_table(params, total, bits),
    };
    let arc = Arc::new(grown);
    guard.insert(key, Arc::clone(&arc));
    arc
}

/// Series sum at precision scaled to |w|^{1/gamma}. Caller guarantees the
/// argument passed the range check in [`super::ml_series`].
pub(crate) fn hp_series(params: MLParams, w: Complex64, nmax: usize) -> Complex64 {
    let rho = w.norm().powf(1.0 / params.gamma);
    let bits = ((rho * std::f64::consts::LOG2_E) as usize + 192).next_multiple_of(64);
    let table = gamma_table(params, nmax + 1, bits);
    let trunc = |x: &F| -> F { x.clone().with_precision(bits).value() };
    if w.im == 0.0 {
        let wre = fp(w.re, bits);
        let mut p = fone(bits);
        let mut sum = trunc(&table.recip[0]);
        for n in 1..=nmax {
            p = p * &wre;
            sum = sum + &p * trunc(&table.recip[n]);
        }
        Complex64::new(to_f64(&sum), 0.0)
    } else {
        let wre = fp(w.re, bits);
        let wim = fp(w.im, bits);
        let mut pre = fone(bits);
        let mut pim = F::ZERO.with_precision(bits).value();
        let mut sum_re = trunc(&table.recip[0]);
        let mut sum_im = pim.clone();
        for n in 1..=nmax {
            let nre = &pre * &wre - &pim * &wim;
            let nim = &pre * &wim + &pim * &wre;
            pre = nre;
            pim = nim;
            let r = trunc(&table.recip[n]);
            sum_re = sum_re + &pre * &r;
            sum_im = sum_im + &pim * &r;
        }
        Complex64::new(to_f64(&sum_re), to_f64(&sum_im))
    }
}

/// Reference evaluator: the power series at whatever precision the
/// argument demands. Independent of the branch logic in
/// [`super::ml_eval`]; this is what acceptance checks compare against.
#[derive(Debug, Clone, Copy)]
pub struct MlOracle {
    pub params: MLParams,
}

impl MlOracle {
    pub fn new(params: MLParams) -> Self {
        MlOracle { params }
    }

    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::Domain("non-finite argument".into()));
        }
        let nmax = super::suggested_terms(self.params, w.norm());
        super::ml_series(self.params, w, nmax)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_to_high_precision() {
        let pi = machin_pi(256);
        let reference = "3.141592653589793238462643383279502884197169399375105820974944592307816406286";
        let dec = pi.to_decimal().value().to_string();
        assert_eq!(&dec[..60], &reference[..60]);
    }

    #[test]
    fn tangent_number_values() {
        let t = tangent_numbers(6);
        let expect = [1u64, 2, 16, 272, 7936, 353792];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(t[k + 1], IBig::from(*e), "T_{}", k + 1);
        }
    }

    #[test]
    fn hp_lgamma_matches_dd() {
        let ctx = HpCtx::new(512);
        for x in [0.5f64, 1.0, 2.0, 7.3, 41.0, 400.5] {
            let hp = to_f64(&ctx.lgamma(&fp(x, 512)));
            let dd = crate::gamma::dd_lgamma(crate::dd::Dd::from_f64(x)).to_f64();
            assert!(
                (hp - dd).abs() <= 1e-13 * dd.abs().max(1.0),
                "x={x}: hp={hp}, dd={dd}"
            );
        }
    }

    #[test]
    fn hp_gamma_ladder_consistent_with_direct() {
        // gamma = 0.75 takes the ladder; compare entries against direct
        // Stirling at a few indices
        let params = MLParams::new(0.75, 0.75).unwrap();
        let table = build_table(params, 40, 512);
        let ctx = hp_ctx(512 + 64);
        for n in [0usize, 5, 17, 39] {
            let x = fp(0.75 * n as f64 + 0.75, 512 + 64);
            let direct = to_f64(&ctx.recip_gamma(&x));
            let tab = to_f64(&table.recip[n]);
            assert!(
                (direct - tab).abs() <= 1e-13 * direct.abs(),
                "n={n}: {direct} vs {tab}"
            );
        }
    }
}
