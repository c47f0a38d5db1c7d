//! Real gamma function, in plain `f64` and in double-double precision.
//!
//! The `f64` path is a 15-term Lanczos approximation (g = 607/128) with
//! reflection for arguments below 0.5; relative accuracy is ~1e-15 away
//! from the poles. The double-double path uses the Stirling series with an
//! argument shift to x >= 30, with Bernoulli coefficients generated once
//! (small ones as exact rationals, the rest through fast-converging zeta
//! sums). Poles at non-positive integers are reported through
//! [`recip_gamma`], which returns exactly 0 there.

use crate::dd::Dd;
use std::f64::consts::PI;
use std::sync::OnceLock;

const LANCZOS_G: f64 = 4.7421875; // 607/128
const LANCZOS: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
];

/// sin(pi x) with exact zeros at integers.
pub fn sinpi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let v = if r <= 0.5 {
        (PI * r).sin()
    } else {
        (PI * (1.0 - r)).sin()
    };
    sign * v
}

fn lanczos_sum(xm1: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (xm1 + k as f64);
    }
    s
}

/// ln|Gamma(x)| for x > 0.
pub fn lgamma(x: f64) -> f64 {
    assert!(x > 0.0, "lgamma requires a positive argument");
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (xm1 + 0.5) * t.ln() - t + lanczos_sum(xm1).ln()
}

/// Gamma(x) for real x; +-inf at the poles.
pub fn gamma(x: f64) -> f64 {
    if x >= 0.5 {
        if x > 171.62 {
            return f64::INFINITY;
        }
        lgamma(x).exp()
    } else {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = sinpi(x);
        if s == 0.0 {
            return f64::INFINITY;
        }
        PI / (s * gamma(1.0 - x))
    }
}

/// 1/Gamma(x); exactly 0 at the poles (x a non-positive integer).
pub fn recip_gamma(x: f64) -> f64 {
    if x >= 0.5 {
        return (-lgamma(x)).exp();
    }
    let s = sinpi(x);
    if s == 0.0 {
        return 0.0;
    }
    s * gamma(1.0 - x) / PI
}

// ---------------------------------------------------------------------------
// double-double path
// ---------------------------------------------------------------------------

const STIRLING_XMIN: f64 = 30.0;
const STIRLING_TERMS: usize = 20;

/// Stirling coefficients B_{2k} / (2k (2k-1)), k = 1..=20, in dd.
fn stirling_coeffs() -> &'static Vec<Dd> {
    static COEFFS: OnceLock<Vec<Dd>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // exact small Bernoulli numbers as rationals
        let exact: [(f64, f64); 6] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
        ];
        let mut out = Vec::with_capacity(STIRLING_TERMS);
        for (k, (num, den)) in exact.iter().enumerate() {
            let k = k + 1;
            let b = Dd::from_f64(*num).div(Dd::from_f64(*den));
            out.push(b.div(Dd::from_f64((2 * k * (2 * k - 1)) as f64)));
        }
        // larger ones through B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}
        let two_pi = Dd::PI.mul_f64(2.0);
        for k in 7..=STIRLING_TERMS {
            let m = 2 * k;
            let mut zeta = Dd::ONE;
            let mut n = 2u64;
            loop {
                let t = Dd::from_f64(n as f64).recip().powi(m as u32);
                if t.hi < 1e-34 {
                    break;
                }
                zeta = zeta.add(t);
                n += 1;
            }
            let mut fact = Dd::ONE;
            for j in 2..=m {
                fact = fact.mul_f64(j as f64);
            }
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let b = fact
                .mul(zeta)
                .mul_f64(2.0 * sign)
                .div(two_pi.powi(m as u32));
            out.push(b.div(Dd::from_f64((m * (m - 1)) as f64)));
        }
        out
    })
}

/// ln Gamma(x) in double-double precision, x > 0.
pub fn dd_lgamma(x: Dd) -> Dd {
    assert!(x.hi > 0.0, "dd_lgamma requires a positive argument");
    let mut shift = Dd::ZERO;
    let mut y = x;
    // Gamma(x) = Gamma(x+m) / (x (x+1) ... (x+m-1))
    while y.hi < STIRLING_XMIN {
        shift = shift.add(y.ln());
        y = y.add_f64(1.0);
    }
    let ln_y = y.ln();
    let mut s = y
        .sub(Dd::from_f64(0.5))
        .mul(ln_y)
        .sub(y)
        .add(Dd::PI.mul_f64(2.0).ln().mul_f64(0.5));
    let inv_y2 = y.mul(y).recip();
    let mut pow = y.recip();
    for c in stirling_coeffs() {
        s = s.add(c.mul(pow));
        pow = pow.mul(inv_y2);
    }
    s.sub(shift)
}

/// Gamma(x) in double-double precision, x > 0 (moderate x; overflows dd
/// range above ~170 just like f64).
pub fn dd_gamma(x: Dd) -> Dd {
    dd_lgamma(x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(2.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(-1.5), 4.0 * PI.sqrt() / 3.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(20.0), 1.21645100408832e17, max_relative = 1e-13);
    }

    #[test]
    fn recip_gamma_poles() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-1.0), 0.0);
        assert_eq!(recip_gamma(-7.0), 0.0);
        assert_relative_eq!(recip_gamma(3.0), 0.5, max_relative = 1e-14);
        assert_relative_eq!(recip_gamma(-0.5) * gamma(-0.5), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn lgamma_matches_gamma() {
        for &x in &[0.6, 1.3, 4.5, 11.25, 60.0] {
            assert_relative_eq!(lgamma(x).exp(), gamma(x), max_relative = 1e-13);
        }
    }

    #[test]
    fn dd_lgamma_integers_and_half_integers() {
        // ln Gamma(n) against an exact dd factorial
        let mut fact = Dd::ONE;
        for n in 2..25u32 {
            fact = fact.mul_f64(f64::from(n - 1));
            let lg = dd_lgamma(Dd::from_f64(f64::from(n)));
            let diff = lg.sub(fact.ln()).to_f64().abs();
            assert!(diff < 1e-28 * fact.ln().to_f64().max(1.0), "n={n}, diff={diff:.3e}");
        }
        // Gamma(10.5) = 17!! / 2^9 * sqrt(pi) ... build exactly:
        // Gamma(1/2 + m) = (2m-1)!! / 2^m * sqrt(pi)
        let m = 10;
        let mut dfact = Dd::ONE;
        let mut j = 1.0;
        while j <= 2.0 * f64::from(m) - 1.0 {
            dfact = dfact.mul_f64(j);
            j += 2.0;
        }
        let exact = dfact
            .mul(Dd::PI.sqrt())
            .mul_f64(f64::powi(2.0, -m));
        let lg = dd_lgamma(Dd::from_f64(10.5));
        assert!(lg.sub(exact.ln()).to_f64().abs() < 1e-28);
    }

    #[test]
    fn dd_matches_f64_path() {
        for &x in &[0.31, 0.9, 2.5, 7.75, 33.0, 150.0] {
            let a = dd_lgamma(Dd::from_f64(x)).to_f64();
            let b = lgamma(x);
            assert_relative_eq!(a, b, max_relative = 5e-14);
        }
    }

    #[test]
    fn duplication_identity_dd() {
        // Gamma(x) Gamma(x+1/2) = sqrt(pi) 2^(1-2x) Gamma(2x)
        for &x in &[0.7, 1.9, 5.3] {
            let lhs = dd_gamma(Dd::from_f64(x)).mul(dd_gamma(Dd::from_f64(x + 0.5)));
            let pow = Dd::LN_2.mul(Dd::from_f64(1.0 - 2.0 * x)).exp();
            let rhs = Dd::PI.sqrt().mul(pow).mul(dd_gamma(Dd::from_f64(2.0 * x)));
            let rel = lhs.sub(rhs).to_f64().abs() / rhs.to_f64().abs();
            assert!(rel < 1e-28, "x={x}, rel={rel:.3e}");
        }
    }
}
