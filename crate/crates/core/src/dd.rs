//! Double-double arithmetic (~31 significant digits).
//!
//! An unevaluated sum `hi + lo` of two `f64`s with `|lo| <= ulp(hi)/2`.
//! Used by the Mittag-Leffler series where plain `f64` loses too many
//! digits to cancellation, and by the Stirling gamma evaluation backing it.

use std::f64::consts;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

pub const DD_EPS: f64 = 4.93e-32; // 2^-104

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi and ln(2) to double-double precision.
    pub const PI: Dd = Dd {
        hi: consts::PI,
        lo: 1.224646799147353e-16,
    };
    pub const LN_2: Dd = Dd {
        hi: consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, rhs: f64) -> Dd {
        let (s, e) = two_sum(self.hi, rhs);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        let e = e + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        Dd::new(q1, q2).add_f64(q3)
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // one Newton step on a f64 seed doubles the accurate digits
        let s = self.hi.sqrt();
        let x = Dd::from_f64(1.0 / s);
        let half = self.mul(x);
        let err = self.sub(half.mul(half));
        half.add(err.mul(x).mul_f64(0.5))
    }

    /// exp(x) via argument reduction against ln 2 and a Taylor tail.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -740.0 {
            return Dd::ZERO;
        }
        let n = (self.hi / consts::LN_2).round();
        let r = self.sub(Dd::LN_2.mul_f64(n));
        // |r| <= ln2/2; plain Taylor reaches dd precision in ~30 terms
        let mut term = r;
        let mut sum = Dd::ONE.add(r);
        for k in 2..40 {
            term = term.mul(r).div(Dd::from_f64(k as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
        }
        // scale by 2^n exactly
        let scale = f64::powi(2.0, n as i32);
        sum.mul_f64(scale)
    }

    /// ln(x) by one Newton correction of the f64 logarithm.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "dd ln of non-positive value");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            // y <- y + x*exp(-y) - 1
            let e = y.neg().exp();
            y = y.add(self.mul(e)).add_f64(-1.0);
        }
        y
    }

    pub fn powi(self, mut n: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn from_f64(re: f64, im: f64) -> Cdd {
        Cdd {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    #[inline]
    pub fn add(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    #[inline]
    pub fn mul(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    #[inline]
    pub fn abs_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    #[inline]
    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_mul_carry_below_f64() {
        let a = Dd::from_f64(1.0).add_f64(1e-25);
        let b = a.add_f64(-1.0);
        assert!((b.to_f64() - 1e-25).abs() < 1e-40);
        let c = Dd::from_f64(1e8).add_f64(1e-9);
        let d = c.mul(c);
        // (1e8 + 1e-9)^2 = 1e16 + 2*1e-1 + 1e-18
        assert!((d.hi - 1e16) == 0.2_f64.mul_add(0.0, d.hi - 1e16));
        assert!((d.to_f64() - (1e16 + 0.2)).abs() < 1e-2);
    }

    #[test]
    fn div_recovers_product() {
        let a = Dd::from_f64(3.0).sqrt();
        let b = Dd::from_f64(7.0).sqrt();
        let q = a.mul(b).div(b);
        assert!((q.sub(a)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Dd::from_f64(2.0);
        let s = x.sqrt();
        let back = s.mul(s).sub(x);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[0.3, 1.0, 2.5, 10.0, 43.7, 203.4] {
            let e = Dd::from_f64(x).exp();
            let l = e.ln();
            assert!(
                (l.to_f64() - x).abs() < 3e-30 * x.max(1.0),
                "roundtrip failed at {x}: {}",
                l.to_f64()
            );
        }
        // exp(1) against the known expansion of e
        let e1 = Dd::from_f64(1.0).exp();
        assert!((e1.hi - std::f64::consts::E).abs() < 1e-15);
        assert!((e1.to_f64() - std::f64::consts::E).abs() < 5e-16);
    }

    #[test]
    fn ln2_matches_constant() {
        let l = Dd::from_f64(2.0).ln();
        assert!(l.sub(Dd::LN_2).to_f64().abs() < 1e-31);
    }

    #[test]
    fn complex_mul_matches_f64() {
        let a = Cdd::from_f64(1.25, -0.5);
        let b = Cdd::from_f64(-2.0, 0.75);
        let p = a.mul(b);
        let pa = num_complex::Complex64::new(1.25, -0.5) * num_complex::Complex64::new(-2.0, 0.75);
        assert!((p.to_c64() - pa).norm() < 1e-15);
    }
}
