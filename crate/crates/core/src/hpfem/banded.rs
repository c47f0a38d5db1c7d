//! Complex banded LU with partial pivoting.
//!
//! LAPACK-style band storage: entry (i, j) lives at row kl + ku + i - j of
//! an (2 kl + ku + 1) x n array; the top kl rows hold pivoting fill.
//! Bandwidths here are the FEM half-bandwidth p on both sides, so systems
//! stay O(n p^2) to factor and O(n p) to solve.

use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    /// (2 kl + ku + 1) x n, row-major; see module docs for the layout.
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandedMatrix {
            n,
            kl,
            ku,
            data: vec![Complex64::new(0.0, 0.0); (2 * kl + ku + 1) * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) * self.n + j
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(self.in_band(i, j), "({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(self.in_band(i, j), "({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..=hi {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// In-place LU with partial pivoting; consumes the matrix.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let ku_eff = self.kl + self.ku; // fill widens the upper band
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = 0usize;
            let mut best = self.data[self.idx(j, j)].norm_sqr();
            for t in 1..=km {
                let cand = self.data[self.idx(j + t, j)].norm_sqr();
                if cand > best {
                    best = cand;
                    p = t;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularSystem {
                    node_index: usize::MAX,
                    detail: format!("zero pivot at column {j}"),
                });
            }
            ipiv[j] = j + p;
            if p != 0 {
                let hi = (j + ku_eff).min(n - 1);
                for c in j..=hi {
                    let a = self.idx(j, c);
                    let b = self.idx(j + p, c);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(j, j)];
            for t in 1..=km {
                let m = self.data[self.idx(j + t, j)] / pivot;
                let k = self.idx(j + t, j);
                self.data[k] = m;
                let hi = (j + ku_eff).min(n - 1);
                for c in (j + 1)..=hi {
                    let u = self.data[self.idx(j, c)];
                    let k = self.idx(j + t, c);
                    self.data[k] -= m * u;
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku: self.ku,
            data: self.data,
            ipiv,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) * self.n + j
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let ku_eff = self.kl + self.ku;
        // forward: apply P and L^-1
        for j in 0..n {
            if self.ipiv[j] != j {
                b.swap(j, self.ipiv[j]);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            for t in 1..=km {
                let m = self.data[self.idx(j + t, j)];
                b[j + t] -= m * bj;
            }
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let hi = (i + ku_eff).min(n - 1);
            let mut acc = b[i];
            for j in (i + 1)..=hi {
                acc -= self.data[self.idx(i, j)] * b[j];
            }
            b[i] = acc / self.data[self.idx(i, i)];
        }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
