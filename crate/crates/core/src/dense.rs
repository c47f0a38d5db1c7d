//! Small dense symmetric kernels: Cholesky solves for local projection
//! systems and a cyclic Jacobi eigensolver for the discrete generalized
//! eigenproblem. Sizes here are O(p) or O(ndof), a few hundred at most.

use crate::{Error, Result};

/// Cholesky factor (lower) of an SPD matrix, in place.
pub(crate) fn cholesky(a: &mut Vec<Vec<f64>>) -> Result<()> {
    let n = a.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if d <= 0.0 {
            return Err(Error::Assembly(format!(
                "matrix not positive definite at column {j} (d = {d:e})"
            )));
        }
        a[j][j] = d.sqrt();
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / a[j][j];
        }
    }
    Ok(())
}

/// Solve L L^T x = b given the Cholesky factor in the lower triangle.
pub(crate) fn cholesky_solve(l: &[Vec<f64>], b: &mut [f64]) {
    let n = b.len();
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * b[k];
        }
        b[i] = s / l[i][i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k][i] * b[k];
        }
        b[i] = s / l[i][i];
    }
}

/// Solve an SPD system destructively.
pub(crate) fn solve_spd(mut a: Vec<Vec<f64>>, b: &mut [f64]) -> Result<()> {
    cholesky(&mut a)?;
    cholesky_solve(&a, b);
    Ok(())
}

/// Cyclic Jacobi eigensolver for a dense symmetric positive definite
/// matrix, with the relative rotation criterion |a_pq| > tol sqrt(a_pp a_qq)
/// so small eigenvalues keep relative accuracy even when the spectrum
/// spans many decades (graded meshes reach 1e10 and beyond). Returns
/// eigenvalues ascending and the matching orthonormal eigenvectors as
/// rows of the second result.
pub(crate) fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let tol = 1e-14;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let scale = (a[p][p].abs() * a[q][q].abs()).sqrt().max(1e-300);
                off = off.max(a[p][q].abs() / scale);
            }
        }
        if off <= tol {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
            let lambdas: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
            let vectors: Vec<Vec<f64>> = order
                .iter()
                .map(|&i| (0..n).map(|r| v[r][i]).collect())
                .collect();
            return Ok((lambdas, vectors));
        }
        for p in 0..n {
            for q in p + 1..n {
                let scale = (a[p][p].abs() * a[q][q].abs()).sqrt().max(1e-300);
                if a[p][q].abs() <= tol * 1e-2 * scale {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::EigenConvergence(
        "Jacobi sweeps exhausted before off-diagonal tolerance".into(),
    ))
}
