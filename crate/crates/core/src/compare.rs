//! Cross-mesh comparison helpers.
//!
//! Errors between functions living on different geometric meshes (or
//! against closed forms) integrate over the union of both break sets, so
//! Gauss panels never straddle a derivative jump of either operand.

use crate::hpfem::{FemFunction, GeometricMesh1D, HpSpace1D, Matrices};
use crate::timequad::gauss_rule;
use crate::Result;
use num_complex::Complex64;
use std::sync::Arc;

/// Sorted union of element boundaries (deduplicated to machine scale).
pub fn merged_breakpoints(meshes: &[&GeometricMesh1D]) -> Vec<f64> {
    let mut pts: Vec<f64> = meshes.iter().flat_map(|m| m.nodes.iter().copied()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

/// Integral of f over the merged partition with `pts` Gauss points per cell.
pub fn integrate_merged<F: Fn(f64) -> f64>(breaks: &[f64], pts: usize, f: F) -> f64 {
    let rule = gauss_rule(pts.saturating_sub(1));
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let jac = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[0] + w[1]);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            acc += rule.weights[q] * jac * f(mid + jac * xi);
        }
    }
    acc
}

/// L2 distance between two pointwise-evaluable functions over the merged
/// partition of the given meshes.
pub fn l2_distance<F, G>(meshes: &[&GeometricMesh1D], pts: usize, f: F, g: G) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let breaks = merged_breakpoints(meshes);
    integrate_merged(&breaks, pts, |x| {
        let d = f(x) - g(x);
        d * d
    })
    .max(0.0)
    .sqrt()
}

/// L2 projection of a function onto a space, with load integration over
/// the union of the target mesh and extra break points (for piecewise
/// sources from another mesh).
pub fn project_function<F: Fn(f64) -> f64>(
    space: &Arc<HpSpace1D>,
    mats: &Matrices,
    extra_breaks: &[f64],
    f: F,
) -> Result<FemFunction> {
    let p = space.degree;
    let rule = gauss_rule(p + 7);
    let mut load = vec![0.0; space.ndof];
    for e in 0..space.mesh.element_count() {
        let (xl, xr) = space.mesh.element(e);
        // sub-panels at the foreign break points inside this element
        let mut cuts = vec![xl];
        for &b in extra_breaks {
            if b > xl + 1e-14 && b < xr - 1e-14 {
                cuts.push(b);
            }
        }
        cuts.push(xr);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let jac = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[0] + w[1]);
            for (q, &xi) in rule.nodes.iter().enumerate() {
                let x = mid + jac * xi;
                let xi_el = 2.0 * (x - xl) / (xr - xl) - 1.0;
                let (vals, _) = crate::hpfem::shape_values(p, xi_el);
                let wq = rule.weights[q] * jac * f(x);
                for (l, v) in vals.iter().enumerate() {
                    if let Some(gdof) = space.global_dof(e, l) {
                        load[gdof] += wq * v;
                    }
                }
            }
        }
    }
    // mass solve
    let zero = crate::hpfem::RealBanded::zeros(space.ndof, space.half_bandwidth());
    let m_only = Matrices {
        stiff: zero.clone(),
        massc: zero.clone(),
        mass: mats.mass.clone(),
        unit_stiff: zero,
    };
    let loadc: Vec<Complex64> = load.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    crate::hpfem::resolvent_solve(space, &m_only, Complex64::new(1.0, 0.0), &loadc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpfem::{assemble, build_mesh, Coefficients1D};
    use approx::assert_relative_eq;

    #[test]
    fn merged_partition_integrates_piecewise() {
        let m1 = build_mesh(0.0, 1.0, 0.25, 2).unwrap();
        let m2 = build_mesh(0.0, 1.0, 0.5, 3).unwrap();
        let breaks = merged_breakpoints(&[&m1, &m2]);
        // |x - 0.25| has a kink at an m2 node
        assert!(breaks.iter().any(|&b| (b - 0.25).abs() < 1e-15));
        let v = integrate_merged(&breaks, 6, |x| (x - 0.25).abs());
        assert_relative_eq!(v, 0.3125, max_relative = 1e-13);
    }

    #[test]
    fn cross_mesh_projection_recovers_member_functions() {
        let src_mesh = build_mesh(0.0, 1.0, 0.125, 3).unwrap();
        let src_space = Arc::new(crate::hpfem::HpSpace1D::new(src_mesh, 4).unwrap());
        let src_mats = assemble(&src_space, &Coefficients1D::constant(1.0, 0.0)).unwrap();
        let src = project_function(&src_space, &src_mats, &[], |x| x * (1.0 - x)).unwrap();
        // project the source-space function onto a different mesh and back
        let dst_mesh = build_mesh(0.0, 1.0, 0.2, 5).unwrap();
        let dst_space = Arc::new(crate::hpfem::HpSpace1D::new(dst_mesh, 5).unwrap());
        let dst_mats = assemble(&dst_space, &Coefficients1D::constant(1.0, 0.0)).unwrap();
        let moved = project_function(
            &dst_space,
            &dst_mats,
            &src_space.mesh.nodes,
            |x| src.eval_real(x),
        )
        .unwrap();
        let d = l2_distance(
            &[&src_space.mesh, &dst_space.mesh],
            12,
            |x| src.eval_real(x),
            |x| moved.eval_real(x),
        );
        // x(1-x) is a polynomial in both spaces: transfers exactly
        assert!(d < 1e-12, "transfer error {d:.3e}");
    }
}
