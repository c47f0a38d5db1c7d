//! Geometrically graded interval meshes.
//!
//! On (-1, 1) the nodes are x_0 = -1, x_i = -1 + sigma^{L-i+1} for
//! i = 1..L, mirrored toward +1, x_{2L+1} = 1; general intervals are the
//! affine image. Element sizes shrink like sigma^l toward both endpoints,
//! which is what resolves the boundary layers of the shifted resolvent
//! problems and the startup singularities of incompatible data.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GeometricMesh1D {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub layers: usize,
    /// strictly increasing, 2 layers + 2 entries
    pub nodes: Vec<f64>,
}

impl GeometricMesh1D {
    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Size of the boundary-layer elements, (b-a)/2 * sigma^L.
    pub fn smallest_element(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Index of the element containing x (clamped to the ends).
    pub fn locate(&self, x: f64) -> usize {
        match self
            .nodes
            .binary_search_by(|probe| probe.total_cmp(&x))
        {
            Ok(i) => i.min(self.element_count() - 1),
            Err(i) => i.saturating_sub(1).min(self.element_count() - 1),
        }
    }
}

pub fn build_mesh(a: f64, b: f64, sigma: f64, layers: usize) -> Result<GeometricMesh1D> {
    if !(a < b) {
        return Err(Error::Domain(format!("empty interval ({a}, {b})")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!("sigma must lie in (0,1), got {sigma}")));
    }
    let half = 0.5 * (b - a);
    if layers > 0 && half * sigma.powi(layers as i32) <= f64::EPSILON * (b - a) {
        return Err(Error::Range(format!(
            "sigma^L = {:e} underflows the mesh scale; use fewer layers",
            sigma.powi(layers as i32)
        )));
    }
    let mut nodes = Vec::with_capacity(2 * layers + 2);
    nodes.push(a);
    for i in 1..=layers {
        nodes.push(a + half * sigma.powi((layers - i + 1) as i32));
    }
    for j in 1..=layers {
        nodes.push(b - half * sigma.powi(j as i32));
    }
    nodes.push(b);
    debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    Ok(GeometricMesh1D {
        a,
        b,
        sigma,
        layers,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_interval_single_layer() {
        let m = build_mesh(0.0, 1.0, 0.125, 1).unwrap();
        assert_eq!(m.nodes.len(), 4);
        assert_relative_eq!(m.nodes[0], 0.0);
        assert_relative_eq!(m.nodes[1], 0.0625, max_relative = 1e-15);
        assert_relative_eq!(m.nodes[2], 0.9375, max_relative = 1e-15);
        assert_relative_eq!(m.nodes[3], 1.0);
    }

    #[test]
    fn reference_interval_two_layers() {
        // x_1 = -1 + sigma^2, x_2 = -1 + sigma
        let m = build_mesh(-1.0, 1.0, 0.5, 2).unwrap();
        let expect = [-1.0, -0.75, -0.5, 0.5, 0.75, 1.0];
        assert_eq!(m.nodes.len(), expect.len());
        for (n, e) in m.nodes.iter().zip(&expect) {
            assert_relative_eq!(n, e, max_relative = 1e-15);
        }
    }

    #[test]
    fn zero_layers_is_single_element() {
        let m = build_mesh(2.0, 5.0, 0.25, 0).unwrap();
        assert_eq!(m.nodes, vec![2.0, 5.0]);
        assert_eq!(m.element_count(), 1);
    }

    #[test]
    fn graded_size_ratios() {
        let m = build_mesh(0.0, 1.0, 0.2, 6).unwrap();
        // within the boundary layer (away from the two innermost elements)
        // adjacent sizes have ratio sigma
        for i in 1..5 {
            let s0 = m.nodes[i + 1] - m.nodes[i];
            let s1 = m.nodes[i + 2] - m.nodes[i + 1];
            if i + 2 <= 6 {
                assert_relative_eq!(s0 / s1, 0.2, max_relative = 1e-12);
            }
        }
        // innermost elements are O(1)
        let mid = m.nodes[7] - m.nodes[6];
        assert!(mid > 0.5);
    }

    #[test]
    fn underflow_guard() {
        assert!(matches!(
            build_mesh(0.0, 1.0, 0.125, 60),
            Err(Error::Range(_))
        ));
        assert!(build_mesh(1.0, 0.0, 0.5, 2).is_err());
        assert!(build_mesh(0.0, 1.0, 1.5, 2).is_err());
    }

    #[test]
    fn locate_elements() {
        let m = build_mesh(0.0, 1.0, 0.25, 2).unwrap();
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(0.03), 0);
        assert_eq!(m.locate(0.1), 1);
        assert_eq!(m.locate(0.5), 2);
        assert_eq!(m.locate(1.0), m.element_count() - 1);
    }
}
