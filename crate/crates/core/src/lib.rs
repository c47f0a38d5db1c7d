//! Solver library for the space-time fractional parabolic problem
//!
//! ```text
//!   d^gamma/dt^gamma u + L^beta u = f   on (a,b) x (0,T],
//!   u = 0 on the boundary,  u(0) = u0,
//! ```
//!
//! with `L u = -(A u')' + c u`, a Caputo derivative of order `gamma` in
//! (0,1] and a spectral fractional power `beta` in (0,1].
//!
//! The discretization combines three exponentially convergent layers:
//!
//! * a sinc quadrature of the Riesz-Dunford contour integral over the
//!   hyperbola `z(y) = b(cosh y + i sinh y)` ([`contour`]),
//! * complex-shifted resolvent solves `(z - L)^{-1}` by hp finite elements
//!   on geometrically graded interval meshes ([`hpfem`]),
//! * a composite Gauss rule on geometric time partitions for the
//!   convolution with the right-hand side ([`timequad`]).
//!
//! The scalar engine behind everything is the Mittag-Leffler function
//! ([`mlf`]), evaluated in the sector away from the positive real axis.
//! Reference solutions and spectrally weighted norms live in [`spectral`];
//! the fully assembled scheme is in [`solver`].
//!
//! With the default `parallel` feature, independent contour-node work
//! (factorizations, back-substitutions) runs on rayon; summation orders are
//! fixed either way, so results are bit-identical across thread counts.

pub mod compare;
pub mod contour;
pub mod dd;
mod dense;
mod error;
pub mod gamma;
pub mod hpfem;
pub mod mlf;
mod par;
pub mod solver;
pub mod spectral;
pub mod timequad;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;

pub use num_complex::Complex64;
