//! Boundary-value problems for the ∂̄ operator on bounded simply connected
//! Lipschitz domains in the plane.
//!
//! Holomorphic solutions are represented through Cauchy integrals of
//! boundary data sampled on a discretized curve:
//!
//! * [`geometry`] builds positively oriented boundary curves (disks, polygons,
//!   trigonometric curves) and interior cone samples;
//! * [`boundary_fn`] holds sampled boundary functions with their norms,
//!   tangential derivatives and arc primitives;
//! * [`cauchy`] evaluates Cauchy transforms inside the domain and extracts
//!   non-tangential boundary traces;
//! * [`solvers`] implements the Dirichlet, regularity, Neumann and Robin
//!   solvers together with the data-space membership tests;
//! * [`verify`] provides manufactured holomorphic solutions, convergence
//!   studies and the Robin non-uniqueness demonstration.

pub mod boundary_fn;
pub mod cauchy;
mod error;
pub mod geometry;
pub mod solvers;
mod spectral;
pub mod verify;

pub use boundary_fn::{BoundaryFunction, IntegralKind};
pub use cauchy::{cauchy_interior, cauchy_trace, ntm_estimate, EvalRule, HolomorphicEvaluator, TraceMethod};
pub use error::{Error, Result};
pub use geometry::{make_curve, ArcSegment, BoundaryCurve, ConeConfig, DomainSpec, Shape};
pub use num_complex::Complex64;
pub use solvers::{
    membership, robin_transform, solve_dirichlet, solve_neumann, solve_regularity, solve_robin,
    ProblemData, ProblemKind, RobinCoefficient, SolveConfig, SolveReport, Verdict,
};
