//! Second-order graded-mesh finite difference solver for the tempered
//! time-fractional advection-dispersion equation
//!
//! ```text
//!     u_t + D^{α,λ} u = u_xx - u_x + f(x, t),   0 < x < L,  0 < t <= T,
//!     u(0, t) = u(L, t) = 0,   u(x, 0) = φ(x),
//! ```
//!
//! where `D^{α,λ}` is the tempered Caputo derivative. The history part of the
//! fractional operator is compressed with a sum-of-exponentials (SOE)
//! approximation of the kernel `t^(-1-α)`, which makes each time step cost
//! `O(M·N_exp)` instead of `O(M·n)`. A direct exact-kernel (L1) operator is
//! kept alongside as a baseline and oracle.

pub mod error;
pub mod gamma;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod soe;
pub mod solver;
pub mod tempered;

pub use error::{Error, Result};
pub use gamma::gamma_fn;
pub use mesh::{graded_mesh, soe_interval, uniform_grid, SpatialGrid, TemporalMesh};
pub use problems::{case, h1_norm, l2_norm, max_error, order_table, ErrorRow, ManufacturedCase, Norm};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use soe::{build_soe, certify_soe, eval_soe, CertReport, SoeApprox};
pub use solver::{run, stability_probe, Method, Problem, RawProblem, SchemeConfig, Trajectory};
