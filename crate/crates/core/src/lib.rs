//! Three-dimensional quadratic Hamiltonian systems of the form
//!
//! ```text
//! u' = (K u + k) × (A u + a)
//! ```
//!
//! with `K`, `A` real symmetric 3×3 matrices. The crate provides the
//! Lie–Poisson bracket generated by the Casimir `C(u) = ½uᵀKu + uᵀk`,
//! the orthogonal normal form of the system when `A` and `K` commute,
//! a fixed-step RK4 integrator with conservation monitoring, and the
//! `quadham` command-line front-end.

pub mod cli;
pub mod hamsys;
pub mod integrate;
pub mod linalg3;
pub mod normalform;

pub use hamsys::{QuadraticForm, QuadraticSystem, ScalarField};
pub use integrate::{compare_with_normal_form, rk4_step, simulate, IntegrateError, Trajectory};
pub use linalg3::{DiagMat3, LinalgError, Mat3, OrthoMat3, SymMat3, Vec3};
pub use normalform::{definite_combination, normal_form, normal_rhs_coordinates, NormalForm};
