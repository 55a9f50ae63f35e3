//! The quadratic Hamiltonian system `u' = (Ku + k) × (Au + a)`.
//!
//! The Poisson bracket on ℝ³ is
//!
//! ```text
//! {f, g}(u) = -∇C(u) · (∇f(u) × ∇g(u)),    C(u) = ½uᵀKu + uᵀk
//! ```
//!
//! and the system is the Hamiltonian flow of `H(u) = ½uᵀAu + uᵀa`.

use std::fmt;
use std::sync::Arc;

use crate::linalg3::{cross, LinalgError, Mat3, SymMat3, Vec3};

/// `q(u) = ½uᵀMu + uᵀm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm {
    pub matrix: SymMat3,
    pub linear: Vec3,
}

impl QuadraticForm {
    pub fn new(matrix: SymMat3, linear: Vec3) -> Self {
        QuadraticForm { matrix, linear }
    }

    pub fn value(&self, u: Vec3) -> f64 {
        0.5 * self.matrix.quad(u) + u.dot(&self.linear)
    }

    /// `Mu + m`.
    pub fn gradient(&self, u: Vec3) -> Vec3 {
        self.matrix.mul_vec(u) + self.linear
    }
}

/// The tuple `(K, k, A, a)`: Casimir form `(K, k)` and Hamiltonian form `(A, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticSystem {
    pub casimir: QuadraticForm,
    pub hamiltonian: QuadraticForm,
}

impl QuadraticSystem {
    /// Rejects non-finite entries.
    pub fn new(k: SymMat3, k_lin: Vec3, a: SymMat3, a_lin: Vec3) -> Result<Self, LinalgError> {
        if !(k.is_finite() && a.is_finite()) {
            return Err(LinalgError::NonFinite("system matrix"));
        }
        if !(k_lin.is_finite() && a_lin.is_finite()) {
            return Err(LinalgError::NonFinite("system vector"));
        }
        Ok(QuadraticSystem {
            casimir: QuadraticForm::new(k, k_lin),
            hamiltonian: QuadraticForm::new(a, a_lin),
        })
    }

    /// Euler's rigid body with linear controls: `K = I`, `k = 0`, `A = diag(λ)`, `a = d`,
    /// i.e. `u' = u × (Du + d)`.
    pub fn euler(lambda: [f64; 3], d: Vec3) -> Self {
        QuadraticSystem {
            casimir: QuadraticForm::new(SymMat3::identity(), Vec3::ZERO),
            hamiltonian: QuadraticForm::new(SymMat3::diag(lambda), d),
        }
    }

    pub fn k_mat(&self) -> &SymMat3 {
        &self.casimir.matrix
    }

    pub fn a_mat(&self) -> &SymMat3 {
        &self.hamiltonian.matrix
    }

    pub fn casimir(&self, u: Vec3) -> f64 {
        self.casimir.value(u)
    }

    pub fn hamiltonian(&self, u: Vec3) -> f64 {
        self.hamiltonian.value(u)
    }

    pub fn grad_casimir(&self, u: Vec3) -> Vec3 {
        self.casimir.gradient(u)
    }

    pub fn grad_hamiltonian(&self, u: Vec3) -> Vec3 {
        self.hamiltonian.gradient(u)
    }

    /// `(Ku + k) × (Au + a)`.
    pub fn vector_field(&self, u: Vec3) -> Vec3 {
        cross(self.grad_casimir(u), self.grad_hamiltonian(u))
    }

    /// `{f, g}(u) = -(Ku + k) · (∇f × ∇g)`.
    pub fn poisson_bracket(&self, f: &ScalarField, g: &ScalarField, u: Vec3) -> f64 {
        -self
            .grad_casimir(u)
            .dot(&cross(f.gradient(u), g.gradient(u)))
    }

    /// `Π_ij(u) = {x_i, x_j}(u)`. With `c = ∇C(u)` this is the cross-product
    /// matrix of `c`, so `Π ∇H = c × ∇H` and `Π c = 0`.
    pub fn structure_matrix(&self, u: Vec3) -> Mat3 {
        let c = self.grad_casimir(u);
        Mat3([[0.0, -c[2], c[1]], [c[2], 0.0, -c[0]], [-c[1], c[0], 0.0]])
    }

    /// The Casimir as a scalar field with its exact gradient.
    pub fn casimir_field(&self) -> ScalarField {
        ScalarField::quadratic(self.casimir)
    }

    pub fn hamiltonian_field(&self) -> ScalarField {
        ScalarField::quadratic(self.hamiltonian)
    }

    /// The scalar field `u ↦ {f, g}(u)`; its gradient is by finite differences.
    pub fn bracket_field(&self, f: &ScalarField, g: &ScalarField) -> ScalarField {
        let (sys, f, g) = (*self, f.clone(), g.clone());
        ScalarField::new(move |u| sys.poisson_bracket(&f, &g, u))
    }
}

type ValueFn = dyn Fn(Vec3) -> f64 + Send + Sync;
type GradFn = dyn Fn(Vec3) -> Vec3 + Send + Sync;

/// A smooth function ℝ³ → ℝ with an optional exact gradient.
///
/// Without an exact gradient, [`ScalarField::gradient`] uses central
/// differences with step `1e-5 (1 + |u|_∞)`. Supplied functions must be free
/// of side effects.
#[derive(Clone)]
pub struct ScalarField {
    value: Arc<ValueFn>,
    grad: Option<Arc<GradFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("exact_gradient", &self.grad.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(value: impl Fn(Vec3) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            value: Arc::new(value),
            grad: None,
        }
    }

    pub fn with_gradient(
        value: impl Fn(Vec3) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            value: Arc::new(value),
            grad: Some(Arc::new(grad)),
        }
    }

    pub fn quadratic(q: QuadraticForm) -> Self {
        Self::with_gradient(move |u| q.value(u), move |u| q.gradient(u))
    }

    /// The coordinate function `u ↦ u_i`.
    pub fn coordinate(i: usize) -> Self {
        Self::with_gradient(move |u| u[i], move |_| Vec3::basis(i))
    }

    /// Pointwise product; differentiated numerically.
    pub fn product(&self, other: &ScalarField) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::new(move |u| f.value(u) * g.value(u))
    }

    /// Same values, gradient forced to finite differences.
    pub fn without_gradient(&self) -> Self {
        ScalarField {
            value: self.value.clone(),
            grad: None,
        }
    }

    pub fn has_exact_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn value(&self, u: Vec3) -> f64 {
        (self.value)(u)
    }

    pub fn gradient(&self, u: Vec3) -> Vec3 {
        match &self.grad {
            Some(g) => g(u),
            None => central_difference(&*self.value, u),
        }
    }
}

/// Central-difference step at `u`.
pub fn fd_step(u: Vec3) -> f64 {
    1e-5 * (1.0 + u.norm_inf())
}

fn central_difference(f: &ValueFn, u: Vec3) -> Vec3 {
    let h = fd_step(u);
    let mut g = Vec3::ZERO;
    for i in 0..3 {
        let mut up = u;
        let mut down = u;
        up[i] += h;
        down[i] -= h;
        g[i] = (f(up) - f(down)) / (2.0 * h);
    }
    g
}
