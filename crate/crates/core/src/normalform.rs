//! Orthogonal normal form of a commuting-pair system.
//!
//! When `AK = KA` there is an orthogonal `R` diagonalizing both matrices, and
//! the substitution `u = det(R) R v` turns
//!
//! ```text
//! u' = (Ku + k) × (Au + a)
//! ```
//!
//! into
//!
//! ```text
//! v' = (D_K v + k̂) × (D_A v + â),   k̂ = det(R) Rᵀk,   â = det(R) Rᵀa
//! ```
//!
//! with `D_K = RᵀKR` and `D_A = RᵀAR` diagonal. The `det(R)` factor comes from
//! `(Ru) × (Rv) = det(R) R (u × v)` for orthogonal `R`.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::hamsys::{QuadraticForm, QuadraticSystem};
use crate::linalg3::{
    commutator_bound, commutator_norm, jacobi_eig, simultaneous_diagonalize, DiagMat3, LinalgError,
    OrthoMat3, SymMat3, Vec3,
};

/// Default commutativity tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Number of θ samples in the definiteness scan.
pub const SCAN_SAMPLES: usize = 720;

/// Smallest margin `λ_min(αA + βK)` accepted for a definiteness witness.
pub const WITNESS_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalFormError {
    #[error(
        "A and K do not commute: |AK - KA|_F = {norm:e} exceeds {bound:e} (tolerance {tol:e}); \
         no orthogonal normal form exists. If some αA + βK is definite the system is still \
         affinely equivalent to Euler's equations with linear controls, which this tool does not construct"
    )]
    NotCommuting { norm: f64, bound: f64, tol: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `(R, det R, D_K, D_A, k̂, â)` for one commuting-pair system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub rotation: OrthoMat3,
    /// Kept explicitly so every formula stays valid for `det R = -1`.
    pub det_r: f64,
    pub d_k: DiagMat3,
    pub d_a: DiagMat3,
    pub k_hat: Vec3,
    pub a_hat: Vec3,
}

impl NormalForm {
    /// Normal-form data for an arbitrary orthogonal `r` that is assumed to
    /// diagonalize both matrices of `sys`. Only the diagonals of `RᵀKR` and
    /// `RᵀAR` are kept.
    pub fn from_rotation(sys: &QuadraticSystem, r: OrthoMat3) -> Self {
        let det_r = r.det();
        NormalForm {
            rotation: r,
            det_r,
            d_k: DiagMat3(sys.k_mat().congruence(r.as_mat()).diagonal()),
            d_a: DiagMat3(sys.a_mat().congruence(r.as_mat()).diagonal()),
            k_hat: r.tr_mul_vec(sys.casimir.linear).scale(det_r),
            a_hat: r.tr_mul_vec(sys.hamiltonian.linear).scale(det_r),
        }
    }

    /// `v = det(R) Rᵀ u`.
    pub fn to_normal(&self, u: Vec3) -> Vec3 {
        self.rotation.tr_mul_vec(u).scale(self.det_r)
    }

    /// `u = det(R) R v`.
    pub fn from_normal(&self, v: Vec3) -> Vec3 {
        self.rotation.mul_vec(v).scale(self.det_r)
    }

    /// The diagonal system `(D_K, k̂, D_A, â)`.
    pub fn system(&self) -> QuadraticSystem {
        QuadraticSystem {
            casimir: QuadraticForm::new(self.d_k.to_sym(), self.k_hat),
            hamiltonian: QuadraticForm::new(self.d_a.to_sym(), self.a_hat),
        }
    }

    pub fn rhs(&self, v: Vec3) -> Vec3 {
        normal_rhs_coordinates(&self.d_k, &self.d_a, self.k_hat, self.a_hat, v)
    }
}

/// Computes the canonical normal form of `sys`.
///
/// Fails with [`NormalFormError::NotCommuting`] when
/// `|AK - KA|_F > tol (1 + |A|_F)(1 + |K|_F)`.
pub fn normal_form(sys: &QuadraticSystem, tol: f64) -> Result<NormalForm, NormalFormError> {
    let (a, k) = (sys.a_mat(), sys.k_mat());
    let (r, _, _) = simultaneous_diagonalize(a, k, tol).map_err(|e| match e {
        LinalgError::NotCommuting { norm, bound } => {
            NormalFormError::NotCommuting { norm, bound, tol }
        }
        other => NormalFormError::Linalg(other),
    })?;
    Ok(NormalForm::from_rotation(sys, r))
}

/// Commutator norm and the bound it is tested against.
pub fn commutativity(sys: &QuadraticSystem, tol: f64) -> (f64, f64) {
    (
        commutator_norm(sys.a_mat(), sys.k_mat()),
        commutator_bound(sys.a_mat(), sys.k_mat(), tol),
    )
}

/// Right-hand side of the diagonal system written out per coordinate, with
/// `D_K = diag(K1, K2, K3)`, `D_A = diag(A1, A2, A3)`, `k̂ = (k1, k2, k3)`,
/// `â = (a1, a2, a3)`:
///
/// ```text
/// x1' = (K2A3 - K3A2) x2x3 + (K2a3 - k3A2) x2 + (k2A3 - K3a2) x3 + k2a3 - k3a2
/// x2' = (K3A1 - K1A3) x1x3 + (k3A1 - K1a3) x1 + (K3a1 - k1A3) x3 + k3a1 - k1a3
/// x3' = (K1A2 - K2A1) x1x2 + (K1a2 - k2A1) x1 + (k1A2 - K2a1) x2 + k1a2 - k2a1
/// ```
pub fn normal_rhs_coordinates(
    d_k: &DiagMat3,
    d_a: &DiagMat3,
    k_hat: Vec3,
    a_hat: Vec3,
    x: Vec3,
) -> Vec3 {
    let [ck1, ck2, ck3] = d_k.0;
    let [ca1, ca2, ca3] = d_a.0;
    let [k1, k2, k3] = k_hat.0;
    let [a1, a2, a3] = a_hat.0;
    let [x1, x2, x3] = x.0;
    Vec3([
        (ck2 * ca3 - ck3 * ca2) * x2 * x3
            + (ck2 * a3 - k3 * ca2) * x2
            + (k2 * ca3 - ck3 * a2) * x3
            + k2 * a3
            - k3 * a2,
        (ck3 * ca1 - ck1 * ca3) * x1 * x3
            + (k3 * ca1 - ck1 * a3) * x1
            + (ck3 * a1 - k1 * ca3) * x3
            + k3 * a1
            - k1 * a3,
        (ck1 * ca2 - ck2 * ca1) * x1 * x2
            + (ck1 * a2 - k2 * ca1) * x1
            + (k1 * ca2 - ck2 * a1) * x2
            + k1 * a2
            - k2 * a1,
    ])
}

fn min_eigenvalue(a: &SymMat3, k: &SymMat3, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    jacobi_eig(&a.combine(c, k, s)).map_or(f64::NEG_INFINITY, |(l, _)| l[0])
}

/// Searches for `(α, β)` with `αA + βK` positive definite.
///
/// By homogeneity only the unit circle `(α, β) = (cos θ, sin θ)` is scanned,
/// which also covers negative-definite combinations through their antipodes.
/// `θ ↦ λ_min(cos θ A + sin θ K)` is Lipschitz with constant at most
/// `|A|_F + |K|_F =: L`, so between samples `Δ` apart the function can exceed
/// the nearer sample by at most `LΔ/2`. Every sampled local maximum above
/// `-LΔ/2` is refined by golden-section search over its two neighbouring cells;
/// the best refined point is returned if its margin exceeds `1e-12`.
pub fn definite_combination(a: &SymMat3, k: &SymMat3) -> Option<(f64, f64)> {
    let n = SCAN_SAMPLES;
    let step = TAU / n as f64;
    let slack = 0.5 * (a.frobenius() + k.frobenius()) * step;

    let samples: Vec<f64> = (0..n)
        .map(|i| min_eigenvalue(a, k, i as f64 * step))
        .collect();

    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = samples[i];
            v > -slack && v >= samples[(i + n - 1) % n] && v >= samples[(i + 1) % n]
        })
        .collect();
    candidates.sort_by(|&i, &j| samples[j].total_cmp(&samples[i]));
    // a positive sample is already a witness; only its margin needs polishing
    let limit = if candidates.first().is_some_and(|&i| samples[i] > 0.0) {
        1
    } else {
        8
    };
    candidates.truncate(limit);

    let mut best: Option<(f64, f64)> = None;
    for i in candidates {
        let center = i as f64 * step;
        let refined = golden_section_max(|t| min_eigenvalue(a, k, t), center - step, center + step);
        for (theta, value) in [(center, samples[i]), refined] {
            if best.is_none_or(|(_, b)| value > b) {
                best = Some((theta, value));
            }
        }
    }

    match best {
        Some((theta, margin)) if margin > WITNESS_MARGIN => Some((theta.cos(), theta.sin())),
        _ => None,
    }
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
