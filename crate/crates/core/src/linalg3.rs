//! Fixed-size 3D linear algebra.
//!
//! Vectors, general 3×3 matrices, and three structured wrappers: symmetric
//! (`SymMat3`), orthogonal (`OrthoMat3`) and diagonal (`DiagMat3`). The
//! eigen-machinery is a cyclic Jacobi solver plus the two-stage simultaneous
//! diagonalization of a commuting symmetric pair.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use thiserror::Error;

/// Relative asymmetry accepted by [`SymMat3::from_mat`] before rejecting.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;
/// Orthogonality tolerance for [`OrthoMat3`].
pub const ORTHO_TOLERANCE: f64 = 1e-12;
/// Relative gap below which eigenvalues of `K` are treated as one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;
/// Sweep budget of the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not symmetric: asymmetry {residual:e} exceeds {limit:e}")]
    Asymmetric { residual: f64, limit: f64 },
    #[error("matrix is not orthogonal: |RᵀR - I|_F = {residual:e}")]
    NotOrthogonal { residual: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("matrices do not commute: |AK - KA|_F = {norm:e} exceeds {bound:e}")]
    NotCommuting { norm: f64, bound: f64 },
}

/// A real 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Vec3([x1, x2, x3])
    }

    /// Unit basis vector `e_{i+1}`.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        Vec3(v)
    }

    /// Builds a vector from a slice of exactly three finite values.
    pub fn checked(values: &[f64]) -> Result<Self, LinalgError> {
        match values {
            [a, b, c] if values.iter().all(|x| x.is_finite()) => Ok(Vec3::new(*a, *b, *c)),
            _ => Err(LinalgError::NonFinite("vector")),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        cross(*self, *other)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3(self.0.map(|x| x * s))
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3([self[0] + rhs[0], self[1] + rhs[1], self[2] + rhs[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3([self[0] - rhs[0], self[1] - rhs[1], self[2] - rhs[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3(self.0.map(|x| -x))
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs.scale(self)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3(v)
    }
}

/// Cross product `u × v`.
pub fn cross(u: Vec3, v: Vec3) -> Vec3 {
    Vec3([
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ])
}

/// The bracket `u ×_K v = K (u × v)` of the Lie algebra `(ℝ³, ×_K)`.
pub fn cross_k(k: &SymMat3, u: Vec3, v: Vec3) -> Vec3 {
    k.mul_vec(cross(u, v))
}

/// A general 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_diag(d: [f64; 3]) -> Self {
        let mut m = Mat3::ZERO;
        for (i, x) in d.into_iter().enumerate() {
            m.0[i][i] = x;
        }
        m
    }

    /// Matrix whose columns are `c0, c1, c2`.
    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        let mut m = Mat3::ZERO;
        for (j, c) in [c0, c1, c2].iter().enumerate() {
            for i in 0..3 {
                m.0[i][j] = c[i];
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn set_col(&mut self, j: usize, c: Vec3) {
        for i in 0..3 {
            self.0[i][j] = c[i];
        }
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3([
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    s += self.0[i][j] * self.0[i][j];
                }
            }
        }
        s.sqrt()
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.0[0][0], self.0[1][1], self.0[2][2]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = (0..3).map(|l| self.0[i][l] * rhs.0[l][j]).sum();
            }
        }
        out
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.mul_vec(rhs)
    }
}

impl Mul<Mat3> for f64 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        Mat3(rhs.0.map(|row| row.map(|x| self * x)))
    }
}

/// A real symmetric 3×3 matrix.
///
/// Construction from a general matrix symmetrizes via `(M + Mᵀ)/2` and keeps
/// the Frobenius norm of the antisymmetric part that was discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat3 {
    m: Mat3,
    asymmetry: f64,
}

impl SymMat3 {
    pub fn identity() -> Self {
        Self::diag([1.0; 3])
    }

    pub fn zero() -> Self {
        Self::diag([0.0; 3])
    }

    pub fn diag(d: [f64; 3]) -> Self {
        SymMat3 {
            m: Mat3::from_diag(d),
            asymmetry: 0.0,
        }
    }

    /// From the upper triangle in row-major order `m11, m12, m13, m22, m23, m33`.
    pub fn from_upper(u: [f64; 6]) -> Self {
        SymMat3 {
            m: Mat3([[u[0], u[1], u[2]], [u[1], u[3], u[4]], [u[2], u[4], u[5]]]),
            asymmetry: 0.0,
        }
    }

    /// Symmetrizes `m`; rejects it when `|M - Mᵀ|_F / 2 > 1e-8 |M|_F`.
    pub fn from_mat(m: Mat3) -> Result<Self, LinalgError> {
        if !m.is_finite() {
            return Err(LinalgError::NonFinite("symmetric matrix"));
        }
        let t = m.transpose();
        let residual = 0.5 * (m - t).frobenius();
        let limit = SYMMETRY_TOLERANCE * m.frobenius();
        if residual > limit {
            return Err(LinalgError::Asymmetric { residual, limit });
        }
        Ok(SymMat3 {
            m: 0.5 * (m + t),
            asymmetry: residual,
        })
    }

    /// `Q · diag(d) · Qᵀ`, the matrix with eigenpairs `(d_i, Q e_i)`.
    pub fn from_eigen(q: &Mat3, d: [f64; 3]) -> Self {
        let m = *q * Mat3::from_diag(d) * q.transpose();
        // exact symmetry; the rounding asymmetry of the product is discarded
        SymMat3 {
            m: 0.5 * (m + m.transpose()),
            asymmetry: 0.0,
        }
    }

    pub fn as_mat(&self) -> &Mat3 {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.0[i][j]
    }

    /// Upper triangle `m11, m12, m13, m22, m23, m33`.
    pub fn upper(&self) -> [f64; 6] {
        let m = &self.m.0;
        [m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]
    }

    /// Antisymmetric residual discarded at construction.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        self.m.mul_vec(v)
    }

    /// `vᵀ M v`.
    pub fn quad(&self, v: Vec3) -> f64 {
        v.dot(&self.m.mul_vec(v))
    }

    pub fn frobenius(&self) -> f64 {
        self.m.frobenius()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SymMat3, beta: f64) -> SymMat3 {
        SymMat3 {
            m: alpha * self.m + beta * other.m,
            asymmetry: 0.0,
        }
    }

    /// `Rᵀ M R`.
    pub fn congruence(&self, r: &Mat3) -> Mat3 {
        r.transpose() * self.m * *r
    }

    pub fn is_finite(&self) -> bool {
        self.m.is_finite()
    }
}

/// An orthogonal 3×3 matrix with its determinant sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoMat3 {
    m: Mat3,
    det: f64,
}

impl OrthoMat3 {
    pub fn identity() -> Self {
        OrthoMat3 {
            m: Mat3::IDENTITY,
            det: 1.0,
        }
    }

    /// Validates `|RᵀR - I|_F ≤ 1e-12` and records `sign(det R)`.
    pub fn new(m: Mat3) -> Result<Self, LinalgError> {
        if !m.is_finite() {
            return Err(LinalgError::NonFinite("orthogonal matrix"));
        }
        let residual = orthogonality_residual(&m);
        if residual > ORTHO_TOLERANCE {
            return Err(LinalgError::NotOrthogonal { residual });
        }
        Ok(Self::trusted(m))
    }

    fn trusted(m: Mat3) -> Self {
        let det = if m.det() < 0.0 { -1.0 } else { 1.0 };
        OrthoMat3 { m, det }
    }

    /// Rotation by `angle` radians about `axis` (Rodrigues' formula).
    pub fn rotation(axis: Vec3, angle: f64) -> Self {
        let n = axis.scale(1.0 / axis.norm());
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let (x, y, z) = (n[0], n[1], n[2]);
        let m = Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ]);
        OrthoMat3 { m, det: 1.0 }
    }

    /// Same matrix with its `j`-th column negated.
    pub fn flip_col(&self, j: usize) -> Self {
        let mut m = self.m;
        m.set_col(j, -m.col(j));
        OrthoMat3 { m, det: -self.det }
    }

    pub fn as_mat(&self) -> &Mat3 {
        &self.m
    }

    /// `det R ∈ {+1, -1}`.
    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn transpose(&self) -> OrthoMat3 {
        OrthoMat3 {
            m: self.m.transpose(),
            det: self.det,
        }
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        self.m.mul_vec(v)
    }

    pub fn tr_mul_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.m.0;
        Vec3([
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ])
    }

    pub fn compose(&self, other: &OrthoMat3) -> OrthoMat3 {
        OrthoMat3 {
            m: self.m * other.m,
            det: self.det * other.det,
        }
    }
}

/// `|RᵀR - I|_F`.
pub fn orthogonality_residual(m: &Mat3) -> f64 {
    (m.transpose() * *m - Mat3::IDENTITY).frobenius()
}

/// A real diagonal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagMat3(pub [f64; 3]);

impl DiagMat3 {
    pub fn entries(&self) -> [f64; 3] {
        self.0
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3([self.0[0] * v[0], self.0[1] * v[1], self.0[2] * v[2]])
    }

    pub fn to_sym(&self) -> SymMat3 {
        SymMat3::diag(self.0)
    }
}

/// Eigen-decomposition `S = Q · diag(λ) · Qᵀ` of a symmetric matrix by cyclic
/// Jacobi sweeps. Eigenvalues come back in ascending order, `Q`'s columns are
/// the matching unit eigenvectors.
pub fn jacobi_eig(s: &SymMat3) -> Result<(Vec3, OrthoMat3), LinalgError> {
    if !s.is_finite() {
        return Err(LinalgError::NonFinite("eigenproblem input"));
    }
    let norm = s.frobenius();
    let mut a = *s.as_mat();
    let mut v = Mat3::IDENTITY;

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off = a.off_diagonal_norm();
        if off == 0.0 || off <= 1e-18 * norm {
            break;
        }
        sweeps += 1;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a.0[p][q] == 0.0 {
                continue;
            }
            let (c, s) = jacobi_rotation(a.0[p][p], a.0[q][q], a.0[p][q]);
            let mut j = Mat3::IDENTITY;
            j.0[p][p] = c;
            j.0[q][q] = c;
            j.0[p][q] = s;
            j.0[q][p] = -s;
            a = j.transpose() * a * j;
            a.0[p][q] = 0.0;
            a.0[q][p] = 0.0;
            v = v * j;
        }
    }

    let residual = a.off_diagonal_norm();
    if residual > 1e-13 * (1.0 + norm) {
        return Err(LinalgError::NonConvergence { sweeps, residual });
    }

    let mut order = [0usize, 1, 2];
    let d = a.diagonal();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let mut q = Mat3::ZERO;
    for (dst, &src) in order.iter().enumerate() {
        q.set_col(dst, v.col(src));
    }
    Ok((
        Vec3([d[order[0]], d[order[1]], d[order[2]]]),
        OrthoMat3::trusted(q),
    ))
}

/// `(cos, sin)` of the plane rotation annihilating `a_pq` in the 2×2 block
/// `[[a_pp, a_pq], [a_pq, a_qq]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c)
}

/// `|AK - KA|_F`.
pub fn commutator_norm(a: &SymMat3, k: &SymMat3) -> f64 {
    (*a.as_mat() * *k.as_mat() - *k.as_mat() * *a.as_mat()).frobenius()
}

/// Largest commutator norm accepted as "commuting" at tolerance `tol`.
pub fn commutator_bound(a: &SymMat3, k: &SymMat3, tol: f64) -> f64 {
    tol * (1.0 + a.frobenius()) * (1.0 + k.frobenius())
}

/// Finds one orthogonal `R` with `RᵀAR = D_A` and `RᵀKR = D_K` both diagonal.
///
/// `K` is eigendecomposed first; eigenvalues within `1e-8 (1 + |K|_F)` of each
/// other form a cluster, and `A` restricted to each cluster's eigenspace is
/// diagonalized in turn. Columns are ordered by `D_K` ascending with ties
/// broken by `D_A` ascending, and the third column is negated if needed so that
/// `det R = +1`.
pub fn simultaneous_diagonalize(
    a: &SymMat3,
    k: &SymMat3,
    tol: f64,
) -> Result<(OrthoMat3, DiagMat3, DiagMat3), LinalgError> {
    let norm = commutator_norm(a, k);
    let bound = commutator_bound(a, k, tol);
    if norm > bound || norm.is_nan() {
        return Err(LinalgError::NotCommuting { norm, bound });
    }

    let (k_eig, q) = jacobi_eig(k)?;

    // clusters of the (ascending) eigenvalues of K
    let gap = CLUSTER_TOLERANCE * (1.0 + k.frobenius());
    let mut cluster = [0usize; 3];
    for i in 1..3 {
        cluster[i] = cluster[i - 1] + usize::from(k_eig[i] - k_eig[i - 1] > gap);
    }

    // A in K's eigenbasis with cross-cluster couplings dropped; Jacobi on a
    // block-diagonal matrix never rotates across blocks
    let mut restricted = a.congruence(q.as_mat());
    for i in 0..3 {
        for j in 0..3 {
            if cluster[i] != cluster[j] {
                restricted.0[i][j] = 0.0;
            }
        }
    }
    let restricted = SymMat3::from_mat(restricted)?;
    let (_, w) = jacobi_eig(&restricted)?;
    let r = *q.as_mat() * *w.as_mat();

    let col_cluster: Vec<usize> = (0..3)
        .map(|j| {
            let c = w.as_mat().col(j);
            let dominant = (0..3)
                .max_by(|&x, &y| c[x].abs().total_cmp(&c[y].abs()))
                .unwrap_or(0);
            cluster[dominant]
        })
        .collect();

    let da = a.congruence(&r).diagonal();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        col_cluster[i]
            .cmp(&col_cluster[j])
            .then(da[i].total_cmp(&da[j]))
    });
    let mut sorted = Mat3::ZERO;
    for (dst, &src) in order.iter().enumerate() {
        sorted.set_col(dst, r.col(src));
    }
    if sorted.det() < 0.0 {
        sorted.set_col(2, -sorted.col(2));
    }

    let r = OrthoMat3::trusted(sorted);
    let d_a = DiagMat3(a.congruence(r.as_mat()).diagonal());
    let d_k = DiagMat3(k.congruence(r.as_mat()).diagonal());
    Ok((r, d_a, d_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
        Vec3([(); 3].map(|_| rng.gen_range(-scale..scale)))
    }

    fn random_ortho(rng: &mut impl Rng) -> OrthoMat3 {
        let axis = random_vec(rng, 1.0) + Vec3::new(1e-3, 0.0, 0.0);
        let r = OrthoMat3::rotation(axis, rng.gen_range(0.0..std::f64::consts::TAU));
        if rng.gen_bool(0.5) {
            r.flip_col(rng.gen_range(0..3))
        } else {
            r
        }
    }

    fn random_sym(rng: &mut impl Rng) -> SymMat3 {
        SymMat3::from_upper([(); 6].map(|_| rng.gen_range(-5.0..5.0)))
    }

    // 3×3 determinant by cofactor expansion along the first row, written out
    // longhand with minors as separate 2×2 determinants.
    fn cofactor_cross(u: Vec3, v: Vec3) -> Vec3 {
        let minor = |a: f64, b: f64, c: f64, d: f64| a * d - b * c;
        Vec3([
            minor(u[1], u[2], v[1], v[2]),
            -minor(u[0], u[2], v[0], v[2]),
            minor(u[0], u[1], v[0], v[1]),
        ])
    }

    #[test]
    fn cross_basis_and_antisymmetry() {
        assert_eq!(cross(Vec3::basis(0), Vec3::basis(1)), Vec3::basis(2));
        let u = Vec3::new(0.3, -1.2, 7.0);
        assert_eq!(cross(u, u), Vec3::ZERO);
    }

    #[test]
    fn cross_matches_cofactor_expansion() {
        let (u, v) = (Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0));
        // (2·6 - 3·5, -(1·6 - 3·4), 1·5 - 2·4)
        assert_eq!(cofactor_cross(u, v), Vec3::new(-3.0, 6.0, -3.0));
        assert_eq!(cross(u, v), Vec3::new(-3.0, 6.0, -3.0));
    }

    #[test]
    fn cross_k_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (u, v) = (random_vec(&mut rng, 3.0), random_vec(&mut rng, 3.0));
            assert_eq!(cross_k(&SymMat3::identity(), u, v), cross(u, v));
            assert_eq!(cross_k(&SymMat3::zero(), u, v), Vec3::ZERO);
        }
        let k = SymMat3::diag([1.0, 2.0, 3.0]);
        assert_eq!(
            cross_k(&k, Vec3::basis(0), Vec3::basis(1)),
            Vec3::new(0.0, 0.0, 3.0)
        );
    }

    #[test]
    fn triple_product_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (u, v, w) = (
                random_vec(&mut rng, 2.0),
                random_vec(&mut rng, 2.0),
                random_vec(&mut rng, 2.0),
            );
            let det = Mat3::from_cols(u, v, w).det();
            assert!((u.dot(&cross(v, w)) - det).abs() <= 1e-12);
        }
    }

    #[test]
    fn pushforward_identity_both_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [false; 2];
        for _ in 0..1000 {
            let r = random_ortho(&mut rng);
            seen[usize::from(r.det() < 0.0)] = true;
            let (u, v) = (random_vec(&mut rng, 3.0), random_vec(&mut rng, 3.0));
            let lhs = cross(r.mul_vec(u), r.mul_vec(v));
            let rhs = r.mul_vec(cross(u, v)).scale(r.det());
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + u.norm() * v.norm()));
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn symmetrization_tolerates_roundoff_and_rejects_asymmetry() {
        let mut m = Mat3([[2.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 1.0]]);
        m.0[0][1] += 1e-14;
        let s = SymMat3::from_mat(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        assert!(s.asymmetry() > 0.0);

        m.0[0][1] += 1e-3;
        assert!(matches!(
            SymMat3::from_mat(m),
            Err(LinalgError::Asymmetric { .. })
        ));
    }

    #[test]
    fn ortho_validation() {
        assert!(OrthoMat3::new(Mat3::IDENTITY).is_ok());
        let bad = Mat3([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(
            OrthoMat3::new(bad),
            Err(LinalgError::NotOrthogonal { .. })
        ));
        let reflected = OrthoMat3::new(*OrthoMat3::identity().flip_col(1).as_mat()).unwrap();
        assert_eq!(reflected.det(), -1.0);
    }

    #[test]
    fn jacobi_on_diagonal_input() {
        let (l, q) = jacobi_eig(&SymMat3::diag([5.0, 1.0, 3.0])).unwrap();
        assert_eq!(l, Vec3::new(1.0, 3.0, 5.0));
        for x in q.as_mat().0.iter().flatten() {
            assert!(*x == 0.0 || x.abs() == 1.0);
        }
    }

    #[test]
    fn jacobi_matches_characteristic_roots() {
        // det(S - λI) = (5 - λ)((2 - λ)² - 1) = (5 - λ)(λ - 1)(λ - 3)
        let s = SymMat3::from_upper([2.0, 1.0, 0.0, 2.0, 0.0, 5.0]);
        let (l, _) = jacobi_eig(&s).unwrap();
        for (got, want) in l.0.iter().zip([1.0, 3.0, 5.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let s = random_sym(&mut rng);
            let (l, q) = jacobi_eig(&s).unwrap();
            assert!(l[0] <= l[1] && l[1] <= l[2]);
            assert!(orthogonality_residual(q.as_mat()) <= ORTHO_TOLERANCE);
            assert!(q.as_mat().det().abs() - 1.0 <= 1e-12);
            let back = SymMat3::from_eigen(q.as_mat(), l.0);
            assert!((*back.as_mat() - *s.as_mat()).frobenius() <= 1e-12 * (1.0 + s.frobenius()));
            let off = s.congruence(q.as_mat()).off_diagonal_norm();
            assert!(off <= 1e-13 * (1.0 + s.frobenius()));

            // similarity invariance of the spectrum
            let r = random_ortho(&mut rng);
            let (l2, _) = jacobi_eig(
                &SymMat3::from_mat(*r.as_mat() * *s.as_mat() * r.as_mat().transpose()).unwrap(),
            )
            .unwrap();
            assert!((l - l2).norm_inf() <= 1e-10);
        }
    }

    #[test]
    fn jacobi_degenerate_and_zero() {
        let (l, q) = jacobi_eig(&SymMat3::zero()).unwrap();
        assert_eq!(l, Vec3::ZERO);
        assert_eq!(*q.as_mat(), Mat3::IDENTITY);

        let q = OrthoMat3::rotation(Vec3::new(1.0, 2.0, -0.5), 0.7);
        let s = SymMat3::from_eigen(q.as_mat(), [2.0, 2.0, -1.0]);
        let (l, _) = jacobi_eig(&s).unwrap();
        assert!((l - Vec3::new(-1.0, 2.0, 2.0)).norm_inf() < 1e-14);
    }

    #[test]
    fn commutator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = random_sym(&mut rng);
        assert_eq!(commutator_norm(&SymMat3::identity(), &k), 0.0);
        assert_eq!(
            commutator_norm(
                &SymMat3::diag([1.0, 2.0, 3.0]),
                &SymMat3::diag([4.0, 5.0, 6.0])
            ),
            0.0
        );
        // AK = [[0,2,0],[1,0,0],[0,0,0]], KA = [[0,1,0],[2,0,0],[0,0,0]]
        let a = SymMat3::from_upper([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let k = SymMat3::diag([1.0, 2.0, 3.0]);
        assert_eq!(commutator_norm(&a, &k), 2f64.sqrt());
    }

    #[test]
    fn simultaneous_trivial_cases() {
        let (r, da, dk) =
            simultaneous_diagonalize(&SymMat3::diag([1.0, 2.0, 3.0]), &SymMat3::identity(), 1e-10)
                .unwrap();
        assert_eq!(*r.as_mat(), Mat3::IDENTITY);
        assert_eq!(da.0, [1.0, 2.0, 3.0]);
        assert_eq!(dk.0, [1.0; 3]);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_sym(&mut rng);
        let (l, _) = jacobi_eig(&a).unwrap();
        let (_, da, dk) = simultaneous_diagonalize(&a, &a, 1e-10).unwrap();
        for i in 0..3 {
            assert!((da.0[i] - l[i]).abs() < 1e-12 * (1.0 + a.frobenius()));
            assert!((dk.0[i] - l[i]).abs() < 1e-12 * (1.0 + a.frobenius()));
        }
    }

    #[test]
    fn simultaneous_recovers_planted_pair() {
        let q = OrthoMat3::rotation(Vec3::new(1.0, -2.0, 0.5), 1.1);
        let a = SymMat3::from_eigen(q.as_mat(), [7.0, 2.0, 5.0]);
        let k = SymMat3::from_eigen(q.as_mat(), [1.0, 4.0, 1.0]);
        let (r, da, dk) = simultaneous_diagonalize(&a, &k, 1e-10).unwrap();
        assert_eq!(r.det(), 1.0);
        let want_k = [1.0, 1.0, 4.0];
        let want_a = [5.0, 7.0, 2.0];
        for i in 0..3 {
            assert!((dk.0[i] - want_k[i]).abs() < 1e-12);
            assert!((da.0[i] - want_a[i]).abs() < 1e-12);
        }
        assert!(a.congruence(r.as_mat()).off_diagonal_norm() < 1e-12);
        assert!(k.congruence(r.as_mat()).off_diagonal_norm() < 1e-12);
    }

    #[test]
    fn simultaneous_rejects_non_commuting() {
        let a = SymMat3::from_upper([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let k = SymMat3::diag([1.0, 2.0, 3.0]);
        assert!(matches!(
            simultaneous_diagonalize(&a, &k, 1e-10),
            Err(LinalgError::NotCommuting { .. })
        ));
    }
}
