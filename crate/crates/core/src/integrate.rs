//! Fixed-step RK4 integration with conservation monitoring.

use thiserror::Error;

use crate::hamsys::QuadraticSystem;
use crate::linalg3::Vec3;
use crate::normalform::{normal_form, NormalFormError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },
    #[error("invalid step parameters: {0}")]
    InvalidStep(String),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
}

/// Sampled solution `t ↦ u(t)` with the values of `H` and `C` along it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec3>,
    pub hamiltonian: Vec<f64>,
    pub casimir: Vec<f64>,
    /// `max_t |H(u_t) - H(u_0)|`
    pub drift_h: f64,
    /// `max_t |C(u_t) - C(u_0)|`
    pub drift_c: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Vec3 {
        *self
            .states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// One classical Runge–Kutta step of size `dt`.
pub fn rk4_step<F>(field: F, u: Vec3, dt: f64) -> Result<Vec3, IntegrateError>
where
    F: Fn(Vec3) -> Vec3,
{
    rk4_step_at(&field, u, dt, 0)
}

fn rk4_step_at<F>(field: &F, u: Vec3, dt: f64, step: usize) -> Result<Vec3, IntegrateError>
where
    F: Fn(Vec3) -> Vec3,
{
    let stage = |x: Vec3| {
        let k = field(x);
        if k.is_finite() {
            Ok(k)
        } else {
            Err(IntegrateError::NonFinite { step })
        }
    };
    let k1 = stage(u)?;
    let k2 = stage(u + k1.scale(0.5 * dt))?;
    let k3 = stage(u + k2.scale(0.5 * dt))?;
    let k4 = stage(u + k3.scale(dt))?;
    let next = u + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(IntegrateError::NonFinite { step })
    }
}

/// `⌈T/dt⌉`, ignoring round-off in the quotient.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    let r = t_end / dt;
    let nearest = r.round();
    if (r - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        r.ceil() as usize
    }
}

fn validate(u0: Vec3, dt: f64, t_end: f64) -> Result<(), IntegrateError> {
    if !u0.is_finite() {
        return Err(IntegrateError::InvalidStep(
            "initial state is not finite".into(),
        ));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegrateError::InvalidStep(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_end.is_finite() && t_end >= dt) {
        return Err(IntegrateError::InvalidStep(format!(
            "T must be at least dt, got T={t_end} dt={dt}"
        )));
    }
    Ok(())
}

/// Integrates an arbitrary field; returns the `⌈T/dt⌉ + 1` states.
pub fn integrate_field<F>(
    field: F,
    u0: Vec3,
    dt: f64,
    t_end: f64,
) -> Result<Vec<Vec3>, IntegrateError>
where
    F: Fn(Vec3) -> Vec3,
{
    validate(u0, dt, t_end)?;
    let n = step_count(dt, t_end);
    let mut states = Vec::with_capacity(n + 1);
    states.push(u0);
    let mut u = u0;
    for step in 1..=n {
        u = rk4_step_at(&field, u, dt, step)?;
        states.push(u);
    }
    Ok(states)
}

/// Integrates `sys` from `u0` with step `dt` up to `T`.
pub fn simulate(
    sys: &QuadraticSystem,
    u0: Vec3,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, IntegrateError> {
    let states = integrate_field(|u| sys.vector_field(u), u0, dt, t_end)?;
    let times = (0..states.len()).map(|i| i as f64 * dt).collect();
    let hamiltonian: Vec<f64> = states.iter().map(|&u| sys.hamiltonian(u)).collect();
    let casimir: Vec<f64> = states.iter().map(|&u| sys.casimir(u)).collect();
    let drift = |xs: &[f64]| xs.iter().fold(0.0f64, |m, x| m.max((x - xs[0]).abs()));
    Ok(Trajectory {
        dt,
        times,
        drift_h: drift(&hamiltonian),
        drift_c: drift(&casimir),
        states,
        hamiltonian,
        casimir,
    })
}

/// Integrates `sys` from `u0` and its normal form from `det(R) Rᵀ u0` with the
/// same steps; returns `max_t |u_t - det(R) R v_t|`.
pub fn compare_with_normal_form(
    sys: &QuadraticSystem,
    u0: Vec3,
    dt: f64,
    t_end: f64,
    tol: f64,
) -> Result<f64, IntegrateError> {
    let nf = normal_form(sys, tol)?;
    let original = simulate(sys, u0, dt, t_end)?;
    let reduced = simulate(&nf.system(), nf.to_normal(u0), dt, t_end)?;
    Ok(original
        .states
        .iter()
        .zip(&reduced.states)
        .map(|(&u, &v)| (u - nf.from_normal(v)).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg3::{OrthoMat3, SymMat3};
    use crate::normalform::DEFAULT_TOL;

    fn rigid_body() -> QuadraticSystem {
        QuadraticSystem::euler([1.0, 2.0, 3.0], Vec3::ZERO)
    }

    #[test]
    fn zero_field_keeps_state() {
        let u = Vec3::new(0.3, -2.0, 1.0);
        assert_eq!(rk4_step(|_| Vec3::ZERO, u, 0.1).unwrap(), u);
    }

    #[test]
    fn linear_rotation_matches_closed_form() {
        let omega = Vec3::new(0.0, 0.0, 1.0);
        let u = Vec3::new(1.0, 0.5, -0.25);
        let dt = 1e-3;
        let got = rk4_step(|x| omega.cross(&x), u, dt).unwrap();
        let (s, c) = dt.sin_cos();
        let want = Vec3::new(c * u[0] - s * u[1], s * u[0] + c * u[1], u[2]);
        assert!((got - want).norm_inf() < 1e-14);
    }

    #[test]
    fn non_finite_stage_is_reported() {
        let err = rk4_step(|x| x.scale(f64::INFINITY), Vec3::new(1.0, 0.0, 0.0), 0.1).unwrap_err();
        assert_eq!(err, IntegrateError::NonFinite { step: 0 });

        // u' = u² on the first axis blows up at t = 1
        let field = |u: Vec3| Vec3::new(u[0] * u[0], 0.0, 0.0);
        let err = integrate_field(field, Vec3::new(1.0, 0.0, 0.0), 0.01, 5.0).unwrap_err();
        assert!(matches!(err, IntegrateError::NonFinite { step } if step > 50));
    }

    #[test]
    fn step_validation_and_count() {
        let sys = rigid_body();
        assert!(matches!(
            simulate(&sys, Vec3::ZERO, 0.1, 0.05),
            Err(IntegrateError::InvalidStep(_))
        ));
        assert!(simulate(&sys, Vec3::ZERO, 0.0, 1.0).is_err());
        assert_eq!(step_count(1e-3, 10.0), 10_000);
        assert_eq!(step_count(0.3, 1.0), 4);
        let traj = simulate(&sys, Vec3::ZERO, 0.25, 1.0).unwrap();
        assert_eq!(traj.len(), 5);
        assert_eq!(traj.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn fixed_points_stay_put() {
        let mut sys = rigid_body();
        sys.hamiltonian = sys.casimir;
        let u0 = Vec3::new(0.7, -0.2, 1.3);
        let traj = simulate(&sys, u0, 0.01, 1.0).unwrap();
        assert!(traj.states.iter().all(|&u| u == u0));

        let traj = simulate(&rigid_body(), Vec3::basis(0), 1e-3, 2.0).unwrap();
        assert!(traj.states.iter().all(|&u| u == Vec3::basis(0)));
        assert_eq!(traj.drift_h, 0.0);
    }

    #[test]
    fn rigid_body_conserves_invariants() {
        let traj = simulate(&rigid_body(), Vec3::new(1.0, 1.0, 1.0), 1e-3, 10.0).unwrap();
        assert_eq!(traj.len(), 10_001);
        assert!(traj.drift_h <= 1e-8, "{}", traj.drift_h);
        assert!(traj.drift_c <= 1e-8, "{}", traj.drift_c);
    }

    #[test]
    fn time_reversal_returns_home() {
        let sys = rigid_body();
        let u0 = Vec3::new(1.0, 1.0, 1.0);
        let (dt, t) = (1e-2, 5.0);
        let fwd = simulate(&sys, u0, dt, t).unwrap();
        let back = integrate_field(|u| -sys.vector_field(u), fwd.last(), dt, t).unwrap();
        let err = (*back.last().unwrap() - u0).norm();
        let one_way = fwd.drift_h.max(fwd.drift_c);
        assert!(err <= 10.0 * one_way.max(1e-13), "{err} vs {one_way}");
    }

    #[test]
    fn diagonal_system_compares_exactly() {
        let sys = QuadraticSystem::new(
            SymMat3::diag([0.5, 1.0, 2.0]),
            Vec3::new(0.1, 0.0, -0.2),
            SymMat3::diag([1.0, 3.0, 2.0]),
            Vec3::new(0.0, 0.3, 0.0),
        )
        .unwrap();
        let err = compare_with_normal_form(&sys, Vec3::new(0.5, -0.5, 1.0), 1e-3, 2.0, DEFAULT_TOL)
            .unwrap();
        assert!(err <= 1e-14, "{err}");
    }

    #[test]
    fn rotated_rigid_body_tracks_normal_form() {
        let q = OrthoMat3::rotation(Vec3::new(1.0, 1.0, 0.0), 0.6);
        let sys = QuadraticSystem::new(
            SymMat3::identity(),
            Vec3::ZERO,
            SymMat3::from_eigen(q.as_mat(), [1.0, 2.0, 3.0]),
            Vec3::ZERO,
        )
        .unwrap();
        let err = compare_with_normal_form(&sys, Vec3::new(1.0, 1.0, 1.0), 1e-3, 2.0, DEFAULT_TOL)
            .unwrap();
        assert!(err <= 1e-9, "{err}");
    }
}
