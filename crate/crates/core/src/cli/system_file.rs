//! `SystemFile`: the TOML document describing one system, and the document
//! printed by `normal-form`.
//!
//! ```toml
//! K = [1, 0, 0, 1, 0, 1]   # k11 k12 k13 k22 k23 k33
//! k = [0, 0, 0]
//! A = [1, 0, 0, 2, 0, 3]
//! a = [0, 0, 0]
//! dt = 1e-3                # optional
//! T = 10                   # optional
//! u0 = [1, 1, 1]           # optional
//! ```
//!
//! `K` and `A` may also be given as all nine entries in row-major order; such
//! matrices are symmetrized and rejected when visibly asymmetric.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::CliError;
use crate::hamsys::QuadraticSystem;
use crate::linalg3::{Mat3, SymMat3, Vec3};
use crate::normalform::NormalForm;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T: f64 = 10.0;
pub const DEFAULT_U0: [f64; 3] = [1.0, 1.0, 1.0];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct SystemFile {
    pub K: Vec<f64>,
    pub k: Vec<f64>,
    pub A: Vec<f64>,
    pub a: Vec<f64>,
    pub dt: Option<f64>,
    pub T: Option<f64>,
    pub u0: Option<Vec<f64>>,
}

fn field_vec(name: &str, values: &[f64]) -> Result<Vec3, CliError> {
    check_finite(name, values)?;
    Vec3::checked(values).map_err(|_| {
        CliError::Input(format!(
            "field `{name}`: expected 3 numbers, got {}",
            values.len()
        ))
    })
}

fn field_sym(name: &str, values: &[f64]) -> Result<SymMat3, CliError> {
    check_finite(name, values)?;
    match values.len() {
        6 => {
            let mut upper = [0.0; 6];
            upper.copy_from_slice(values);
            Ok(SymMat3::from_upper(upper))
        }
        9 => {
            let mut m = Mat3::ZERO;
            for (i, x) in values.iter().enumerate() {
                m.0[i / 3][i % 3] = *x;
            }
            SymMat3::from_mat(m).map_err(|e| CliError::Input(format!("field `{name}`: {e}")))
        }
        n => Err(CliError::Input(format!(
            "field `{name}`: expected 6 upper-triangle numbers (or 9 row-major), got {n}"
        ))),
    }
}

fn field_scalar(name: &str, value: Option<f64>) -> Result<Option<f64>, CliError> {
    match value {
        Some(x) if !x.is_finite() => Err(CliError::Input(format!(
            "field `{name}`: value is not finite"
        ))),
        other => Ok(other),
    }
}

fn check_finite(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "field `{name}`: value is not finite"
        )))
    }
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: SystemFile =
            toml::from_str(text).map_err(|e| CliError::Input(e.message().to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.system()?;
        field_scalar("dt", self.dt)?;
        field_scalar("T", self.T)?;
        if let Some(u0) = &self.u0 {
            field_vec("u0", u0)?;
        }
        Ok(())
    }

    pub fn system(&self) -> Result<QuadraticSystem, CliError> {
        let k = field_sym("K", &self.K)?;
        let k_lin = field_vec("k", &self.k)?;
        let a = field_sym("A", &self.A)?;
        let a_lin = field_vec("a", &self.a)?;
        QuadraticSystem::new(k, k_lin, a, a_lin).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(DEFAULT_DT)
    }

    pub fn t_end(&self) -> f64 {
        self.T.unwrap_or(DEFAULT_T)
    }

    pub fn u0(&self) -> Vec3 {
        self.u0
            .as_deref()
            .and_then(|u| Vec3::checked(u).ok())
            .unwrap_or(Vec3(DEFAULT_U0))
    }

    pub fn from_system(sys: &QuadraticSystem) -> Self {
        SystemFile {
            K: sys.k_mat().upper().to_vec(),
            k: sys.casimir.linear.0.to_vec(),
            A: sys.a_mat().upper().to_vec(),
            a: sys.hamiltonian.linear.0.to_vec(),
            dt: None,
            T: None,
            u0: None,
        }
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for (name, values) in [
            ("K", &self.K),
            ("k", &self.k),
            ("A", &self.A),
            ("a", &self.a),
        ] {
            let _ = writeln!(out, "{name} = {}", array(values));
        }
        for (name, value) in [("dt", self.dt), ("T", self.T)] {
            if let Some(x) = value {
                let _ = writeln!(out, "{name} = {}", num(x));
            }
        }
        if let Some(u0) = &self.u0 {
            let _ = writeln!(out, "u0 = {}", array(u0));
        }
        out
    }
}

/// 17 significant digits; round-trips every finite `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn array(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

/// The document printed by `normal-form`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct NormalFormDoc {
    pub R: Vec<f64>,
    pub detR: f64,
    pub D_K: Vec<f64>,
    pub D_A: Vec<f64>,
    pub k_hat: Vec<f64>,
    pub a_hat: Vec<f64>,
}

impl NormalFormDoc {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(e.message().to_string()))
    }

    pub fn render(nf: &NormalForm) -> String {
        let r: Vec<f64> = nf.rotation.as_mat().0.iter().flatten().copied().collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# v' = (D_K v + k_hat) x (D_A v + a_hat),  u = detR * R v"
        );
        let _ = writeln!(out, "R = {}", array(&r));
        let _ = writeln!(out, "detR = {}", num(nf.det_r));
        let _ = writeln!(out, "D_K = {}", array(&nf.d_k.0));
        let _ = writeln!(out, "D_A = {}", array(&nf.d_a.0));
        let _ = writeln!(out, "k_hat = {}", array(&nf.k_hat.0));
        let _ = writeln!(out, "a_hat = {}", array(&nf.a_hat.0));
        out
    }

    /// The diagonal normal-form system as a `SystemFile`.
    pub fn system_file(&self) -> SystemFile {
        let upper = |d: &[f64]| match d {
            [d1, d2, d3] => vec![*d1, 0.0, 0.0, *d2, 0.0, *d3],
            other => other.to_vec(),
        };
        SystemFile {
            K: upper(&self.D_K),
            k: self.k_hat.clone(),
            A: upper(&self.D_A),
            a: self.a_hat.clone(),
            dt: None,
            T: None,
            u0: None,
        }
    }
}
