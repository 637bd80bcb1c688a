//! Benchmark initial-value problems and the classical breather solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::GridSpec;

/// `sech(x)` written as `2 e^{-|x|} / (1 + e^{-2|x|})`, which cannot overflow.
pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    /// `u(x,0) = 0`, `u_t(x,0) = (4/ω) sech(x/ω)`; a breather when `alpha = 2`.
    Breather { omega: f64 },
    /// `u(x,0) = 3.2 sech(x)`, `u_t(x,0) = 0`.
    SechPulse,
}

impl Problem {
    pub fn breather(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 {
            Ok(Problem::Breather { omega })
        } else {
            Err(Error::InvalidConfig(format!("omega must be positive, got {omega}")))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Problem::Breather { omega } => Self::breather(omega).map(|_| ()),
            Problem::SechPulse => Ok(()),
        }
    }

    /// Parses `5.1`/`breather` and `5.2`/`pulse`.
    pub fn from_name(name: &str, omega: f64) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "5.1" | "breather" => Self::breather(omega),
            "5.2" | "pulse" | "sech-pulse" => Ok(Problem::SechPulse),
            other => Err(Error::InvalidConfig(format!(
                "unknown example {other:?} (expected 5.1/breather or 5.2/pulse)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::Breather { .. } => "breather",
            Problem::SechPulse => "pulse",
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match *self {
            Problem::Breather { omega } => Some(omega),
            Problem::SechPulse => None,
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        match *self {
            Problem::Breather { .. } => 0.0,
            Problem::SechPulse => 3.2 * sech(x),
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        match *self {
            Problem::Breather { omega } => 4.0 / omega * sech(x / omega),
            Problem::SechPulse => 0.0,
        }
    }

    /// Displacement and velocity on the interior nodes.
    pub fn initial_data(&self, grid: &GridSpec) -> (Vec<f64>, Vec<f64>) {
        let xs = grid.interior_nodes();
        let phi = xs.iter().map(|&x| self.phi(x)).collect();
        let psi = xs.iter().map(|&x| self.psi(x)).collect();
        (phi, psi)
    }
}

/// Time profile `φ(t; ω)` of the breather.
pub fn breather_amplitude(t: f64, omega: f64) -> f64 {
    if omega > 1.0 {
        let s = (omega * omega - 1.0).sqrt();
        (s * t / omega).sin() / s
    } else if omega == 1.0 {
        t
    } else {
        let s = (1.0 - omega * omega).sqrt();
        (s * t / omega).sinh() / s
    }
}

/// Exact solution `4 atan(φ(t;ω) sech(x/ω))` of the classical (`alpha = 2`)
/// sine-Gordon equation on the whole line.
pub fn exact_breather(x: f64, t: f64, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidConfig(format!("omega must be positive, got {omega}")));
    }
    Ok(4.0 * (breather_amplitude(t, omega) * sech(x / omega)).atan())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech_is_safe_far_out() {
        assert_eq!(sech(0.0), 1.0);
        assert_eq!(sech(1000.0), 0.0);
        assert!((sech(1.3) - 1.0 / 1.3f64.cosh()).abs() < 4.0 * f64::EPSILON);
        assert!((sech(-2.0) - sech(2.0)).abs() == 0.0);
    }

    #[test]
    fn initial_values_at_origin() {
        assert_eq!(Problem::Breather { omega: 1.0 }.psi(0.0), 4.0);
        assert_eq!(Problem::Breather { omega: 1.0 }.phi(0.0), 0.0);
        assert_eq!(Problem::SechPulse.phi(0.0), 3.2);
        assert_eq!(Problem::SechPulse.psi(0.0), 0.0);
    }

    #[test]
    fn breather_velocity_vanishes_at_boundary() {
        let p = Problem::breather(1.1).unwrap();
        assert!(p.psi(20.0).abs() < 1e-7);
        assert!(p.psi(-20.0).abs() < 1e-7);
        // sech(20/1.1) directly
        let direct = 4.0 / 1.1 / (20.0f64 / 1.1).cosh();
        assert!((p.psi(20.0) - direct).abs() < 1e-20);
    }

    #[test]
    fn initial_data_on_grid() {
        let g = GridSpec::new(-2.0, 2.0, 4).unwrap();
        let (phi, psi) = Problem::SechPulse.initial_data(&g);
        assert_eq!(phi.len(), 3);
        assert_eq!(phi[1], 3.2);
        assert!(psi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exact_breather_values() {
        for &om in &[0.5, 1.0, 1.1, 3.0] {
            assert_eq!(exact_breather(0.7, 0.0, om).unwrap(), 0.0);
        }
        assert!((exact_breather(0.0, 1.0, 1.0).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let s = 0.21f64.sqrt();
        let want = 4.0 * ((s / 1.1).sin() / s).atan();
        assert!((exact_breather(0.0, 1.0, 1.1).unwrap() - want).abs() < 1e-15);
        assert!(exact_breather(0.0, 1.0, 0.0).is_err());
        assert!(exact_breather(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(
            Problem::from_name("5.1", 1.1).unwrap(),
            Problem::Breather { omega: 1.1 }
        );
        assert_eq!(Problem::from_name("pulse", 1.1).unwrap(), Problem::SechPulse);
        assert!(Problem::from_name("5.3", 1.0).is_err());
        assert!(Problem::from_name("breather", -1.0).is_err());
    }
}
