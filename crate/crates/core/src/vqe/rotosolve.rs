//! Coordinate descent exploiting the sinusoidal dependence of a
//! rotation-gate expectation on each single angle.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotosolveOptions {
    pub max_sweeps: usize,
    /// Stop once a full sweep improves the objective by less than this.
    pub tol: f64,
}

impl RotosolveOptions {
    /// Settings for noiseless objectives.
    pub fn exact() -> Self {
        RotosolveOptions { max_sweeps: 200, tol: 1e-13 }
    }

    /// Fixed sweep budget for noisy objectives.
    pub fn noisy() -> Self {
        RotosolveOptions { max_sweeps: 20, tol: 0.0 }
    }
}

impl Default for RotosolveOptions {
    fn default() -> Self {
        Self::exact()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotosolveResult {
    pub theta: Vec<f64>,
    pub value: f64,
    pub sweeps: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Minimizer of `a cos(d) + b sin(d) + c` given samples at `d = 0, ±π/2`,
/// as `(d*, value)`. A flat sinusoid keeps `d = 0`.
pub fn sinusoid_minimum(f0: f64, f_plus: f64, f_minus: f64) -> (f64, f64) {
    let c = 0.5 * (f_plus + f_minus);
    let b = 0.5 * (f_plus - f_minus);
    let a = f0 - c;
    if a == 0.0 && b == 0.0 {
        return (0.0, f0);
    }
    (b.atan2(a) + PI, c - a.hypot(b))
}

pub fn rotosolve_minimize<F>(mut f: F, theta0: &[f64], opts: &RotosolveOptions) -> Result<RotosolveResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut theta = theta0.to_vec();
    let mut evaluations = 0usize;
    let mut eval = |t: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(t)?;
        if !v.is_finite() {
            return Err(Error::Numerical(format!("objective returned {v} at {t:?}")));
        }
        Ok(v)
    };
    let mut value = eval(&theta, &mut evaluations)?;
    let mut best = (theta.clone(), value);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let start = value;
        for k in 0..theta.len() {
            let t = theta[k];
            let f0 = eval(&theta, &mut evaluations)?;
            theta[k] = t + FRAC_PI_2;
            let fp = eval(&theta, &mut evaluations)?;
            theta[k] = t - FRAC_PI_2;
            let fm = eval(&theta, &mut evaluations)?;
            let (d, v) = sinusoid_minimum(f0, fp, fm);
            theta[k] = wrap_angle(t + d);
            value = v;
        }
        if value < best.1 {
            best = (theta.clone(), value);
        }
        if start - value < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(RotosolveResult { theta: best.0, value: best.1, sweeps, evaluations, converged })
}
