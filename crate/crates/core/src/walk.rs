//! Walk configuration, step-angle law and per-step moments.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A walk of `n_steps` unit steps whose angles are uniform on
/// `[-max_angle, max_angle]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    n_steps: usize,
    max_angle: f64,
    extended: bool,
}

impl WalkConfig {
    /// Validated constructor: `n_steps >= 1` and `0 < max_angle <= pi/2`.
    pub fn new(n_steps: usize, max_angle: f64) -> Result<Self> {
        if n_steps < 1 {
            return domain("number of steps must be at least 1");
        }
        if !(max_angle > 0.0 && max_angle <= FRAC_PI_2) {
            return domain(format!("max angle {max_angle} outside (0, pi/2]"));
        }
        Ok(Self {
            n_steps,
            max_angle,
            extended: false,
        })
    }

    /// Relaxed constructor accepting `0 < max_angle <= pi`.
    ///
    /// Only the large-N approximation and the Monte-Carlo sampler are
    /// meaningful past `pi/2`; the exact geometry of the reachable set
    /// assumes every step has a nonnegative real part.
    pub fn new_extended(n_steps: usize, max_angle: f64) -> Result<Self> {
        if n_steps < 1 {
            return domain("number of steps must be at least 1");
        }
        if !(max_angle > 0.0 && max_angle <= PI) {
            return domain(format!("max angle {max_angle} outside (0, pi]"));
        }
        Ok(Self {
            n_steps,
            max_angle,
            extended: max_angle > FRAC_PI_2,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn max_angle(&self) -> f64 {
        self.max_angle
    }

    /// True when the angle lies beyond `pi/2` (only possible via
    /// [`WalkConfig::new_extended`]).
    pub fn is_extended(&self) -> bool {
        self.extended
    }

    /// Same angle, different number of steps.
    pub fn with_steps(&self, n_steps: usize) -> Result<Self> {
        if n_steps < 1 {
            return domain("number of steps must be at least 1");
        }
        Ok(Self { n_steps, ..*self })
    }
}

/// Free-function form of [`WalkConfig::new`].
pub fn validate_config(n_steps: usize, max_angle: f64) -> Result<WalkConfig> {
    WalkConfig::new(n_steps, max_angle)
}

/// A point in polar coordinates with the angle in `[-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub radius: f64,
    pub angle: f64,
}

impl PolarPoint {
    pub fn new(radius: f64, angle: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Self { radius, angle }
    }

    pub fn from_cartesian(x: f64, y: f64) -> Self {
        Self {
            radius: x.hypot(y),
            angle: y.atan2(x),
        }
    }

    pub fn to_cartesian(self) -> (f64, f64) {
        let (s, c) = self.angle.sin_cos();
        (self.radius * c, self.radius * s)
    }
}

/// CDF of a single step angle, uniform on `[-a, a]`.
pub fn step_angle_cdf(theta: f64, max_angle: f64) -> f64 {
    ((theta + max_angle) / (2.0 * max_angle)).clamp(0.0, 1.0)
}

/// Density of a single step angle.
pub fn step_angle_pdf(theta: f64, max_angle: f64) -> f64 {
    if theta.abs() <= max_angle {
        0.5 / max_angle
    } else {
        0.0
    }
}

/// First and second moments of one step `(cos phi, sin phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

/// Moments of one step for the uniform angle law on `[-a, a]`.
///
/// The mean of the sine part and the covariance vanish by symmetry of
/// the angle law.
pub fn clt_moments(cfg: &WalkConfig) -> MomentSet {
    let a = cfg.max_angle();
    let (s, c) = a.sin_cos();
    let mean_x = s / a;
    let second_x = (a + c * s) / (2.0 * a);
    let var_y = (a - c * s) / (2.0 * a);
    // second_x - mean_x^2 loses digits for small a; the clamp only guards
    // against a negative result from that cancellation.
    let var_x = (second_x - mean_x * mean_x).max(0.0);
    MomentSet {
        mean_x,
        mean_y: 0.0,
        var_x,
        var_y,
        cov_xy: 0.0,
    }
}
