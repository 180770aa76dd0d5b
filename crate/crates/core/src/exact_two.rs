//! Closed-form laws of the two-step walk.

use crate::error::{domain, Result};
use crate::walk::WalkConfig;

/// Distributions of radius and angle after exactly two steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactTwoStep {
    max_angle: f64,
}

impl ExactTwoStep {
    pub fn new(max_angle: f64) -> Result<Self> {
        let cfg = WalkConfig::new(2, max_angle)?;
        Ok(Self::from_config(&cfg))
    }

    /// Uses the angle of `cfg`; the step count is ignored.
    pub fn from_config(cfg: &WalkConfig) -> Self {
        Self {
            max_angle: cfg.max_angle(),
        }
    }

    pub fn max_angle(&self) -> f64 {
        self.max_angle
    }

    /// Lower end of the radius support, `2 cos a`.
    pub fn min_radius(&self) -> f64 {
        2.0 * self.max_angle.cos()
    }

    pub fn cdf_radius(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let a = self.max_angle;
        if r <= self.min_radius() {
            return Ok(0.0);
        }
        if r >= 2.0 {
            return Ok(1.0);
        }
        let gap = a - (0.5 * r).acos();
        Ok((gap * gap / (a * a)).clamp(0.0, 1.0))
    }

    /// Radius density; diverges like `1/sqrt(2 - r)` at the upper end and
    /// is reported as 0 at exactly `r = 2`.
    pub fn pdf_radius(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let a = self.max_angle;
        if r <= self.min_radius() || r >= 2.0 {
            return Ok(0.0);
        }
        let gap = a - (0.5 * r).acos();
        Ok(2.0 * gap / (a * a * (4.0 - r * r).sqrt()))
    }

    pub fn cdf_angle(&self, theta: f64) -> f64 {
        let a = self.max_angle;
        if theta <= -a {
            0.0
        } else if theta >= a {
            1.0
        } else {
            (a * a + 2.0 * a * theta - theta.signum() * theta * theta) / (2.0 * a * a)
        }
    }

    /// Triangular density on `[-a, a]`.
    pub fn pdf_angle(&self, theta: f64) -> f64 {
        let a = self.max_angle;
        if theta.abs() > a {
            0.0
        } else {
            (1.0 - theta.abs() / a) / a
        }
    }

    /// `P(R <= r | theta)`; only depends on `|theta|`.
    pub fn conditional_cdf_radius_given_angle(&self, r: f64, theta: f64) -> Result<f64> {
        let a = self.max_angle;
        let t = theta.abs();
        if t >= a {
            return domain(format!("conditioning angle {theta} outside (-{a}, {a})"));
        }
        check_radius(r)?;
        let r_min = 2.0 * (a - t).cos();
        if r <= r_min {
            return Ok(0.0);
        }
        if r >= 2.0 {
            return Ok(1.0);
        }
        Ok((1.0 - (0.5 * r).acos() / (a - t)).clamp(0.0, 1.0))
    }

    /// Joint density of `(R, theta)`, nonzero for
    /// `2 cos(a - |theta|) <= r < 2`.
    pub fn joint_pdf(&self, r: f64, theta: f64) -> f64 {
        let a = self.max_angle;
        let t = theta.abs();
        if t > a || r >= 2.0 || r < 2.0 * (a - t).cos() {
            return 0.0;
        }
        1.0 / (a * a * (4.0 - r * r).sqrt())
    }

    /// `∫∫ g(r, theta) f(r, theta) dr dtheta` over the support.
    ///
    /// With `r = 2 cos u` the joint law is uniform with density `1/a^2`
    /// on the triangle `0 <= u <= a - |theta|`, so the radius singularity
    /// disappears and a product Gauss rule applies.
    pub fn integrate<G: Fn(f64, f64) -> f64>(&self, g: G, nodes: usize, panels: usize) -> f64 {
        let a = self.max_angle;
        let rule = crate::quadrature::GaussLegendre::new(nodes);
        let norm = 1.0 / (a * a);
        let h = a / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let t_lo = p as f64 * h;
            for (t, wt) in rule.mapped(t_lo, t_lo + h) {
                let umax = a - t;
                let inner_pos =
                    rule.integrate_composite(0.0, umax, panels, |u| g(2.0 * u.cos(), t));
                let inner_neg =
                    rule.integrate_composite(0.0, umax, panels, |u| g(2.0 * u.cos(), -t));
                total += wt * (inner_pos + inner_neg);
            }
        }
        total * norm
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r < 0.0 || r.is_nan() {
        return domain(format!("radius {r} is negative"));
    }
    Ok(())
}
