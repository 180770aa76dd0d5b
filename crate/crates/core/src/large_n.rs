//! Gaussian approximations for many steps.
//!
//! The endpoint's real and imaginary parts are asymptotically independent
//! normals with means `(N mu_x, 0)` and variances `(N var_x, N var_y)`.
//! The squared radius is then a generalized chi-square, and the tangent of
//! the angle is a ratio of normals, approximated in the usual way by a
//! normal in the tangent.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::genchi2::{self, normal_cdf, normal_pdf, GenChi2Params};
use crate::support::SupportBoundary;
use crate::walk::{clt_moments, MomentSet, PolarPoint, WalkConfig};

const TRUNCATION_CELLS: usize = 512;

#[derive(Debug)]
pub struct LargeNModel {
    cfg: WalkConfig,
    moments: MomentSet,
    radius_law: GenChi2Params,
    support_mass: OnceLock<f64>,
}

impl LargeNModel {
    pub fn new(cfg: &WalkConfig) -> Result<Self> {
        let m = clt_moments(cfg);
        let n = cfg.n_steps() as f64;
        if !(m.var_x > 0.0 && m.var_y > 0.0) {
            return domain(format!(
                "degenerate step moments at max angle {}",
                cfg.max_angle()
            ));
        }
        let radius_law = GenChi2Params::chi2_sum(
            vec![n * m.var_x, n * m.var_y],
            vec![1, 1],
            vec![n * m.mean_x * m.mean_x / m.var_x, 0.0],
        )?;
        Ok(Self {
            cfg: *cfg,
            moments: m,
            radius_law,
            support_mass: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn moments(&self) -> &MomentSet {
        &self.moments
    }

    /// Law of the squared radius.
    pub fn radius_law(&self) -> &GenChi2Params {
        &self.radius_law
    }

    fn n(&self) -> f64 {
        self.cfg.n_steps() as f64
    }

    pub fn cdf_radius(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        genchi2::cdf(r * r, &self.radius_law)
    }

    pub fn pdf_radius(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        Ok(2.0 * r * genchi2::pdf(r * r, &self.radius_law)?)
    }

    /// Location of the largest radius density, by a scan over six standard
    /// deviations around the mean radius and golden-section refinement.
    pub fn pdf_radius_mode(&self) -> Result<f64> {
        let m = &self.moments;
        let centre = self.n() * m.mean_x;
        let spread = 6.0 * (self.n() * m.var_x.max(m.var_y)).sqrt();
        let lo = (centre - spread).max(0.0);
        let hi = centre + spread;
        let steps = 400;
        let mut best = (lo, f64::NEG_INFINITY);
        for i in 0..=steps {
            let r = lo + (hi - lo) * i as f64 / steps as f64;
            let v = self.pdf_radius(r)?;
            if v > best.1 {
                best = (r, v);
            }
        }
        let h = (hi - lo) / steps as f64;
        let (mut a, mut b) = ((best.0 - h).max(0.0), best.0 + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.pdf_radius(c)? > self.pdf_radius(d)? {
                b = d;
            } else {
                a = c;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn tangent_score(&self, t: f64) -> (f64, f64) {
        let m = &self.moments;
        let q = t * t * m.var_x + m.var_y;
        (self.n().sqrt() * m.mean_x * t / q.sqrt(), q)
    }

    pub fn cdf_angle(&self, theta: f64) -> Result<f64> {
        check_angle(theta)?;
        Ok(normal_cdf(self.tangent_score(theta.tan()).0))
    }

    pub fn pdf_angle(&self, theta: f64) -> Result<f64> {
        check_angle(theta)?;
        let m = &self.moments;
        let (z, q) = self.tangent_score(theta.tan());
        let c = theta.cos();
        Ok(normal_pdf(z) * self.n().sqrt() * m.mean_x * m.var_y / (q.powf(1.5) * c * c))
    }

    /// Joint density of radius and angle: the polar form of the two
    /// independent normal coordinates. With `truncate`, the density is
    /// restricted to the reachable set and rescaled to unit mass there.
    pub fn joint_pdf(&self, r: f64, theta: f64, truncate: bool) -> Result<f64> {
        check_radius(r)?;
        if truncate {
            self.check_truncatable()?;
            let b = SupportBoundary::new(&self.cfg);
            if !b.contains(PolarPoint::new(r, theta), 0.0)? {
                return Ok(0.0);
            }
            return Ok(self.raw_joint(r, theta) / self.support_mass()?);
        }
        Ok(self.raw_joint(r, theta))
    }

    fn raw_joint(&self, r: f64, theta: f64) -> f64 {
        let m = &self.moments;
        let n = self.n();
        let (sx, sy) = (m.var_x.sqrt(), m.var_y.sqrt());
        let (s, c) = theta.sin_cos();
        r / (n * sx * sy)
            * normal_pdf((r * c - n * m.mean_x) / (n.sqrt() * sx))
            * normal_pdf(r * s / (n.sqrt() * sy))
    }

    fn check_truncatable(&self) -> Result<()> {
        if self.cfg.is_extended() {
            return domain("truncation needs the reachable set, defined for max angle <= pi/2");
        }
        Ok(())
    }

    /// Mass of the untruncated joint density inside the reachable set,
    /// by a midpoint rule on a polar grid; computed once and cached.
    pub fn support_mass(&self) -> Result<f64> {
        self.check_truncatable()?;
        Ok(*self.support_mass.get_or_init(|| self.compute_support_mass()))
    }

    fn compute_support_mass(&self) -> f64 {
        let b = SupportBoundary::new(&self.cfg);
        let (r_lo, r_hi) = (b.min_radius(), self.n());
        let a = self.cfg.max_angle();
        let cells = TRUNCATION_CELLS;
        let dr = (r_hi - r_lo) / cells as f64;
        let dt = 2.0 * a / cells as f64;
        let rows: Vec<f64> = (0..cells)
            .into_par_iter()
            .map(|i| {
                let r = r_lo + (i as f64 + 0.5) * dr;
                (0..cells)
                    .map(|j| {
                        let t = -a + (j as f64 + 0.5) * dt;
                        if b.contains(PolarPoint::new(r, t), 0.0).unwrap_or(false) {
                            self.raw_joint(r, t)
                        } else {
                            0.0
                        }
                    })
                    .sum::<f64>()
            })
            .collect();
        let mass = rows.iter().sum::<f64>() * dr * dt;
        log::info!(
            "large-N in-support mass for N={}, a={}: {mass:.6}",
            self.cfg.n_steps(),
            a
        );
        mass
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return domain(format!("radius {r} is negative"));
    }
    Ok(())
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_nan() || theta.abs() >= FRAC_PI_2 {
        return domain(format!("angle {theta} outside (-pi/2, pi/2)"));
    }
    Ok(())
}
