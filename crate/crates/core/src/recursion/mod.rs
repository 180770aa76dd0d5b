//! Joint law of radius and angle for a moderate number of steps, built
//! one step at a time on a polar grid.
//!
//! Adding a step at angle `phi` moves the endpoint from `w` to
//! `z = w + e^{j phi}`, so the planar density after `N` steps is the
//! average over `phi` of the planar density after `N - 1` steps at
//! `z - e^{j phi}`. In polar form:
//!
//! ```text
//! f_N(r, theta) = r / (2a) * ∫ f_{N-1}(d, psi) / d  dphi,   d e^{j psi} = r e^{j theta} - e^{j phi}
//! ```

mod grid;
mod source;

pub use grid::{GridSpec, PolarGridDistribution, TabulatedPdf};
pub use source::{JointSource, SourceKind};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::support::{circle_intersections, SupportBoundary};
use crate::walk::{step_angle_cdf, step_angle_pdf, WalkConfig};

/// Outcome of one propagation step.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub grid: PolarGridDistribution,
    /// Grid mass before renormalisation.
    pub raw_mass: f64,
    /// Factor applied to reach unit mass.
    pub correction: f64,
}

/// Mass bookkeeping of a propagation, without the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassReport {
    pub steps: usize,
    pub raw_mass: f64,
    pub correction: f64,
}

impl Propagation {
    pub fn report(&self) -> MassReport {
        MassReport {
            steps: self.grid.config().n_steps(),
            raw_mass: self.raw_mass,
            correction: self.correction,
        }
    }
}

/// Adds one step to `prev` and tabulates the result on a grid.
pub fn propagate(prev: &JointSource, spec: &GridSpec) -> Result<Propagation> {
    spec.validate()?;
    let prev_cfg = prev.config();
    if prev_cfg.is_extended() {
        return Err(Error::Grid(
            "grid recursion needs max angle <= pi/2".to_string(),
        ));
    }
    let cfg = prev_cfg.with_steps(prev.steps() + 1)?;
    let a = cfg.max_angle();
    let mut grid = match prev.kind() {
        SourceKind::Line => {
            PolarGridDistribution::from_even_fn(&cfg, spec, |r, t| line_step_density(a, r, t))?
        }
        _ => {
            let boundary = prev.boundary();
            let rule = GaussLegendre::new(spec.phi_nodes);
            PolarGridDistribution::from_even_fn(&cfg, spec, |r, t| {
                step_density(prev, &boundary, &rule, r, t)
            })?
        }
    };
    let raw_mass = grid.total_mass();
    let correction = grid.normalize()?;
    log::info!(
        "propagated to N={} on {}x{} cells: raw mass {raw_mass:.6}, correction {correction:.6}",
        cfg.n_steps(),
        spec.n_radii,
        spec.n_angles
    );
    if (correction - 1.0).abs() > spec.grid_tol {
        log::warn!(
            "mass correction {correction:.6} at N={} exceeds grid tolerance {}",
            cfg.n_steps(),
            spec.grid_tol
        );
    }
    Ok(Propagation {
        grid,
        raw_mass,
        correction,
    })
}

/// Joint grid after `cfg.n_steps()` steps. Two steps are tabulated from
/// the one-step line law; longer walks start from the closed-form
/// two-step law, whose edge singularity a grid would smear.
pub fn propagate_to(cfg: &WalkConfig, spec: &GridSpec) -> Result<(Propagation, Vec<MassReport>)> {
    let n = cfg.n_steps();
    if n < 2 {
        return Err(Error::Grid("a single step has no planar density".into()));
    }
    let seed = JointSource::analytic(cfg, if n == 2 { 1 } else { 2 })?;
    let mut current = propagate(&seed, spec)?;
    let mut reports = vec![current.report()];
    while current.grid.config().n_steps() < n {
        current = propagate(&JointSource::grid(&current.grid), spec)?;
        reports.push(current.report());
    }
    Ok((current, reports))
}

/// Two-step density from the one-step line law. The previous endpoint
/// must sit on the unit circle, which pins the last step angle to
/// `theta ± acos(r/2)`.
fn line_step_density(a: f64, r: f64, theta: f64) -> f64 {
    if r <= 0.0 || r >= 2.0 {
        return 0.0;
    }
    let c = (0.5 * r).acos();
    let root_weight = 1.0 / (2.0 * a * a * (4.0 - r * r).sqrt());
    [(theta + c, theta - c), (theta - c, theta + c)]
        .iter()
        .filter(|(last, prev)| last.abs() <= a && prev.abs() <= a)
        .count() as f64
        * root_weight
}

/// Step-angle integral for a source with a planar density. The range of
/// `phi` is cut wherever the back-mapped point crosses a boundary circle
/// of the previous support, so every piece has a smooth integrand up to
/// endpoint singularities, which the cosine-mapped rule absorbs.
fn step_density(
    prev: &JointSource,
    boundary: &SupportBoundary,
    rule: &GaussLegendre,
    r: f64,
    theta: f64,
) -> f64 {
    let a = prev.max_angle();
    let (zy, zx) = theta.sin_cos();
    let (zx, zy) = (r * zx, r * zy);
    let mut cuts = vec![-a, a];
    for arc in boundary.arcs() {
        for (px, py) in circle_intersections((zx, zy), 1.0, arc.center, arc.radius) {
            let phi = (zy - py).atan2(zx - px);
            if phi.abs() < a {
                cuts.push(phi);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += rule.integrate_smoothed(w[0], w[1], |phi| {
            let (s, c) = phi.sin_cos();
            let (wx, wy) = (zx - c, zy - s);
            let d = wx.hypot(wy);
            if d == 0.0 {
                return 0.0;
            }
            prev.density(d, wy.atan2(wx)) / d
        });
    }
    total * r / (2.0 * a)
}

/// Radius CDF after one more step than `prev`, by total probability over
/// the previous endpoint: the new radius exceeds `r` exactly when the
/// last step angle lies within `acos((r^2 - x^2 - 1) / (2x))` of the
/// previous angle.
pub fn cdf_radius_recursive(r: f64, prev: &JointSource) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return domain(format!("radius {r} is negative"));
    }
    let n = prev.steps() + 1;
    if r >= n as f64 {
        return Ok(1.0);
    }
    let a = prev.max_angle();
    let exceed = prev.expectation(|x, t| {
        if x == 0.0 {
            return if r < 1.0 { 1.0 } else { 0.0 };
        }
        let arg = (r * r - x * x - 1.0) / (2.0 * x);
        if arg >= 1.0 {
            0.0
        } else if arg <= -1.0 {
            1.0
        } else {
            let c = arg.acos();
            step_angle_cdf(t + c, a) - step_angle_cdf(t - c, a)
        }
    });
    Ok((1.0 - exceed).clamp(0.0, 1.0))
}

/// Angle CDF after one more step, treating the new angle as the
/// radius-weighted average `(x t + phi) / (x + 1)` of the previous angle
/// and the step angle.
pub fn cdf_angle_approx(theta: f64, prev: &JointSource) -> f64 {
    let a = prev.max_angle();
    prev.expectation(|x, t| step_angle_cdf(theta * (1.0 + x) - x * t, a))
        .clamp(0.0, 1.0)
}

/// Density matching [`cdf_angle_approx`].
pub fn pdf_angle_approx(theta: f64, prev: &JointSource) -> f64 {
    let a = prev.max_angle();
    prev.expectation(|x, t| (1.0 + x) * step_angle_pdf(theta * (1.0 + x) - x * t, a))
        .max(0.0)
}
