//! Geometry of the set of reachable endpoints.
//!
//! The reachable set is bounded by an outer arc of radius `N` and an
//! inner chain of `N` unit arcs. Arc `k` of the chain is centred at
//! `k e^{ja} + (N-1-k) e^{-ja}`, and every arc (outer included) covers
//! local angles `[-a, a]` around its centre.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::walk::{PolarPoint, WalkConfig};

const ANGLE_TOL: f64 = 1e-12;
const RAY_DIRECTION: f64 = 2.236_067_977;

/// A circular arc spanning local angles `[-a, a]` around its centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: (f64, f64),
    pub radius: f64,
    pub half_width: f64,
}

impl Arc {
    pub fn point(&self, phi: f64) -> (f64, f64) {
        let (s, c) = phi.sin_cos();
        (self.center.0 + self.radius * c, self.center.1 + self.radius * s)
    }

    /// Euclidean distance from `(x, y)` to the arc.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let (wx, wy) = (x - self.center.0, y - self.center.1);
        let ang = wy.atan2(wx);
        if ang.abs() <= self.half_width {
            (wx.hypot(wy) - self.radius).abs()
        } else {
            let (ax, ay) = self.point(self.half_width);
            let (bx, by) = self.point(-self.half_width);
            (x - ax).hypot(y - ay).min((x - bx).hypot(y - by))
        }
    }
}

/// Intersection points of two full circles.
pub(crate) fn circle_intersections(
    c1: (f64, f64),
    r1: f64,
    c2: (f64, f64),
    r2: f64,
) -> Vec<(f64, f64)> {
    let (dx, dy) = (c2.0 - c1.0, c2.1 - c1.1);
    let d = dx.hypot(dy);
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return Vec::new();
    }
    let along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - along * along).max(0.0).sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let (mx, my) = (c1.0 + along * ux, c1.1 + along * uy);
    if h == 0.0 {
        vec![(mx, my)]
    } else {
        vec![(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]
    }
}

/// A point on the inner boundary together with its parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub t: f64,
    pub point: PolarPoint,
    pub segment_index: usize,
    pub local_angle: f64,
}

/// Boundary of the reachable set for a given walk.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportBoundary {
    cfg: WalkConfig,
    inner: Vec<Arc>,
    outer: Arc,
    unique: bool,
}

impl SupportBoundary {
    pub fn new(cfg: &WalkConfig) -> Self {
        let n = cfg.n_steps();
        let a = cfg.max_angle();
        let (s, c) = a.sin_cos();
        let inner = (0..n)
            .map(|k| Arc {
                center: (
                    (n - 1) as f64 * c,
                    (2.0 * k as f64 - (n - 1) as f64) * s,
                ),
                radius: 1.0,
                half_width: a,
            })
            .collect();
        Self {
            cfg: *cfg,
            inner,
            outer: Arc {
                center: (0.0, 0.0),
                radius: n as f64,
                half_width: a,
            },
            unique: is_radius_function_of_angle(cfg),
        }
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn inner_segments(&self) -> &[Arc] {
        &self.inner
    }

    pub fn outer_arc(&self) -> &Arc {
        &self.outer
    }

    /// Outer arc followed by the inner chain.
    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        std::iter::once(&self.outer).chain(self.inner.iter())
    }

    pub fn min_radius(&self) -> f64 {
        min_radius(&self.cfg)
    }

    pub fn is_unique(&self) -> bool {
        self.unique
    }

    pub fn outer_boundary(&self, phi: f64) -> Result<PolarPoint> {
        let a = self.cfg.max_angle();
        if phi.abs() > a {
            return domain(format!("outer boundary angle {phi} outside [-{a}, {a}]"));
        }
        Ok(PolarPoint::new(self.cfg.n_steps() as f64, phi))
    }

    /// Inner boundary at parameter `t in [0, 1]`. The curve runs from the
    /// corner `N e^{-ja}` at `t = 0` to `N e^{ja}` at `t = 1`, visiting
    /// the arcs in order of their index.
    pub fn inner_boundary(&self, t: f64) -> Result<BoundarySample> {
        if !(0.0..=1.0).contains(&t) {
            return domain(format!("boundary parameter {t} outside [0, 1]"));
        }
        let n = self.cfg.n_steps();
        let a = self.cfg.max_angle();
        let nt = n as f64 * t;
        let k = ((nt - 1.0).ceil().max(0.0) as usize).min(n - 1);
        let phi = (a * (2.0 * (nt - k as f64) - 1.0)).clamp(-a, a);
        let (x, y) = self.inner[k].point(phi);
        Ok(BoundarySample {
            t,
            point: PolarPoint::from_cartesian(x, y),
            segment_index: k,
            local_angle: phi,
        })
    }

    /// Radius of the inner boundary at angle `theta`, when that radius is
    /// a single-valued function of the angle.
    pub fn inner_radius_at_angle(&self, theta: f64) -> Option<f64> {
        if !self.unique {
            return None;
        }
        let n = self.cfg.n_steps();
        let a = self.cfg.max_angle();
        let theta = theta.clamp(-a, a);
        if n == 1 {
            return Some(1.0);
        }
        // junction m (m steps at +a, N-m at -a) sits at tan(theta) = (2m-N) tan(a) / N
        let ta = a.tan();
        let m = if ta.abs() < 1e15 {
            0.5 * n as f64 * (1.0 + theta.tan() / ta)
        } else if theta >= 0.0 {
            n as f64
        } else {
            0.0
        };
        let k = (m.floor().max(0.0) as usize).min(n - 1);
        let (cx, cy) = self.inner[k].center;
        let (ux, uy) = (theta.cos(), theta.sin());
        let b = cx * ux + cy * uy;
        let disc = (1.0 - (cx * cx + cy * cy - b * b)).max(0.0);
        Some(b + disc.sqrt())
    }

    /// Euclidean distance to the boundary curve.
    pub fn distance_to_boundary(&self, x: f64, y: f64) -> f64 {
        self.arcs()
            .map(|arc| arc.distance(x, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Even-odd test against the exact arcs. The ray direction is fixed
    /// and deliberately generic: by symmetry, axis-aligned or radial rays
    /// pass straight through arc junctions and double count them.
    fn inside_by_crossings(&self, x: f64, y: f64) -> bool {
        let (uy, ux) = RAY_DIRECTION.sin_cos();
        let mut crossings = 0usize;
        for arc in self.arcs() {
            let (wx, wy) = (x - arc.center.0, y - arc.center.1);
            let b = ux * wx + uy * wy;
            let c = wx * wx + wy * wy - arc.radius * arc.radius;
            let disc = b * b - c;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            for s in [-b - sq, -b + sq] {
                if s <= 0.0 {
                    continue;
                }
                let (qx, qy) = (wx + s * ux, wy + s * uy);
                if qy.atan2(qx).abs() <= arc.half_width + ANGLE_TOL {
                    crossings += 1;
                }
            }
        }
        crossings % 2 == 1
    }

    /// Whether `point` lies within `tol` of the closed reachable set.
    pub fn contains(&self, point: PolarPoint, tol: f64) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return domain(format!("negative tolerance {tol}"));
        }
        let n = self.cfg.n_steps() as f64;
        let a = self.cfg.max_angle();
        let (r, theta) = (point.radius, point.angle);
        if r > n + tol || angular_excess_distance(r, theta, a) > tol {
            return Ok(false);
        }
        if self.cfg.n_steps() == 1 {
            return Ok((r - 1.0).abs() <= tol);
        }
        if let Some(r_in) = self.inner_radius_at_angle(theta) {
            if r >= r_in - tol {
                return Ok(true);
            }
        }
        let (x, y) = point.to_cartesian();
        if self.distance_to_boundary(x, y) <= tol {
            return Ok(true);
        }
        Ok(!self.unique && self.inside_by_crossings(x, y))
    }
}

/// Distance from a point to the wedge `|angle| <= a`.
fn angular_excess_distance(r: f64, theta: f64, a: f64) -> f64 {
    let excess = theta.abs() - a;
    if excess <= 0.0 {
        0.0
    } else if excess < std::f64::consts::FRAC_PI_2 {
        r * excess.sin()
    } else {
        r
    }
}

/// Smallest attainable radius after `N` steps.
pub fn min_radius(cfg: &WalkConfig) -> f64 {
    let n = cfg.n_steps();
    let hi = n.div_ceil(2) as f64;
    let lo = (n / 2) as f64;
    let a = cfg.max_angle();
    (hi * hi + lo * lo + 2.0 * hi * lo * (2.0 * a).cos()).max(0.0).sqrt()
}

/// Largest step half-width for which the inner boundary radius is a
/// function of the angle.
pub fn uniqueness_threshold(n_steps: usize) -> Result<f64> {
    if n_steps < 2 {
        return domain("uniqueness threshold needs at least two steps");
    }
    Ok(0.5 * (-1.0 / (n_steps as f64 - 1.0)).acos())
}

pub fn is_radius_function_of_angle(cfg: &WalkConfig) -> bool {
    match uniqueness_threshold(cfg.n_steps()) {
        Ok(limit) => cfg.max_angle() <= limit,
        Err(_) => true,
    }
}

pub fn contains(point: PolarPoint, cfg: &WalkConfig, tol: f64) -> Result<bool> {
    SupportBoundary::new(cfg).contains(point, tol)
}
