use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::TabulatedCdf;
use crate::support::SupportBoundary;
use crate::walk::{PolarPoint, WalkConfig};

/// Resolution settings for grid-based densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_radii: usize,
    pub n_angles: usize,
    /// Gauss-Legendre nodes per smooth piece of the step-angle integral.
    pub phi_nodes: usize,
    /// Allowed deviation of the total mass from one.
    pub grid_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_radii: 400,
            n_angles: 400,
            phi_nodes: 64,
            grid_tol: 0.005,
        }
    }
}

impl GridSpec {
    pub fn new(n_radii: usize, n_angles: usize, phi_nodes: usize) -> Result<Self> {
        let spec = Self {
            n_radii,
            n_angles,
            phi_nodes,
            ..Self::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_radii < 2 || self.n_angles < 2 {
            return Err(Error::Grid(format!(
                "grid needs at least 2x2 cells, got {}x{}",
                self.n_radii, self.n_angles
            )));
        }
        if self.phi_nodes == 0 {
            return Err(Error::Grid("phi_nodes must be positive".into()));
        }
        if !(self.grid_tol > 0.0 && self.grid_tol < 1.0) {
            return Err(Error::Grid(format!("grid_tol {} outside (0, 1)", self.grid_tol)));
        }
        Ok(())
    }

    /// Both cell counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            n_radii: 2 * self.n_radii,
            n_angles: 2 * self.n_angles,
            ..*self
        }
    }
}

/// A density sampled on a tabulated axis, with quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPdf {
    pub points: Vec<f64>,
    pub density: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TabulatedPdf {
    pub fn total(&self) -> f64 {
        self.density.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// Piecewise-linear interpolation, zero outside the tabulated range.
    pub fn value_at(&self, x: f64) -> f64 {
        let p = &self.points;
        if p.is_empty() || x < p[0] || x > p[p.len() - 1] {
            return 0.0;
        }
        let k = p.partition_point(|&v| v <= x).clamp(1, p.len() - 1);
        let (x0, x1) = (p[k - 1], p[k]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        self.density[k - 1] * (1.0 - t) + self.density[k] * t
    }

    /// Running integral at each tabulation point. Each cell contributes
    /// half of its mass before and half after its centre.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.points.len());
        let mut prev_half = 0.0;
        for (f, w) in self.density.iter().zip(&self.weights) {
            let half = 0.5 * f * w;
            acc += prev_half + half;
            out.push(acc);
            prev_half = half;
        }
        out
    }

    /// Running integral as an interpolated CDF. The outer cells are taken
    /// to extend `weight / 2` beyond their centres.
    pub fn to_cdf(&self) -> TabulatedCdf {
        let n = self.points.len();
        let mut nodes = Vec::with_capacity(n + 2);
        let mut values = Vec::with_capacity(n + 2);
        if n > 0 {
            nodes.push(self.points[0] - 0.5 * self.weights[0]);
            values.push(0.0);
        }
        nodes.extend_from_slice(&self.points);
        values.extend(self.cumulative());
        if n > 0 {
            nodes.push(self.points[n - 1] + 0.5 * self.weights[n - 1]);
            values.push(self.total());
        }
        TabulatedCdf::from_parts(nodes, values)
    }

    /// Running integral at `x`; see [`to_cdf`](Self::to_cdf).
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.to_cdf().eval(x)
    }
}

/// Joint density of radius and angle tabulated at cell centres.
///
/// Radii are graded quadratically toward the outer radius `N`, where the
/// density can have an inverse-square-root edge: with `r = N - L s^2`
/// and uniform cells in `s`, such an edge becomes a smooth integrand.
/// Angles are uniform and symmetric over `[-a, a]`.
#[derive(Debug, Clone)]
pub struct PolarGridDistribution {
    cfg: WalkConfig,
    spec: GridSpec,
    boundary: SupportBoundary,
    span: f64,
    radii: Vec<f64>,
    radius_weights: Vec<f64>,
    angles: Vec<f64>,
    angle_step: f64,
    density: Vec<f64>,
    inside: Vec<bool>,
}

impl PolarGridDistribution {
    /// Tabulates `f` at every cell centre inside the support; the
    /// remaining cells are zero.
    pub fn from_fn<F>(cfg: &WalkConfig, spec: &GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        Self::build(cfg, spec, f, false)
    }

    /// Like [`from_fn`](Self::from_fn) for a density known to be even in
    /// the angle: only half the cells are evaluated, and the result is
    /// exactly symmetric.
    pub fn from_even_fn<F>(cfg: &WalkConfig, spec: &GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        Self::build(cfg, spec, f, true)
    }

    /// Wraps raw cell values (row-major, radius-major) without masking.
    pub fn from_values(cfg: &WalkConfig, spec: &GridSpec, values: Vec<f64>) -> Result<Self> {
        let mut g = Self::empty(cfg, spec)?;
        if values.len() != g.density.len() {
            return Err(Error::Grid(format!(
                "expected {} cell values, got {}",
                g.density.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Grid("cell values must be finite and nonnegative".into()));
        }
        g.density = values;
        g.inside.fill(true);
        Ok(g)
    }

    fn empty(cfg: &WalkConfig, spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let boundary = SupportBoundary::new(cfg);
        let n = cfg.n_steps() as f64;
        let (nr, na) = (spec.n_radii, spec.n_angles);
        let r_min = boundary.min_radius();
        let r_lo = (r_min - (n - r_min) / nr as f64).max(0.0);
        let span = n - r_lo;
        let ds = 1.0 / nr as f64;
        let mut radii = Vec::with_capacity(nr);
        let mut radius_weights = Vec::with_capacity(nr);
        for i in 0..nr {
            let s = 1.0 - (i as f64 + 0.5) * ds;
            radii.push(n - span * s * s);
            radius_weights.push(2.0 * span * s * ds);
        }
        let a = cfg.max_angle();
        let angle_step = 2.0 * a / na as f64;
        let angles = (0..na)
            .map(|j| {
                let k = j as f64 + 0.5 - 0.5 * na as f64;
                k * angle_step
            })
            .collect();
        Ok(Self {
            cfg: *cfg,
            spec: *spec,
            boundary,
            span,
            radii,
            radius_weights,
            angles,
            angle_step,
            density: vec![0.0; nr * na],
            inside: vec![false; nr * na],
        })
    }

    fn build<F>(cfg: &WalkConfig, spec: &GridSpec, f: F, even: bool) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let mut g = Self::empty(cfg, spec)?;
        let na = spec.n_angles;
        let computed = if even { na.div_ceil(2) } else { na };
        let (radii, angles, boundary) = (&g.radii, &g.angles, &g.boundary);
        let rows: Vec<Vec<(f64, bool)>> = radii
            .par_iter()
            .map(|&r| {
                angles[..computed]
                    .iter()
                    .map(|&t| {
                        let inside = boundary.contains(PolarPoint::new(r, t), 0.0).unwrap_or(false);
                        if inside {
                            (f(r, t), true)
                        } else {
                            (0.0, false)
                        }
                    })
                    .collect()
            })
            .collect();
        for (i, row) in rows.into_iter().enumerate() {
            for (j, (v, ins)) in row.into_iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Grid(format!(
                        "density {v} at r={}, theta={}",
                        g.radii[i], g.angles[j]
                    )));
                }
                g.density[i * na + j] = v;
                g.inside[i * na + j] = ins;
                if even {
                    g.density[i * na + na - 1 - j] = v;
                    g.inside[i * na + na - 1 - j] = ins;
                }
            }
        }
        Ok(g)
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn boundary(&self) -> &SupportBoundary {
        &self.boundary
    }

    /// Cell-centre radii, ascending.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Radial extent of each cell.
    pub fn radius_weights(&self) -> &[f64] {
        &self.radius_weights
    }

    /// Cell-centre angles, ascending and symmetric about zero.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle_step(&self) -> f64 {
        self.angle_step
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.spec.n_angles + j]
    }

    /// Row-major cell values (radius index outer).
    pub fn values(&self) -> &[f64] {
        &self.density
    }

    pub fn total_mass(&self) -> f64 {
        self.expectation(|_, _| 1.0)
    }

    /// Scales the density to unit mass and returns the factor applied.
    pub fn normalize(&mut self) -> Result<f64> {
        let mass = self.total_mass();
        if !(mass > 0.0) {
            return Err(Error::Grid("grid carries no mass".into()));
        }
        let factor = 1.0 / mass;
        self.density.iter_mut().for_each(|v| *v *= factor);
        Ok(factor)
    }

    /// Midpoint-rule integral of `g * density`. Rows are summed in order
    /// so the result does not depend on the worker count.
    pub fn expectation<G>(&self, g: G) -> f64
    where
        G: Fn(f64, f64) -> f64 + Sync,
    {
        let na = self.spec.n_angles;
        let rows: Vec<f64> = (0..self.spec.n_radii)
            .into_par_iter()
            .map(|i| {
                let r = self.radii[i];
                let row = &self.density[i * na..(i + 1) * na];
                let s: f64 = row
                    .iter()
                    .zip(&self.angles)
                    .filter(|(v, _)| **v != 0.0)
                    .map(|(v, &t)| v * g(r, t))
                    .sum();
                s * self.radius_weights[i]
            })
            .collect();
        rows.iter().sum::<f64>() * self.angle_step
    }

    /// Continuous radial index of `r`.
    fn radial_index(&self, r: f64) -> f64 {
        let n = self.cfg.n_steps() as f64;
        let s = ((n - r) / self.span).max(0.0).sqrt();
        (1.0 - s) * self.spec.n_radii as f64 - 0.5
    }

    fn angular_index(&self, theta: f64) -> f64 {
        (theta + self.cfg.max_angle()) / self.angle_step - 0.5
    }

    /// Bilinear interpolation using only corners inside the support,
    /// with weights renormalised over those corners. Points outside the
    /// support give zero; points whose four corners are all outside take
    /// the nearest interior cell value.
    pub fn density(&self, r: f64, theta: f64) -> f64 {
        if !self
            .boundary
            .contains(PolarPoint::new(r, theta), 0.0)
            .unwrap_or(false)
        {
            return 0.0;
        }
        let (nr, na) = (self.spec.n_radii, self.spec.n_angles);
        let x = self.radial_index(r).clamp(0.0, (nr - 1) as f64);
        let y = self.angular_index(theta).clamp(0.0, (na - 1) as f64);
        let i0 = (x.floor() as usize).min(nr - 2);
        let j0 = (y.floor() as usize).min(na - 2);
        let (fx, fy) = (x - i0 as f64, y - j0 as f64);
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                let k = (i0 + di) * na + j0 + dj;
                let w = wx * wy;
                if self.inside[k] && w > 0.0 {
                    acc += w * self.density[k];
                    wsum += w;
                }
            }
        }
        if wsum > 1e-12 {
            return acc / wsum;
        }
        self.nearest_inside(x, y).unwrap_or(0.0)
    }

    fn nearest_inside(&self, x: f64, y: f64) -> Option<f64> {
        let (nr, na) = (self.spec.n_radii as i64, self.spec.n_angles as i64);
        let (ci, cj) = (x.round() as i64, y.round() as i64);
        let mut best: Option<(f64, f64)> = None;
        for i in (ci - 1).max(0)..=(ci + 1).min(nr - 1) {
            for j in (cj - 1).max(0)..=(cj + 1).min(na - 1) {
                let k = (i * na + j) as usize;
                if !self.inside[k] {
                    continue;
                }
                let d = (i as f64 - x).powi(2) + (j as f64 - y).powi(2);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, self.density[k]));
                }
            }
        }
        best.map(|(_, v)| v)
    }

    /// Density of the radius alone, integrating each row over angles.
    pub fn marginal_radius(&self) -> TabulatedPdf {
        let na = self.spec.n_angles;
        let density = (0..self.spec.n_radii)
            .map(|i| self.density[i * na..(i + 1) * na].iter().sum::<f64>() * self.angle_step)
            .collect();
        TabulatedPdf {
            points: self.radii.clone(),
            density,
            weights: self.radius_weights.clone(),
        }
    }

    /// Density of the angle alone, integrating each column over radii.
    pub fn marginal_angle(&self) -> TabulatedPdf {
        let na = self.spec.n_angles;
        let mut density = vec![0.0; na];
        for (i, w) in self.radius_weights.iter().enumerate() {
            for (j, d) in density.iter_mut().enumerate() {
                *d += w * self.density[i * na + j];
            }
        }
        TabulatedPdf {
            points: self.angles.clone(),
            density,
            weights: vec![self.angle_step; na],
        }
    }
}
