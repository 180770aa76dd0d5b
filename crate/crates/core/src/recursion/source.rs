use crate::error::{Error, Result};
use crate::exact_two::ExactTwoStep;
use crate::quadrature::GaussLegendre;
use crate::recursion::grid::PolarGridDistribution;
use crate::support::SupportBoundary;
use crate::walk::WalkConfig;

// Resolution used when integrating against the analytic laws.
const LINE_PANELS: usize = 64;
const LINE_NODES: usize = 8;
const EXACT_PANELS: usize = 40;
const EXACT_NODES: usize = 8;

/// Law of the walk after some number of steps, used as the starting
/// point of one more step.
#[derive(Debug, Clone)]
pub struct JointSource<'a> {
    cfg: WalkConfig,
    kind: SourceKind<'a>,
}

#[derive(Debug, Clone)]
pub enum SourceKind<'a> {
    /// One step: the endpoint lies on the unit circle, so there is no
    /// planar density, only a line law with uniform angle.
    Line,
    /// Two steps, in closed form.
    ExactTwo(ExactTwoStep),
    /// Any number of steps, tabulated.
    Grid(&'a PolarGridDistribution),
}

impl<'a> JointSource<'a> {
    pub fn single_step(cfg: &WalkConfig) -> Result<Self> {
        Ok(Self {
            cfg: cfg.with_steps(1)?,
            kind: SourceKind::Line,
        })
    }

    pub fn exact_two(cfg: &WalkConfig) -> Result<Self> {
        let cfg = cfg.with_steps(2)?;
        Ok(Self {
            kind: SourceKind::ExactTwo(ExactTwoStep::from_config(&cfg)),
            cfg,
        })
    }

    pub fn grid(grid: &'a PolarGridDistribution) -> Self {
        Self {
            cfg: *grid.config(),
            kind: SourceKind::Grid(grid),
        }
    }

    /// The best available source for `steps` steps without a grid.
    pub fn analytic(cfg: &WalkConfig, steps: usize) -> Result<Self> {
        match steps {
            1 => Self::single_step(cfg),
            2 => Self::exact_two(cfg),
            _ => Err(Error::Grid(format!(
                "no analytic law for {steps} steps; propagate a grid instead"
            ))),
        }
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn kind(&self) -> &SourceKind<'a> {
        &self.kind
    }

    pub fn steps(&self) -> usize {
        self.cfg.n_steps()
    }

    pub fn max_angle(&self) -> f64 {
        self.cfg.max_angle()
    }

    pub fn boundary(&self) -> SupportBoundary {
        match self.kind {
            SourceKind::Grid(g) => g.boundary().clone(),
            _ => SupportBoundary::new(&self.cfg),
        }
    }

    /// Planar joint density of radius and angle. The one-step law has
    /// none and reports zero.
    pub fn density(&self, r: f64, theta: f64) -> f64 {
        match self.kind {
            SourceKind::Line => 0.0,
            SourceKind::ExactTwo(law) => law.joint_pdf(r, theta),
            SourceKind::Grid(g) => g.density(r, theta),
        }
    }

    /// `E[g(R, theta)]` under this law.
    pub fn expectation<G>(&self, g: G) -> f64
    where
        G: Fn(f64, f64) -> f64 + Sync,
    {
        match self.kind {
            SourceKind::Line => {
                let a = self.max_angle();
                GaussLegendre::new(LINE_NODES).integrate_composite(-a, a, LINE_PANELS, |t| g(1.0, t))
                    / (2.0 * a)
            }
            SourceKind::ExactTwo(law) => law.integrate(g, EXACT_NODES, EXACT_PANELS),
            SourceKind::Grid(grid) => grid.expectation(g),
        }
    }
}
