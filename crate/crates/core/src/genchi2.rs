//! Generalized chi-square law: `sum_j w_j chi2(k_j, lambda_j) + s Z + m`,
//! evaluated by inverting its characteristic function (Imhof's form).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF};

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive, gk15, wynn_epsilon};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

// Error budget of the inversion integrals.
const TAIL_TOL: f64 = 1e-10;
const SEGMENT_TOL: f64 = 1e-11;
const MAX_PANELS: usize = 20_000;
const MAX_DOUBLINGS: usize = 60;
// Doublings tried before an oscillating, slowly decaying tail is summed
// half-period by half-period instead.
const DOUBLINGS_BEFORE_SERIES: usize = 4;
const MAX_SERIES_TERMS: usize = 2_000;
const SERIES_WINDOW: usize = 24;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Parameters `(w, k, lambda, s, m)` of the law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenChi2Params {
    pub weights: Vec<f64>,
    pub dofs: Vec<u32>,
    pub noncentralities: Vec<f64>,
    pub gaussian_sd: f64,
    pub offset: f64,
}

impl GenChi2Params {
    pub fn new(
        weights: Vec<f64>,
        dofs: Vec<u32>,
        noncentralities: Vec<f64>,
        gaussian_sd: f64,
        offset: f64,
    ) -> Result<Self> {
        let p = Self {
            weights,
            dofs,
            noncentralities,
            gaussian_sd,
            offset,
        };
        p.validate()?;
        Ok(p)
    }

    /// Weighted sum of central and noncentral chi-squares, no Gaussian
    /// term, no offset.
    pub fn chi2_sum(weights: Vec<f64>, dofs: Vec<u32>, noncentralities: Vec<f64>) -> Result<Self> {
        Self::new(weights, dofs, noncentralities, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if n == 0 || self.dofs.len() != n || self.noncentralities.len() != n {
            return domain(format!(
                "weights, dofs and noncentralities need equal nonzero lengths, got {}, {}, {}",
                n,
                self.dofs.len(),
                self.noncentralities.len()
            ));
        }
        if self.dofs.contains(&0) {
            return domain("degrees of freedom must be at least 1");
        }
        if self.noncentralities.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return domain("noncentralities must be finite and nonnegative");
        }
        if self.weights.iter().any(|w| !w.is_finite())
            || !self.gaussian_sd.is_finite()
            || !self.offset.is_finite()
        {
            return domain("weights, gaussian_sd and offset must be finite");
        }
        if self.weights.iter().all(|w| *w == 0.0) && self.gaussian_sd == 0.0 {
            return domain("law is a point mass: all weights and the gaussian term vanish");
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.terms()
            .map(|(w, k, l)| w * (k + l))
            .sum::<f64>()
            + self.offset
    }

    pub fn variance(&self) -> f64 {
        self.terms()
            .map(|(w, k, l)| 2.0 * w * w * (k + 2.0 * l))
            .sum::<f64>()
            + self.gaussian_sd * self.gaussian_sd
    }

    /// Infimum of the support, finite when every weight is nonnegative
    /// and there is no Gaussian term.
    pub fn support_min(&self) -> f64 {
        if self.gaussian_sd == 0.0 && self.weights.iter().all(|w| *w >= 0.0) {
            self.offset
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn support_max(&self) -> f64 {
        if self.gaussian_sd == 0.0 && self.weights.iter().all(|w| *w <= 0.0) {
            self.offset
        } else {
            f64::INFINITY
        }
    }

    /// Nonzero terms as `(w, k, lambda)`.
    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.weights
            .iter()
            .zip(&self.dofs)
            .zip(&self.noncentralities)
            .filter(|((w, _), _)| **w != 0.0)
            .map(|((w, k), l)| (*w, *k as f64, *l))
    }

    /// `Some((w, k))` for a single central term without Gaussian part.
    fn single_central(&self) -> Option<(f64, f64)> {
        let mut it = self.terms();
        match (it.next(), it.next()) {
            (Some((w, k, l)), None) if l == 0.0 && self.gaussian_sd == 0.0 => Some((w, k)),
            _ => None,
        }
    }

    fn is_gaussian(&self) -> bool {
        self.terms().next().is_none()
    }
}

/// Integrands of the inversion formulas at `y = x - m`.
struct Inversion<'a> {
    p: &'a GenChi2Params,
    y: f64,
    ln_c: f64,
    total_dof: f64,
}

impl<'a> Inversion<'a> {
    fn new(p: &'a GenChi2Params, x: f64) -> Self {
        let (mut ln_c, mut total_dof) = (0.0, 0.0);
        for (w, k, _) in p.terms() {
            ln_c += 0.5 * k * w.abs().ln();
            total_dof += k;
        }
        Self {
            p,
            y: x - p.offset,
            ln_c,
            total_dof,
        }
    }

    /// Phase and log-modulus of the integrand.
    fn phase_and_log_modulus(&self, u: f64) -> (f64, f64) {
        let mut phase = -0.5 * self.y * u;
        let mut ln_rho = 0.125 * (self.p.gaussian_sd * u).powi(2);
        for (w, k, l) in self.p.terms() {
            let wu = w * u;
            let q = wu * wu;
            phase += 0.5 * (k * wu.atan() + l * wu / (1.0 + q));
            ln_rho += 0.25 * k * q.ln_1p() + 0.5 * l * q / (1.0 + q);
        }
        (phase, ln_rho)
    }

    fn cdf_integrand(&self, u: f64) -> f64 {
        if u == 0.0 {
            // limit of sin(phase) / u
            return self.p.terms().map(|(w, k, l)| 0.5 * w * (k + l)).sum::<f64>() - 0.5 * self.y;
        }
        let (phase, ln_rho) = self.phase_and_log_modulus(u);
        phase.sin() * (-ln_rho).exp() / u
    }

    fn pdf_integrand(&self, u: f64) -> f64 {
        let (phase, ln_rho) = self.phase_and_log_modulus(u);
        phase.cos() * (-ln_rho).exp()
    }

    /// Log of the part of the modulus that is nondecreasing in `u`,
    /// without the Gaussian factor.
    fn ln_growth(&self, u: f64) -> f64 {
        self.p
            .terms()
            .map(|(w, _, l)| {
                let q = (w * u).powi(2);
                0.5 * l * q / (1.0 + q)
            })
            .sum()
    }

    /// Bound on `(1/pi) ∫_U^∞ |sin(phase)| / (u rho) du`, from
    /// `rho >= C u^{K/2} E(U)` for `u >= U`.
    fn cdf_tail_bound(&self, big_u: f64) -> f64 {
        let s = self.p.gaussian_sd;
        let half_k = 0.5 * self.total_dof;
        let ln_e = self.ln_growth(big_u) + 0.125 * (s * big_u).powi(2);
        if half_k == 0.0 {
            // pure Gaussian: ∫_U^∞ e^{-s²u²/8} / u du <= e^{-s²U²/8} * 4 / (s U)²
            return (4.0 / (s * big_u).powi(2)) * (-ln_e).exp() / PI;
        }
        (1.0 / half_k) * (-self.ln_c - half_k * big_u.ln() - ln_e).exp() / PI
    }

    /// Bound on `(1/(2 pi)) ∫_U^∞ 1 / rho du`; infinite when the
    /// envelope alone is not integrable.
    fn pdf_tail_bound(&self, big_u: f64) -> f64 {
        let s = self.p.gaussian_sd;
        let half_k = 0.5 * self.total_dof;
        let ln_g = self.ln_growth(big_u);
        if half_k > 1.0 {
            let ln_e = ln_g + 0.125 * (s * big_u).powi(2);
            return (-self.ln_c - (half_k - 1.0) * big_u.ln() - ln_e).exp()
                / (half_k - 1.0)
                / (2.0 * PI);
        }
        if s > 0.0 {
            let gauss = 4.0 / (s * s * big_u) * (-0.125 * (s * big_u).powi(2)).exp();
            return (-self.ln_c - half_k * big_u.ln() - ln_g).exp() * gauss / (2.0 * PI);
        }
        f64::INFINITY
    }

    /// Natural scale of `u`: where the fastest term starts to decay.
    fn scale(&self) -> f64 {
        let w_max = self.p.terms().map(|(w, _, _)| w.abs()).fold(0.0, f64::max);
        let s = self.p.gaussian_sd.abs();
        1.0 / w_max.max(0.5 * s)
    }

    /// Angular frequency of the integrand far out, where every `atan`
    /// has saturated.
    fn tail_frequency(&self) -> f64 {
        0.5 * self.y.abs()
    }
}

/// `∫_0^∞ g`, extending the range until `tail` certifies the remainder
/// or, for an oscillating integrand, summing the remainder over
/// half-periods with epsilon extrapolation.
fn integrate_to_infinity<G, T>(
    g: G,
    tail: T,
    scale: f64,
    omega: f64,
    context: &'static str,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let mut upper = 8.0 * scale;
    let first = adaptive(&g, 0.0, upper, SEGMENT_TOL, 0.0, MAX_PANELS);
    if !first.converged {
        return Err(Error::Convergence {
            context,
            error: first.error,
            target: SEGMENT_TOL,
        });
    }
    let mut total = first.value;
    for doubling in 0..MAX_DOUBLINGS {
        let bound = tail(upper);
        if bound <= TAIL_TOL {
            return Ok(total);
        }
        if doubling >= DOUBLINGS_BEFORE_SERIES && omega > 0.0 {
            return Ok(total + oscillating_tail(&g, upper, omega, context)?);
        }
        let seg = adaptive(&g, upper, 2.0 * upper, SEGMENT_TOL, 0.0, MAX_PANELS);
        if !seg.converged {
            return Err(Error::Convergence {
                context,
                error: seg.error,
                target: SEGMENT_TOL,
            });
        }
        total += seg.value;
        upper *= 2.0;
    }
    Err(Error::Convergence {
        context,
        error: tail(upper),
        target: TAIL_TOL,
    })
}

fn oscillating_tail<G: Fn(f64) -> f64>(
    g: &G,
    start: f64,
    omega: f64,
    context: &'static str,
) -> Result<f64> {
    let h = PI / omega;
    let mut sums = Vec::new();
    let mut acc = 0.0;
    let mut last_err = f64::INFINITY;
    let mut f = |u: f64| g(u);
    for k in 0..MAX_SERIES_TERMS {
        let lo = start + k as f64 * h;
        let (v, e) = gk15(&mut f, lo, lo + h);
        let v = if e > SEGMENT_TOL {
            let est = adaptive(&f, lo, lo + h, SEGMENT_TOL, 0.0, 200);
            est.value
        } else {
            v
        };
        acc += v;
        sums.push(acc);
        if sums.len() >= 8 {
            let window = &sums[sums.len().saturating_sub(SERIES_WINDOW)..];
            let (limit, err) = wynn_epsilon(window);
            last_err = err;
            if err <= TAIL_TOL && limit.is_finite() {
                return Ok(limit);
            }
        }
    }
    Err(Error::Convergence {
        context,
        error: last_err,
        target: TAIL_TOL,
    })
}

/// `P(X <= x)`.
pub fn cdf(x: f64, p: &GenChi2Params) -> Result<f64> {
    p.validate()?;
    if x.is_nan() {
        return domain("x is NaN");
    }
    if x <= p.support_min() {
        return Ok(0.0);
    }
    if x >= p.support_max() {
        return Ok(1.0);
    }
    if p.is_gaussian() {
        return Ok(normal_cdf((x - p.offset) / p.gaussian_sd.abs()));
    }
    if let Some((w, k)) = p.single_central() {
        let chi = ChiSquared::new(k).map_err(|e| Error::Domain(e.to_string()))?;
        let z = (x - p.offset) / w;
        return Ok(if w > 0.0 { chi.cdf(z) } else { chi.sf(z) });
    }
    cdf_by_inversion(x, p)
}

/// `P(X <= x)` by the inversion integral alone, without shortcuts.
pub fn cdf_by_inversion(x: f64, p: &GenChi2Params) -> Result<f64> {
    p.validate()?;
    let inv = Inversion::new(p, x);
    let integral = integrate_to_infinity(
        |u| inv.cdf_integrand(u),
        |u| inv.cdf_tail_bound(u),
        inv.scale(),
        inv.tail_frequency(),
        "genchi2 cdf",
    )?;
    Ok((0.5 - integral / PI).clamp(0.0, 1.0))
}

/// Density of the law.
pub fn pdf(x: f64, p: &GenChi2Params) -> Result<f64> {
    p.validate()?;
    if x.is_nan() {
        return domain("x is NaN");
    }
    if x < p.support_min() || x > p.support_max() {
        return Ok(0.0);
    }
    if p.is_gaussian() {
        let s = p.gaussian_sd.abs();
        return Ok(normal_pdf((x - p.offset) / s) / s);
    }
    if let Some((w, k)) = p.single_central() {
        let chi = ChiSquared::new(k).map_err(|e| Error::Domain(e.to_string()))?;
        let z = (x - p.offset) / w;
        return Ok(if z > 0.0 { chi.pdf(z) / w.abs() } else { 0.0 });
    }
    pdf_by_inversion(x, p)
}

/// Density by the inversion integral alone.
pub fn pdf_by_inversion(x: f64, p: &GenChi2Params) -> Result<f64> {
    p.validate()?;
    let inv = Inversion::new(p, x);
    let integral = integrate_to_infinity(
        |u| inv.pdf_integrand(u),
        |u| inv.pdf_tail_bound(u),
        inv.scale(),
        inv.tail_frequency(),
        "genchi2 pdf",
    )?;
    Ok((integral / (2.0 * PI)).max(0.0))
}

/// Density as a central difference of the CDF with step
/// `max(1e-5, 1e-5 |x|)`.
pub fn pdf_by_difference(x: f64, p: &GenChi2Params) -> Result<f64> {
    let h = (1e-5 * x.abs()).max(1e-5);
    Ok(((cdf(x + h, p)? - cdf(x - h, p)?) / (2.0 * h)).max(0.0))
}
