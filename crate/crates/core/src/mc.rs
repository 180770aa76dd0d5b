//! Monte-Carlo sampling of walk endpoints and the empirical statistics
//! used to compare them with the analytic laws.
//!
//! Sample `i` of a batch draws its step angles from a ChaCha8 stream
//! keyed by the batch seed with stream number `i`, so any sample can be
//! regenerated alone and the batch does not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::walk::{PolarPoint, WalkConfig};

pub const DEFAULT_BINS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub cfg: WalkConfig,
    pub seed: u64,
    pub samples: Vec<PolarPoint>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.radius).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.angle).collect()
    }

    pub fn mean_real_part(&self) -> f64 {
        self.samples.iter().map(|p| p.to_cartesian().0).sum::<f64>() / self.len() as f64
    }
}

/// Endpoint of sample `index` of the batch keyed by `seed`.
pub fn sample_endpoint(cfg: &WalkConfig, seed: u64, index: u64) -> PolarPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    endpoint(cfg, &mut rng)
}

fn endpoint<R: Rng>(cfg: &WalkConfig, rng: &mut R) -> PolarPoint {
    let a = cfg.max_angle();
    let (mut x, mut y) = (0.0, 0.0);
    for _ in 0..cfg.n_steps() {
        let phi = a * (2.0 * rng.random::<f64>() - 1.0);
        let (s, c) = phi.sin_cos();
        x += c;
        y += s;
    }
    PolarPoint::from_cartesian(x, y)
}

pub fn sample_walk(cfg: &WalkConfig, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return domain("sample count must be at least 1");
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            endpoint(cfg, &mut rng)
        })
        .collect();
    Ok(SampleBatch {
        cfg: *cfg,
        seed,
        samples,
    })
}

/// Sorted sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| v.is_nan()) {
            return domain("sample contains NaN");
        }
        values.par_sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    /// Fraction of the sample `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    pub fn histogram(&self, bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
        if bins == 0 || !(hi > lo) {
            return domain(format!("invalid histogram range [{lo}, {hi}] with {bins} bins"));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in &self.sorted {
            if v < lo || v > hi {
                continue;
            }
            let k = (((v - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Ok(Histogram {
            edges: (0..=bins).map(|k| lo + k as f64 * width).collect(),
            counts,
            total: self.len() as u64,
        })
    }
}

pub fn empirical_cdf(values: Vec<f64>) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::new(values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Size of the whole sample, including values outside the edges.
    pub total: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.edges[k + 1] - self.edges[k]
    }

    pub fn center(&self, k: usize) -> f64 {
        0.5 * (self.edges[k] + self.edges[k + 1])
    }

    pub fn density(&self, k: usize) -> f64 {
        self.counts[k] as f64 / (self.total as f64 * self.width(k))
    }

    /// Binomial standard error of [`density`](Self::density).
    pub fn std_error(&self, k: usize) -> f64 {
        let n = self.total as f64;
        let p = self.counts[k] as f64 / n;
        (p * (1.0 - p) / n).sqrt() / self.width(k)
    }
}

/// Kolmogorov-Smirnov distance between the empirical law and `cdf`,
/// checking both sides of every step.
pub fn ks_distance<F: Fn(f64) -> f64>(emp: &EmpiricalDistribution, cdf: F) -> f64 {
    let n = emp.len() as f64;
    emp.values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Like [`ks_distance`] for a CDF that can fail.
pub fn try_ks_distance<F: Fn(f64) -> Result<f64>>(
    emp: &EmpiricalDistribution,
    cdf: F,
) -> Result<f64> {
    let n = emp.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in emp.values().iter().enumerate() {
        let f = cdf(x)?;
        d = d.max(((i + 1) as f64 / n - f).max(f - i as f64 / n));
    }
    Ok(d)
}

/// An expensive CDF evaluated at sample quantiles and interpolated
/// linearly in between.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedCdf {
    /// Evaluates `cdf` at `count` order statistics of `emp`, spread evenly
    /// in rank and always including the extremes.
    pub fn at_quantiles<F>(emp: &EmpiricalDistribution, count: usize, cdf: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let s = emp.values();
        let count = count.clamp(2, s.len().max(2));
        let mut nodes: Vec<f64> = (0..count)
            .map(|k| s[((k as f64 / (count - 1) as f64) * (s.len() - 1) as f64).round() as usize])
            .collect();
        nodes.dedup();
        let values = nodes
            .par_iter()
            .map(|&x| cdf(x))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { nodes, values })
    }

    pub fn from_points(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return domain("tabulated CDF needs matching nonempty node and value lists");
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return domain("tabulation nodes must increase strictly");
        }
        Ok(Self { nodes, values })
    }

    /// Nodes must be sorted; ties are resolved toward the later value.
    pub(crate) fn from_parts(nodes: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(nodes.len(), values.len());
        Self { nodes, values }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = &self.nodes;
        if p.is_empty() {
            return 0.0;
        }
        if x <= p[0] {
            return self.values[0];
        }
        if x >= p[p.len() - 1] {
            return self.values[p.len() - 1];
        }
        let k = p.partition_point(|&v| v <= x);
        let (x0, x1) = (p[k - 1], p[k]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 1.0 };
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::exact_two::ExactTwoStep;
    use crate::support::SupportBoundary;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn cfg(n: usize, a: f64) -> WalkConfig {
        WalkConfig::new(n, a).unwrap()
    }

    #[test]
    fn batches_are_reproducible() {
        let c = cfg(5, 0.7);
        let a = sample_walk(&c, 1000, 42).unwrap();
        let b = sample_walk(&c, 1000, 42).unwrap();
        assert_eq!(a, b);
        let other = sample_walk(&c, 1000, 43).unwrap();
        assert_ne!(a.samples, other.samples);
        // prefix property and single-sample regeneration
        let short = sample_walk(&c, 10, 42).unwrap();
        assert_eq!(&a.samples[..10], &short.samples[..]);
        assert_eq!(sample_endpoint(&c, 42, 777), a.samples[777]);
        assert!(sample_walk(&c, 0, 1).is_err());
    }

    #[test]
    fn batches_ignore_worker_count() {
        let c = cfg(4, 1.0);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let multi = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = single.install(|| sample_walk(&c, 5000, 9).unwrap());
        let b = multi.install(|| sample_walk(&c, 5000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn single_step_samples() {
        let a = 0.5;
        let batch = sample_walk(&cfg(1, a), 200_000, 3).unwrap();
        for p in &batch.samples {
            assert_abs_diff_eq!(p.radius, 1.0, epsilon = 1e-12);
            assert!(p.angle.abs() <= a);
        }
        let emp = EmpiricalDistribution::new(batch.angles()).unwrap();
        let d = ks_distance(&emp, |t| crate::walk::step_angle_cdf(t, a));
        assert!(d < 0.005, "ks {d}");
    }

    #[test]
    fn sample_ranges_and_support() {
        for n in [2, 3, 4, 5, 30] {
            for a in [0.5, FRAC_PI_4, FRAC_PI_2] {
                let c = cfg(n, a);
                let b = SupportBoundary::new(&c);
                let batch = sample_walk(&c, 5_000, n as u64).unwrap();
                for p in &batch.samples {
                    assert!(p.radius <= n as f64 + 1e-12);
                    assert!(p.angle.abs() <= a + 1e-12);
                    assert!(b.contains(*p, 1e-9).unwrap(), "n={n} a={a} {p:?}");
                }
            }
        }
        let two = sample_walk(&cfg(2, 0.5), 100_000, 5).unwrap();
        let rmin = two.radii().into_iter().fold(f64::INFINITY, f64::min);
        assert!(rmin >= 2.0 * 0.5f64.cos() - 1e-12);
    }

    #[test]
    fn sample_means() {
        let (n, a) = (6, 0.8);
        let c = cfg(n, a);
        let m = crate::walk::clt_moments(&c);
        let batch = sample_walk(&c, 200_000, 11).unwrap();
        let se = (n as f64 * m.var_x / batch.len() as f64).sqrt();
        assert!((batch.mean_real_part() - n as f64 * m.mean_x).abs() < 4.0 * se);
        let mean_angle = batch.angles().iter().sum::<f64>() / batch.len() as f64;
        assert!(mean_angle.abs() < 3.0 * a / (3.0 * batch.len() as f64).sqrt());
    }

    #[test]
    fn empirical_cdf_definition() {
        let e = empirical_cdf(vec![3.0, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(e.cdf(2.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(e.cdf(0.5), 0.0);
        assert_eq!(e.cdf(3.0), 1.0);
        assert_eq!(e.cdf(2.5), 2.0 / 3.0);
        assert!(matches!(empirical_cdf(vec![]), Err(Error::EmptyInput)));
        assert!(empirical_cdf(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_self_distance_and_uniforms() {
        let e = empirical_cdf(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // against its own right-continuous step function, the left limit
        // at each jump is what remains
        assert_abs_diff_eq!(ks_distance(&e, |x| e.cdf(x)), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(ks_distance(&e, |x| e.cdf(x) + 0.125), 0.25 + 0.125, epsilon = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<f64> = (0..1_000_000).map(|_| Rng::random::<f64>(&mut rng)).collect();
        let e = empirical_cdf(u).unwrap();
        assert!(ks_distance(&e, |x| x.clamp(0.0, 1.0)) < 0.002);
    }

    #[test]
    fn exact_two_against_its_samples() {
        let a = 0.5;
        let law = ExactTwoStep::new(a).unwrap();
        let batch = sample_walk(&cfg(2, a), 1_000_000, 2024).unwrap();
        let e = empirical_cdf(batch.radii()).unwrap();
        let d = try_ks_distance(&e, |r| law.cdf_radius(r)).unwrap();
        assert!(d < 0.005, "ks {d}");
    }

    #[test]
    fn histogram_densities() {
        let e = empirical_cdf(vec![0.1, 0.2, 0.3, 0.6, 0.9, 1.5]).unwrap();
        let h = e.histogram(2, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![3, 2]);
        assert_eq!(h.total, 6);
        assert_abs_diff_eq!(h.density(0), 3.0 / (6.0 * 0.5), epsilon = 1e-15);
        assert!(h.std_error(0) > 0.0);
        assert_eq!(h.center(1), 0.75);
        assert!(e.histogram(0, 0.0, 1.0).is_err());
        assert!(e.histogram(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn tabulated_cdf_interpolates() {
        let e = empirical_cdf((0..1001).map(|k| k as f64 / 1000.0).collect()).unwrap();
        let t = TabulatedCdf::at_quantiles(&e, 11, |x| Ok(x * x)).unwrap();
        assert_eq!(t.nodes().len(), 11);
        assert_abs_diff_eq!(t.eval(0.5), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t.eval(0.55), 0.5 * (0.25 + 0.36), epsilon = 1e-15);
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(2.0), 1.0);
        assert!(TabulatedCdf::from_points(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        let failing = TabulatedCdf::at_quantiles(&e, 5, |_| domain("nope"));
        assert!(failing.is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn empirical_cdf_is_monotone_step(v in proptest::collection::vec(-10.0f64..10.0, 1..60), x in -12.0f64..12.0) {
            let e = empirical_cdf(v).unwrap();
            let a = e.cdf(x);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(e.cdf(x + 0.5) >= a);
            prop_assert_eq!(e.cdf(e.max()), 1.0);
        }
    }
}
