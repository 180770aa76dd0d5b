use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use rwalk_core::genchi2::{self, GenChi2Params};
use rwalk_core::mc::{self, EmpiricalDistribution, Histogram, TabulatedCdf};
use rwalk_core::recursion::{self, TabulatedPdf};
use rwalk_core::{
    min_radius, uniqueness_threshold, ExactTwoStep, GridSpec, LargeNModel, SupportBoundary,
    WalkConfig,
};

use crate::args::{
    ApproxArgs, Command, CompareArgs, Exact2Args, Genchi2Args, GridArgs, RecurseArgs, Regime,
    SampleArgs, SupportArgs, WalkArgs,
};
use crate::failure::Failure;
use crate::output::{Document, Meta, Table};

type Outcome = Result<Document, Failure>;

pub fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Exact2(a) => exact2(a),
        Command::Support(a) => support(a),
        Command::Recurse(a) => recurse(a),
        Command::Approx(a) => approx(a),
        Command::Genchi2(a) => genchi2_spot(a),
        Command::Sample(a) => sample(a),
        Command::Compare(a) => compare(a),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn walk_config(w: &WalkArgs) -> Result<WalkConfig, Failure> {
    let cfg = if w.extended {
        WalkConfig::new_extended(w.n, w.a)
    } else {
        WalkConfig::new(w.n, w.a)
    };
    cfg.map_err(Failure::from_core("walk-core"))
}

fn meta(command: &'static str, cfg: &WalkConfig) -> Meta {
    let mut m = Meta::new(command);
    m.n = Some(cfg.n_steps());
    m.a = Some(cfg.max_angle());
    m
}

fn at_least(name: &str, value: usize, min: usize) -> Result<(), Failure> {
    if value < min {
        return Err(usage(format!("--{name} must be at least {min}")));
    }
    Ok(())
}

/// Midpoints of `count` equal cells on `[lo, hi]`.
fn midpoints(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> + Clone {
    let h = (hi - lo) / count as f64;
    (0..count).map(move |k| lo + (k as f64 + 0.5) * h)
}

/// `count >= 2` points on `[lo, hi]` including both ends.
fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (count - 1) as f64;
    (0..count).map(move |k| if k + 1 == count { hi } else { lo + k as f64 * h })
}

fn exact2(args: &Exact2Args) -> Outcome {
    at_least("points", args.points, 1)?;
    let core = Failure::from_core("exact-two");
    let law = ExactTwoStep::new(args.a).map_err(&core)?;
    let cfg = WalkConfig::new(2, args.a).map_err(&core)?;
    let mut m = meta("exact2", &cfg);
    m.formulas = vec![
        "two-step joint density 1/(2 a^2 sqrt(4 - r^2)) on |theta| <= a - acos(r/2)",
        "two-step radius CDF",
        "two-step angle CDF",
    ];
    let mut doc = Document::new(m);
    doc.result("min_radius", law.min_radius());
    let mut t = Table::new(
        "exact2",
        &["theta", "pdf_angle", "cdf_angle", "r", "pdf_radius", "cdf_radius"],
    );
    let a = args.a;
    let thetas = midpoints(-a, a, args.points);
    let radii = midpoints(law.min_radius(), 2.0, args.points);
    for (theta, r) in thetas.zip(radii) {
        t.push(vec![
            theta,
            law.pdf_angle(theta),
            law.cdf_angle(theta),
            r,
            law.pdf_radius(r).map_err(&core)?,
            law.cdf_radius(r).map_err(&core)?,
        ]);
    }
    doc.tables.push(t);
    Ok(doc)
}

fn support(args: &SupportArgs) -> Outcome {
    at_least("points", args.points, 2)?;
    let core = Failure::from_core("support");
    let cfg = walk_config(&args.walk)?;
    let b = SupportBoundary::new(&cfg);
    let mut m = meta("support", &cfg);
    m.formulas = vec![
        "outer arc of radius N",
        "inner chain of N unit arcs",
        "minimum radius",
        "uniqueness threshold acos(-1/(N-1))/2",
    ];
    let mut doc = Document::new(m);
    doc.result("r_min", b.min_radius());
    doc.result("unique", b.is_unique());
    if cfg.n_steps() >= 2 {
        doc.result("uniqueness_threshold", uniqueness_threshold(cfg.n_steps()).map_err(&core)?);
    }
    let a = cfg.max_angle();
    let mut outer = Table::new("outer", &["phi", "x", "y", "radius", "angle"]);
    for phi in linspace(-a, a, args.points) {
        let p = b.outer_boundary(phi).map_err(&core)?;
        let (x, y) = p.to_cartesian();
        outer.push(vec![phi, x, y, p.radius, p.angle]);
    }
    let mut inner = Table::new(
        "inner",
        &["t", "segment", "local_angle", "x", "y", "radius", "angle"],
    );
    for t in linspace(0.0, 1.0, args.points) {
        let s = b.inner_boundary(t).map_err(&core)?;
        let (x, y) = s.point.to_cartesian();
        inner.push(vec![
            t,
            s.segment_index as f64,
            s.local_angle,
            x,
            y,
            s.point.radius,
            s.point.angle,
        ]);
    }
    doc.tables.push(outer);
    doc.tables.push(inner);
    Ok(doc)
}

fn grid_spec(g: &GridArgs) -> Result<GridSpec, Failure> {
    GridSpec::new(g.radii, g.angles, g.phi_nodes).map_err(|e| usage(e.to_string()))
}

fn density_table(name: &str, axis: &str, pdf: &TabulatedPdf) -> Table {
    let mut t = Table::new(name, &[axis, "pdf", "cdf"]);
    for ((&x, &f), c) in pdf.points.iter().zip(&pdf.density).zip(pdf.cumulative()) {
        t.push(vec![x, f, c]);
    }
    t
}

fn recurse(args: &RecurseArgs) -> Outcome {
    at_least("n", args.walk.n, 2)?;
    let cfg = walk_config(&args.walk)?;
    let spec = grid_spec(&args.grid)?;
    let (prop, reports) =
        recursion::propagate_to(&cfg, &spec).map_err(Failure::from_core("numeric-recursion"))?;
    let mut m = meta("recurse", &cfg);
    m.formulas = vec![
        "one-step recursion f_N(r,t) = r/(2a) * integral of f_{N-1}(d,psi)/d over the step angle",
        "grid marginals",
    ];
    let mut doc = Document::new(m);
    doc.result("radii", spec.n_radii);
    doc.result("angles", spec.n_angles);
    doc.result("phi_nodes", spec.phi_nodes);
    doc.result("final_correction", prop.correction);
    let mut mass = Table::new("mass", &["steps", "raw_mass", "correction"]);
    for r in &reports {
        mass.push(vec![r.steps as f64, r.raw_mass, r.correction]);
    }
    doc.tables.push(mass);
    doc.tables.push(density_table("marginal_radius", "r", &prop.grid.marginal_radius()));
    doc.tables.push(density_table("marginal_angle", "theta", &prop.grid.marginal_angle()));
    if args.joint {
        let g = &prop.grid;
        let mut t = Table::new("joint", &["r", "theta", "pdf"]);
        for (i, &r) in g.radii().iter().enumerate() {
            for (j, &theta) in g.angles().iter().enumerate() {
                t.push(vec![r, theta, g.value(i, j)]);
            }
        }
        doc.tables.push(t);
    }
    Ok(doc)
}

/// Angle CDF of the large-N model, saturated outside its domain.
fn approx_angle_cdf(model: &LargeNModel, theta: f64) -> rwalk_core::Result<f64> {
    if theta <= -FRAC_PI_2 {
        Ok(0.0)
    } else if theta >= FRAC_PI_2 {
        Ok(1.0)
    } else {
        model.cdf_angle(theta)
    }
}

fn approx(args: &ApproxArgs) -> Outcome {
    at_least("points", args.points, 1)?;
    let core = Failure::from_core("large-n");
    let cfg = walk_config(&args.walk)?;
    let model = LargeNModel::new(&cfg).map_err(&core)?;
    let n = cfg.n_steps() as f64;
    let mom = model.moments();
    let (center, sd) = (n * mom.mean_x, (n * mom.var_x).sqrt());
    let mut m = meta("approx", &cfg);
    m.formulas = vec![
        "squared radius as generalized chi-square with w = (N var_x, N var_y), lambda = (N mean_x^2/var_x, 0)",
        "tangent of angle as normal ratio",
        "joint normal density in polar form",
    ];
    let mut doc = Document::new(m);
    doc.result("radius_mode", model.pdf_radius_mode().map_err(&core)?);
    doc.result("mean_real_part", center);
    if !cfg.is_extended() {
        doc.result("support_mass", model.support_mass().map_err(&core)?);
    }
    let lo = (center - 6.0 * sd).max(0.0);
    let hi = (center + 6.0 * sd).min(n);
    let radii: Vec<f64> = midpoints(lo, hi, args.points).collect();
    let rows = radii
        .par_iter()
        .map(|&r| Ok(vec![r, model.pdf_radius(r)?, model.cdf_radius(r)?]))
        .collect::<rwalk_core::Result<Vec<_>>>()
        .map_err(&core)?;
    let mut t = Table::new("radius", &["r", "pdf", "cdf"]);
    t.rows = rows;
    doc.tables.push(t);
    let amax = cfg.max_angle().min(1.5);
    let mut t = Table::new("angle", &["theta", "pdf", "cdf"]);
    for theta in midpoints(-amax, amax, args.points) {
        t.push(vec![
            theta,
            model.pdf_angle(theta).map_err(&core)?,
            model.cdf_angle(theta).map_err(&core)?,
        ]);
    }
    doc.tables.push(t);
    Ok(doc)
}

fn genchi2_spot(args: &Genchi2Args) -> Outcome {
    let core = Failure::from_core("genchi2");
    let k = args.weights.len();
    let dofs = if args.dofs.is_empty() { vec![1; k] } else { args.dofs.clone() };
    let nc = if args.noncentralities.is_empty() {
        vec![0.0; k]
    } else {
        args.noncentralities.clone()
    };
    let params = GenChi2Params::new(args.weights.clone(), dofs, nc, args.sd, args.offset)
        .map_err(&core)?;
    let mut m = Meta::new("genchi2");
    m.formulas = vec!["characteristic-function inversion of the CDF and density"];
    let mut doc = Document::new(m);
    doc.result("mean", params.mean());
    doc.result("variance", params.variance());
    let rows = args
        .x
        .par_iter()
        .map(|&x| Ok(vec![x, genchi2::cdf(x, &params)?, genchi2::pdf(x, &params)?]))
        .collect::<rwalk_core::Result<Vec<_>>>()
        .map_err(&core)?;
    let mut t = Table::new("genchi2", &["x", "cdf", "pdf"]);
    t.rows = rows;
    doc.tables.push(t);
    Ok(doc)
}

fn histogram_table(name: &str, h: &Histogram) -> Table {
    let mut t = Table::new(name, &["lo", "hi", "count", "density", "std_error"]);
    for k in 0..h.bins() {
        t.push(vec![
            h.edges[k],
            h.edges[k + 1],
            h.counts[k] as f64,
            h.density(k),
            h.std_error(k),
        ]);
    }
    t
}

fn sample(args: &SampleArgs) -> Outcome {
    at_least("count", args.count, 1)?;
    let core = Failure::from_core("mc");
    let cfg = walk_config(&args.walk)?;
    let batch = mc::sample_walk(&cfg, args.count, args.seed).map_err(&core)?;
    let mut m = meta("sample", &cfg);
    m.seed = Some(args.seed);
    m.formulas = vec!["endpoint of N unit steps with angles uniform on [-a, a]"];
    let mut doc = Document::new(m);
    doc.result("count", args.count);
    match args.bins {
        Some(bins) => {
            at_least("bins", bins, 1)?;
            let a = cfg.max_angle();
            let radii = EmpiricalDistribution::new(batch.radii()).map_err(&core)?;
            let angles = EmpiricalDistribution::new(batch.angles()).map_err(&core)?;
            let rh = radii
                .histogram(bins, min_radius(&cfg), cfg.n_steps() as f64)
                .map_err(&core)?;
            let ah = angles.histogram(bins, -a, a).map_err(&core)?;
            doc.tables.push(histogram_table("radius_histogram", &rh));
            doc.tables.push(histogram_table("angle_histogram", &ah));
        }
        None => {
            let mut t = Table::new("endpoints", &["radius", "angle"]);
            t.rows = batch.samples.iter().map(|p| vec![p.radius, p.angle]).collect();
            doc.tables.push(t);
        }
    }
    Ok(doc)
}

type CdfFn<'a> = Box<dyn Fn(f64) -> rwalk_core::Result<f64> + Sync + 'a>;

fn overlay_table(name: &str, h: &Histogram, cdf: &CdfFn) -> rwalk_core::Result<Table> {
    let mut t = Table::new(
        name,
        &["lo", "hi", "mc_density", "std_error", "model_density"],
    );
    let mut below = cdf(h.edges[0])?;
    for k in 0..h.bins() {
        let above = cdf(h.edges[k + 1])?;
        t.push(vec![
            h.edges[k],
            h.edges[k + 1],
            h.density(k),
            h.std_error(k),
            (above - below) / h.width(k),
        ]);
        below = above;
    }
    Ok(t)
}

fn compare(args: &CompareArgs) -> Outcome {
    at_least("count", args.count, 1)?;
    at_least("bins", args.bins, 1)?;
    at_least("cdf-nodes", args.cdf_nodes, 2)?;
    let cfg = walk_config(&args.walk)?;
    let n = cfg.n_steps();
    let (module, formulas): (&'static str, Vec<&'static str>) = match args.regime {
        Regime::Exact2 => {
            if n != 2 {
                return Err(usage("the exact2 regime needs --n 2"));
            }
            ("exact-two", vec!["two-step radius CDF", "two-step angle CDF"])
        }
        Regime::Recurse => {
            at_least("n", n, 2)?;
            ("numeric-recursion", vec!["one-step recursion on a polar grid", "grid marginals"])
        }
        Regime::Approx => (
            "large-n",
            vec!["squared radius as generalized chi-square", "tangent of angle as normal ratio"],
        ),
    };
    let core = Failure::from_core(module);
    let mut m = meta("compare", &cfg);
    m.seed = Some(args.seed);
    m.formulas = formulas;
    m.formulas.push("Kolmogorov-Smirnov distance");
    let mut doc = Document::new(m);
    doc.result(
        "regime",
        match args.regime {
            Regime::Exact2 => "exact2",
            Regime::Recurse => "recurse",
            Regime::Approx => "approx",
        },
    );
    doc.result("count", args.count);
    doc.result("bins", args.bins);

    let batch = mc::sample_walk(&cfg, args.count, args.seed).map_err(Failure::from_core("mc"))?;
    let radii = EmpiricalDistribution::new(batch.radii()).map_err(Failure::from_core("mc"))?;
    let angles = EmpiricalDistribution::new(batch.angles()).map_err(Failure::from_core("mc"))?;
    drop(batch);

    // Holders for the models the CDF closures borrow from.
    let exact;
    let grid_cdfs: (TabulatedCdf, TabulatedCdf);
    let large;
    let tabulated;
    // The approx tabulation covers only the sampled range, so its overlay
    // uses the model directly.
    let mut radius_overlay: Option<CdfFn> = None;
    let (radius_cdf, angle_cdf): (CdfFn, CdfFn) = match args.regime {
        Regime::Exact2 => {
            exact = ExactTwoStep::from_config(&cfg);
            (
                Box::new(|r| exact.cdf_radius(r)),
                Box::new(|t| Ok(exact.cdf_angle(t))),
            )
        }
        Regime::Recurse => {
            let spec = grid_spec(&args.grid)?;
            let (prop, reports) = recursion::propagate_to(&cfg, &spec).map_err(&core)?;
            for r in &reports {
                log::info!("steps {}: raw grid mass {}", r.steps, r.raw_mass);
            }
            doc.result("final_correction", prop.correction);
            grid_cdfs = (
                prop.grid.marginal_radius().to_cdf(),
                prop.grid.marginal_angle().to_cdf(),
            );
            (
                Box::new(|r| Ok(grid_cdfs.0.eval(r))),
                Box::new(|t| Ok(grid_cdfs.1.eval(t))),
            )
        }
        Regime::Approx => {
            large = LargeNModel::new(&cfg).map_err(&core)?;
            tabulated = TabulatedCdf::at_quantiles(&radii, args.cdf_nodes, |r| large.cdf_radius(r))
                .map_err(&core)?;
            radius_overlay = Some(Box::new(|r| large.cdf_radius(r)));
            (
                Box::new(|r| Ok(tabulated.eval(r))),
                Box::new(|t| approx_angle_cdf(&large, t)),
            )
        }
    };

    let ks_radius = mc::try_ks_distance(&radii, &radius_cdf).map_err(&core)?;
    let ks_angle = mc::try_ks_distance(&angles, &angle_cdf).map_err(&core)?;
    doc.result("ks_radius", ks_radius);
    doc.result("ks_angle", ks_angle);

    let a = cfg.max_angle();
    let rh = radii
        .histogram(args.bins, min_radius(&cfg), n as f64)
        .map_err(Failure::from_core("mc"))?;
    let ah = angles.histogram(args.bins, -a, a).map_err(Failure::from_core("mc"))?;
    let radius_exact = radius_overlay.unwrap_or(radius_cdf);
    doc.tables.push(overlay_table("radius_overlay", &rh, &radius_exact).map_err(&core)?);
    doc.tables.push(overlay_table("angle_overlay", &ah, &angle_cdf).map_err(&core)?);
    Ok(doc)
}
