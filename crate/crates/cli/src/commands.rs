//! The `focal`, `wavefront`, `reflect` and `levelset` subcommands.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde_json::{json, Value};

use focalset::congruence::{integrate_support, surface_from_support};
use focalset::focal::focal_points_3d;
use focalset::line_space::{direction_of, PointR3, Ray};
use focalset::oracle::{convert, trace_cylinder, VecRay};
use focalset::reflection::{
    cylinder_reflect, cylinder_reflect_k, paraboloid_mirror, reflect_off_mirror, ReflectOptions,
    Side as MirrorSide,
};
use focalset::sampling::{Axis, Grid, SampledSurface};
use focalset::scenarios::{
    coffeecup_chart, coffeecup_curve, coffeecup_deviation, coffeecup_surface, level_curve,
    nephroid_chart, nephroid_deviation, nephroid_focal_surface, normal_angles, paraboloid_chart,
    paraboloid_reflected_wavefront, paraboloid_wavefront_pipeline, sample, valid_v_domain,
    Deviation, JetMode, ScenarioParams,
};
use focalset::Error;

use crate::config::{RunConfig, Scenario, Side};
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

/// Largest pipeline error accepted by `--mode both`.
pub const BOTH_TOLERANCE: f64 = 1e-6;

/// What a command reports on stdout, and whether its own check failed.
pub struct Summary {
    pub value: Value,
    pub failed: bool,
}

fn unsupported(command: &str, scenario: Scenario) -> CliError {
    CliError::Config(format!(
        "{command} does not support scenario {}",
        scenario.name()
    ))
}

fn cylinder_params(cfg: &RunConfig, beta: f64) -> CliResult<()> {
    ScenarioParams {
        a: cfg.a,
        l: cfg.l,
        k: cfg.k,
        beta_inc: beta,
    }
    .validate()?;
    Ok(())
}

fn inside(name: &str, range: (f64, f64), allowed: (f64, f64)) -> CliResult<(f64, f64)> {
    let slack = 1e-12 * (1.0 + allowed.0.abs().max(allowed.1.abs()));
    if range.0 < allowed.0 - slack || range.1 > allowed.1 + slack {
        return Err(CliError::Core(Error::Domain(format!(
            "{name} {}:{} outside the valid range {}:{}",
            range.0, range.1, allowed.0, allowed.1
        ))));
    }
    Ok(range)
}

fn deviation_json(dev: &Deviation) -> Value {
    json!({
        "max_error": dev.max_error,
        "worst_at": [dev.worst_at.0, dev.worst_at.1],
        "missing": dev.missing,
        "compared": dev.compared,
        "tolerance": BOTH_TOLERANCE,
        "pass": passes(dev),
    })
}

fn passes(dev: &Deviation) -> bool {
    dev.max_error <= BOTH_TOLERANCE && dev.missing == 0
}

fn coffeecup_v_range(cfg: &RunConfig) -> CliResult<(f64, f64)> {
    let domain = valid_v_domain(cfg.a, cfg.l)?;
    match cfg.v_range {
        Some(r) => inside("v-range", r, domain),
        None => Ok(domain),
    }
}

fn coffeecup_u_range(cfg: &RunConfig) -> CliResult<(f64, f64)> {
    let u = cfg.u_range.unwrap_or((0.05, 20.0));
    if u.0 <= 0.0 {
        return Err(CliError::Core(Error::Domain(format!(
            "u-range must be positive, got {}:{}",
            u.0, u.1
        ))));
    }
    Ok(u)
}

fn nephroid_v_range(cfg: &RunConfig) -> (f64, f64) {
    cfg.v_range
        .unwrap_or((std::f64::consts::FRAC_PI_2, 1.5 * std::f64::consts::PI))
}

pub fn focal(cfg: &RunConfig) -> CliResult<Summary> {
    match cfg.scenario_or(Scenario::Coffeecup) {
        Scenario::Coffeecup => focal_coffeecup(cfg),
        Scenario::Nephroid => focal_nephroid(cfg),
        other => Err(unsupported("focal", other)),
    }
}

fn focal_coffeecup(cfg: &RunConfig) -> CliResult<Summary> {
    cylinder_params(cfg, std::f64::consts::FRAC_PI_2)?;
    let (a, l, k) = (cfg.a, cfg.l, cfg.k);
    let v_range = coffeecup_v_range(cfg)?;
    let u_range = coffeecup_u_range(cfg)?;
    let (nu, nv) = cfg.grid;
    let v_axis = Axis::cell_centered(v_range.0, v_range.1, nv);
    let grid = Grid::polar(&Axis::linspace(u_range.0, u_range.1, nu), &v_axis);
    let mut out = OutDir::create(&cfg.out_dir(), cfg.format)?;
    let mut summary = json!({
        "command": "focal",
        "scenario": "coffeecup",
        "mode": cfg.mode.name(),
        "a": a, "l": l, "k": k,
        "grid": [nu, nv],
        "u_range": [u_range.0, u_range.1],
        "v_range": [v_range.0, v_range.1],
    });
    if cfg.mode.closed_form() {
        let surface = sample(&grid, |u, v| coffeecup_surface(a, l, k, u, v));
        let curve: Vec<Option<PointR3>> = v_axis
            .values()
            .iter()
            .map(|&v| coffeecup_curve(a, l, k, v).ok())
            .collect();
        out.surface("caustic_surface", &surface)?;
        out.curve("caustic_curve", v_axis.values(), &curve)?;
        summary["surface_points"] = json!(surface.defined_count());
    }
    if cfg.mode.pipeline() {
        let sheets = focal_points_3d(&coffeecup_chart(a, l, k)?, &grid, 0.0)?;
        for (n, sheet) in sheets.iter().enumerate() {
            out.surface(&format!("focal_sheet{n}"), sheet)?;
        }
        summary["sheet_points"] =
            json!(sheets.iter().map(|s| s.defined_count()).collect::<Vec<_>>());
    }
    let mut failed = false;
    if cfg.mode.closed_form() && cfg.mode.pipeline() {
        let dev = coffeecup_deviation(a, l, k, &grid, JetMode::Analytic)?;
        let mut report = deviation_json(&dev);
        // Near 2kl cos v + S = 0 the surface runs off to infinity and the
        // absolute error grows with it.
        if let Ok(p) = coffeecup_surface(a, l, k, dev.worst_at.0, dev.worst_at.1) {
            report["surface_norm_at_worst"] = json!(p.to_vector().norm());
        }
        out.write("report.json", &format!("{report}\n"))?;
        failed = !passes(&dev);
        summary["deviation"] = report;
    }
    summary["files"] = json!(out.file_names());
    Ok(Summary {
        value: summary,
        failed,
    })
}

fn focal_nephroid(cfg: &RunConfig) -> CliResult<Summary> {
    let (a, beta) = (cfg.a, cfg.beta);
    cylinder_params(cfg, beta)?;
    let u_range = cfg.u_range.unwrap_or((-2.0, 2.0));
    let v_range = nephroid_v_range(cfg);
    let (nu, nv) = cfg.grid;
    let v_axis = Axis::linspace(v_range.0, v_range.1, nv);
    let grid = Grid::rect(&Axis::linspace(u_range.0, u_range.1, nu), &v_axis);
    let mut out = OutDir::create(&cfg.out_dir(), cfg.format)?;
    let mut summary = json!({
        "command": "focal",
        "scenario": "nephroid",
        "mode": cfg.mode.name(),
        "a": a, "beta": beta,
        "grid": [nu, nv],
        "u_range": [u_range.0, u_range.1],
        "v_range": [v_range.0, v_range.1],
    });
    if cfg.mode.closed_form() {
        // Grid u is the mirror height; the closed form is parameterized by its negative.
        let surface = sample(&grid, |u, v| nephroid_focal_surface(a, beta, -u, v));
        let sampler = |u: f64, v: f64| nephroid_focal_surface(a, beta, u, v);
        let reach = 10.0 + a / beta.tan().abs();
        let curve = level_curve(&sampler, 0.0, nv, (-reach, reach), v_range)?;
        let curve: Vec<Option<PointR3>> = curve.into_iter().map(Some).collect();
        out.surface("caustic_surface", &surface)?;
        out.curve("caustic_curve", v_axis.values(), &curve)?;
        summary["surface_points"] = json!(surface.defined_count());
    }
    if cfg.mode.pipeline() {
        let sheets = focal_points_3d(&nephroid_chart(a, beta)?, &grid, 0.0)?;
        out.surface("focal_sheet0", &sheets[0])?;
        summary["sheet_points"] =
            json!(sheets.iter().map(|s| s.defined_count()).collect::<Vec<_>>());
    }
    let mut failed = false;
    if cfg.mode.closed_form() && cfg.mode.pipeline() {
        let dev = nephroid_deviation(a, beta, &grid, JetMode::Analytic)?;
        let report = deviation_json(&dev);
        out.write("report.json", &format!("{report}\n"))?;
        failed = !passes(&dev);
        summary["deviation"] = report;
    }
    summary["files"] = json!(out.file_names());
    Ok(Summary {
        value: summary,
        failed,
    })
}

fn surface_gap(p: &SampledSurface, q: &SampledSurface) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for (a, b) in p.points.iter().zip(&q.points) {
        match (a, b) {
            (Some(a), Some(b)) => {
                let e = a.max_component_diff(b);
                worst = if e.is_nan() { f64::NAN } else { worst.max(e) };
            }
            _ => missing += 1,
        }
    }
    (worst, missing)
}

pub fn wavefront(cfg: &RunConfig) -> CliResult<Summary> {
    match cfg.scenario_or(Scenario::Paraboloid) {
        Scenario::Paraboloid => wavefront_paraboloid(cfg),
        Scenario::Cylinder => wavefront_cylinder(cfg),
        other => Err(unsupported("wavefront", other)),
    }
}

fn wavefronts_out(
    cfg: &RunConfig,
    mut summary: Value,
    closed: &dyn Fn(f64) -> CliResult<SampledSurface>,
    pipeline: &dyn Fn(f64) -> CliResult<SampledSurface>,
) -> CliResult<Summary> {
    let mut out = OutDir::create(&cfg.out_dir(), cfg.format)?;
    let mut failed = false;
    let mut reports = Vec::new();
    for (n, &c) in cfg.constants.iter().enumerate() {
        let exact = if cfg.mode.closed_form() {
            let s = closed(c)?;
            out.surface(&format!("wavefront{n}"), &s)?;
            Some(s)
        } else {
            None
        };
        let numeric = if cfg.mode.pipeline() {
            let s = pipeline(c)?;
            out.surface(&format!("wavefront{n}_pipeline"), &s)?;
            Some(s)
        } else {
            None
        };
        if let (Some(p), Some(q)) = (&exact, &numeric) {
            let (worst, missing) = surface_gap(p, q);
            let pass = worst <= BOTH_TOLERANCE && missing == 0;
            failed |= !pass;
            reports.push(json!({
                "C": c,
                "max_error": worst,
                "missing": missing,
                "tolerance": BOTH_TOLERANCE,
                "pass": pass,
            }));
        }
    }
    if !reports.is_empty() {
        let report = Value::Array(reports);
        out.write("report.json", &format!("{report}\n"))?;
        summary["deviation"] = report;
    }
    summary["files"] = json!(out.file_names());
    Ok(Summary {
        value: summary,
        failed,
    })
}

fn wavefront_paraboloid(cfg: &RunConfig) -> CliResult<Summary> {
    let (a, b) = (cfg.a, cfg.b);
    let chart = paraboloid_chart(a, b)?;
    let domain = *chart.domain();
    let u_range = inside("u-range", cfg.u_range.unwrap_or((-0.5, 0.3)), domain.re)?;
    let v_range = inside("v-range", cfg.v_range.unwrap_or((-0.5, 0.5)), domain.im)?;
    let (nu, nv) = cfg.grid;
    let grid = Grid::rect(
        &Axis::linspace(u_range.0, u_range.1, nu),
        &Axis::linspace(v_range.0, v_range.1, nv),
    );
    let summary = json!({
        "command": "wavefront",
        "scenario": "paraboloid",
        "mode": cfg.mode.name(),
        "a": a, "b": b,
        "C": cfg.constants,
        "grid": [nu, nv],
        "u_range": [u_range.0, u_range.1],
        "v_range": [v_range.0, v_range.1],
    });
    let closed = |c: f64| -> CliResult<SampledSurface> {
        Ok(sample(&grid, |u, v| {
            let (theta, phi) = normal_angles(Complex64::new(u, v));
            paraboloid_reflected_wavefront(a, b, c, theta, phi)
        }))
    };
    let pipeline = |c: f64| -> CliResult<SampledSurface> {
        Ok(paraboloid_wavefront_pipeline(
            a,
            b,
            c,
            &grid,
            JetMode::Analytic,
        )?)
    };
    wavefronts_out(cfg, summary, &closed, &pipeline)
}

/// Traced wavefront point at optical path length `c` from the source, and
/// the outgoing ray.
fn traced_wavefront(
    a: f64,
    l: f64,
    k: u32,
    mu: Complex64,
    c: f64,
) -> focalset::Result<(PointR3, Vector3<f64>)> {
    let source = Vector3::new(-l, 0.0, 0.0);
    let start = VecRay::new(source, *direction_of(mu).as_vector())?;
    let trace = trace_cylinder(&start, a, k)?;
    let mut path = 0.0;
    let mut prev = source;
    for p in &trace.bounces {
        path += (p - prev).norm();
        prev = *p;
    }
    let d = *trace.ray.dir.as_vector();
    Ok((PointR3::from_vector(&trace.ray.at(c - path)), d))
}

fn wavefront_cylinder(cfg: &RunConfig) -> CliResult<Summary> {
    cylinder_params(cfg, std::f64::consts::FRAC_PI_2)?;
    let (a, l, k) = (cfg.a, cfg.l, cfg.k);
    if l >= a {
        return Err(CliError::Core(Error::Domain(format!(
            "wavefronts need the source inside the cylinder (l < a), got l = {l}, a = {a}"
        ))));
    }
    let v_range = coffeecup_v_range(cfg)?;
    let u_range = coffeecup_u_range(cfg)?;
    let (nu, nv) = cfg.grid;
    let grid = Grid::polar(
        &Axis::linspace(u_range.0, u_range.1, nu),
        &Axis::cell_centered(v_range.0, v_range.1, nv),
    );
    let summary = json!({
        "command": "wavefront",
        "scenario": "cylinder",
        "mode": cfg.mode.name(),
        "a": a, "l": l, "k": k,
        "C": cfg.constants,
        "grid": [nu, nv],
        "u_range": [u_range.0, u_range.1],
        "v_range": [v_range.0, v_range.1],
    });
    let closed = |c: f64| -> CliResult<SampledSurface> {
        Ok(SampledSurface::from_fn(&grid, |i, j| {
            traced_wavefront(a, l, k, grid.mu(i, j), c)
                .ok()
                .map(|(p, _)| p)
        }))
    };
    let chart = coffeecup_chart(a, l, k)?;
    let pipeline = |c: f64| -> CliResult<SampledSurface> {
        let base = grid.mu(0, 0);
        let (p, d) = traced_wavefront(a, l, k, base, c)?;
        let r0 = p.to_vector().dot(&d);
        let field = integrate_support(&chart, base, r0, &grid, 1e-8)?;
        Ok(surface_from_support(&chart, &field, &grid))
    };
    wavefronts_out(cfg, summary, &closed, &pipeline)
}

fn ray_json(ray: &Ray) -> Value {
    let d = ray.direction();
    let foot = ray.foot_point();
    json!({
        "xi": [ray.xi().re, ray.xi().im],
        "eta": [ray.eta().re, ray.eta().im],
        "direction": [d.x(), d.y(), d.z()],
        "foot_point": [foot.x1(), foot.x2(), foot.x3()],
    })
}

fn point_json(p: &PointR3) -> Value {
    json!([p.x1(), p.x2(), p.x3()])
}

/// Point where two coplanar lines cross; `None` when they are parallel.
fn crossing(a: &Ray, b: &Ray) -> Option<PointR3> {
    let (p, q) = (convert(a), convert(b));
    let (d1, d2) = (p.dir.as_vector(), q.dir.as_vector());
    let w = p.origin - q.origin;
    let (bb, d, e) = (d1.dot(d2), d1.dot(&w), d2.dot(&w));
    let den = 1.0 - bb * bb;
    if den <= 1e-14 {
        return None;
    }
    let s = (bb * e - d) / den;
    Some(PointR3::from_vector(&p.at(s)))
}

pub fn reflect(cfg: &RunConfig) -> CliResult<Summary> {
    let (Some(xi), Some(eta)) = (cfg.xi, cfg.eta) else {
        return Err(CliError::Config("reflect needs --xi and --eta".into()));
    };
    let incoming = Ray::new(xi, eta)?;
    let scenario = cfg.scenario_or(Scenario::Cylinder);
    let mut summary = json!({
        "command": "reflect",
        "scenario": scenario.name(),
        "incoming": ray_json(&incoming),
    });
    match scenario {
        Scenario::Cylinder => {
            if cfg.a <= 0.0 {
                return Err(CliError::Core(Error::Domain(format!(
                    "a must be positive, got {}",
                    cfg.a
                ))));
            }
            let side = match cfg.side {
                Side::Interior => MirrorSide::Interior,
                Side::Exterior => MirrorSide::Exterior,
            };
            let out = match (side, cfg.k) {
                (_, 0) => return Err(CliError::Config("k must be at least 1".into())),
                (s, 1) => cylinder_reflect(&incoming, cfg.a, s)?,
                (MirrorSide::Interior, k) => cylinder_reflect_k(&incoming, cfg.a, k)?,
                (MirrorSide::Exterior, _) => {
                    return Err(CliError::Config(
                        "exterior reflection is a single bounce; use k = 1".into(),
                    ))
                }
            };
            summary["a"] = json!(cfg.a);
            summary["k"] = json!(cfg.k);
            summary["reflected"] = ray_json(&out);
            if cfg.k == 1 {
                if let Some(p) = crossing(&incoming, &out) {
                    summary["hit_point"] = point_json(&p);
                }
            }
        }
        Scenario::Paraboloid => {
            let mirror = paraboloid_mirror(cfg.a, cfg.b)?;
            let hit = reflect_off_mirror(&incoming, &mirror, None, &ReflectOptions::default())?;
            summary["a"] = json!(cfg.a);
            summary["b"] = json!(cfg.b);
            summary["reflected"] = ray_json(&hit.ray);
            summary["hit_point"] = point_json(&hit.point);
            summary["mirror_normal_xi"] = json!([hit.mu0.re, hit.mu0.im]);
            summary["residual"] = json!(hit.residual);
        }
        other => return Err(unsupported("reflect", other)),
    }
    Ok(Summary {
        value: summary,
        failed: false,
    })
}

type Sampler = Box<dyn Fn(f64, f64) -> focalset::Result<PointR3>>;

pub fn levelset(cfg: &RunConfig) -> CliResult<Summary> {
    let scenario = cfg.scenario_or(Scenario::Nephroid);
    let (a, l, k, beta) = (cfg.a, cfg.l, cfg.k, cfg.beta);
    let nv = cfg.grid.1;
    let (sampler, u_range, v_range): (Sampler, _, _) = match scenario {
        Scenario::Nephroid => {
            cylinder_params(cfg, beta)?;
            let reach = 10.0 + a / beta.tan().abs();
            (
                Box::new(move |u, v| nephroid_focal_surface(a, beta, u, v)),
                cfg.u_range.unwrap_or((-reach, reach)),
                nephroid_v_range(cfg),
            )
        }
        Scenario::Coffeecup => {
            cylinder_params(cfg, std::f64::consts::FRAC_PI_2)?;
            let (lo, hi) = coffeecup_v_range(cfg)?;
            // Keep clear of the ends of the domain, where rays graze the wall.
            let pad = 1e-3 * (hi - lo);
            let v_range = if cfg.v_range.is_some() {
                (lo, hi)
            } else {
                (lo + pad, hi - pad)
            };
            (
                Box::new(move |u, v| coffeecup_surface(a, l, k, u, v)),
                coffeecup_u_range(cfg)?,
                v_range,
            )
        }
        other => return Err(unsupported("levelset", other)),
    };
    let v_axis = Axis::linspace(v_range.0, v_range.1, nv);
    let mut out = OutDir::create(&cfg.out_dir(), cfg.format)?;
    let mut slices = Vec::new();
    for (n, &t0) in cfg.levels.iter().enumerate() {
        let curve = level_curve(&*sampler, t0, nv, u_range, v_range)?;
        let pts: Vec<Option<PointR3>> = curve.iter().copied().map(Some).collect();
        out.curve(&format!("level{n}"), v_axis.values(), &pts)?;
        slices.push(curve);
    }
    let mut spread: f64 = 0.0;
    if let Some((first, rest)) = slices.split_first() {
        for slice in rest {
            for (p, q) in first.iter().zip(slice) {
                spread = spread.max((p.z - q.z).norm());
            }
        }
    }
    let mut summary = json!({
        "command": "levelset",
        "scenario": scenario.name(),
        "levels": cfg.levels,
        "points_per_level": nv,
        "u_range": [u_range.0, u_range.1],
        "v_range": [v_range.0, v_range.1],
        "max_spread": spread,
    });
    match scenario {
        Scenario::Nephroid => {
            summary["a"] = json!(a);
            summary["beta"] = json!(beta);
        }
        _ => {
            summary["a"] = json!(a);
            summary["l"] = json!(l);
            summary["k"] = json!(k);
        }
    }
    summary["files"] = json!(out.file_names());
    Ok(Summary {
        value: summary,
        failed: false,
    })
}
