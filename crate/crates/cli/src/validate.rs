//! Randomized self-checks behind `focalset validate`.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use focalset::congruence::{
    classify_metric, curvature, degeneracy_tolerance, optical_scalars_off_focus, Chart,
    MetricSignature, OpticalScalars,
};
use focalset::focal::{
    focal_root_at, focal_roots, main_theorem1_check, pair_geometry, sachs_evolve,
};
use focalset::line_space::phi_map;
use focalset::oracle::{
    convert_back, focal_step, meets_cylinder, numeric_normal, plane_normal, trace_cylinder, VecRay,
};
use focalset::reflection::{cylinder_intersects, cylinder_reflect, cylinder_reflect_k, Side};
use focalset::scenarios::{coffeecup_chart, valid_v_domain};
use focalset::Result;

use crate::commands::Summary;
use crate::config::{RunConfig, Suite};
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

pub const ORACLE_TOLERANCE: f64 = 1e-9;
pub const SACHS_TOLERANCE: f64 = 1e-6;
pub const FLAT_ROOT_TOLERANCE: f64 = 1e-12;
pub const DISTANCE_TOLERANCE: f64 = 1e-12;
pub const ANGLE_TOLERANCE: f64 = 1e-5;

struct SuiteResult {
    pass: bool,
    report: Value,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_direction(rng: &mut impl Rng, max_z: f64) -> Vector3<f64> {
    loop {
        let v: Vector3<f64> = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 && (v.z / n).abs() < max_z {
            return v / n;
        }
    }
}

fn interior_ray(rng: &mut impl Rng, a: f64) -> Result<VecRay> {
    let r = 0.9 * a * rng.random::<f64>().sqrt();
    let phi = rng.random_range(0.0..TAU);
    let origin = Vector3::new(r * phi.cos(), r * phi.sin(), rng.random_range(-a..a));
    VecRay::new(origin, random_direction(rng, 0.95))
}

fn box_ray(rng: &mut impl Rng, half: f64) -> Result<VecRay> {
    let origin = Vector3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    );
    VecRay::new(origin, random_direction(rng, 0.95))
}

fn line_gap(a: &focalset::line_space::Ray, b: &focalset::line_space::Ray) -> f64 {
    (a.xi() - b.xi()).norm().max((a.eta() - b.eta()).norm())
}

/// Closed-form cylinder reflections against vector ray tracing.
fn oracle(rng: &mut ChaCha8Rng, a: f64, n: usize) -> Result<SuiteResult> {
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let vr = interior_ray(rng, a)?;
        let ray = convert_back(&vr)?;
        let single = cylinder_reflect(&ray, a, Side::Interior)?;
        worst = worst.max(line_gap(
            &single,
            &convert_back(&trace_cylinder(&vr, a, 1)?.ray)?,
        ));
        for k in 1..=4 {
            let traced = convert_back(&trace_cylinder(&vr, a, k)?.ray)?;
            worst = worst.max(line_gap(&cylinder_reflect_k(&ray, a, k)?, &traced));
        }
    }
    let mut disagreements = 0;
    for _ in 0..n {
        let vr = box_ray(rng, 3.0 * a)?;
        if cylinder_intersects(&convert_back(&vr)?, a)? != meets_cylinder(&vr, a) {
            disagreements += 1;
        }
    }
    let pass = worst <= ORACLE_TOLERANCE && disagreements == 0;
    Ok(SuiteResult {
        pass,
        report: json!({
            "suite": "oracle",
            "pass": pass,
            "n": n,
            "max_ray_deviation": worst,
            "tolerance": ORACLE_TOLERANCE,
            "predicate_disagreements": disagreements,
        }),
    })
}

fn unit_disk(rng: &mut impl Rng) -> Complex64 {
    loop {
        let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return z;
        }
    }
}

/// Central-difference residual of the evolution ODE for scalars in the unit
/// disk, at parameters where `|Q| ≥ 1/2` on the whole stencil.
fn sachs(rng: &mut ChaCha8Rng, n: usize) -> Result<SuiteResult> {
    let h = 1e-4;
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < n {
        let s0 = OpticalScalars::new(unit_disk(rng), unit_disk(rng));
        let r = rng.random_range(-1.0..1.0);
        let q = |x: f64| 1.0 - 2.0 * s0.theta() * x + curvature(&s0) * x * x;
        if [r - h, r, r + h].iter().any(|&x| q(x).abs() < 0.5) {
            continue;
        }
        done += 1;
        let (m, s, p) = (
            sachs_evolve(&s0, r - h)?,
            sachs_evolve(&s0, r)?,
            sachs_evolve(&s0, r + h)?,
        );
        let drho = (p.rho - m.rho) / (2.0 * h);
        let dsigma = (p.sigma - m.sigma) / (2.0 * h);
        let rho_rhs = s.rho * s.rho + s.sigma * s.sigma.conj();
        let sigma_rhs = (s.rho + s.rho.conj()) * s.sigma;
        worst = worst
            .max((drho - rho_rhs).norm())
            .max((dsigma - sigma_rhs).norm());
    }
    let pass = worst <= SACHS_TOLERANCE;
    Ok(SuiteResult {
        pass,
        report: json!({
            "suite": "sachs",
            "pass": pass,
            "n": n,
            "max_residual": worst,
            "tolerance": SACHS_TOLERANCE,
        }),
    })
}

/// Root count against metric signature, plus exact flat cases.
fn root_count(rng: &mut ChaCha8Rng, n: usize) -> SuiteResult {
    let (mut tested, mut agree) = (0usize, 0usize);
    while tested < n {
        let s = OpticalScalars::new(
            c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
        );
        let gap = s.sigma.norm_sqr() - s.lambda().powi(2);
        if gap.abs() <= 1e-9 * (s.sigma.norm_sqr() + s.lambda().powi(2) + 1.0) {
            continue;
        }
        tested += 1;
        let roots = focal_roots(&s, 0.0);
        let expected = match classify_metric(&s, degeneracy_tolerance(&s)) {
            MetricSignature::Riemannian => 0,
            MetricSignature::Degenerate => 1,
            MetricSignature::Lorentz => 2,
        };
        if main_theorem1_check(&s) && (roots.is_flat() || roots.count() == expected) {
            agree += 1;
        }
    }
    let flat_n = (n / 10).max(1);
    let (mut flat_bad, mut flat_worst) = (0usize, 0.0_f64);
    for _ in 0..flat_n {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let theta: f64 = rng.random_range(0.05..2.0) * sign;
        let lambda: f64 = rng.random_range(-2.0..2.0);
        let phase = rng.random_range(0.0..TAU);
        let sigma = Complex64::from_polar((theta * theta + lambda * lambda).sqrt(), phase);
        let roots = focal_roots(&OpticalScalars::new(c(theta, lambda), sigma), 0.0);
        if roots.count() != 1 {
            flat_bad += 1;
            continue;
        }
        let expected = 1.0 / (2.0 * theta);
        flat_worst = flat_worst.max((roots.values()[0] - expected).abs() / expected.abs().max(1.0));
    }
    let pass = agree == tested && flat_bad == 0 && flat_worst <= FLAT_ROOT_TOLERANCE;
    SuiteResult {
        pass,
        report: json!({
            "suite": "mainthm1",
            "pass": pass,
            "n": n,
            "agreeing": agree,
            "flat_cases": flat_n,
            "flat_wrong_count": flat_bad,
            "flat_max_root_error": flat_worst,
            "flat_tolerance": FLAT_ROOT_TOLERANCE,
        }),
    }
}

/// Unit normal of a focal sheet at `u e^{iv}`; a sheet that collapses to a
/// curve gets the normal of the plane of rays through it.
fn sheet_normal(chart: &Chart, u: f64, v: f64, sheet: usize) -> Result<Vector3<f64>> {
    let sampler = |s: f64, t: f64| -> Result<Vector3<f64>> {
        let mu = Complex64::from_polar(s, t);
        Ok(phi_map(&chart.ray(mu)?, focal_root_at(chart, mu, 0.0, sheet)?).to_vector())
    };
    let h = focal_step(u, v);
    let pu = (sampler(u + h, v)? - sampler(u - h, v)?) / (2.0 * h);
    let pv = (sampler(u, v + h)? - sampler(u, v - h)?) / (2.0 * h);
    let (short, long) = if pu.norm() < pv.norm() {
        (pu, pv)
    } else {
        (pv, pu)
    };
    if short.norm() <= 1e-6 * long.norm() {
        let dir = *chart
            .ray(Complex64::from_polar(u, v))?
            .direction()
            .as_vector();
        return Ok(*plane_normal(&dir, &long)?.as_vector());
    }
    Ok(*numeric_normal(&sampler, u, v, h)?.as_vector())
}

/// Separation and angle of the focal pair on the single-bounce coffeecup.
fn pair_check(rng: &mut ChaCha8Rng, a: f64, l: f64, n: usize) -> Result<SuiteResult> {
    let chart = coffeecup_chart(a, l, 1)?;
    let (lo, hi) = valid_v_domain(a, l)?;
    let (lo, hi) = (lo + 0.1, hi - 0.1);
    if lo >= hi {
        return Err(focalset::Error::Domain(format!(
            "v domain of l = {l} is too narrow to sample"
        )));
    }
    let (mut dist_worst, mut cos_worst) = (0.0_f64, 0.0_f64);
    for _ in 0..n {
        let (u, v) = (rng.random_range(0.2..5.0), rng.random_range(lo..hi));
        let mu = Complex64::from_polar(u, v);
        let (r_used, s) = optical_scalars_off_focus(&chart, mu, 0.0)?;
        let geometry = pair_geometry(&s)?;
        let roots = focal_roots(&s, r_used);
        let gap = (roots.values()[1] - roots.values()[0]).abs();
        dist_worst = dist_worst.max((geometry.distance - gap).abs() / gap.max(1.0));
        let n0 = sheet_normal(&chart, u, v, 0)?;
        let n1 = sheet_normal(&chart, u, v, 1)?;
        cos_worst = cos_worst.max((n0.dot(&n1).powi(2) - geometry.cos2phi).abs());
    }
    let pass = dist_worst <= DISTANCE_TOLERANCE && cos_worst <= ANGLE_TOLERANCE;
    Ok(SuiteResult {
        pass,
        report: json!({
            "suite": "pair-geometry",
            "pass": pass,
            "n": n,
            "max_distance_error": dist_worst,
            "distance_tolerance": DISTANCE_TOLERANCE,
            "max_cos2_error": cos_worst,
            "cos2_tolerance": ANGLE_TOLERANCE,
        }),
    })
}

const ORDER: [Suite; 4] = [
    Suite::Oracle,
    Suite::Sachs,
    Suite::RootCount,
    Suite::PairGeometry,
];

fn default_n(suite: Suite) -> usize {
    match suite {
        Suite::Oracle => 10_000,
        Suite::Sachs => 1_000,
        Suite::RootCount => 100_000,
        Suite::PairGeometry => 400,
        Suite::All => 0,
    }
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Oracle => "oracle",
        Suite::Sachs => "sachs",
        Suite::RootCount => "mainthm1",
        Suite::PairGeometry => "pair-geometry",
        Suite::All => "all",
    }
}

/// Each suite draws from its own stream, `seed + position in the fixed
/// order`, so selecting one suite reproduces its part of `all`.
pub fn validate(cfg: &RunConfig) -> CliResult<Summary> {
    if cfg.a <= 0.0 {
        return Err(CliError::Core(focalset::Error::Domain(format!(
            "a must be positive, got {}",
            cfg.a
        ))));
    }
    let mut reports = Vec::new();
    let mut failed = false;
    for (pos, &suite) in ORDER.iter().enumerate() {
        if cfg.suite != Suite::All && cfg.suite != suite {
            continue;
        }
        let n = cfg.n.unwrap_or_else(|| default_n(suite));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(pos as u64));
        let result = match suite {
            Suite::Oracle => oracle(&mut rng, cfg.a, n),
            Suite::Sachs => sachs(&mut rng, n),
            Suite::RootCount => Ok(root_count(&mut rng, n)),
            Suite::PairGeometry => pair_check(&mut rng, cfg.a, cfg.l, n),
            Suite::All => unreachable!(),
        };
        let result = result.unwrap_or_else(|e| SuiteResult {
            pass: false,
            report: json!({
                "suite": suite_name(suite),
                "pass": false,
                "n": n,
                "error": e.to_string(),
            }),
        });
        failed |= !result.pass;
        reports.push(result.report);
    }
    let mut summary = json!({
        "command": "validate",
        "suite": suite_name(cfg.suite),
        "seed": cfg.seed,
        "a": cfg.a,
        "l": cfg.l,
        "suites": reports,
    });
    if let Some(dir) = &cfg.out {
        let mut out = OutDir::create(dir, cfg.format)?;
        out.write("validation.json", &format!("{summary}\n"))?;
        summary["files"] = json!(out.file_names());
    }
    Ok(Summary {
        value: summary,
        failed,
    })
}
