mod common;

use nalgebra::Vector3;
use num_complex::Complex64;

use focalset::congruence::{
    classify_metric, degeneracy_tolerance, optical_scalars, Chart, Domain, MetricSignature,
};
use focalset::focal::{focal_root_at, pair_geometry};
use focalset::line_space::{direction_of, phi_map, Ray};
use focalset::oracle::{
    convert, convert_back, estimate_focal, focal_step, numeric_normal, trace_cylinder, VecRay,
};
use focalset::reflection::{cylinder_reflect, cylinder_reflect_k, Side};
use focalset::scenarios::coffeecup_chart;
use focalset::Result;

use common::{c, random_complex, random_interior_ray, rng};

const A: f64 = 1.1;

fn line_gap(a: &Ray, b: &Ray) -> f64 {
    let scale = 1.0 + a.xi().norm_sqr();
    ((a.xi() - b.xi()).norm() + (a.eta() - b.eta()).norm()) / (scale * (1.0 + a.eta().norm()))
}

#[test]
fn conversion_roundtrip() {
    let mut rng = rng(31);
    for _ in 0..10_000 {
        let ray = Ray::new(random_complex(&mut rng, 4.0), random_complex(&mut rng, 4.0)).unwrap();
        let back = convert_back(&convert(&ray)).unwrap();
        assert!(line_gap(&ray, &back) <= 1e-12, "{ray:?}");
    }
}

#[test]
fn traced_rays_stay_unit_and_bounce_on_the_wall() {
    let mut rng = rng(32);
    for _ in 0..2_000 {
        let vr = random_interior_ray(&mut rng, A);
        let Ok(trace) = trace_cylinder(&vr, A, 4) else {
            continue;
        };
        assert!((trace.ray.dir.as_vector().norm() - 1.0).abs() <= 1e-12);
        for p in &trace.bounces {
            assert!((p.xy().norm() - A).abs() <= 1e-12 * (1.0 + p.norm()));
        }
    }
}

#[test]
fn reversed_outgoing_ray_retraces_the_incoming_one() {
    let mut rng = rng(33);
    for _ in 0..2_000 {
        let vr = random_interior_ray(&mut rng, A);
        let Ok(out) = trace_cylinder(&vr, A, 1) else {
            continue;
        };
        let p = out.bounces[0];
        let start = p + 0.5 * out.ray.dir.as_vector();
        if start.xy().norm() >= A {
            continue;
        }
        let back =
            trace_cylinder(&VecRay::new(start, -out.ray.dir.as_vector()).unwrap(), A, 1).unwrap();
        assert!((back.bounces[0] - p).norm() <= 1e-12 * (1.0 + p.norm()));
        let expected = vr.reversed();
        assert!((back.ray.dir.as_vector() - expected.dir.as_vector()).norm() <= 1e-12);
    }
}

#[test]
fn tracer_agrees_with_closed_forms() {
    let mut rng = rng(34);
    let mut compared = 0;
    for _ in 0..10_000 {
        let vr = random_interior_ray(&mut rng, A);
        let ray = convert_back(&vr).unwrap();
        let (Ok(one), Ok(four)) = (trace_cylinder(&vr, A, 1), trace_cylinder(&vr, A, 4)) else {
            continue;
        };
        let closed_one = cylinder_reflect(&ray, A, Side::Interior).unwrap();
        assert!(line_gap(&convert_back(&one.ray).unwrap(), &closed_one) <= 1e-9);
        let closed_four = cylinder_reflect_k(&ray, A, 4).unwrap();
        assert!(line_gap(&convert_back(&four.ray).unwrap(), &closed_four) <= 1e-8);
        compared += 1;
    }
    assert!(compared > 9_000);
}

#[test]
fn estimated_focal_points_match_the_coffeecup_roots() {
    let (a, l) = (1.0, 0.5);
    let chart = coffeecup_chart(a, l, 1).unwrap();
    let source = Vector3::new(-l, 0.0, 0.0);
    let family = |s: f64, t: f64| -> Result<VecRay> {
        let dir = *direction_of(Complex64::from_polar(s, t)).as_vector();
        Ok(trace_cylinder(&VecRay::new(source, dir)?, a, 1)?.ray)
    };
    let mut checked = 0;
    for u in [0.3, 0.6, 1.0, 1.5, 2.5] {
        for v in [-2.5, -1.4, -0.3, 0.4, 1.2, 2.8] {
            let base = family(u, v).unwrap();
            let estimated: Vec<Vector3<f64>> = estimate_focal(&family, u, v, focal_step(u, v))
                .unwrap()
                .iter()
                .map(|&r| base.at(r))
                .collect();
            let mu = Complex64::from_polar(u, v);
            let ray = chart.ray(mu).unwrap();
            let exact: Vec<Vector3<f64>> = (0..2)
                .map(|k| phi_map(&ray, focal_root_at(&chart, mu, 0.0, k).unwrap()).to_vector())
                .collect();
            assert_eq!(estimated.len(), 2, "u={u} v={v}");
            let straight = (estimated[0] - exact[0])
                .norm()
                .max((estimated[1] - exact[1]).norm());
            let crossed = (estimated[0] - exact[1])
                .norm()
                .max((estimated[1] - exact[0]).norm());
            let gap = straight.min(crossed);
            assert!(gap <= 1e-3, "u={u} v={v}: {gap:e}");
            checked += 1;
        }
    }
    assert_eq!(checked, 30);
}

fn twisted_chart() -> Chart {
    Chart::from_fn(Domain::square(2.0), |mu| {
        Ray::new(mu, c(0.3, 0.15) * mu.conj() + c(0.25, 0.0) * mu * mu)
    })
}

fn sheet_normal(chart: &Chart, mu: Complex64, sheet: usize) -> Vector3<f64> {
    let sampler = |s: f64, t: f64| -> Result<Vector3<f64>> {
        let m = c(s, t);
        Ok(phi_map(&chart.ray(m)?, focal_root_at(chart, m, 0.0, sheet)?).to_vector())
    };
    *numeric_normal(&sampler, mu.re, mu.im, focal_step(mu.re, mu.im))
        .unwrap()
        .as_vector()
}

#[test]
fn focal_sheet_angle_on_a_twisted_congruence() {
    let chart = twisted_chart();
    let mut checked = 0;
    for re in [-0.6, -0.3, 0.1, 0.4, 0.7] {
        for im in [-0.5, -0.2, 0.2, 0.5] {
            let mu = c(re, im);
            let s = optical_scalars(&chart, mu, 0.0).unwrap();
            if classify_metric(&s, degeneracy_tolerance(&s)) != MetricSignature::Lorentz {
                continue;
            }
            let geom = pair_geometry(&s).unwrap();
            if geom.cos2phi < 1e-3 {
                continue;
            }
            let (n0, n1) = (sheet_normal(&chart, mu, 0), sheet_normal(&chart, mu, 1));
            let cos2 = n0.dot(&n1).powi(2);
            assert!(
                (cos2 - geom.cos2phi).abs() <= 1e-5,
                "{mu}: {cos2} vs {}",
                geom.cos2phi
            );
            checked += 1;
        }
    }
    assert!(checked >= 8, "only {checked} twisted samples");
}

#[test]
fn cylinder_sampler_normal_is_radial() {
    for (v, z) in [(0.0, 0.0), (1.1, -2.0), (2.9, 5.0), (-2.0, 0.3)] {
        let cyl = |v: f64, z: f64| Ok(Vector3::new(A * v.cos(), A * v.sin(), z));
        let n = numeric_normal(&cyl, v, z, focal_step(v, z)).unwrap();
        let radial = Vector3::new(v.cos(), v.sin(), 0.0);
        assert!((n.as_vector().dot(&radial).abs() - 1.0).abs() <= 1e-9);
    }
}
