mod common;

use std::f64::consts::FRAC_PI_4;

use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;

use focalset::line_space::{
    direction_of, phi_map, ray_from_point_direction, rotate_ray, translate_ray, xi_of_direction,
    Direction, PointR3, Ray, RotationParams, TranslationParams,
};

use common::c;

fn complex(scale: f64) -> impl Strategy<Value = Complex64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| c(re, im))
}

fn ray_strategy() -> impl Strategy<Value = Ray> {
    (complex(3.0), complex(5.0)).prop_map(|(xi, eta)| Ray::new(xi, eta).unwrap())
}

fn rotation_strategy() -> impl Strategy<Value = RotationParams> {
    (-1.0..1.0, -1.0..1.0, -1.0..1.0, -3.0..3.0)
        .prop_filter("non-zero axis", |(x, y, z, _): &(f64, f64, f64, f64)| {
            x * x + y * y + z * z > 1e-3
        })
        .prop_map(|(x, y, z, angle)| {
            RotationParams::from_axis_angle(&Vector3::new(x, y, z), angle).unwrap()
        })
}

/// Largest distance between the images of sample points of `ray` under
/// `motion` and the line `image`.
fn line_mismatch(ray: &Ray, image: &Ray, motion: impl Fn(Vector3<f64>) -> Vector3<f64>) -> f64 {
    let d = *image.direction().as_vector();
    let foot = image.foot_point().to_vector();
    [-2.0, -0.5, 0.0, 1.0, 3.0]
        .iter()
        .map(|&r| {
            let p = motion(phi_map(ray, r).to_vector()) - foot;
            (p - d * p.dot(&d)).norm()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn point_direction_roundtrip(
        x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64, xi in complex(4.0)
    ) {
        let p = PointR3::new(x, y, z);
        let (ray, r) = ray_from_point_direction(&p, xi).unwrap();
        let q = phi_map(&ray, r);
        prop_assert!(q.distance(&p) <= 1e-12 * (1.0 + p.to_vector().norm()) * (1.0 + xi.norm_sqr()));
        let (again, r2) = ray_from_point_direction(&phi_map(&ray, r), ray.xi()).unwrap();
        prop_assert!((again.eta() - ray.eta()).norm() <= 1e-12 * (1.0 + ray.eta().norm()) * (1.0 + xi.norm_sqr()));
        prop_assert!((r2 - r).abs() <= 1e-12 * (1.0 + r.abs()) * (1.0 + xi.norm_sqr()));
    }

    #[test]
    fn phi_map_is_affine_along_the_direction(ray in ray_strategy(), r in -5.0..5.0f64) {
        let h = 1e-3;
        let fd = (phi_map(&ray, r + h).to_vector() - phi_map(&ray, r - h).to_vector()) / (2.0 * h);
        prop_assert!((fd - ray.direction().as_vector()).norm() < 1e-9);
    }

    #[test]
    fn foot_point_is_closest_to_origin(ray in ray_strategy()) {
        let foot = phi_map(&ray, 0.0).to_vector();
        prop_assert!(foot.dot(ray.direction().as_vector()).abs() <= 1e-12 * (1.0 + foot.norm()));
    }

    #[test]
    fn direction_roundtrip(xi in complex(20.0)) {
        let back = xi_of_direction(&direction_of(xi)).unwrap();
        prop_assert!((back - xi).norm() <= 1e-12 * (1.0 + xi.norm_sqr()));
        prop_assert!((direction_of(xi).as_vector().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rotation_parameters_are_unit(rp in rotation_strategy()) {
        prop_assert!((rp.a().norm_sqr() + rp.beta().norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rotation_matches_matrix(ray in ray_strategy(), rp in rotation_strategy()) {
        if let Ok(image) = rotate_ray(&ray, &rp) {
            let m = rp.matrix();
            prop_assume!(image.xi().norm() < 1e3);
            prop_assert!(line_mismatch(&ray, &image, |p| m * p) <= 1e-12 * (1.0 + image.xi().norm_sqr()) * 10.0);
            let rotated = m * ray.direction().as_vector();
            prop_assert!((rotated - image.direction().as_vector()).norm() <= 1e-12 * (1.0 + image.xi().norm_sqr()));
        }
    }

    #[test]
    fn rotation_composition(ray in ray_strategy(), r1 in rotation_strategy(), r2 in rotation_strategy()) {
        let (Ok(step), Ok(direct)) = (rotate_ray(&ray, &r1), rotate_ray(&ray, &r2.compose(&r1))) else {
            return Ok(());
        };
        let Ok(twice) = rotate_ray(&step, &r2) else { return Ok(()); };
        prop_assume!(step.xi().norm() < 1e3 && direct.xi().norm() < 1e3);
        let scale = (1.0 + step.xi().norm_sqr()) * (1.0 + direct.xi().norm_sqr());
        prop_assert!((twice.xi() - direct.xi()).norm() <= 1e-12 * scale);
        prop_assert!((twice.eta() - direct.eta()).norm() <= 1e-12 * scale * (1.0 + ray.eta().norm()));
    }

    #[test]
    fn translation_moves_lines(ray in ray_strategy(), x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64) {
        let v = Vector3::new(x, y, z);
        let image = translate_ray(&ray, &TranslationParams::from_vector(&v));
        prop_assert!(line_mismatch(&ray, &image, |p| p + v) <= 1e-12 * 100.0 * (1.0 + ray.xi().norm_sqr()));
    }
}

#[test]
fn quarter_turn_example() {
    // a = cos(π/4), β = sin(π/4) acting on the ray ξ = 1 through the origin.
    let rp = RotationParams::new(FRAC_PI_4.cos(), c(FRAC_PI_4.sin(), 0.0)).unwrap();
    let ray = Ray::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let image = rotate_ray(&ray, &rp).unwrap();
    let a = FRAC_PI_4.cos();
    let expected = (a * c(1.0, 0.0) - c(FRAC_PI_4.sin(), 0.0)) / (FRAC_PI_4.sin() + a);
    assert!((image.xi() - expected).norm() < 1e-15);
    let m = rp.matrix();
    assert!(line_mismatch(&ray, &image, |p| m * p) < 1e-12);
}

#[test]
fn direction_examples() {
    let up = Direction::from_vector(Vector3::new(0.0, 0.0, 2.0)).unwrap();
    assert_eq!(xi_of_direction(&up).unwrap(), c(0.0, 0.0));
    let x = Direction::from_vector(Vector3::new(1.0, 0.0, 0.0)).unwrap();
    assert!((xi_of_direction(&x).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    let down = Direction::from_vector(Vector3::new(0.0, 0.0, -1.0)).unwrap();
    assert!(xi_of_direction(&down).is_err());
}
