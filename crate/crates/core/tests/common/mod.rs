#![allow(dead_code)]

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use focalset::congruence::OpticalScalars;
use focalset::oracle::VecRay;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    c(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

/// Unit vector with `|z| < max_z`.
pub fn random_direction(rng: &mut impl Rng, max_z: f64) -> Vector3<f64> {
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

/// Ray starting strictly inside the cylinder of radius `a`.
pub fn random_interior_ray(rng: &mut impl Rng, a: f64) -> VecRay {
    let r = 0.9 * a * rng.random::<f64>().sqrt();
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    let origin = Vector3::new(r * phi.cos(), r * phi.sin(), rng.random_range(-a..a));
    VecRay::new(origin, random_direction(rng, 0.95)).unwrap()
}

/// Ray with origin anywhere in a box around the cylinder.
pub fn random_ray(rng: &mut impl Rng, half_width: f64) -> VecRay {
    let origin = Vector3::new(
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
    );
    VecRay::new(origin, random_direction(rng, 0.95)).unwrap()
}

pub fn random_scalars(rng: &mut impl Rng, scale: f64) -> OpticalScalars {
    OpticalScalars::new(random_complex(rng, scale), random_complex(rng, scale))
}
