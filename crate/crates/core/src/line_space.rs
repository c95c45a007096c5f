//! Complex coordinates on the space of oriented lines in R³.
//!
//! A ray is the pair `(ξ, η)`: `ξ` is the stereographic coordinate of its unit
//! direction (projection from the south pole) and `η` encodes the
//! perpendicular from the origin to the line as a tangent vector `η ∂/∂ξ` on
//! the sphere. Only the chart omitting the south-pointing direction is used.
//!
//! Euclidean motions act on the coordinates as
//!
//! * translation: `ξ' = ξ`, `η' = η + α + bξ − ᾱξ²`. This moves every line by
//!   the vector `(2 Re α, 2 Im α, −b)`.
//! * rotation: `ξ' = (aξ − β)/(β̄ξ + ā)`, `η' = η/(β̄ξ + ā)²` with
//!   `|a|² + |β|² = 1`. A rotation by angle `ω` about the unit axis `n` has
//!   `a = cos(ω/2) + i n₃ sin(ω/2)` and `β = sin(ω/2)(−n₂ + i n₁)`.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wirtinger::CScalar;

/// `|ξ|` beyond this value is treated as leaving the chart.
pub const CHART_LIMIT: f64 = 1e12;

/// An oriented line in the north chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    xi: Complex64,
    eta: Complex64,
}

impl Ray {
    pub fn new(xi: Complex64, eta: Complex64) -> Result<Self> {
        if !(xi.re.is_finite() && xi.im.is_finite()) || xi.norm() > CHART_LIMIT {
            return Err(Error::ChartExit(xi.norm()));
        }
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::NonFinite("ray eta"));
        }
        Ok(Self { xi, eta })
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn direction(&self) -> Direction {
        direction_of(self.xi)
    }

    /// The point of the line closest to the origin.
    pub fn foot_point(&self) -> PointR3 {
        phi_map(self, 0.0)
    }
}

/// A point of R³ as `z = x¹ + i x²`, `t = x³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointR3 {
    pub z: Complex64,
    pub t: f64,
}

impl PointR3 {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self {
            z: Complex64::new(x1, x2),
            t: x3,
        }
    }

    pub fn x1(&self) -> f64 {
        self.z.re
    }

    pub fn x2(&self) -> f64 {
        self.z.im
    }

    pub fn x3(&self) -> f64 {
        self.t
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.z.re, self.z.im, self.t)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn is_finite(&self) -> bool {
        self.z.re.is_finite() && self.z.im.is_finite() && self.t.is_finite()
    }

    pub fn distance(&self, other: &PointR3) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }

    /// Largest absolute coordinate difference.
    pub fn max_component_diff(&self, other: &PointR3) -> f64 {
        (self.z.re - other.z.re)
            .abs()
            .max((self.z.im - other.z.im).abs())
            .max((self.t - other.t).abs())
    }
}

/// A unit vector in R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vector3<f64>);

impl Direction {
    /// Normalizes `v`; fails on a zero or non-finite vector.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NonFinite("direction"));
        }
        Ok(Self(v / n))
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }
}

/// Change of origin `η → η + α + bξ − ᾱξ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationParams {
    pub alpha: Complex64,
    pub b: f64,
}

impl TranslationParams {
    /// Parameters that translate every line by `v`.
    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self {
            alpha: Complex64::new(0.5 * v.x, 0.5 * v.y),
            b: -v.z,
        }
    }

    /// The R³ displacement applied to lines by these parameters.
    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(2.0 * self.alpha.re, 2.0 * self.alpha.im, -self.b)
    }
}

/// A rotation about the origin as a unit-norm pair `(a, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    a: Complex64,
    beta: Complex64,
}

impl RotationParams {
    /// Rotation with real `a`, the form `ξ' = (aξ − β)/(β̄ξ + a)`.
    pub fn new(a: f64, beta: Complex64) -> Result<Self> {
        Self::general(Complex64::new(a, 0.0), beta)
    }

    /// General unit pair; `a` may be complex.
    pub fn general(a: Complex64, beta: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "rotation parameters must satisfy |a|^2 + |beta|^2 = 1, got {n}"
            )));
        }
        Ok(Self { a, beta })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// Right-handed rotation by `angle` about `axis`.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain("rotation axis must be non-zero".into()));
        }
        let u = axis / n;
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(Self {
            a: Complex64::new(c, u.z * s),
            beta: Complex64::new(-u.y * s, u.x * s),
        })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// The 3×3 rotation matrix acting on R³.
    pub fn matrix(&self) -> Matrix3<f64> {
        let q = Quaternion::new(self.a.re, self.beta.im, -self.beta.re, self.a.im);
        *UnitQuaternion::from_quaternion(q)
            .to_rotation_matrix()
            .matrix()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &RotationParams) -> RotationParams {
        let (a2, b2) = (self.a, self.beta);
        let (a1, b1) = (first.a, first.beta);
        RotationParams {
            a: a2 * a1 - b2 * b1.conj(),
            beta: a2 * b1 + b2 * a1.conj(),
        }
    }
}

/// Stereographic coordinate `ξ = tan(θ/2) e^{iφ}` of a direction.
pub fn xi_of_direction(d: &Direction) -> Result<Complex64> {
    let denom = 1.0 + d.z();
    let xi = Complex64::new(d.x(), d.y()) / denom;
    if denom <= 0.0 || !xi.re.is_finite() || !xi.im.is_finite() || xi.norm() > CHART_LIMIT {
        return Err(Error::ChartExit(xi.norm()));
    }
    Ok(xi)
}

/// Unit direction `(sin θ cos φ, sin θ sin φ, cos θ)` of `ξ`.
pub fn direction_of(xi: Complex64) -> Direction {
    let q = xi.norm_sqr();
    let d = 1.0 + q;
    Direction(Vector3::new(
        2.0 * xi.re / d,
        2.0 * xi.im / d,
        (1.0 - q) / d,
    ))
}

/// `Φ(ξ, η, r)` in any complex scalar type; returns `(z, t)` with `t` carried
/// as a complex number whose imaginary part vanishes.
pub fn phi_coords<T: CScalar>(xi: T, eta: T, r: T) -> (T, T) {
    let one = T::real(1.0);
    let q = xi * xi.conj();
    let d = one + q;
    let d2 = d * d;
    let z = ((eta - eta.conj() * xi * xi).scale(2.0) + (xi * d * r).scale(2.0)) / d2;
    let t = ((eta * xi.conj() + eta.conj() * xi).scale(-2.0) + (one - q * q) * r) / d2;
    (z, t)
}

/// The point of the ray at signed distance `r` from its foot point.
pub fn phi_map(ray: &Ray, r: f64) -> PointR3 {
    let (z, t) = phi_coords(ray.xi, ray.eta, Complex64::new(r, 0.0));
    PointR3 { z, t: t.re }
}

/// Inverse of [`phi_map`]: the ray with direction `xi` through `p`, and the
/// affine parameter of `p` on it.
pub fn ray_from_point_direction(p: &PointR3, xi: Complex64) -> Result<(Ray, f64)> {
    // η = ½(z − ξ² z̄ − 2ξt) is unchanged when p slides along the line.
    let eta = 0.5 * (p.z - xi * xi * p.z.conj() - 2.0 * xi * p.t);
    let ray = Ray::new(xi, eta)?;
    let r = p.to_vector().dot(ray.direction().as_vector());
    Ok((ray, r))
}

/// Translated line coordinates in any complex scalar type.
pub fn translate_coords<T: CScalar>(xi: T, eta: T, tp: &TranslationParams) -> (T, T) {
    let alpha = T::constant(tp.alpha);
    (
        xi,
        eta + alpha + xi.scale(tp.b) - T::constant(tp.alpha.conj()) * xi * xi,
    )
}

/// Rotated line coordinates in any complex scalar type.
pub fn rotate_coords<T: CScalar>(xi: T, eta: T, rp: &RotationParams) -> (T, T) {
    let den = T::constant(rp.beta.conj()) * xi + T::constant(rp.a.conj());
    (
        (T::constant(rp.a) * xi - T::constant(rp.beta)) / den,
        eta / (den * den),
    )
}

pub fn translate_ray(ray: &Ray, tp: &TranslationParams) -> Ray {
    let (xi, eta) = translate_coords(ray.xi, ray.eta, tp);
    Ray { xi, eta }
}

pub fn rotate_ray(ray: &Ray, rp: &RotationParams) -> Result<Ray> {
    let den = rp.beta.conj() * ray.xi + rp.a.conj();
    if den.norm() < 1e-300 {
        return Err(Error::ChartExit(f64::INFINITY));
    }
    let (xi, eta) = rotate_coords(ray.xi, ray.eta, rp);
    Ray::new(xi, eta)
}
