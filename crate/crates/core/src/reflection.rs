//! Reflection of rays and congruences in mirrors.
//!
//! A mirror is described by its oriented normal congruence `μ ↦ (ξ₀, η₀)`
//! together with the support function `r₀` locating the mirror point on each
//! normal. A ray of direction `ξ₁` meets the mirror at `μ` exactly when its
//! `η₁` equals [`incident_eta`]; the reflected ray is then
//! ([`reflected_xi`], [`reflected_eta`]).
//!
//! Cylinders about the `x³`-axis have closed forms for one reflection
//! ([`cylinder_reflect`]) and for `k` successive interior reflections
//! ([`cylinder_reflect_k`]).

use std::sync::Arc;

use num_complex::Complex64;

use crate::congruence::{AnalyticCongruence, Chart, Domain};
use crate::error::{Error, Result};
use crate::line_space::{phi_coords, phi_map, PointR3, Ray};
use crate::wirtinger::CScalar;

/// Direction of the reflected ray: mirror normal `ξ₀`, incoming `ξ₁`.
pub fn reflected_xi<T: CScalar>(xi0: T, xi1: T) -> T {
    let one = T::real(1.0);
    let n0 = xi0.abs_sq();
    let den = (one - n0) * xi1.conj() - xi0.conj().scale(2.0);
    ((xi0 * xi1.conj()).scale(2.0) + one - n0) / den
}

/// `η` of the reflected ray at the mirror point `Φ(ξ₀, η₀, r₀)`.
pub fn reflected_eta<T: CScalar>(xi0: T, eta0: T, r0: T, xi1: T) -> T {
    let one = T::real(1.0);
    let n0 = xi0.abs_sq();
    let den = (one - n0) * xi1.conj() - xi0.conj().scale(2.0);
    let a = xi0.conj() - xi1.conj();
    let b = one + xi0 * xi1.conj();
    (a * a * eta0 - b * b * eta0.conj() + a * b * (one + n0) * r0) / (den * den)
}

/// `η` of the ray with direction `ξ₁` through the mirror point `Φ(ξ₀, η₀, r₀)`.
pub fn incident_eta<T: CScalar>(xi0: T, eta0: T, r0: T, xi1: T) -> T {
    let d = T::real(1.0) + xi0.abs_sq();
    let p = T::real(1.0) + xi0.conj() * xi1;
    let q = xi0 - xi1;
    (p * p * eta0 - q * q * eta0.conj()) / (d * d) + q * p * r0 / d
}

/// [`reflected_eta`] written in terms of the incoming `η₁`; equal to it for
/// rays that meet the mirror point.
pub fn reflected_eta_from_incident<T: CScalar>(xi0: T, r0: T, xi1: T, eta1: T) -> T {
    let one = T::real(1.0);
    let n0 = xi0.abs_sq();
    let den = (one - n0) * xi1.conj() - xi0.conj().scale(2.0);
    let d = one + n0;
    (-(d * d) * eta1.conj()
        + (xi0.conj() - xi1.conj()) * (one + xi0 * xi1.conj()) * d * r0.scale(2.0))
        / (den * den)
}

/// A mirror given by closed-form normal congruence and support function.
pub trait AnalyticMirror: Send + Sync + 'static {
    /// `(ξ₀, η₀, r₀)` at mirror parameter `μ`.
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T, T)>;
}

type SupportFn = dyn Fn(Complex64) -> Result<f64> + Send + Sync;

/// Mirror as a normal congruence plus the support function placing the
/// mirror point on each normal line.
#[derive(Clone, Debug)]
pub struct MirrorPatch {
    normal_chart: Chart,
    support: SupportHandle,
}

#[derive(Clone)]
struct SupportHandle(Arc<SupportFn>);

impl std::fmt::Debug for SupportHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<support>")
    }
}

struct NormalsOf<M>(Arc<M>);

impl<M: AnalyticMirror> AnalyticCongruence for NormalsOf<M> {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
        let (xi, eta, _) = self.0.eval(mu)?;
        Ok((xi, eta))
    }
}

impl MirrorPatch {
    pub fn new(
        normal_chart: Chart,
        support: impl Fn(Complex64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            normal_chart,
            support: SupportHandle(Arc::new(support)),
        }
    }

    pub fn from_analytic<M: AnalyticMirror>(domain: Domain, mirror: M) -> Self {
        let m = Arc::new(mirror);
        let normal_chart = Chart::from_analytic(domain, NormalsOf(Arc::clone(&m)));
        Self::new(normal_chart, move |mu| Ok(m.eval(mu)?.2.re))
    }

    pub fn with_domain(&self, domain: Domain) -> Self {
        Self {
            normal_chart: self.normal_chart.with_domain(domain),
            support: self.support.clone(),
        }
    }

    pub fn normal_chart(&self) -> &Chart {
        &self.normal_chart
    }

    pub fn domain(&self) -> &Domain {
        self.normal_chart.domain()
    }

    pub fn support(&self, mu: Complex64) -> Result<f64> {
        (self.support.0)(mu)
    }

    /// Normal line, support value and mirror point at `mu`.
    pub fn point(&self, mu: Complex64) -> Result<(Ray, f64, PointR3)> {
        let normal = self.normal_chart.ray(mu)?;
        let r0 = self.support(mu)?;
        Ok((normal, r0, phi_map(&normal, r0)))
    }
}

/// Result of [`reflect_off_mirror`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub ray: Ray,
    pub mu0: Complex64,
    pub point: PointR3,
    /// Affine parameter of the hit point on the incoming ray.
    pub incoming_r: f64,
    /// Final `|η₁(μ₀) − η₁|` of the intersection equation.
    pub residual: f64,
}

/// Options for [`reflect_off_mirror`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectOptions {
    /// Hits at incoming affine parameter `≤ min_travel` are ignored.
    pub min_travel: f64,
    /// Seed scan resolution per axis when no guess is given.
    pub scan: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for ReflectOptions {
    fn default() -> Self {
        Self {
            min_travel: 0.0,
            scan: 24,
            max_iterations: 50,
            tolerance: 1e-12,
        }
    }
}

fn intersection_residual(incoming: &Ray, mirror: &MirrorPatch, mu: Complex64) -> Result<Complex64> {
    let (normal, r0, _) = mirror.point(mu)?;
    let e = incident_eta(
        normal.xi(),
        normal.eta(),
        Complex64::new(r0, 0.0),
        incoming.xi(),
    );
    let f = e - incoming.eta();
    if !(f.re.is_finite() && f.im.is_finite()) {
        return Err(Error::NonFinite("intersection residual"));
    }
    Ok(f)
}

/// Damped Newton iteration on the intersection equation from `seed`.
fn newton(
    incoming: &Ray,
    mirror: &MirrorPatch,
    seed: Complex64,
    opts: &ReflectOptions,
) -> Option<(Complex64, f64)> {
    let domain = *mirror.domain();
    let scale = 1.0 + incoming.eta().norm();
    let mut mu = seed;
    let mut f = intersection_residual(incoming, mirror, mu).ok()?;
    for _ in 0..opts.max_iterations {
        if f.norm() <= opts.tolerance * scale {
            break;
        }
        let h = 1e-7 * (1.0 + mu.norm());
        let fx = (intersection_residual(incoming, mirror, mu + h).ok()?
            - intersection_residual(incoming, mirror, mu - h).ok()?)
            / (2.0 * h);
        let dy = Complex64::new(0.0, h);
        let fy = (intersection_residual(incoming, mirror, mu + dy).ok()?
            - intersection_residual(incoming, mirror, mu - dy).ok()?)
            / (2.0 * h);
        let det = fx.re * fy.im - fy.re * fx.im;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let sx = -(fy.im * f.re - fy.re * f.im) / det;
        let sy = -(-fx.im * f.re + fx.re * f.im) / det;
        let step = Complex64::new(sx, sy);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-6 {
            let cand = mu + step * t;
            if domain.contains(cand) {
                if let Ok(fc) = intersection_residual(incoming, mirror, cand) {
                    if fc.norm() < f.norm() {
                        mu = cand;
                        f = fc;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted || step.norm() * t <= 1e-15 * (1.0 + mu.norm()) {
            break;
        }
    }
    let res = f.norm();
    (res <= 1e-10 * scale).then_some((mu, res))
}

/// Reflects `incoming` in the mirror.
///
/// With a guess, Newton's method starts there. Otherwise the mirror domain
/// is scanned for seeds and, of all hits found, the one with the smallest
/// incoming affine parameter above `opts.min_travel` is used.
pub fn reflect_off_mirror(
    incoming: &Ray,
    mirror: &MirrorPatch,
    mu0_guess: Option<Complex64>,
    opts: &ReflectOptions,
) -> Result<Reflection> {
    let finish = |mu: Complex64, residual: f64| -> Result<Reflection> {
        let (normal, r0, point) = mirror.point(mu)?;
        let r0c = Complex64::new(r0, 0.0);
        let ray = Ray::new(
            reflected_xi(normal.xi(), incoming.xi()),
            reflected_eta(normal.xi(), normal.eta(), r0c, incoming.xi()),
        )?;
        let incoming_r = point.to_vector().dot(incoming.direction().as_vector());
        Ok(Reflection {
            ray,
            mu0: mu,
            point,
            incoming_r,
            residual,
        })
    };

    if let Some(g) = mu0_guess {
        if let Some((mu, res)) = newton(incoming, mirror, g, opts) {
            let hit = finish(mu, res)?;
            if hit.incoming_r > opts.min_travel {
                return Ok(hit);
            }
        }
    }

    let d = mirror.domain();
    let n = opts.scan.max(2);
    let mut seeds = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mu = Complex64::new(
                d.re.0 + (d.re.1 - d.re.0) * (i as f64 + 0.5) / n as f64,
                d.im.0 + (d.im.1 - d.im.0) * (j as f64 + 0.5) / n as f64,
            );
            if let Ok(f) = intersection_residual(incoming, mirror, mu) {
                seeds.push((f.norm(), mu));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<Reflection> = None;
    for &(_, seed) in seeds.iter().take(48) {
        let Some((mu, res)) = newton(incoming, mirror, seed, opts) else {
            continue;
        };
        let Ok(hit) = finish(mu, res) else { continue };
        if hit.incoming_r <= opts.min_travel {
            continue;
        }
        if best.is_none_or(|b| hit.incoming_r < b.incoming_r) {
            best = Some(hit);
        }
    }
    best.ok_or(Error::NoIntersection)
}

/// Where the incoming light comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Incoming {
    /// Parallel rays with direction `ξ₁`.
    PlaneWave(Complex64),
    /// Rays issuing from a point.
    PointSource(PointR3),
}

/// The reflected congruence, parameterized by the mirror parameter.
#[derive(Debug, Clone)]
pub struct ReflectedCongruence<M> {
    pub mirror: M,
    pub incoming: Incoming,
}

impl<M: AnalyticMirror> AnalyticCongruence for ReflectedCongruence<M> {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
        let (xi0, eta0, r0) = self.mirror.eval(mu)?;
        let xi1 = match self.incoming {
            Incoming::PlaneWave(xi1) => T::constant(xi1),
            Incoming::PointSource(s) => {
                let (z, t) = phi_coords(xi0, eta0, r0);
                let dz = z - T::constant(s.z);
                let dt = t - T::real(s.t);
                let len = (dz.abs_sq() + dt * dt).sqrt();
                dz / (len + dt)
            }
        };
        Ok((reflected_xi(xi0, xi1), reflected_eta(xi0, eta0, r0, xi1)))
    }
}

/// Inward normals of the cylinder of radius `a` about the `x³`-axis.
/// `μ = u + iv`: `ξ₀ = e^{iv}`, `η₀ = −u e^{iv}`, `r₀ = −a`; the mirror
/// point is `(−a cos v, −a sin v, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderNormals {
    a: f64,
}

impl CylinderNormals {
    pub fn new(a: f64) -> Result<Self> {
        check_radius(a)?;
        Ok(Self { a })
    }

    pub fn radius(&self) -> f64 {
        self.a
    }
}

impl AnalyticMirror for CylinderNormals {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T, T)> {
        let xi = (mu.im() * T::constant(Complex64::new(0.0, 1.0))).exp();
        Ok((xi, -(mu.re() * xi), T::real(-self.a)))
    }
}

fn check_radius(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "cylinder radius must be positive, got {a}"
        )))
    }
}

/// The cylinder as a mirror patch over `u ∈ [−100, 100]`, `v ∈ [−π, 3π]`.
pub fn cylinder_normal_chart(a: f64) -> Result<MirrorPatch> {
    use std::f64::consts::PI;
    Ok(MirrorPatch::from_analytic(
        Domain::new(-100.0, 100.0, -PI, 3.0 * PI),
        CylinderNormals::new(a)?,
    ))
}

/// Which face of the cylinder reflects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Interior => -1.0,
            Side::Exterior => 1.0,
        }
    }
}

fn check_not_vertical(xi: Complex64) -> Result<()> {
    if xi.norm() <= 1e-15 {
        Err(Error::VerticalRay)
    } else {
        Ok(())
    }
}

/// Whether the line meets the cylinder of radius `a` about the `x³`-axis.
pub fn cylinder_intersects(ray: &Ray, a: f64) -> Result<bool> {
    check_radius(a)?;
    let (xi, eta) = (ray.xi(), ray.eta());
    check_not_vertical(xi)?;
    let w = xi * eta.conj() - xi.conj() * eta;
    Ok(w.norm() / (xi.norm() * (1.0 + xi.norm_sqr())) <= a)
}

/// Single reflection in the cylinder; `sign` is −1 for the far
/// (interior) and +1 for the near (exterior) intersection.
pub fn cylinder_reflect_generic<T: CScalar>(xi: T, eta: T, a: f64, sign: f64) -> (T, T) {
    let one = T::real(1.0);
    let n = xi.abs_sq();
    let w = xi * eta.conj() - xi.conj() * eta;
    let s = (n * (one + n) * (one + n) * T::real(a * a) + w * w).sqrt();
    let e = (w + s.scale(sign)) / (xi.conj() * (one + n)).scale(a);
    let e2 = e * e;
    let xi2 = -(xi.conj() * e2);
    let eta2 = -(xi.conj() * eta + ((one - n) / (one + n) * s).scale(sign)) * e2 / xi;
    (xi2, eta2)
}

pub fn cylinder_reflect(ray: &Ray, a: f64, side: Side) -> Result<Ray> {
    if !cylinder_intersects(ray, a)? {
        return Err(Error::NoIntersection);
    }
    let (xi, eta) = cylinder_reflect_generic(ray.xi(), ray.eta(), a, side.sign());
    Ray::new(xi, eta)
}

/// The conserved quantity `Ψ = (ξη̄ − ξ̄η)/(a i (1 + |ξ|²))`.
pub fn cylinder_invariant(ray: &Ray, a: f64) -> f64 {
    let (xi, eta) = (ray.xi(), ray.eta());
    let w = xi * eta.conj() - xi.conj() * eta;
    (w / (Complex64::new(0.0, a) * (1.0 + xi.norm_sqr()))).re
}

/// `k` successive interior reflections in closed form.
pub fn cylinder_reflect_k_generic<T: CScalar>(xi: T, eta: T, a: f64, k: u32) -> (T, T) {
    let one = T::real(1.0);
    let i = T::constant(Complex64::new(0.0, 1.0));
    let n = xi.abs_sq();
    let psi = ((xi * eta.conj() - xi.conj() * eta) / (i * (one + n)).scale(a)).re();
    let sq = (n - psi * psi).sqrt();
    // |base| = 1, so integer powers need no branch choice.
    let base = (psi * i - sq) / n.sqrt();
    let pow = base.ipow(2 * k as i32);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let xik = (xi * pow).scale(sign);
    let etak =
        ((xi.conj() * eta - (one - n) * sq.scale(a * k as f64)) * pow / xi.conj()).scale(sign);
    (xik, etak)
}

pub fn cylinder_reflect_k(ray: &Ray, a: f64, k: u32) -> Result<Ray> {
    check_radius(a)?;
    check_not_vertical(ray.xi())?;
    if k == 0 {
        return Err(Error::Domain("reflection order must be at least 1".into()));
    }
    let psi = cylinder_invariant(ray, a);
    if ray.xi().norm_sqr() < psi * psi {
        return Err(Error::Domain(format!(
            "|xi|^2 = {} < Psi^2 = {}: the ray misses the cylinder",
            ray.xi().norm_sqr(),
            psi * psi
        )));
    }
    let (xi, eta) = cylinder_reflect_k_generic(ray.xi(), ray.eta(), a, k);
    Ray::new(xi, eta)
}

/// Rays from the point `(−l, 0, 0)`, parameterized by direction: `μ ↦ (μ, −l(1 − μ²)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSourceRays {
    pub l: f64,
}

impl AnalyticCongruence for PointSourceRays {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
        let one = T::real(1.0);
        Ok((mu, (one - mu * mu).scale(-0.5 * self.l)))
    }
}

/// Parallel rays `μ ↦ (ξ₁, μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveRays {
    pub xi1: Complex64,
}

impl AnalyticCongruence for PlaneWaveRays {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
        Ok((T::constant(self.xi1), mu))
    }
}

/// A congruence after `k` interior reflections in the cylinder of radius `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderReflected<C> {
    pub inner: C,
    pub a: f64,
    pub k: u32,
}

impl<C: AnalyticCongruence> AnalyticCongruence for CylinderReflected<C> {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
        let (xi, eta) = self.inner.eval(mu)?;
        let n = xi.value().norm_sqr();
        let psi = {
            let w = xi.value() * eta.value().conj() - xi.value().conj() * eta.value();
            (w / (Complex64::new(0.0, self.a) * (1.0 + n))).re
        };
        if n <= 1e-30 || n < psi * psi {
            return Err(Error::NoIntersection);
        }
        Ok(cylinder_reflect_k_generic(xi, eta, self.a, self.k))
    }
}

pub fn plane_wave_chart(xi1: Complex64) -> Chart {
    Chart::from_analytic(Domain::square(1e6), PlaneWaveRays { xi1 })
}

pub fn point_source_chart(l: f64) -> Chart {
    Chart::from_analytic(Domain::square(1e3), PointSourceRays { l })
}

/// Normals and support of the paraboloid `x³ + (x¹)²/a + (x²)²/b = 0`,
/// parameterized by the normal direction `ξ`, `|ξ| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaboloidNormals {
    a: f64,
    b: f64,
}

impl ParaboloidNormals {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || b == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "paraboloid needs non-zero a, b; got {a}, {b}"
            )));
        }
        Ok(Self { a, b })
    }

    fn check(xi: Complex64) -> Result<()> {
        if xi.norm() >= 1.0 - 1e-9 {
            return Err(Error::Domain(format!(
                "paraboloid chart needs |xi| < 1, got {}",
                xi.norm()
            )));
        }
        Ok(())
    }

    pub fn support<T: CScalar>(&self, xi: T) -> Result<T> {
        Self::check(xi.value())?;
        let one = T::real(1.0);
        let n = xi.abs_sq();
        let s = xi + xi.conj();
        let d = xi - xi.conj();
        Ok((s * s).scale(self.a) - (d * d).scale(self.b))
            .map(|num| num / ((one - n) * (one + n)).scale(4.0))
    }

    pub fn eta<T: CScalar>(&self, xi: T) -> Result<T> {
        Self::check(xi.value())?;
        let one = T::real(1.0);
        let n = xi.abs_sq();
        let x3xb = xi * xi * n;
        let num = ((xi + xi.conj()) * (one + x3xb)).scale(self.a)
            + ((xi - xi.conj()) * (one - x3xb)).scale(self.b);
        Ok(num / ((one - n) * (one - n)).scale(4.0))
    }
}

impl AnalyticMirror for ParaboloidNormals {
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T, T)> {
        Ok((mu, self.eta(mu)?, self.support(mu)?))
    }
}

/// The paraboloid as a mirror patch on `|Re ξ|, |Im ξ| ≤ 0.7`.
pub fn paraboloid_mirror(a: f64, b: f64) -> Result<MirrorPatch> {
    Ok(MirrorPatch::from_analytic(
        Domain::square(0.7),
        ParaboloidNormals::new(a, b)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_space::{direction_of, ray_from_point_direction};
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mirror_law_on_a_generic_normal() {
        let (xi0, eta0, r0) = (c(0.3, -0.8), c(0.5, 0.2), c(1.3, 0.0));
        let xi1 = c(-0.4, 0.9);
        let eta1 = incident_eta(xi0, eta0, r0, xi1);
        let p = phi_map(&Ray::new(xi0, eta0).unwrap(), r0.re);
        let (through, _) = ray_from_point_direction(&p, xi1).unwrap();
        assert!((through.eta() - eta1).norm() < 1e-14);

        let xi2 = reflected_xi(xi0, xi1);
        let n = direction_of(xi0);
        let d1 = direction_of(xi1);
        let d2 = d1.as_vector() - 2.0 * d1.as_vector().dot(n.as_vector()) * n.as_vector();
        assert!((direction_of(xi2).as_vector() - d2).norm() < 1e-14);

        let eta2 = reflected_eta(xi0, eta0, r0, xi1);
        let (out, _) = ray_from_point_direction(&p, xi2).unwrap();
        assert!((out.eta() - eta2).norm() < 1e-13);
        assert!((reflected_eta_from_incident(xi0, r0, xi1, eta1) - eta2).norm() < 1e-13);
    }

    #[test]
    fn cylinder_chart_points() {
        let m = cylinder_normal_chart(3.0).unwrap();
        let (normal, r0, p) = m.point(c(2.0, 0.0)).unwrap();
        assert_eq!(normal.xi(), c(1.0, 0.0));
        assert_eq!(normal.eta(), c(-2.0, 0.0));
        assert_eq!(r0, -3.0);
        assert_abs_diff_eq!(p.to_vector(), Vector3::new(-3.0, 0.0, 2.0), epsilon = 1e-15);
        // Normals are horizontal and point from the mirror point to the axis.
        for v in [0.0, 0.7, 2.5, 4.0] {
            let (normal, _, p) = m.point(c(0.4, v)).unwrap();
            let inward = Vector3::new(-p.x1(), -p.x2(), 0.0) / 3.0;
            assert_abs_diff_eq!(*normal.direction().as_vector(), inward, epsilon = 1e-15);
        }
    }

    #[test]
    fn cylinder_basic_reflections() {
        let ray = Ray::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(cylinder_intersects(&ray, 0.1).unwrap());
        let out = cylinder_reflect(&ray, 2.0, Side::Interior).unwrap();
        assert!((out.xi() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(out.eta().norm() < 1e-15);
        let vertical = Ray::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            cylinder_intersects(&vertical, 1.0),
            Err(Error::VerticalRay)
        ));
        for (h, hit) in [(0.5, true), (0.99, true), (1.01, false)] {
            let ray = Ray::new(c(1.0, 0.0), c(0.0, h)).unwrap();
            assert_eq!(cylinder_intersects(&ray, 1.0).unwrap(), hit);
        }
        let miss = Ray::new(c(1.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!(matches!(
            cylinder_reflect(&miss, 1.0, Side::Interior),
            Err(Error::NoIntersection)
        ));
        assert!(matches!(
            cylinder_reflect_k(&miss, 1.0, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn reflect_off_cylinder_patch() {
        let m = cylinder_normal_chart(2.0).unwrap();
        let ray = Ray::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let hit = reflect_off_mirror(&ray, &m, None, &ReflectOptions::default()).unwrap();
        assert!((hit.ray.xi() - c(-1.0, 0.0)).norm() < 1e-10);
        assert!(hit.ray.eta().norm() < 1e-10);
        assert_abs_diff_eq!(
            hit.point.to_vector(),
            Vector3::new(2.0, 0.0, 0.0),
            epsilon = 1e-9
        );
        assert!(hit.residual <= 1e-10);
    }

    #[test]
    fn point_source_rays_pass_through_source() {
        let ch = point_source_chart(0.7);
        for mu in [c(0.3, 0.2), c(-1.5, 0.4), c(2.0, -3.0)] {
            let ray = ch.ray(mu).unwrap();
            let (back, _) =
                ray_from_point_direction(&PointR3::new(-0.7, 0.0, 0.0), ray.xi()).unwrap();
            assert!((back.eta() - ray.eta()).norm() < 1e-12);
        }
        let at_origin = point_source_chart(0.0);
        assert_eq!(at_origin.ray(c(1.0, 0.0)).unwrap().eta(), c(0.0, 0.0));
        assert_eq!(at_origin.ray(c(-1.0, 0.0)).unwrap().eta(), c(0.0, 0.0));
    }

    #[test]
    fn paraboloid_examples() {
        let p = ParaboloidNormals::new(1.5, 1.5).unwrap();
        let xi = c(0.3, 0.4);
        let q = xi.norm_sqr();
        assert_abs_diff_eq!(
            p.support(xi).unwrap().re,
            1.5 * q / (1.0 - q * q),
            epsilon = 1e-15
        );
        assert_eq!(p.support(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(p.eta(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(p.support(c(0.8, 0.7)).is_err());
        assert!(ParaboloidNormals::new(0.0, 1.0).is_err());
    }
}
