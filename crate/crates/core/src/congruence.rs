//! Parameterized line congruences and their optical scalars.
//!
//! A congruence is given locally by a chart `μ ↦ (ξ(μ, μ̄), η(μ, μ̄))`. Its
//! first-order behaviour along each ray is captured by the optical scalars
//! `ρ = Θ + iλ` (divergence and twist) and `σ` (shear), computed here from
//! the Wirtinger derivatives of the chart.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::line_space::{phi_map, Ray};
use crate::sampling::{Grid, SampledSurface, ScalarField};
use crate::wirtinger::{CScalar, Wirt};

/// A congruence written once against [`CScalar`], so the same code yields
/// the rays and their exact first derivatives.
pub trait AnalyticCongruence: Send + Sync + 'static {
    /// Returns `(ξ, η)` at `μ`.
    fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)>;
}

/// A real function of the direction `ξ`, used as a support function.
pub trait SupportFunction: Send + Sync + 'static {
    fn eval<T: CScalar>(&self, xi: T) -> Result<T>;
}

/// Closed rectangle `[re.0, re.1] × [im.0, im.1]` in the μ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Domain {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Self {
            re: (re_lo, re_hi),
            im: (im_lo, im_hi),
        }
    }

    /// Centered square of half-width `r`.
    pub fn square(r: f64) -> Self {
        Self::new(-r, r, -r, r)
    }

    /// Distance from `mu` to the boundary; negative outside.
    pub fn margin(&self, mu: Complex64) -> f64 {
        (mu.re - self.re.0)
            .min(self.re.1 - mu.re)
            .min(mu.im - self.im.0)
            .min(self.im.1 - mu.im)
    }

    pub fn contains(&self, mu: Complex64) -> bool {
        self.margin(mu) >= 0.0
    }
}

/// Wirtinger derivatives of `ξ` and `η` with respect to `μ` and `μ̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub dxi: Complex64,
    pub dbar_xi: Complex64,
    pub deta: Complex64,
    pub dbar_eta: Complex64,
}

impl Jet {
    fn is_finite(&self) -> bool {
        [self.dxi, self.dbar_xi, self.deta, self.dbar_eta]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

type RayFn = dyn Fn(Complex64) -> Result<Ray> + Send + Sync;
type JetFn = dyn Fn(Complex64) -> Result<(Ray, Jet)> + Send + Sync;

/// A parameterized line congruence.
#[derive(Clone)]
pub struct Chart {
    domain: Domain,
    map: Arc<RayFn>,
    jets: Option<Arc<JetFn>>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("domain", &self.domain)
            .field("analytic_jets", &self.jets.is_some())
            .finish()
    }
}

impl Chart {
    /// Chart without analytic derivatives; jets come from central differences.
    pub fn from_fn(
        domain: Domain,
        map: impl Fn(Complex64) -> Result<Ray> + Send + Sync + 'static,
    ) -> Self {
        Self {
            domain,
            map: Arc::new(map),
            jets: None,
        }
    }

    /// Chart with exact jets obtained by evaluating `c` on dual numbers.
    pub fn from_analytic<A: AnalyticCongruence>(domain: Domain, c: A) -> Self {
        let c = Arc::new(c);
        let c2 = Arc::clone(&c);
        let map = move |mu: Complex64| {
            let (xi, eta) = c.eval(mu)?;
            Ray::new(xi, eta)
        };
        let jets = move |mu: Complex64| {
            let (xi, eta) = c2.eval(Wirt::variable(mu))?;
            let ray = Ray::new(xi.v, eta.v)?;
            let jet = Jet {
                dxi: xi.d,
                dbar_xi: xi.db,
                deta: eta.d,
                dbar_eta: eta.db,
            };
            if !jet.is_finite() {
                return Err(Error::NonFinite("analytic jet"));
            }
            Ok((ray, jet))
        };
        Self {
            domain,
            map: Arc::new(map),
            jets: Some(Arc::new(jets)),
        }
    }

    /// Same congruence with the analytic jets dropped.
    pub fn without_jets(&self) -> Self {
        Self {
            domain: self.domain,
            map: Arc::clone(&self.map),
            jets: None,
        }
    }

    pub fn with_domain(&self, domain: Domain) -> Self {
        Self {
            domain,
            ..self.clone()
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn has_analytic_jets(&self) -> bool {
        self.jets.is_some()
    }

    pub fn ray(&self, mu: Complex64) -> Result<Ray> {
        (self.map)(mu)
    }

    /// The ray at `mu` and its jet, analytic when available.
    pub fn jet(&self, mu: Complex64) -> Result<(Ray, Jet)> {
        match &self.jets {
            Some(j) => j(mu),
            None => Ok((self.ray(mu)?, numeric_jet(self, mu, default_step(mu))?)),
        }
    }

    /// Largest difference between analytic and numeric jets over `grid`.
    pub fn jet_discrepancy(&self, grid: &Grid) -> Result<f64> {
        let mut worst: f64 = 0.0;
        if self.jets.is_none() {
            return Ok(worst);
        }
        for &mu in grid.mus() {
            let (_, a) = self.jet(mu)?;
            let n = numeric_jet(self, mu, default_step(mu))?;
            for (x, y) in [
                (a.dxi, n.dxi),
                (a.dbar_xi, n.dbar_xi),
                (a.deta, n.deta),
                (a.dbar_eta, n.dbar_eta),
            ] {
                worst = worst.max((x - y).norm());
            }
        }
        Ok(worst)
    }
}

/// Central-difference step `ε^{1/3}(1 + |μ|)`.
pub fn default_step(mu: Complex64) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + mu.norm())
}

/// Wirtinger derivatives of the chart at `mu` by central differences of step `h`.
pub fn numeric_jet(chart: &Chart, mu: Complex64, h: f64) -> Result<Jet> {
    if chart.domain.margin(mu) < h {
        return Err(Error::DomainMargin {
            mu: format!("{mu}"),
            h,
        });
    }
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let xp = chart.ray(mu + dx)?;
    let xm = chart.ray(mu - dx)?;
    let yp = chart.ray(mu + dy)?;
    let ym = chart.ray(mu - dy)?;
    let i = Complex64::new(0.0, 1.0);
    let wirtinger = |fxp: Complex64, fxm: Complex64, fyp: Complex64, fym: Complex64| {
        let fx = (fxp - fxm) / (2.0 * h);
        let fy = (fyp - fym) / (2.0 * h);
        (0.5 * (fx - i * fy), 0.5 * (fx + i * fy))
    };
    let (dxi, dbar_xi) = wirtinger(xp.xi(), xm.xi(), yp.xi(), ym.xi());
    let (deta, dbar_eta) = wirtinger(xp.eta(), xm.eta(), yp.eta(), ym.eta());
    let jet = Jet {
        dxi,
        dbar_xi,
        deta,
        dbar_eta,
    };
    if !jet.is_finite() {
        return Err(Error::NonFinite("numeric jet"));
    }
    Ok(jet)
}

/// `(∂⁺η, ∂⁻η)` at affine parameter `r`.
pub fn directional_derivatives(jet: &Jet, ray: &Ray, r: f64) -> (Complex64, Complex64) {
    let (xi, eta) = (ray.xi(), ray.eta());
    let k = 2.0 * eta * xi.conj() / (1.0 + xi.norm_sqr());
    (
        jet.deta + r * jet.dxi - k * jet.dxi,
        jet.dbar_eta + r * jet.dbar_xi - k * jet.dbar_xi,
    )
}

/// Divergence and twist `ρ = Θ + iλ`, and shear `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalScalars {
    pub rho: Complex64,
    pub sigma: Complex64,
}

impl OpticalScalars {
    pub fn new(rho: Complex64, sigma: Complex64) -> Self {
        Self { rho, sigma }
    }

    pub fn theta(&self) -> f64 {
        self.rho.re
    }

    pub fn lambda(&self) -> f64 {
        self.rho.im
    }

    pub fn is_finite(&self) -> bool {
        self.rho.re.is_finite()
            && self.rho.im.is_finite()
            && self.sigma.re.is_finite()
            && self.sigma.im.is_finite()
    }
}

/// Optical scalars of the ray with the given jet at affine parameter `r`.
pub fn optical_scalars_from_jet(ray: &Ray, jet: &Jet, r: f64) -> Result<OpticalScalars> {
    let (dp, dm) = directional_derivatives(jet, ray, r);
    let den = dm.norm_sqr() - dp.norm_sqr();
    let scale = dm.norm_sqr() + dp.norm_sqr();
    if !(den.abs() > 1e-12 * scale) {
        return Err(Error::FocalPoint {
            r,
            denominator: den,
        });
    }
    let (dxi_c, dbar_xi_c) = (jet.dxi.conj(), jet.dbar_xi.conj());
    let rho = (dp * dxi_c - dm * dbar_xi_c) / den;
    let sigma = (dp.conj() * dbar_xi_c - dm.conj() * dxi_c) / den;
    let s = OpticalScalars { rho, sigma };
    if !s.is_finite() {
        return Err(Error::NonFinite("optical scalars"));
    }
    Ok(s)
}

pub fn optical_scalars(chart: &Chart, mu: Complex64, r: f64) -> Result<OpticalScalars> {
    let (ray, jet) = chart.jet(mu)?;
    optical_scalars_from_jet(&ray, &jet, r)
}

/// Optical scalars at `r` or, if that is a focal point, at the nearest of a
/// few shifted parameters. Returns the parameter actually used.
pub fn optical_scalars_off_focus(
    chart: &Chart,
    mu: Complex64,
    r: f64,
) -> Result<(f64, OpticalScalars)> {
    let (ray, jet) = chart.jet(mu)?;
    let scale = 1.0 + r.abs();
    let mut last = None;
    for shift in [0.0, 1e-6, -1e-6, 1e-3, -1e-3, 0.1, -0.1, 1.0, -1.0] {
        let rr = r + shift * scale;
        match optical_scalars_from_jet(&ray, &jet, rr) {
            Ok(s) => return Ok((rr, s)),
            Err(e @ Error::FocalPoint { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::NonFinite("optical scalars")))
}

/// `κ = ρρ̄ − σσ̄`.
pub fn curvature(s: &OpticalScalars) -> f64 {
    s.rho.norm_sqr() - s.sigma.norm_sqr()
}

/// Signature of the induced metric on the congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricSignature {
    Riemannian,
    Degenerate,
    Lorentz,
}

/// Default band half-width `1e-9 (|σ|² + λ² + 1)`.
pub fn degeneracy_tolerance(s: &OpticalScalars) -> f64 {
    1e-9 * (s.sigma.norm_sqr() + s.lambda().powi(2) + 1.0)
}

/// Sign of `|σ|² − λ²`, with `|·| ≤ tol` counted as degenerate.
pub fn classify_metric(s: &OpticalScalars, tol: f64) -> MetricSignature {
    let d = s.sigma.norm_sqr() - s.lambda().powi(2);
    if d.abs() <= tol {
        MetricSignature::Degenerate
    } else if d < 0.0 {
        MetricSignature::Riemannian
    } else {
        MetricSignature::Lorentz
    }
}

fn max_over_grid(chart: &Chart, grid: &Grid, f: impl Fn(&OpticalScalars) -> f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &mu in grid.mus() {
        let (_, s) = optical_scalars_off_focus(chart, mu, 0.0)?;
        worst = worst.max(f(&s));
    }
    Ok(worst)
}

/// Twist-free over the grid: `max |λ| < tol`.
pub fn is_lagrangian(chart: &Chart, grid: &Grid, tol: f64) -> Result<bool> {
    Ok(max_over_grid(chart, grid, |s| s.lambda().abs())? < tol)
}

/// Shear-free over the grid: `max |σ| < tol`.
pub fn is_holomorphic(chart: &Chart, grid: &Grid, tol: f64) -> Result<bool> {
    Ok(max_over_grid(chart, grid, |s| s.sigma.norm())? < tol)
}

/// `∂̄r = (2η ∂̄ξ̄ + 2η̄ ∂̄ξ)/(1 + ξξ̄)²` for a normal congruence.
pub fn support_gradient(ray: &Ray, jet: &Jet) -> Complex64 {
    let (xi, eta) = (ray.xi(), ray.eta());
    let d = 1.0 + xi.norm_sqr();
    (2.0 * eta * jet.dxi.conj() + 2.0 * eta.conj() * jet.dbar_xi) / (d * d)
}

// 5-point Gauss–Legendre on [0, 1].
const GL_NODES: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// Change of `r` along the straight segment from `a` to `b`.
fn segment_increment(chart: &Chart, a: Complex64, b: Complex64) -> Result<f64> {
    let delta = b - a;
    let mut sum = 0.0;
    for (s, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        let (ray, jet) = chart.jet(a + delta * *s)?;
        let g = support_gradient(&ray, &jet);
        sum += w * 2.0 * (g * delta.conj()).re;
    }
    Ok(sum)
}

/// Integrates the support gradient over `grid`, anchored by `r(base_mu) = r0`.
///
/// Values are accumulated along `u` from the base node and then along `v`;
/// the opposite order is computed as well and any disagreement above `tol`
/// is reported as [`Error::NonIntegrable`].
pub fn integrate_support(
    chart: &Chart,
    base_mu: Complex64,
    r0: f64,
    grid: &Grid,
    tol: f64,
) -> Result<ScalarField> {
    let (nu, nv) = (grid.nu(), grid.nv());
    let (i0, j0) = grid.nearest(base_mu);
    // du[i][j]: node (i,j) -> (i+1,j); dv[i][j]: node (i,j) -> (i,j+1).
    let mut du = vec![0.0; nu * nv];
    let mut dv = vec![0.0; nu * nv];
    for i in 0..nu {
        for j in 0..nv {
            if i + 1 < nu {
                du[i * nv + j] = segment_increment(chart, grid.mu(i, j), grid.mu(i + 1, j))?;
            }
            if j + 1 < nv {
                dv[i * nv + j] = segment_increment(chart, grid.mu(i, j), grid.mu(i, j + 1))?;
            }
        }
    }
    let walk = |start: f64, from: usize, to: usize, step: &dyn Fn(usize) -> f64| {
        let mut acc = start;
        if to >= from {
            for k in from..to {
                acc += step(k);
            }
        } else {
            for k in (to..from).rev() {
                acc -= step(k);
            }
        }
        acc
    };
    let mut first_u = vec![0.0; nu * nv];
    let mut first_v = vec![0.0; nu * nv];
    for i in 0..nu {
        let ri = walk(r0, i0, i, &|k| du[k * nv + j0]);
        for j in 0..nv {
            first_u[i * nv + j] = walk(ri, j0, j, &|k| dv[i * nv + k]);
        }
    }
    for j in 0..nv {
        let rj = walk(r0, j0, j, &|k| dv[i0 * nv + k]);
        for i in 0..nu {
            first_v[i * nv + j] = walk(rj, i0, i, &|k| du[k * nv + j]);
        }
    }
    let gap = first_u
        .iter()
        .zip(&first_v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if !gap.is_finite() || gap > tol {
        return Err(Error::NonIntegrable(gap));
    }
    Ok(ScalarField {
        nu,
        nv,
        values: first_u,
    })
}

/// The orthogonal surface obtained by inserting `r` into `Φ`.
pub fn surface_from_support(chart: &Chart, r_field: &ScalarField, grid: &Grid) -> SampledSurface {
    SampledSurface::from_fn(grid, |i, j| {
        let ray = chart.ray(grid.mu(i, j)).ok()?;
        let p = phi_map(&ray, r_field.at(i, j));
        p.is_finite().then_some(p)
    })
}

/// Normal congruence `ξ ↦ (ξ, ½(1 + ξξ̄)² ∂̄r)` of a support function, with
/// `∂̄r` evaluated exactly on dual numbers.
pub fn normal_congruence_from_support<S: SupportFunction>(domain: Domain, support: S) -> Chart {
    Chart::from_fn(domain, move |xi| {
        let r = support.eval(Wirt::variable(xi))?;
        let d = 1.0 + xi.norm_sqr();
        Ray::new(xi, 0.5 * d * d * r.db)
    })
}

/// As [`normal_congruence_from_support`] for a plain function, with `∂̄r`
/// from a fourth-order central difference of step `ε^{1/5}(1 + |ξ|)`.
pub fn normal_congruence_from_support_fn(
    domain: Domain,
    support: impl Fn(Complex64) -> Result<f64> + Send + Sync + 'static,
) -> Chart {
    Chart::from_fn(domain, move |xi| {
        let h = f64::EPSILON.powf(0.2) * (1.0 + xi.norm());
        let partial = |dir: Complex64| -> Result<f64> {
            let f = |k: f64| support(xi + dir * (k * h));
            Ok((8.0 * (f(1.0)? - f(-1.0)?) - (f(2.0)? - f(-2.0)?)) / (12.0 * h))
        };
        let dbar = 0.5
            * Complex64::new(
                partial(Complex64::new(1.0, 0.0))?,
                partial(Complex64::new(0.0, 1.0))?,
            );
        let d = 1.0 + xi.norm_sqr();
        Ray::new(xi, 0.5 * d * d * dbar)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_space::PointR3;
    use crate::sampling::Axis;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    struct Identity;
    impl AnalyticCongruence for Identity {
        fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
            Ok((mu, T::real(0.0)))
        }
    }

    struct Twisted(f64);
    impl AnalyticCongruence for Twisted {
        fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
            Ok((mu, mu.conj() * T::constant(c(0.0, self.0))))
        }
    }

    struct PlaneWave;
    impl AnalyticCongruence for PlaneWave {
        fn eval<T: CScalar>(&self, mu: T) -> Result<(T, T)> {
            Ok((T::constant(c(0.2, -0.1)), mu))
        }
    }

    fn grid() -> Grid {
        Grid::rect(&Axis::linspace(-0.5, 0.5, 7), &Axis::linspace(-0.5, 0.5, 7))
    }

    #[test]
    fn numeric_jet_examples() {
        let id = Chart::from_fn(Domain::square(2.0), |mu| Ray::new(mu, c(0.0, 0.0)));
        let j = numeric_jet(&id, c(0.3, 0.1), 1e-5).unwrap();
        assert_abs_diff_eq!(j.dxi.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(j.dbar_xi.norm(), 0.0, epsilon = 1e-10);
        assert_eq!(j.deta, c(0.0, 0.0));

        let sq = Chart::from_fn(Domain::square(2.0), |mu| Ray::new(mu * mu, c(0.0, 0.0)));
        let j = numeric_jet(&sq, c(1.0, 0.0), 1e-4).unwrap();
        assert!((j.dxi - c(2.0, 0.0)).norm() < 1e-7);
        assert!(j.dbar_xi.norm() < 1e-7);

        let anti = Chart::from_fn(Domain::square(2.0), |mu| Ray::new(mu.conj(), c(0.0, 0.0)));
        let j = numeric_jet(&anti, c(0.2, 0.4), 1e-5).unwrap();
        assert!(j.dxi.norm() < 1e-10);
        assert!((j.dbar_xi - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn numeric_jet_needs_margin() {
        let id = Chart::from_fn(Domain::square(1.0), |mu| Ray::new(mu, c(0.0, 0.0)));
        assert!(matches!(
            numeric_jet(&id, c(0.99999, 0.0), 1e-4),
            Err(Error::DomainMargin { .. })
        ));
    }

    #[test]
    fn numeric_jet_is_second_order() {
        let ch = Chart::from_fn(Domain::square(3.0), |mu| {
            Ray::new(mu.norm_sqr() * mu.norm_sqr() + mu * 0.5, c(0.0, 0.0))
        });
        let mu = c(0.4, -0.3);
        let exact_dxi = 2.0 * mu * mu.conj() * mu.conj() + 0.5;
        let e1 = (numeric_jet(&ch, mu, 1e-2).unwrap().dxi - exact_dxi).norm();
        let e2 = (numeric_jet(&ch, mu, 5e-3).unwrap().dxi - exact_dxi).norm();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn directional_derivative_examples() {
        let ray = Ray::new(c(0.3, 0.2), c(0.0, 0.0)).unwrap();
        let jet = Jet {
            dxi: c(1.0, 0.0),
            dbar_xi: c(0.0, 0.0),
            deta: c(0.0, 0.0),
            dbar_eta: c(0.0, 0.0),
        };
        assert_eq!(
            directional_derivatives(&jet, &ray, 2.0),
            (c(2.0, 0.0), c(0.0, 0.0))
        );
        let zero = Jet {
            dxi: c(0.0, 0.0),
            ..jet
        };
        let ray = Ray::new(c(0.3, 0.2), c(1.0, -1.0)).unwrap();
        assert_eq!(
            directional_derivatives(&zero, &ray, 0.0),
            (c(0.0, 0.0), c(0.0, 0.0))
        );
    }

    #[test]
    fn point_source_scalars() {
        let ch = Chart::from_analytic(Domain::square(2.0), Identity);
        for r in [-2.0, 0.5, 3.0] {
            let s = optical_scalars(&ch, c(0.4, -0.7), r).unwrap();
            assert!((s.rho - c(-1.0 / r, 0.0)).norm() < 1e-14);
            assert!(s.sigma.norm() < 1e-14);
            assert_abs_diff_eq!(curvature(&s), 1.0 / (r * r), epsilon = 1e-13);
        }
        assert!(matches!(
            optical_scalars(&ch, c(0.4, -0.7), 0.0),
            Err(Error::FocalPoint { .. })
        ));
    }

    #[test]
    fn plane_wave_scalars_vanish() {
        let ch = Chart::from_analytic(Domain::square(2.0), PlaneWave);
        for r in [-1.0, 0.0, 4.0] {
            let s = optical_scalars(&ch, c(0.1, 0.3), r).unwrap();
            assert_eq!(s.rho, c(0.0, 0.0));
            assert_eq!(s.sigma, c(0.0, 0.0));
            assert_eq!(curvature(&s), 0.0);
        }
    }

    #[test]
    fn classification_examples() {
        let s = |sig: f64, lam: f64| OpticalScalars::new(c(0.0, lam), c(sig, 0.0));
        let tol = |s: &OpticalScalars| degeneracy_tolerance(s);
        for (sc, want) in [
            (s(0.0, 1.0), MetricSignature::Riemannian),
            (s(1.0, 1.0), MetricSignature::Degenerate),
            (s(2.0, 1.0), MetricSignature::Lorentz),
        ] {
            assert_eq!(classify_metric(&sc, tol(&sc)), want);
        }
        assert_eq!(
            curvature(&OpticalScalars::new(c(1.0, 0.0), c(1.0, 0.0))),
            0.0
        );
    }

    #[test]
    fn lagrangian_and_holomorphic_flags() {
        let ps = Chart::from_analytic(Domain::square(2.0), Identity);
        assert!(is_lagrangian(&ps, &grid(), 1e-10).unwrap());
        assert!(is_holomorphic(&ps, &grid(), 1e-10).unwrap());
        let tw = Chart::from_analytic(Domain::square(2.0), Twisted(0.4));
        assert!(!is_lagrangian(&tw, &grid(), 1e-3).unwrap());
    }

    #[test]
    fn support_of_point_source_is_constant() {
        let ps = Chart::from_analytic(Domain::square(2.0), Identity);
        let f = integrate_support(&ps, c(0.0, 0.0), 1.5, &grid(), 1e-10).unwrap();
        assert!(f.values.iter().all(|&r| (r - 1.5).abs() < 1e-14));
        let s = surface_from_support(&ps, &f, &grid());
        for p in s.points.iter().flatten() {
            assert_abs_diff_eq!(
                p.distance(&PointR3::new(0.0, 0.0, 0.0)),
                1.5,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn twisted_chart_is_not_integrable() {
        let tw = Chart::from_analytic(Domain::square(2.0), Twisted(0.4));
        assert!(matches!(
            integrate_support(&tw, c(0.0, 0.0), 0.0, &grid(), 1e-8),
            Err(Error::NonIntegrable(_))
        ));
    }

    struct ConstSupport;
    impl SupportFunction for ConstSupport {
        fn eval<T: CScalar>(&self, _xi: T) -> Result<T> {
            Ok(T::real(2.0))
        }
    }

    #[test]
    fn constant_support_gives_pencil() {
        let ch = normal_congruence_from_support(Domain::square(2.0), ConstSupport);
        assert_eq!(ch.ray(c(0.3, 0.4)).unwrap().eta(), c(0.0, 0.0));
        let ch = normal_congruence_from_support_fn(Domain::square(2.0), |_| Ok(2.0));
        assert_eq!(ch.ray(c(0.3, 0.4)).unwrap().eta(), c(0.0, 0.0));
    }

    #[test]
    fn analytic_and_numeric_jets_agree() {
        let tw = Chart::from_analytic(Domain::square(2.0), Twisted(0.7));
        assert!(tw.jet_discrepancy(&grid()).unwrap() < 1e-8);
        assert!(!tw.without_jets().has_analytic_jets());
    }
}
