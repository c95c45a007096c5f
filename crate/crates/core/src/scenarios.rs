//! Closed-form caustics and wavefronts, and the generic pipelines that
//! reproduce them.
//!
//! * Coffeecup: light from a point source at `(−l, 0, 0)` reflected `k` times
//!   inside the cylinder of radius `a`. The focal set is a surface and a
//!   planar curve, parameterized by `ξ₁ = u e^{iv}` of the incoming ray.
//! * Nephroid: a plane wave at angle `β` to the `x³`-axis reflected once
//!   inside the cylinder.
//! * Paraboloid: a horizontal plane wave reflected in
//!   `x³ + (x¹)²/a + (x²)²/b = 0`, and its wavefronts.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::congruence::{integrate_support, surface_from_support, Chart, Domain};
use crate::error::{Error, Result};
use crate::focal::focal_points_3d;
use crate::line_space::PointR3;
use crate::reflection::{
    CylinderNormals, CylinderReflected, Incoming, ParaboloidNormals, PointSourceRays,
    ReflectedCongruence,
};
use crate::sampling::{Axis, Grid, SampledSurface};

/// Parameters shared by the cylinder scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    /// Cylinder radius.
    pub a: f64,
    /// Source distance from the axis.
    pub l: f64,
    /// Number of reflections.
    pub k: u32,
    /// Plane-wave angle with the `x³`-axis.
    pub beta_inc: f64,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("a", self.a)?;
        if !(self.l >= 0.0 && self.l.is_finite()) {
            return Err(Error::Domain(format!("l must be >= 0, got {}", self.l)));
        }
        if self.k == 0 {
            return Err(Error::Domain("k must be >= 1".into()));
        }
        if !(self.beta_inc > 0.0 && self.beta_inc < PI) {
            return Err(Error::Domain(format!(
                "beta must lie in (0, pi), got {}",
                self.beta_inc
            )));
        }
        Ok(())
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {x}")))
    }
}

fn check_in(name: &str, x: f64, (lo, hi): (f64, f64)) -> Result<()> {
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if x >= lo - slack && x <= hi + slack {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} outside [{lo}, {hi}]")))
    }
}

/// Range of the source-ray angle `v` for which rays reach the cylinder wall
/// in the coffeecup scenario: `[0, π]` for `l ≤ a`, else `±asin(a/l)`.
pub fn valid_v_domain(a: f64, l: f64) -> Result<(f64, f64)> {
    check_positive("a", a)?;
    if !(l >= 0.0 && l.is_finite()) {
        return Err(Error::Domain(format!("l must be >= 0, got {l}")));
    }
    if l <= a {
        Ok((0.0, PI))
    } else {
        let m = (a / l).asin();
        Ok((-m, m))
    }
}

/// Focal surface of a plane wave at angle `beta` reflected once inside the
/// cylinder, for `π/2 ≤ v ≤ 3π/2`.
pub fn nephroid_focal_surface(a: f64, beta: f64, u: f64, v: f64) -> Result<PointR3> {
    check_positive("a", a)?;
    if !(beta > 0.0 && beta < PI) {
        return Err(Error::Domain(format!(
            "beta must lie in (0, pi), got {beta}"
        )));
    }
    check_in("v", v, (FRAC_PI_2, 1.5 * PI))?;
    let (s, c) = v.sin_cos();
    Ok(PointR3::new(
        a * c * (c * c - 1.5),
        a * s * (c * c - 1.0),
        -u - 0.5 * a * c / beta.tan(),
    ))
}

struct Coffeecup {
    s: f64,
    /// `((S + i l sin v)/a)^{2k}` via its angle.
    w: Complex64,
    sign: f64,
}

fn coffeecup_common(a: f64, l: f64, k: u32, v: f64) -> Result<Coffeecup> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    check_in("v", v, valid_v_domain(a, l)?)?;
    let ls = l * v.sin();
    let s = (a * a - ls * ls).max(0.0).sqrt();
    let angle = ls.atan2(s);
    Ok(Coffeecup {
        s,
        w: Complex64::from_polar(1.0, 2.0 * k as f64 * angle),
        sign: if k % 2 == 1 { 1.0 } else { -1.0 },
    })
}

/// Surface part of the coffeecup caustic at `ξ₁ = u e^{iv}`.
pub fn coffeecup_surface(a: f64, l: f64, k: u32, u: f64, v: f64) -> Result<PointR3> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("u must be positive, got {u}")));
    }
    let cc = coffeecup_common(a, l, k, v)?;
    let kf = k as f64;
    let (sv, cv) = v.sin_cos();
    let den = 2.0 * kf * l * cv + cc.s;
    if den.abs() < 1e-14 * (a + l) {
        return Err(Error::Domain(format!(
            "surface is singular at v = {v} (2kl cos v + S = 0)"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let bracket = cc.s - 2.0 * i * kf * l * cv * sv * Complex64::from_polar(1.0, v);
    let z = cc.sign * l * cc.w * bracket / den;
    let t = kf * (1.0 - u * u) * (a * a + l * l - 2.0 * l * l * sv * sv + 2.0 * kf * l * cv * cc.s)
        / (u * den);
    Ok(PointR3 { z, t })
}

/// Planar-curve part of the coffeecup caustic.
pub fn coffeecup_curve(a: f64, l: f64, k: u32, v: f64) -> Result<PointR3> {
    let cc = coffeecup_common(a, l, k, v)?;
    let z = cc.sign * cc.w * (l + 2.0 * k as f64 * Complex64::from_polar(1.0, v) * cc.s);
    Ok(PointR3 { z, t: 0.0 })
}

/// Wavefront at constant `C` of a plane wave along `x¹` reflected in the
/// paraboloid, at the mirror point with normal `(θ, φ)`.
pub fn paraboloid_reflected_wavefront(
    a: f64,
    b: f64,
    c: f64,
    theta: f64,
    phi: f64,
) -> Result<PointR3> {
    check_in("theta", theta, (0.0, FRAC_PI_2))?;
    if theta >= FRAC_PI_2 - 1e-9 {
        return Err(Error::Domain(format!(
            "theta must be below pi/2, got {theta}"
        )));
    }
    let (st, ct) = theta.sin_cos();
    let tt = theta.tan();
    let (sp, cp) = phi.sin_cos();
    let x1 = a * st * st * tt * cp.powi(3) + c * (1.0 - 2.0 * st * st * cp * cp);
    let x2 = (a * st * st * cp * cp + 0.5 * b) * tt * sp - 2.0 * c * st * st * sp * cp;
    let x3 = 0.25 * a * (4.0 * ct * ct - 1.0) * tt * tt * cp * cp
        - 0.25 * b * tt * tt * sp * sp
        - 2.0 * c * st * ct * cp;
    Ok(PointR3::new(x1, x2, x3))
}

/// Support of the reflected wavefront at mirror normal `ξ₀`, with
/// `r(0) = c`.
pub fn paraboloid_reflected_support(a: f64, b: f64, c: f64, xi0: Complex64) -> Result<f64> {
    let n = xi0.norm_sqr();
    if !(n < 1.0) {
        return Err(Error::Domain(format!(
            "|xi0| must be below 1, got {}",
            xi0.norm()
        )));
    }
    let s = 2.0 * xi0.re;
    let d2 = -4.0 * xi0.im * xi0.im;
    Ok(-s * (a * s * s - b * d2) / (2.0 * (1.0 + n).powi(2) * (1.0 - n)) + c)
}

/// Mirror normal parameter `ξ₀ = tan(θ/2) e^{iφ}`.
pub fn mirror_parameter(theta: f64, phi: f64) -> Complex64 {
    Complex64::from_polar((0.5 * theta).tan(), phi)
}

/// Inverse of [`mirror_parameter`].
pub fn normal_angles(xi0: Complex64) -> (f64, f64) {
    (2.0 * xi0.norm().atan(), xi0.arg())
}

/// How the pipeline obtains chart derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetMode {
    Analytic,
    Numeric,
}

fn with_mode(chart: Chart, mode: JetMode) -> Chart {
    match mode {
        JetMode::Analytic => chart,
        JetMode::Numeric => chart.without_jets(),
    }
}

/// Source rays after `k` interior reflections, parameterized by `ξ₁`.
pub fn coffeecup_chart(a: f64, l: f64, k: u32) -> Result<Chart> {
    check_positive("a", a)?;
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    Ok(Chart::from_analytic(
        Domain::square(1e3),
        CylinderReflected {
            inner: PointSourceRays { l },
            a,
            k,
        },
    ))
}

/// Polar grid `ξ₁ = u e^{iv}` with `v` cell-centered in [`valid_v_domain`].
pub fn coffeecup_grid(a: f64, l: f64, u_range: (f64, f64), nu: usize, nv: usize) -> Result<Grid> {
    let (lo, hi) = valid_v_domain(a, l)?;
    check_positive("u_min", u_range.0)?;
    Ok(Grid::polar(
        &Axis::linspace(u_range.0, u_range.1, nu),
        &Axis::cell_centered(lo, hi, nv),
    ))
}

/// Plane wave reflected once inside the cylinder, parameterized by the
/// mirror point `μ = u + iv` (height `u`, angle `v`).
pub fn nephroid_chart(a: f64, beta: f64) -> Result<Chart> {
    if !(beta > 0.0 && beta < PI) {
        return Err(Error::Domain(format!(
            "beta must lie in (0, pi), got {beta}"
        )));
    }
    Ok(Chart::from_analytic(
        Domain::new(-1e3, 1e3, -PI, 3.0 * PI),
        ReflectedCongruence {
            mirror: CylinderNormals::new(a)?,
            incoming: Incoming::PlaneWave(Complex64::new((0.5 * beta).tan(), 0.0)),
        },
    ))
}

/// Plane wave along `x¹` reflected in the paraboloid, parameterized by the
/// mirror normal `ξ₀`. Valid for `Re ξ₀ < √2 − 1` (beyond that the reflected
/// ray points straight down).
pub fn paraboloid_chart(a: f64, b: f64) -> Result<Chart> {
    Ok(Chart::from_analytic(
        Domain::new(-0.6, 0.4, -0.6, 0.6),
        ReflectedCongruence {
            mirror: ParaboloidNormals::new(a, b)?,
            incoming: Incoming::PlaneWave(Complex64::new(1.0, 0.0)),
        },
    ))
}

/// Default paraboloid grid `Re ξ₀ ∈ [−0.5, 0.3]`, `Im ξ₀ ∈ [−0.5, 0.5]`,
/// always containing `ξ₀ = 0`.
pub fn paraboloid_grid(n_per_tenth: usize) -> Grid {
    let m = n_per_tenth.max(1);
    Grid::rect(
        &Axis::linspace(-0.5, 0.3, 8 * m + 1),
        &Axis::linspace(-0.5, 0.5, 10 * m + 1),
    )
}

/// Wavefront of the paraboloid-reflected wave through support integration.
pub fn paraboloid_wavefront_pipeline(
    a: f64,
    b: f64,
    c: f64,
    grid: &Grid,
    mode: JetMode,
) -> Result<SampledSurface> {
    let chart = with_mode(paraboloid_chart(a, b)?, mode);
    let (i, j) = grid.nearest(Complex64::new(0.0, 0.0));
    let base = grid.mu(i, j);
    let r0 = paraboloid_reflected_support(a, b, c, base)?;
    let field = integrate_support(&chart, base, r0, grid, 1e-8)?;
    Ok(surface_from_support(&chart, &field, grid))
}

/// Largest coordinate deviation between the pipeline wavefront and the
/// closed form over `grid`.
pub fn paraboloid_deviation(a: f64, b: f64, c: f64, grid: &Grid, mode: JetMode) -> Result<f64> {
    let wf = paraboloid_wavefront_pipeline(a, b, c, grid, mode)?;
    let mut worst: f64 = 0.0;
    for (k, &mu) in grid.mus().iter().enumerate() {
        let p = wf.points[k].ok_or(Error::NonFinite("pipeline wavefront"))?;
        let (theta, phi) = normal_angles(mu);
        let q = paraboloid_reflected_wavefront(a, b, c, theta, phi)?;
        worst = worst.max(p.max_component_diff(&q));
    }
    Ok(worst)
}

/// Worst pointwise deviation between pipeline sheets and closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub max_error: f64,
    /// Grid parameters `(u, v)` of the largest error.
    pub worst_at: (f64, f64),
    /// Grid points where the pipeline did not produce the expected roots.
    pub missing: usize,
    pub compared: usize,
}

impl Deviation {
    fn record(&mut self, error: f64, at: (f64, f64)) {
        // NaN sticks as the worst value.
        if !self.max_error.is_nan() && !(error <= self.max_error) {
            self.max_error = error;
            self.worst_at = at;
        }
        self.compared += 1;
    }
}

/// Coffeecup focal set by the generic pipeline against the closed forms.
/// Each grid ray's two focal points are matched to surface and curve in
/// whichever order fits better.
pub fn coffeecup_deviation(
    a: f64,
    l: f64,
    k: u32,
    grid: &Grid,
    mode: JetMode,
) -> Result<Deviation> {
    let chart = with_mode(coffeecup_chart(a, l, k)?, mode);
    let sheets = focal_points_3d(&chart, grid, 0.0)?;
    let mut dev = Deviation {
        max_error: 0.0,
        worst_at: (f64::NAN, f64::NAN),
        missing: 0,
        compared: 0,
    };
    for (idx, &(u, v)) in grid.params().iter().enumerate() {
        let (Some(p0), Some(p1)) = (sheets[0].points[idx], sheets[1].points[idx]) else {
            dev.missing += 1;
            continue;
        };
        let s = coffeecup_surface(a, l, k, u, v)?;
        let c = coffeecup_curve(a, l, k, v)?;
        let e = f64::min(
            p0.max_component_diff(&s).max(p1.max_component_diff(&c)),
            p1.max_component_diff(&s).max(p0.max_component_diff(&c)),
        );
        dev.record(e, (u, v));
    }
    Ok(dev)
}

/// Rectangular mirror grid `μ = u + iv` over the lit half `v ∈ [π/2, 3π/2]`.
pub fn nephroid_grid(u_range: (f64, f64), nu: usize, nv: usize) -> Grid {
    Grid::rect(
        &Axis::linspace(u_range.0, u_range.1, nu),
        &Axis::linspace(FRAC_PI_2, 1.5 * PI, nv),
    )
}

/// Nephroid pipeline against the closed form. The closed form's `u` is
/// minus the mirror height.
pub fn nephroid_deviation(a: f64, beta: f64, grid: &Grid, mode: JetMode) -> Result<Deviation> {
    let chart = with_mode(nephroid_chart(a, beta)?, mode);
    let sheets = focal_points_3d(&chart, grid, 0.0)?;
    let mut dev = Deviation {
        max_error: 0.0,
        worst_at: (f64::NAN, f64::NAN),
        missing: 0,
        compared: 0,
    };
    for (idx, &(u, v)) in grid.params().iter().enumerate() {
        let Some(p) = sheets[0].points[idx] else {
            dev.missing += 1;
            continue;
        };
        if sheets[1].points[idx].is_some() {
            dev.missing += 1;
            continue;
        }
        let q = nephroid_focal_surface(a, beta, -u, v)?;
        dev.record(p.max_component_diff(&q), (u, v));
    }
    Ok(dev)
}

/// Samples a closed form over a grid; failures become missing points.
pub fn sample(grid: &Grid, f: impl Fn(f64, f64) -> Result<PointR3>) -> SampledSurface {
    SampledSurface::from_fn(grid, |i, j| {
        let (u, v) = grid.params()[grid.index(i, j)];
        f(u, v).ok()
    })
}

/// Slice of a surface `(u, v) ↦ point` by the plane `x³ = t0`, as a
/// polyline over `n` values of `v` in `v_range`.
///
/// For each `v` the height must be strictly monotone in `u` over `u_range`;
/// the crossing is then found by bisection.
pub fn level_curve(
    sampler: &dyn Fn(f64, f64) -> Result<PointR3>,
    t0: f64,
    n: usize,
    u_range: (f64, f64),
    v_range: (f64, f64),
) -> Result<Vec<PointR3>> {
    const PROBES: usize = 32;
    let mut out = Vec::with_capacity(n);
    for &v in Axis::linspace(v_range.0, v_range.1, n).values() {
        let height = |u: f64| -> Result<f64> { Ok(sampler(u, v)?.t - t0) };
        let probes = Axis::linspace(u_range.0, u_range.1, PROBES);
        let hs: Vec<f64> = probes
            .values()
            .iter()
            .map(|&u| height(u))
            .collect::<Result<_>>()?;
        let increasing = hs.windows(2).all(|w| w[1] > w[0]);
        let decreasing = hs.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::Slicing(format!(
                "height is not monotone in u at v = {v}"
            )));
        }
        let Some(seg) = hs
            .windows(2)
            .position(|w| w[0] == 0.0 || w[0].signum() != w[1].signum())
        else {
            if hs[PROBES - 1] == 0.0 {
                out.push(sampler(probes.values()[PROBES - 1], v)?);
                continue;
            }
            return Err(Error::Slicing(format!(
                "plane x3 = {t0} not reached at v = {v}"
            )));
        };
        let (mut lo, mut hi) = (probes.values()[seg], probes.values()[seg + 1]);
        let mut h_lo = hs[seg];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let hm = height(mid)?;
            if hm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if hm.signum() == h_lo.signum() {
                lo = mid;
                h_lo = hm;
            } else {
                hi = mid;
            }
        }
        let p = sampler(0.5 * (lo + hi), v)?;
        out.push(PointR3 { z: p.z, t: t0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn v_domains() {
        assert_eq!(valid_v_domain(1.0, 0.5).unwrap(), (0.0, PI));
        let (lo, hi) = valid_v_domain(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(lo, -PI / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, PI / 6.0, epsilon = 1e-15);
        assert_eq!(valid_v_domain(1.0, 1.0).unwrap(), (0.0, PI));
    }

    #[test]
    fn nephroid_points() {
        let p = nephroid_focal_surface(1.0, 1.0, 0.0, PI).unwrap();
        assert_abs_diff_eq!(p.x1(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x2(), 0.0, epsilon = 1e-15);
        let p = nephroid_focal_surface(1.0, 1.0, 0.0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(p.x1(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x2(), -1.0, epsilon = 1e-15);
        assert!(nephroid_focal_surface(1.0, 1.0, 0.0, 0.1).is_err());
        let a = nephroid_focal_surface(1.3, 0.4, 2.0, 2.2).unwrap();
        let b = nephroid_focal_surface(1.3, 1.9, 2.0, 2.2).unwrap();
        assert_eq!(a.z, b.z);
    }

    #[test]
    fn coffeecup_examples() {
        let p = coffeecup_curve(1.0, 0.5, 1, 0.0).unwrap();
        assert_abs_diff_eq!(p.z.re, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z.im, 0.0, epsilon = 1e-15);
        for k in 1..4 {
            for (u, v) in [(0.3, 0.2), (2.0, 2.5)] {
                assert_eq!(coffeecup_surface(1.0, 0.0, k, u, v).unwrap().z.norm(), 0.0);
            }
        }
        let p1 = coffeecup_surface(1.0, 0.5, 2, 0.3, 1.0).unwrap();
        let p2 = coffeecup_surface(1.0, 0.5, 2, 7.0, 1.0).unwrap();
        assert_eq!(p1.z, p2.z);
        assert_eq!(coffeecup_surface(1.0, 0.5, 1, 1.0, 1.0).unwrap().t, 0.0);
        assert!(coffeecup_surface(1.0, 2.0, 1, 1.0, 1.0).is_err());
        assert!(coffeecup_surface(1.0, 0.5, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn wavefront_examples() {
        let p = paraboloid_reflected_wavefront(1.0, 2.0, 0.7, 0.0, 1.0).unwrap();
        assert_eq!(p, PointR3::new(0.7, 0.0, 0.0));
        let th: f64 = 0.6;
        let p = paraboloid_reflected_wavefront(1.0, 2.0, 0.7, th, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(p.x1(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x2(), th.tan(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.x3(), -0.5 * th.tan().powi(2), epsilon = 1e-15);
        assert!(paraboloid_reflected_wavefront(1.0, 1.0, 0.0, FRAC_PI_2, 0.0).is_err());
    }

    #[test]
    fn angles_roundtrip() {
        let xi = mirror_parameter(0.8, -2.0);
        let (t, p) = normal_angles(xi);
        assert_abs_diff_eq!(t, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(p, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn level_curves() {
        let neph = |u, v| nephroid_focal_surface(1.0, 0.9, u, v);
        let a = level_curve(&neph, 0.0, 9, (-50.0, 50.0), (FRAC_PI_2, 1.5 * PI)).unwrap();
        let b = level_curve(&neph, 3.0, 9, (-50.0, 50.0), (FRAC_PI_2, 1.5 * PI)).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.z - q.z).norm() < 1e-12);
            assert_eq!(q.t, 3.0);
        }
        let flat = |u: f64, v: f64| Ok(PointR3::new(u, v, 1.0));
        assert!(matches!(
            level_curve(&flat, 1.0, 5, (0.0, 1.0), (0.0, 1.0)),
            Err(Error::Slicing(_))
        ));
    }
}
