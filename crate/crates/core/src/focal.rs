//! Focal points of line congruences.
//!
//! Along a ray the optical scalars evolve by the Sachs equations
//! `dρ/dr = ρ² + σσ̄`, `dσ/dr = (ρ + ρ̄)σ`, whose solution from `(ρ₀, σ₀)` is
//!
//! ```text
//! ρ(r) = (ρ₀ − κ₀ r)/Q(r),  σ(r) = σ₀/Q(r),  Q(r) = 1 − (ρ₀ + ρ̄₀) r + κ₀ r²
//! ```
//!
//! with `κ₀ = ρ₀ρ̄₀ − σ₀σ̄₀`. The focal points of the ray are the real roots
//! of `Q`. Their number is fixed by the sign of `|σ₀|² − λ₀²`.

use num_complex::Complex64;

use crate::congruence::{
    classify_metric, curvature, default_step, degeneracy_tolerance, optical_scalars_off_focus,
    Chart, MetricSignature, OpticalScalars,
};
use crate::error::{Error, Result};
use crate::line_space::{phi_map, PointR3};
use crate::sampling::{Grid, SampledSurface};

/// Scalars at distance `r` further along the ray.
pub fn sachs_evolve(s0: &OpticalScalars, r: f64) -> Result<OpticalScalars> {
    let k0 = curvature(s0);
    let q = 1.0 - 2.0 * s0.theta() * r + k0 * r * r;
    let scale = 1.0 + (2.0 * s0.theta() * r).abs() + (k0 * r * r).abs();
    if !(q.abs() > 1e-12 * scale) {
        return Err(Error::FocalPoint { r, denominator: q });
    }
    Ok(OpticalScalars {
        rho: (s0.rho - k0 * r) / q,
        sigma: s0.sigma / q,
    })
}

/// Real roots of the focal quadratic, as absolute affine parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalRoots {
    values: Vec<f64>,
    flat: bool,
}

impl FocalRoots {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    /// Ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Whether the linear (zero-curvature) branch was used.
    pub fn is_flat(&self) -> bool {
        self.flat
    }
}

/// `|κ₀|` below `1e-9 (|ρ₀|² + |σ₀|² + 1)` counts as flat.
pub fn is_flat(s0: &OpticalScalars) -> bool {
    curvature(s0).abs() < 1e-9 * (s0.rho.norm_sqr() + s0.sigma.norm_sqr() + 1.0)
}

/// Roots of `1 − (ρ₀ + ρ̄₀)x + κ₀x²` for scalars taken at `r_ref`, returned
/// as `r_ref + x`.
pub fn focal_roots(s0: &OpticalScalars, r_ref: f64) -> FocalRoots {
    let theta = s0.theta();
    if is_flat(s0) {
        let values = if theta.abs() > 1e-12 * (s0.rho.norm() + 1.0) {
            vec![r_ref + 1.0 / (2.0 * theta)]
        } else {
            Vec::new()
        };
        return FocalRoots { values, flat: true };
    }
    let k0 = curvature(s0);
    let disc = s0.sigma.norm_sqr() - s0.lambda().powi(2);
    let mut values = match classify_metric(s0, degeneracy_tolerance(s0)) {
        MetricSignature::Riemannian => Vec::new(),
        MetricSignature::Degenerate => vec![r_ref + theta / k0],
        MetricSignature::Lorentz => {
            // Avoid cancellation: one root as q/κ₀, the other as 1/q.
            let q = theta + theta.signum() * disc.sqrt();
            vec![r_ref + q / k0, r_ref + 1.0 / q]
        }
    };
    values.sort_by(f64::total_cmp);
    FocalRoots {
        values,
        flat: false,
    }
}

/// Whether the root count agrees with the metric signature, with exactly one
/// focal point on non-divergence-free flat congruences.
pub fn main_theorem1_check(s0: &OpticalScalars) -> bool {
    let roots = focal_roots(s0, 0.0);
    if roots.is_flat() {
        let expected = usize::from(s0.theta().abs() > 1e-12 * (s0.rho.norm() + 1.0));
        return roots.count() == expected;
    }
    let expected = match classify_metric(s0, degeneracy_tolerance(s0)) {
        MetricSignature::Riemannian => 0,
        MetricSignature::Degenerate => 1,
        MetricSignature::Lorentz => 2,
    };
    roots.count() == expected
}

/// Separation of the two focal points on a ray and the angle between the
/// focal sheets there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalPairGeometry {
    /// `L = 2(|σ₀|² − λ₀²)^{1/2}/κ₀` in absolute value.
    pub distance: f64,
    /// `cos²φ = λ₀²/|σ₀|²`.
    pub cos2phi: f64,
}

pub fn pair_geometry(s0: &OpticalScalars) -> Result<FocalPairGeometry> {
    let sig2 = s0.sigma.norm_sqr();
    let lam2 = s0.lambda().powi(2);
    if is_flat(s0) || classify_metric(s0, degeneracy_tolerance(s0)) != MetricSignature::Lorentz {
        return Err(Error::Precondition(
            "focal pair geometry needs two focal points (|sigma|^2 > lambda^2, kappa != 0)".into(),
        ));
    }
    Ok(FocalPairGeometry {
        distance: (2.0 * (sig2 - lam2).sqrt() / curvature(s0)).abs(),
        cos2phi: lam2 / sig2,
    })
}

/// Focal points of every grid ray, grouped into two sheets.
///
/// A double focal point is placed on both sheets; a flat congruence fills
/// only the first. Roots are sorted ascending and then swapped pointwise
/// where that keeps each sheet closer to its previously visited neighbour.
pub fn focal_points_3d(chart: &Chart, grid: &Grid, r_ref: f64) -> Result<Vec<SampledSurface>> {
    let mut pairs: Vec<[Option<PointR3>; 2]> = Vec::with_capacity(grid.len());
    for &mu in grid.mus() {
        let ray = chart.ray(mu)?;
        let (r_used, s) = optical_scalars_off_focus(chart, mu, r_ref)?;
        let roots = focal_roots(&s, r_used);
        let mut pts = [None, None];
        for (slot, &r) in pts.iter_mut().zip(roots.values()) {
            let p = phi_map(&ray, r);
            *slot = p.is_finite().then_some(p);
        }
        // A double root lies on both sheets.
        if roots.count() == 1 && !roots.is_flat() {
            pts[1] = pts[0];
        }
        pairs.push(pts);
    }
    let nv = grid.nv();
    for idx in 1..pairs.len() {
        let prev = if idx % nv != 0 { idx - 1 } else { idx - nv };
        if let ([Some(a0), Some(a1)], [Some(b0), Some(b1)]) = (pairs[prev], pairs[idx]) {
            let keep = a0.distance(&b0) + a1.distance(&b1);
            let swap = a0.distance(&b1) + a1.distance(&b0);
            if swap < keep {
                pairs[idx].swap(0, 1);
            }
        }
    }
    Ok((0..2)
        .map(|s| SampledSurface::from_fn(grid, |i, j| pairs[grid.index(i, j)][s]))
        .collect())
}

/// The `sheet`-th focal parameter (ascending) of the ray at `mu`.
pub fn focal_root_at(chart: &Chart, mu: Complex64, r_ref: f64, sheet: usize) -> Result<f64> {
    let (r_used, s) = optical_scalars_off_focus(chart, mu, r_ref)?;
    focal_roots(&s, r_used)
        .values()
        .get(sheet)
        .copied()
        .ok_or_else(|| Error::Domain(format!("no focal point with index {sheet} at {mu}")))
}

/// Normalized determinant measuring whether the congruence ray at `mu` is
/// tangent to the surface `μ ↦ Φ(ray(μ), r(μ))`; zero on focal sheets.
pub fn tangency_residual(
    chart: &Chart,
    r_field: &dyn Fn(Complex64) -> Result<f64>,
    mu: Complex64,
) -> Result<f64> {
    let h = default_step(mu);
    if chart.domain().margin(mu) < h {
        return Err(Error::DomainMargin {
            mu: format!("{mu}"),
            h,
        });
    }
    let point = |m: Complex64| -> Result<PointR3> { Ok(phi_map(&chart.ray(m)?, r_field(m)?)) };
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let (xp, xm, yp, ym) = (
        point(mu + dx)?,
        point(mu - dx)?,
        point(mu + dy)?,
        point(mu - dy)?,
    );
    let i = Complex64::new(0.0, 1.0);
    let wirtinger = |fxp: Complex64, fxm: Complex64, fyp: Complex64, fym: Complex64| {
        let fx = (fxp - fxm) / (2.0 * h);
        let fy = (fyp - fym) / (2.0 * h);
        (0.5 * (fx - i * fy), 0.5 * (fx + i * fy))
    };
    let real = |t: f64| Complex64::new(t, 0.0);
    let (dz, dbz) = wirtinger(xp.z, xm.z, yp.z, ym.z);
    let (dt, dbt) = wirtinger(real(xp.t), real(xm.t), real(yp.t), real(ym.t));
    let (dzb, dbzb) = (dbz.conj(), dz.conj());

    let xi = chart.ray(mu)?.xi();
    let d = 1.0 + xi.norm_sqr();
    let rows = [
        [
            2.0 * xi / d,
            2.0 * xi.conj() / d,
            real((1.0 - xi.norm_sqr()) / d),
        ],
        [dz, dzb, dt],
        [dbz, dbzb, dbt],
    ];
    let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
    let norms: f64 = rows
        .iter()
        .map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product();
    if !(norms > 0.0) {
        return Err(Error::DegenerateImmersion);
    }
    Ok(det.norm() / norms)
}
