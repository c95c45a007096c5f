//! Brute-force checks in plain vector geometry.
//!
//! Everything here works with origins and unit directions in R³. The only
//! contact with complex line coordinates is [`convert`] / [`convert_back`].

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::line_space::{
    phi_map, ray_from_point_direction, xi_of_direction, Direction, PointR3, Ray,
};

/// A ray as origin plus unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecRay {
    pub origin: Vector3<f64>,
    pub dir: Direction,
}

impl VecRay {
    /// Normalizes `dir`.
    pub fn new(origin: Vector3<f64>, dir: Vector3<f64>) -> Result<Self> {
        Ok(Self {
            origin,
            dir: Direction::from_vector(dir)?,
        })
    }

    pub fn at(&self, t: f64) -> Vector3<f64> {
        self.origin + t * self.dir.as_vector()
    }

    /// Same line, opposite orientation.
    pub fn reversed(&self) -> Self {
        Self {
            origin: self.origin,
            dir: Direction::from_vector(-self.dir.as_vector()).expect("unit vector"),
        }
    }

    /// Distance from `p` to the line.
    pub fn distance_to(&self, p: &Vector3<f64>) -> f64 {
        let w = p - self.origin;
        (w - w.dot(self.dir.as_vector()) * self.dir.as_vector()).norm()
    }
}

/// The ray with its foot point as origin.
pub fn convert(ray: &Ray) -> VecRay {
    VecRay {
        origin: phi_map(ray, 0.0).to_vector(),
        dir: ray.direction(),
    }
}

pub fn convert_back(vr: &VecRay) -> Result<Ray> {
    let xi = xi_of_direction(&vr.dir)?;
    Ok(ray_from_point_direction(&PointR3::from_vector(&vr.origin), xi)?.0)
}

/// Mirror reflection of direction `d` in a surface with unit normal `n`.
pub fn reflect_direction(d: &Vector3<f64>, n: &Vector3<f64>) -> Vector3<f64> {
    d - 2.0 * d.dot(n) * n
}

/// Forward intersection with the cylinder `x² + y² = a²`.
fn cylinder_hit(origin: &Vector3<f64>, dir: &Vector3<f64>, a: f64) -> Option<(f64, Vector3<f64>)> {
    let qa = dir.x * dir.x + dir.y * dir.y;
    if qa < 1e-30 {
        return None;
    }
    let qb = 2.0 * (origin.x * dir.x + origin.y * dir.y);
    let qc = origin.x * origin.x + origin.y * origin.y - a * a;
    let disc = qb * qb - 4.0 * qa * qc;
    // Grazing rays count as misses.
    if disc < 1e-14 * (qb * qb + (4.0 * qa * qc).abs()).max(1e-300) {
        return None;
    }
    let s = disc.sqrt();
    let q = -0.5 * (qb + qb.signum() * s);
    let (mut t0, mut t1) = (q / qa, qc / q);
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    let eps = 1e-12 * (1.0 + origin.norm());
    let t = if t0 > eps {
        t0
    } else if t1 > eps {
        t1
    } else {
        return None;
    };
    Some((t, origin + t * dir))
}

/// Outcome of [`trace_cylinder`].
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderTrace {
    /// Last reflected ray, originating at the last bounce point.
    pub ray: VecRay,
    pub bounces: Vec<Vector3<f64>>,
}

/// Follows `vr` through `k` reflections on the inside of the cylinder of
/// radius `a` about the `z`-axis.
pub fn trace_cylinder(vr: &VecRay, a: f64, k: u32) -> Result<CylinderTrace> {
    let mut origin = vr.origin;
    let mut dir = *vr.dir.as_vector();
    let mut bounces = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let (_, p) = cylinder_hit(&origin, &dir, a).ok_or(Error::NoIntersection)?;
        let n = Vector3::new(p.x, p.y, 0.0).normalize();
        dir = reflect_direction(&dir, &n);
        origin = p;
        bounces.push(p);
    }
    Ok(CylinderTrace {
        ray: VecRay {
            origin,
            dir: Direction::from_vector(dir)?,
        },
        bounces,
    })
}

/// Whether the line of `vr` meets the cylinder in two points.
pub fn meets_cylinder(vr: &VecRay, a: f64) -> bool {
    let d = vr.dir.as_vector();
    let h = (d.x * d.x + d.y * d.y).sqrt();
    if h == 0.0 {
        return false;
    }
    // Horizontal distance from the axis to the projected line.
    let impact = (vr.origin.x * d.y - vr.origin.y * d.x).abs() / h;
    impact <= a
}

fn det3(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    Matrix3::from_columns(&[*a, *b, *c]).determinant()
}

/// Parameters along the ray `family(s0, t0)` where neighbouring rays of the
/// family meet it to first order. Distances are measured from the ray's
/// origin; a double root appears twice.
pub fn estimate_focal(
    family: &dyn Fn(f64, f64) -> Result<VecRay>,
    s0: f64,
    t0: f64,
    h: f64,
) -> Result<Vec<f64>> {
    let base = family(s0, t0)?;
    let (sp, sm) = (family(s0 + h, t0)?, family(s0 - h, t0)?);
    let (tp, tm) = (family(s0, t0 + h)?, family(s0, t0 - h)?);
    let o_s = (sp.origin - sm.origin) / (2.0 * h);
    let o_t = (tp.origin - tm.origin) / (2.0 * h);
    let d_s = (sp.dir.as_vector() - sm.dir.as_vector()) / (2.0 * h);
    let d_t = (tp.dir.as_vector() - tm.dir.as_vector()) / (2.0 * h);
    let d = base.dir.as_vector();
    // det[d, o_s + r d_s, o_t + r d_t] = c0 + c1 r + c2 r²
    let c0 = det3(d, &o_s, &o_t);
    let c1 = det3(d, &d_s, &o_t) + det3(d, &o_s, &d_t);
    let c2 = det3(d, &d_s, &d_t);
    let scale = c0.abs() + c1.abs() + c2.abs();
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    if c2.abs() <= 1e-12 * scale {
        if c1.abs() <= 1e-12 * scale {
            return Ok(Vec::new());
        }
        return Ok(vec![-c0 / c1]);
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let band = 1e-10 * (c1 * c1 + (4.0 * c2 * c0).abs());
    if disc.abs() <= band {
        let r = -c1 / (2.0 * c2);
        return Ok(vec![r, r]);
    }
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    let mut roots = vec![q / c2, c0 / q];
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Default step `1e-5 (1 + |s| + |t|)` for [`estimate_focal`].
pub fn focal_step(s0: f64, t0: f64) -> f64 {
    1e-5 * (1.0 + s0.abs() + t0.abs())
}

/// Unit normal of a parameterized surface by central differences.
pub fn numeric_normal(
    sampler: &dyn Fn(f64, f64) -> Result<Vector3<f64>>,
    s0: f64,
    t0: f64,
    h: f64,
) -> Result<Direction> {
    let ps = (sampler(s0 + h, t0)? - sampler(s0 - h, t0)?) / (2.0 * h);
    let pt = (sampler(s0, t0 + h)? - sampler(s0, t0 - h)?) / (2.0 * h);
    let n = ps.cross(&pt);
    if n.norm() <= 1e-9 * ps.norm() * pt.norm() || n.norm() == 0.0 {
        return Err(Error::DegenerateImmersion);
    }
    Direction::from_vector(n)
}

/// Normal of the plane spanned by a ray direction and a tangent vector, used
/// where a focal sheet collapses to a curve.
pub fn plane_normal(dir: &Vector3<f64>, tangent: &Vector3<f64>) -> Result<Direction> {
    let n = dir.cross(tangent);
    if n.norm() <= 1e-12 * dir.norm() * tangent.norm() || n.norm() == 0.0 {
        return Err(Error::DegenerateImmersion);
    }
    Direction::from_vector(n)
}
