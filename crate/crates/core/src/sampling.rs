//! Parameter grids and sampled surfaces.

use num_complex::Complex64;

use crate::line_space::PointR3;

/// Sample positions along one parameter axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    values: Vec<f64>,
}

impl Axis {
    /// `n` evenly spaced values including both endpoints.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Self {
        let values = match n {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            _ => (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        Self { values }
    }

    /// Midpoints of `n` equal cells of `[lo, hi]`; never touches the ends.
    pub fn cell_centered(lo: f64, hi: f64, n: usize) -> Self {
        let values = (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .collect();
        Self { values }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A `nu × nv` grid of labelled parameters `(u, v)` and the chart parameter
/// `μ` each one maps to. Storage is row-major in `u`: index `i * nv + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nu: usize,
    nv: usize,
    params: Vec<(f64, f64)>,
    mus: Vec<Complex64>,
}

impl Grid {
    /// `μ = u + iv`.
    pub fn rect(u: &Axis, v: &Axis) -> Self {
        Self::mapped(u, v, Complex64::new)
    }

    /// `μ = u e^{iv}`.
    pub fn polar(u: &Axis, v: &Axis) -> Self {
        Self::mapped(u, v, Complex64::from_polar)
    }

    pub fn mapped(u: &Axis, v: &Axis, to_mu: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut params = Vec::with_capacity(u.len() * v.len());
        let mut mus = Vec::with_capacity(u.len() * v.len());
        for &uu in u.values() {
            for &vv in v.values() {
                params.push((uu, vv));
                mus.push(to_mu(uu, vv));
            }
        }
        Self {
            nu: u.len(),
            nv: v.len(),
            params,
            mus,
        }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn mu(&self, i: usize, j: usize) -> Complex64 {
        self.mus[self.index(i, j)]
    }

    pub fn mus(&self) -> &[Complex64] {
        &self.mus
    }

    pub fn params(&self) -> &[(f64, f64)] {
        &self.params
    }

    /// Grid node whose `μ` is closest to `mu`.
    pub fn nearest(&self, mu: Complex64) -> (usize, usize) {
        let k = self
            .mus
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - mu).norm().total_cmp(&(b.1 - mu).norm()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        (k / self.nv.max(1), k % self.nv.max(1))
    }
}

/// A real field on a [`Grid`], same index layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub nu: usize,
    pub nv: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nv + j]
    }
}

/// Points over a grid; `None` where the sample does not exist (no focal point,
/// chart exit and so on).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSurface {
    pub nu: usize,
    pub nv: usize,
    pub params: Vec<(f64, f64)>,
    pub points: Vec<Option<PointR3>>,
}

impl SampledSurface {
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, usize) -> Option<PointR3>) -> Self {
        let mut points = Vec::with_capacity(grid.len());
        for i in 0..grid.nu() {
            for j in 0..grid.nv() {
                points.push(f(i, j));
            }
        }
        Self {
            nu: grid.nu(),
            nv: grid.nv(),
            params: grid.params().to_vec(),
            points,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> Option<PointR3> {
        self.points[i * self.nv + j]
    }

    pub fn defined_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_some()).count()
    }

    /// Largest coordinate difference over samples defined in both surfaces;
    /// `None` if the grids differ in shape.
    pub fn max_component_diff(&self, other: &SampledSurface) -> Option<f64> {
        if self.nu != other.nu || self.nv != other.nv {
            return None;
        }
        Some(
            self.points
                .iter()
                .zip(&other.points)
                .filter_map(|(a, b)| Some(a.as_ref()?.max_component_diff(b.as_ref()?)))
                .fold(0.0, f64::max),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes() {
        assert_eq!(Axis::linspace(0.0, 1.0, 3).values(), &[0.0, 0.5, 1.0]);
        assert_eq!(Axis::cell_centered(0.0, 1.0, 2).values(), &[0.25, 0.75]);
        assert_eq!(Axis::linspace(2.0, 4.0, 1).values(), &[3.0]);
    }

    #[test]
    fn grid_layout_and_nearest() {
        let g = Grid::rect(&Axis::linspace(0.0, 1.0, 3), &Axis::linspace(0.0, 2.0, 5));
        assert_eq!(g.len(), 15);
        assert_eq!(g.mu(1, 2), Complex64::new(0.5, 1.0));
        assert_eq!(g.params()[g.index(2, 4)], (1.0, 2.0));
        assert_eq!(g.nearest(Complex64::new(0.45, 1.1)), (1, 2));
    }

    #[test]
    fn surface_diff() {
        let g = Grid::rect(&Axis::linspace(0.0, 1.0, 2), &Axis::linspace(0.0, 1.0, 2));
        let s1 = SampledSurface::from_fn(&g, |i, j| Some(PointR3::new(i as f64, j as f64, 0.0)));
        let s2 = SampledSurface::from_fn(&g, |i, j| {
            (i + j > 0).then(|| PointR3::new(i as f64, j as f64, 0.25 * i as f64))
        });
        assert_eq!(s2.defined_count(), 3);
        assert_eq!(s1.max_component_diff(&s2), Some(0.25));
    }
}
