//! CSV, OBJ and SVG writers. Numbers carry 17 significant digits so files
//! round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use focalset::line_space::PointR3;
use focalset::sampling::SampledSurface;

use crate::config::Format;
use crate::error::{CliError, CliResult};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn surface_csv(surface: &SampledSurface) -> String {
    let mut s = String::from("u,v,x1,x2,x3\n");
    for (&(u, v), p) in surface.params.iter().zip(&surface.points) {
        if let Some(p) = p {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                num(u),
                num(v),
                num(p.x1()),
                num(p.x2()),
                num(p.x3())
            );
        }
    }
    s
}

/// Vertices are the defined points; a face is emitted for every grid cell
/// whose four corners are all defined.
pub fn surface_obj(surface: &SampledSurface) -> String {
    let mut s = String::new();
    let mut index = vec![None; surface.points.len()];
    let mut next = 1usize;
    for (k, p) in surface.points.iter().enumerate() {
        if let Some(p) = p {
            let _ = writeln!(s, "v {} {} {}", num(p.x1()), num(p.x2()), num(p.x3()));
            index[k] = Some(next);
            next += 1;
        }
    }
    let at = |i: usize, j: usize| index[i * surface.nv + j];
    for i in 0..surface.nu.saturating_sub(1) {
        for j in 0..surface.nv.saturating_sub(1) {
            if let (Some(a), Some(b), Some(c), Some(d)) =
                (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1))
            {
                let _ = writeln!(s, "f {a} {b} {c} {d}");
            }
        }
    }
    s
}

/// Planar curve as `(parameter, x1, x2)` rows.
pub fn curve_csv(params: &[f64], points: &[Option<PointR3>]) -> String {
    let mut s = String::from("v,x1,x2\n");
    for (&v, p) in params.iter().zip(points) {
        if let Some(p) = p {
            let _ = writeln!(s, "{},{},{}", num(v), num(p.x1()), num(p.x2()));
        }
    }
    s
}

pub fn curve_svg(points: &[Option<PointR3>]) -> String {
    let pts: Vec<(f64, f64)> = points.iter().flatten().map(|p| (p.x1(), -p.x2())).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(&(x, y)) = pts.first() {
        (x0, x1, y0, y1) = (x, x, y, y);
    }
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let extent = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.05 * extent;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        num(x0 - pad),
        num(y0 - pad),
        num(x1 - x0 + 2.0 * pad),
        num(y1 - y0 + 2.0 * pad)
    );
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{},{}", num(x), num(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="black" stroke-width="{}" points="{}"/>"#,
        num(0.005 * extent),
        coords.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

/// Writes files into one output directory and remembers what was written.
pub struct OutDir {
    root: PathBuf,
    format: Format,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path, format: Format) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    /// OBJ when asked for, CSV otherwise.
    pub fn surface(&mut self, stem: &str, surface: &SampledSurface) -> CliResult<()> {
        match self.format {
            Format::Obj => self.write(&format!("{stem}.obj"), &surface_obj(surface)),
            _ => self.write(&format!("{stem}.csv"), &surface_csv(surface)),
        }
    }

    /// SVG when asked for, CSV otherwise.
    pub fn curve(
        &mut self,
        stem: &str,
        params: &[f64],
        points: &[Option<PointR3>],
    ) -> CliResult<()> {
        match self.format {
            Format::Svg => self.write(&format!("{stem}.svg"), &curve_svg(points)),
            _ => self.write(&format!("{stem}.csv"), &curve_csv(params, points)),
        }
    }

    pub fn file_names(&self) -> Vec<String> {
        self.written
            .iter()
            .map(|p| p.display().to_string())
            .collect()
    }
}
