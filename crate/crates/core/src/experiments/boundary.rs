//! Discriminant scores and labels sampled on a regular 2-D grid, for
//! external contour plotting.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DataMatrix;
use crate::kfda::{project, Class, KfdaModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            x_min: -1.0,
            x_max: 1.0,
            y_min: -1.0,
            y_max: 1.0,
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad grid bounds {self:?}")))
        }
    }
}

/// `x_min,x_max,y_min,y_max`
impl FromStr for Bounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConfig(format!("bounds {s:?}: {e}")))?;
        let [x_min, x_max, y_min, y_max] = parts[..] else {
            return Err(Error::InvalidConfig(format!(
                "bounds need 4 values x_min,x_max,y_min,y_max, got {s:?}"
            )));
        };
        let b = Bounds {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub score: f64,
    pub label: u8,
}

/// Row-major grid: `points[iy * nx + ix]`, `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub nx: usize,
    pub ny: usize,
    pub bounds: Bounds,
    pub points: Vec<GridPoint>,
}

fn linspace(lo: f64, hi: f64, k: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (k - 1) as f64;
    (0..k).map(move |i| if i + 1 == k { hi } else { lo + step * i as f64 })
}

/// Evaluates `model` on an `nx × ny` grid spanning `bounds`, corners included.
pub fn boundary_grid(model: &KfdaModel, bounds: Bounds, nx: usize, ny: usize) -> Result<BoundaryGrid> {
    bounds.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be at least 2x2, got {nx}x{ny}"
        )));
    }
    let xs: Vec<f64> = linspace(bounds.x_min, bounds.x_max, nx).collect();
    let ys: Vec<f64> = linspace(bounds.y_min, bounds.y_max, ny).collect();
    let mut coords = Vec::with_capacity(nx * ny * 2);
    for &y in &ys {
        for &x in &xs {
            coords.push(x);
            coords.push(y);
        }
    }
    let pts = DataMatrix::from_row_major(nx * ny, 2, coords)?;
    let scores = project(model, &pts)?;
    let points = pts
        .rows()
        .zip(scores.iter())
        .map(|(xy, &score)| GridPoint {
            x: xy[0],
            y: xy[1],
            score,
            label: model.classify_score(score).as_u8(),
        })
        .collect();
    Ok(BoundaryGrid {
        nx,
        ny,
        bounds,
        points,
    })
}

impl BoundaryGrid {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Vec<GridPoint>> {
        let mut r = csv::Reader::from_path(path)?;
        Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
    }

    /// Number of 4-connected regions of grid cells carrying `class`.
    pub fn count_regions(&self, class: Class) -> usize {
        let target = class.as_u8();
        let mut seen = vec![false; self.points.len()];
        let mut regions = 0;
        let mut stack = Vec::new();
        for start in 0..self.points.len() {
            if seen[start] || self.points[start].label != target {
                continue;
            }
            regions += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(idx) = stack.pop() {
                let (ix, iy) = (idx % self.nx, idx / self.nx);
                let mut visit = |jx: usize, jy: usize| {
                    let j = jy * self.nx + jx;
                    if !seen[j] && self.points[j].label == target {
                        seen[j] = true;
                        stack.push(j);
                    }
                };
                if ix > 0 {
                    visit(ix - 1, iy);
                }
                if ix + 1 < self.nx {
                    visit(ix + 1, iy);
                }
                if iy > 0 {
                    visit(ix, iy - 1);
                }
                if iy + 1 < self.ny {
                    visit(ix, iy + 1);
                }
            }
        }
        regions
    }
}

/// Evaluates the grid and writes it as `x,y,score,label` rows.
pub fn export_boundary_grid(
    model: &KfdaModel,
    bounds: Bounds,
    nx: usize,
    ny: usize,
    path: &Path,
) -> Result<BoundaryGrid> {
    let grid = boundary_grid(model, bounds, nx, ny)?;
    grid.write_csv(path)?;
    Ok(grid)
}
