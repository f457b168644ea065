//! Floating-point approximation of the attracting domain, for parameter
//! pairs without an exact construction, and a compactified distance for
//! comparing domains.
//!
//! Random planar points are driven by the two-dimensional map until they
//! settle on the attractor; the visited set is accumulated on a grid in
//! compactified coordinates `x -> x / (1 + |x|)` and each component is
//! refitted with one rectangle per run of grid rows sharing a boundary
//! level.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cf::ParamPair;
use crate::error::{AbcfError, Result};

use super::geometry::{Coord, Rect};
use super::StepDomain;

fn compactify(x: f64) -> f64 {
    x / (1.0 + x.abs())
}

fn decompactify(c: f64) -> f64 {
    c / (1.0 - c.abs())
}

/// One step of the two-dimensional map in floats.
fn step_f64(u: f64, w: f64, a: f64, b: f64) -> (f64, f64) {
    if w < a {
        (u + 1.0, w + 1.0)
    } else if w < b {
        (-1.0 / u, -1.0 / w)
    } else {
        (u - 1.0, w - 1.0)
    }
}

struct Grid {
    resolution: usize,
    cells: Vec<bool>,
}

impl Grid {
    fn new(resolution: usize) -> Self {
        Grid {
            resolution,
            cells: vec![false; resolution * resolution],
        }
    }

    fn index_of(&self, c: f64) -> usize {
        let t = (c + 1.0) / 2.0 * self.resolution as f64;
        (t.floor() as isize).clamp(0, self.resolution as isize - 1) as usize
    }

    fn mark(&mut self, u: f64, w: f64) {
        let i = self.index_of(compactify(u));
        let j = self.index_of(compactify(w));
        self.cells[j * self.resolution + i] = true;
    }

    fn row(&self, j: usize) -> &[bool] {
        &self.cells[j * self.resolution..(j + 1) * self.resolution]
    }
}

/// Boundary of a grid cell in real coordinates; the outermost boundaries
/// become infinities.
fn cell_edge(resolution: usize, index: usize) -> Coord {
    if index == 0 {
        Coord::NegInf
    } else if index == resolution {
        Coord::PosInf
    } else {
        let c = -1.0 + 2.0 * index as f64 / resolution as f64;
        Coord::Float(decompactify(c))
    }
}

/// Fits one rectangle per run of rows whose extreme occupied column agrees.
/// Upper rows keep their maximum column and extend to `-inf`; lower rows
/// keep their minimum column and extend to `+inf`.
fn fit_component(grid: &Grid, is_upper: bool) -> Vec<Rect> {
    let res = grid.resolution;
    let mut levels: Vec<Option<usize>> = Vec::with_capacity(res);
    for j in 0..res {
        let row = grid.row(j);
        let level = if is_upper {
            row.iter().rposition(|&c| c)
        } else {
            row.iter().position(|&c| c)
        };
        levels.push(level);
    }
    let mut rects = Vec::new();
    let mut j = 0;
    while j < res {
        let Some(level) = levels[j] else {
            j += 1;
            continue;
        };
        let mut k = j + 1;
        while k < res && levels[k] == Some(level) {
            k += 1;
        }
        let w_lo = cell_edge(res, j);
        let w_hi = cell_edge(res, k);
        let (u_lo, u_hi) = if is_upper {
            (Coord::NegInf, cell_edge(res, level + 1))
        } else {
            (cell_edge(res, level), Coord::PosInf)
        };
        rects.push(Rect {
            u_lo,
            u_hi,
            w_lo,
            w_hi,
        });
        j = k;
    }
    rects
}

/// Approximates the attracting domain by forward simulation.
///
/// `samples` random starts are iterated `iterations` times each; the first
/// quarter of each run is discarded as transient. The result is a float
/// domain whose boundary is resolved to the given grid resolution in
/// compactified coordinates.
pub fn approx_domain(
    params: &ParamPair,
    samples: usize,
    iterations: usize,
    seed: u64,
    resolution: usize,
) -> Result<StepDomain> {
    if samples == 0 || iterations == 0 || resolution < 2 {
        return Err(AbcfError::DomainError(
            "need positive samples, iterations, and a resolution of at least 2".into(),
        ));
    }
    let a = params.a().to_f64();
    let b = params.b().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut upper_grid = Grid::new(resolution);
    let mut lower_grid = Grid::new(resolution);
    let burn_in = (iterations / 4).max(10).min(iterations);
    for _ in 0..samples {
        let mut u: f64 = rng.gen_range(-30.0..30.0);
        let mut w: f64 = rng.gen_range(-30.0..30.0);
        if (u - w).abs() < 1e-9 {
            continue;
        }
        for step in 0..iterations {
            let (nu, nw) = step_f64(u, w, a, b);
            u = nu;
            w = nw;
            if !u.is_finite() || !w.is_finite() {
                break;
            }
            if step >= burn_in {
                if u < w {
                    upper_grid.mark(u, w);
                } else if u > w {
                    lower_grid.mark(u, w);
                }
            }
        }
    }
    Ok(StepDomain {
        upper: fit_component(&upper_grid, true),
        lower: fit_component(&lower_grid, false),
        exact: false,
    })
}

fn occupied_cells(domain: &StepDomain, resolution: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for j in 0..resolution {
        for i in 0..resolution {
            let cu = -1.0 + 2.0 * (i as f64 + 0.5) / resolution as f64;
            let cw = -1.0 + 2.0 * (j as f64 + 0.5) / resolution as f64;
            let u = decompactify(cu);
            let w = decompactify(cw);
            if domain.contains_f64(u, w, 1e-9) {
                out.push((cu, cw));
            }
        }
    }
    out
}

fn directed_hausdorff(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for &(x, y) in from {
        let mut best = f64::INFINITY;
        for &(p, q) in to {
            let d2 = (x - p) * (x - p) + (y - q) * (y - q);
            if d2 < best {
                best = d2;
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

/// Symmetric Hausdorff distance between two domains after rasterizing both
/// onto a grid in compactified coordinates. Units are compactified lengths,
/// so the whole square has diameter `2 * sqrt 2`. Empty domains give an
/// infinite distance unless both are empty.
pub fn hausdorff_compactified(first: &StepDomain, second: &StepDomain, resolution: usize) -> f64 {
    let cells_a = occupied_cells(first, resolution);
    let cells_b = occupied_cells(second, resolution);
    if cells_a.is_empty() && cells_b.is_empty() {
        return 0.0;
    }
    if cells_a.is_empty() || cells_b.is_empty() {
        return f64::INFINITY;
    }
    directed_hausdorff(&cells_a, &cells_b).max(directed_hausdorff(&cells_b, &cells_a))
}
