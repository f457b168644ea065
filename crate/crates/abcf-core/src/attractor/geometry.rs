//! Exact axis-aligned geometry on the extended plane: coordinates with
//! signed infinities, rectangles, grid refinement, and images under the
//! coordinatewise maps used by the natural extension.

use std::cmp::Ordering;

use crate::cf::cmp_loose;
use crate::error::{AbcfError, Result};
use crate::exact::{ExtendedReal, Surd};

/// A rectangle corner coordinate. Unlike [`ExtendedReal`], which has a
/// single projective point at infinity, boundary data needs the two signed
/// infinities.
#[derive(Clone, Debug)]
pub enum Coord {
    NegInf,
    Exact(Surd),
    Float(f64),
    PosInf,
}

impl Coord {
    pub fn from_int(n: i64) -> Self {
        Coord::Exact(Surd::from_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Coord::Exact(Surd::from_ratio(num, den).expect("nonzero denominator"))
    }

    /// Converts a finite extended real; infinity must be signed explicitly.
    pub fn from_extended(x: &ExtendedReal, infinity_as: Coord) -> Coord {
        match x {
            ExtendedReal::Exact(s) => Coord::Exact(s.clone()),
            ExtendedReal::Float(v) => Coord::Float(*v),
            ExtendedReal::Infinity => infinity_as,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::NegInf => f64::NEG_INFINITY,
            Coord::Exact(s) => s.to_f64(),
            Coord::Float(v) => *v,
            Coord::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Coord::NegInf | Coord::PosInf)
    }

    /// Finite payload as an extended real.
    pub fn as_extended(&self) -> Option<ExtendedReal> {
        match self {
            Coord::Exact(s) => Some(ExtendedReal::Exact(s.clone())),
            Coord::Float(v) => Some(ExtendedReal::Float(*v)),
            _ => None,
        }
    }

    pub fn neg(&self) -> Coord {
        match self {
            Coord::NegInf => Coord::PosInf,
            Coord::PosInf => Coord::NegInf,
            Coord::Exact(s) => Coord::Exact(s.neg()),
            Coord::Float(v) => Coord::Float(-v),
        }
    }

    pub fn translate(&self, k: i64) -> Coord {
        match self {
            Coord::Exact(s) => Coord::Exact(s.add(&Surd::from_int(k)).expect("integer shift")),
            Coord::Float(v) => Coord::Float(v + k as f64),
            other => other.clone(),
        }
    }

    /// Total order; exact values compare exactly, and comparisons across
    /// distinct irrational fields fall back to floats.
    pub fn cmp_coord(&self, other: &Coord) -> Ordering {
        use Coord::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            _ => {
                let x = self.as_extended().expect("finite");
                let y = other.as_extended().expect("finite");
                cmp_loose(&x, &y)
            }
        }
    }

    pub fn min_coord(self, other: Coord) -> Coord {
        if self.cmp_coord(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max_coord(self, other: Coord) -> Coord {
        if self.cmp_coord(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Sign relative to zero.
    pub fn signum(&self) -> i32 {
        match self {
            Coord::NegInf => -1,
            Coord::PosInf => 1,
            Coord::Exact(s) => s.signum(),
            Coord::Float(v) => {
                if *v < 0.0 {
                    -1
                } else if *v > 0.0 {
                    1
                } else {
                    0
                }
            }
        }
    }
}

impl PartialEq for Coord {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_coord(other) == Ordering::Equal
    }
}

impl Eq for Coord {}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_coord(other)
    }
}

impl std::fmt::Display for Coord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coord::NegInf => write!(f, "-inf"),
            Coord::PosInf => write!(f, "inf"),
            Coord::Exact(s) => write!(f, "{s}"),
            Coord::Float(v) => write!(f, "{v}"),
        }
    }
}

/// A closed axis-aligned rectangle `[u_lo, u_hi] x [w_lo, w_hi]`.
///
/// For hat-coordinate domains the `u` slot holds the horizontal axis and the
/// `w` slot the vertical axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub u_lo: Coord,
    pub u_hi: Coord,
    pub w_lo: Coord,
    pub w_hi: Coord,
}

impl Rect {
    pub fn new(u_lo: Coord, u_hi: Coord, w_lo: Coord, w_hi: Coord) -> Result<Rect> {
        if u_lo.cmp_coord(&u_hi) == Ordering::Greater || w_lo.cmp_coord(&w_hi) == Ordering::Greater
        {
            return Err(AbcfError::InconsistentDomain(format!(
                "rectangle corners out of order: [{u_lo}, {u_hi}] x [{w_lo}, {w_hi}]"
            )));
        }
        Ok(Rect {
            u_lo,
            u_hi,
            w_lo,
            w_hi,
        })
    }

    /// True when either side has zero length.
    pub fn is_degenerate(&self) -> bool {
        self.u_lo == self.u_hi || self.w_lo == self.w_hi
    }

    /// Closed-set membership of a point given as extended reals; the single
    /// projective infinity lies in an interval that reaches either end.
    pub fn contains_point(&self, u: &ExtendedReal, w: &ExtendedReal) -> bool {
        in_interval(&self.u_lo, &self.u_hi, u) && in_interval(&self.w_lo, &self.w_hi, w)
    }

    /// Membership with a symmetric float tolerance on finite edges.
    pub fn contains_f64(&self, u: f64, w: f64, tol: f64) -> bool {
        u >= self.u_lo.to_f64() - tol
            && u <= self.u_hi.to_f64() + tol
            && w >= self.w_lo.to_f64() - tol
            && w <= self.w_hi.to_f64() + tol
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.u_lo, self.u_hi, self.w_lo, self.w_hi
        )
    }
}

/// Closed-interval membership for an extended real.
pub fn in_interval(lo: &Coord, hi: &Coord, x: &ExtendedReal) -> bool {
    if x.is_infinity() {
        return matches!(lo, Coord::NegInf) || matches!(hi, Coord::PosInf);
    }
    let lo_ok = match lo {
        Coord::NegInf => true,
        Coord::PosInf => false,
        c => cmp_loose(&c.as_extended().expect("finite"), x) != Ordering::Greater,
    };
    let hi_ok = match hi {
        Coord::NegInf => false,
        Coord::PosInf => true,
        c => cmp_loose(x, &c.as_extended().expect("finite")) != Ordering::Greater,
    };
    lo_ok && hi_ok
}

/// Image of a sign-definite interval under `x -> -1/x`, which is increasing
/// on each half line; `0` maps to the infinity on the far side and the
/// infinities map to `0`.
pub fn flip_interval(lo: &Coord, hi: &Coord) -> Result<(Coord, Coord)> {
    let zero = Coord::from_int(0);
    let flip_one = |c: &Coord, from_negative_side: bool| -> Coord {
        match c {
            Coord::NegInf | Coord::PosInf => Coord::from_int(0),
            c if *c == zero => {
                if from_negative_side {
                    Coord::PosInf
                } else {
                    Coord::NegInf
                }
            }
            Coord::Exact(s) => Coord::Exact(s.recip().expect("nonzero").neg()),
            Coord::Float(v) => Coord::Float(-1.0 / v),
        }
    };
    if hi.cmp_coord(&zero) != Ordering::Greater {
        Ok((flip_one(lo, true), flip_one(hi, true)))
    } else if lo.cmp_coord(&zero) != Ordering::Less {
        Ok((flip_one(lo, false), flip_one(hi, false)))
    } else {
        Err(AbcfError::InconsistentDomain(format!(
            "cannot flip an interval straddling zero: [{lo}, {hi}]"
        )))
    }
}

/// Sorted, deduplicated coordinate values.
pub fn sorted_breakpoints<I: IntoIterator<Item = Coord>>(coords: I) -> Vec<Coord> {
    let mut v: Vec<Coord> = coords.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

fn locate(breakpoints: &[Coord], c: &Coord) -> Result<usize> {
    breakpoints
        .binary_search(c)
        .map_err(|_| AbcfError::InconsistentDomain(format!("coordinate {c} not on the grid")))
}

/// Multiplicity of each grid cell covered by the rectangles, on the grid of
/// the given breakpoints. Degenerate rectangles contribute nothing.
pub fn cell_multiplicities(
    rects: &[Rect],
    us: &[Coord],
    ws: &[Coord],
) -> Result<std::collections::HashMap<(usize, usize), usize>> {
    let mut cells = std::collections::HashMap::new();
    for r in rects {
        if r.is_degenerate() {
            continue;
        }
        let u0 = locate(us, &r.u_lo)?;
        let u1 = locate(us, &r.u_hi)?;
        let w0 = locate(ws, &r.w_lo)?;
        let w1 = locate(ws, &r.w_hi)?;
        for i in u0..u1 {
            for j in w0..w1 {
                *cells.entry((i, j)).or_insert(0) += 1;
            }
        }
    }
    Ok(cells)
}

fn breakpoints_of(sets: &[&[Rect]]) -> (Vec<Coord>, Vec<Coord>) {
    let us = sorted_breakpoints(
        sets.iter()
            .flat_map(|rs| rs.iter())
            .flat_map(|r| [r.u_lo.clone(), r.u_hi.clone()]),
    );
    let ws = sorted_breakpoints(
        sets.iter()
            .flat_map(|rs| rs.iter())
            .flat_map(|r| [r.w_lo.clone(), r.w_hi.clone()]),
    );
    (us, ws)
}

/// Set equality of two rectangle unions, decided exactly by refining both to
/// the common grid. Returns a witness cell on failure.
pub fn rect_sets_equal(a: &[Rect], b: &[Rect]) -> Result<(bool, Option<Rect>)> {
    let (us, ws) = breakpoints_of(&[a, b]);
    let cells_a = cell_multiplicities(a, &us, &ws)?;
    let cells_b = cell_multiplicities(b, &us, &ws)?;
    for key in cells_a.keys().chain(cells_b.keys()) {
        if cells_a.contains_key(key) != cells_b.contains_key(key) {
            let (i, j) = *key;
            return Ok((
                false,
                Some(Rect::new(
                    us[i].clone(),
                    us[i + 1].clone(),
                    ws[j].clone(),
                    ws[j + 1].clone(),
                )?),
            ));
        }
    }
    Ok((true, None))
}

/// Checks that `tiles` covers exactly the union of `region`, each cell once.
/// This is the essential-bijectivity test: the image rectangles must tile
/// the region with no gaps, no spill, and no double cover.
pub fn check_exact_tiling(region: &[Rect], tiles: &[Rect]) -> Result<()> {
    let (us, ws) = breakpoints_of(&[region, tiles]);
    let cells_region = cell_multiplicities(region, &us, &ws)?;
    let cells_tiles = cell_multiplicities(tiles, &us, &ws)?;
    let describe = |i: usize, j: usize| {
        format!(
            "cell [{}, {}] x [{}, {}]",
            us[i],
            us[i + 1],
            ws[j],
            ws[j + 1]
        )
    };
    for (&(i, j), &mult) in &cells_tiles {
        if !cells_region.contains_key(&(i, j)) {
            return Err(AbcfError::InconsistentDomain(format!(
                "image spills outside the region at {}",
                describe(i, j)
            )));
        }
        if mult != 1 {
            return Err(AbcfError::InconsistentDomain(format!(
                "image covers {} {mult} times",
                describe(i, j)
            )));
        }
    }
    for &(i, j) in cells_region.keys() {
        if !cells_tiles.contains_key(&(i, j)) {
            return Err(AbcfError::InconsistentDomain(format!(
                "image misses {}",
                describe(i, j)
            )));
        }
    }
    Ok(())
}

/// Splits rectangles along a vertical line `u = c` and a horizontal line
/// `w = c` so every output rectangle is sign-definite relative to those
/// lines.
pub fn split_at(rects: Vec<Rect>, u_cut: Option<&Coord>, w_cut: Option<&Coord>) -> Vec<Rect> {
    let mut out = Vec::new();
    for r in rects {
        let u_parts: Vec<(Coord, Coord)> = match u_cut {
            Some(c)
                if r.u_lo.cmp_coord(c) == Ordering::Less
                    && c.cmp_coord(&r.u_hi) == Ordering::Less =>
            {
                vec![(r.u_lo.clone(), c.clone()), (c.clone(), r.u_hi.clone())]
            }
            _ => vec![(r.u_lo.clone(), r.u_hi.clone())],
        };
        let w_parts: Vec<(Coord, Coord)> = match w_cut {
            Some(c)
                if r.w_lo.cmp_coord(c) == Ordering::Less
                    && c.cmp_coord(&r.w_hi) == Ordering::Less =>
            {
                vec![(r.w_lo.clone(), c.clone()), (c.clone(), r.w_hi.clone())]
            }
            _ => vec![(r.w_lo.clone(), r.w_hi.clone())],
        };
        for (ulo, uhi) in &u_parts {
            for (wlo, whi) in &w_parts {
                out.push(Rect {
                    u_lo: ulo.clone(),
                    u_hi: uhi.clone(),
                    w_lo: wlo.clone(),
                    w_hi: whi.clone(),
                });
            }
        }
    }
    out
}

/// Greedily merges rectangles that share a full edge, to keep outputs tidy.
pub fn coalesce(mut rects: Vec<Rect>) -> Vec<Rect> {
    loop {
        let mut merged = false;
        'outer: for i in 0..rects.len() {
            for j in (i + 1)..rects.len() {
                let (a, b) = (&rects[i], &rects[j]);
                let same_u = a.u_lo == b.u_lo && a.u_hi == b.u_hi;
                let same_w = a.w_lo == b.w_lo && a.w_hi == b.w_hi;
                let new = if same_u && a.w_hi == b.w_lo {
                    Some(Rect {
                        u_lo: a.u_lo.clone(),
                        u_hi: a.u_hi.clone(),
                        w_lo: a.w_lo.clone(),
                        w_hi: b.w_hi.clone(),
                    })
                } else if same_u && b.w_hi == a.w_lo {
                    Some(Rect {
                        u_lo: a.u_lo.clone(),
                        u_hi: a.u_hi.clone(),
                        w_lo: b.w_lo.clone(),
                        w_hi: a.w_hi.clone(),
                    })
                } else if same_w && a.u_hi == b.u_lo {
                    Some(Rect {
                        u_lo: a.u_lo.clone(),
                        u_hi: b.u_hi.clone(),
                        w_lo: a.w_lo.clone(),
                        w_hi: a.w_hi.clone(),
                    })
                } else if same_w && b.u_hi == a.u_lo {
                    Some(Rect {
                        u_lo: b.u_lo.clone(),
                        u_hi: a.u_hi.clone(),
                        w_lo: a.w_lo.clone(),
                        w_hi: a.w_hi.clone(),
                    })
                } else {
                    None
                };
                if let Some(n) = new {
                    rects.swap_remove(j);
                    rects[i] = n;
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return rects;
        }
    }
}
