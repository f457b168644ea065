//! The natural extension of the interval map and its attracting domain.
//!
//! The two-dimensional map acts on pairs `(u, w)` of distinct extended
//! reals by the branch the `w` coordinate selects: translate both
//! coordinates toward the fundamental interval, or flip both by `-1/x`
//! when `w` lies inside it. Its attractor is a finite union of rectangles
//! bounded by two monotone step functions, one per connected component.

pub mod cycle;
pub mod domain;
pub mod geometry;
pub mod oracle;

use std::cmp::Ordering;

use crate::cf::{cmp_loose, ParamPair};
use crate::error::{AbcfError, Result};
use crate::exact::ExtendedReal;

pub use cycle::{detect_cycle, CycleInfo, CycleStatus, Endpoint, OrbitTrace};
pub use domain::{build_domain, check_invariance, hat_lambda_of, lambda_of};
pub use geometry::{Coord, Rect};
pub use oracle::{approx_domain, hausdorff_compactified};

/// Which connected component of the domain a rectangle belongs to.
///
/// The upper component consists of the points with `u < w`, the lower of
/// those with `u > w`; the attractor never meets the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Upper,
    Lower,
}

/// A finite union of rectangles with component tags, representing the
/// two-dimensional domain, its flipped copy, or the compact coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDomain {
    pub upper: Vec<Rect>,
    pub lower: Vec<Rect>,
    /// True when every corner is exact, so set operations are decidable.
    pub exact: bool,
}

impl StepDomain {
    pub fn rect_count(&self) -> usize {
        self.upper.len() + self.lower.len()
    }

    pub fn all_rects(&self) -> impl Iterator<Item = (&Rect, Component)> {
        self.upper
            .iter()
            .map(|r| (r, Component::Upper))
            .chain(self.lower.iter().map(|r| (r, Component::Lower)))
    }

    /// Closed-set membership, exact when both the domain and the point are.
    pub fn contains(&self, u: &ExtendedReal, w: &ExtendedReal) -> bool {
        self.all_rects().any(|(r, _)| r.contains_point(u, w))
    }

    /// Membership with a float tolerance around every finite edge.
    pub fn contains_f64(&self, u: f64, w: f64, tol: f64) -> bool {
        self.all_rects().any(|(r, _)| r.contains_f64(u, w, tol))
    }

    /// The component containing the point, if any.
    pub fn component_of(&self, u: &ExtendedReal, w: &ExtendedReal) -> Option<Component> {
        self.all_rects()
            .find(|(r, _)| r.contains_point(u, w))
            .map(|(_, c)| c)
    }
}

/// One step of the two-dimensional natural extension.
///
/// Both coordinates move by the branch that `w` selects. Equal endpoints are
/// rejected; `w` at infinity takes the translation branch toward the
/// interval, matching the one-dimensional convention.
pub fn natural_extension_step(
    u: &ExtendedReal,
    w: &ExtendedReal,
    params: &ParamPair,
) -> Result<(ExtendedReal, ExtendedReal)> {
    if cmp_loose(u, w) == Ordering::Equal {
        return Err(AbcfError::DegenerateGeodesic(format!(
            "equal endpoints u = w = {u}"
        )));
    }
    if w.is_infinity() {
        return Ok((u.translate(-1), ExtendedReal::Infinity));
    }
    if cmp_loose(w, params.a()) == Ordering::Less {
        Ok((u.translate(1), w.translate(1)))
    } else if cmp_loose(w, params.b()) == Ordering::Less {
        Ok((u.recip_neg(), w.recip_neg()))
    } else {
        Ok((u.translate(-1), w.translate(-1)))
    }
}

/// All points that the natural extension maps onto `(u, w)`: each of the
/// three branch inverses, filtered by its branch condition.
pub fn natural_extension_preimages(
    u: &ExtendedReal,
    w: &ExtendedReal,
    params: &ParamPair,
) -> Vec<(ExtendedReal, ExtendedReal)> {
    let mut out = Vec::new();
    // Inverse of the left translation: came from (u-1, w-1) with w-1 < a.
    let cand = (u.translate(-1), w.translate(-1));
    if cmp_loose(&cand.1, params.a()) == Ordering::Less {
        out.push(cand);
    }
    // Inverse of the flip: came from (-1/u, -1/w) with -1/w in [a, b).
    let cand = (u.recip_neg(), w.recip_neg());
    if !cand.1.is_infinity()
        && cmp_loose(&cand.1, params.a()) != Ordering::Less
        && cmp_loose(&cand.1, params.b()) == Ordering::Less
    {
        out.push(cand);
    }
    // Inverse of the right translation: came from (u+1, w+1) with w+1 >= b.
    let cand = (u.translate(1), w.translate(1));
    if cand.1.is_infinity() || cmp_loose(&cand.1, params.b()) != Ordering::Less {
        out.push(cand);
    }
    out
}
