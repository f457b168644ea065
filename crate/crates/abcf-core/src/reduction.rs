//! Reduction of geodesics to the attractor and the coding machinery built
//! on it: recovering past digits, two-sided coding windows, intersections
//! with the circular cross-section arcs, and the return-time cocycle.

use std::cmp::Ordering;

use crate::attractor::StepDomain;
use crate::cf::{cmp_loose, floor_ab, ParamPair};
use crate::error::{AbcfError, Result};
use crate::exact::ExtendedReal;

/// Float tolerance for membership and strictness tests on inexact data.
const SECTION_TOL: f64 = 1e-9;

/// An oriented geodesic, recorded by its repelling (past) endpoint `u` and
/// attracting (future) endpoint `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicEndpoints {
    pub u: ExtendedReal,
    pub w: ExtendedReal,
}

impl GeodesicEndpoints {
    pub fn new(u: ExtendedReal, w: ExtendedReal) -> Result<Self> {
        if u.same_point(&w).unwrap_or(false) {
            return Err(AbcfError::DegenerateGeodesic(format!(
                "equal endpoints u = w = {u}"
            )));
        }
        Ok(GeodesicEndpoints { u, w })
    }
}

impl std::fmt::Display for GeodesicEndpoints {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} -> {})", self.u, self.w)
    }
}

/// Whether the geodesic lies in the attractor, exactly when both sides
/// permit and with a float tolerance otherwise.
pub fn in_attractor(g: &GeodesicEndpoints, lambda: &StepDomain) -> bool {
    if lambda.exact && g.u.is_exact() && g.w.is_exact() {
        lambda.contains(&g.u, &g.w)
    } else {
        lambda.contains_f64(g.u.to_f64(), g.w.to_f64(), SECTION_TOL)
    }
}

/// One reduction step: read the digit of the attracting endpoint and apply
/// the corresponding inverse generator to both endpoints,
/// `x -> -1/(x - n)`.
pub fn reduction_step(
    g: &GeodesicEndpoints,
    params: &ParamPair,
) -> Result<(GeodesicEndpoints, i64)> {
    let n = floor_ab(&g.w, params)?;
    let u = g.u.translate(-n).recip_neg();
    let w = g.w.translate(-n).recip_neg();
    Ok((GeodesicEndpoints::new(u, w)?, n))
}

/// A geodesic driven into the attractor, with the digits consumed on the
/// way.
#[derive(Clone, Debug)]
pub struct ReducedGeodesic {
    pub endpoints: GeodesicEndpoints,
    pub digits: Vec<i64>,
    pub steps: usize,
}

/// Applies reduction steps until the geodesic enters the attractor.
pub fn reduce_geodesic(
    g: &GeodesicEndpoints,
    params: &ParamPair,
    lambda: &StepDomain,
    budget: usize,
) -> Result<ReducedGeodesic> {
    let mut current = g.clone();
    let mut digits = Vec::new();
    for steps in 0..=budget {
        if in_attractor(&current, lambda) {
            return Ok(ReducedGeodesic {
                endpoints: current,
                digits,
                steps,
            });
        }
        let (next, n) = reduction_step(&current, params)?;
        current = next;
        digits.push(n);
    }
    Err(AbcfError::ReductionFailed(format!(
        "geodesic {g} did not reach the attractor within {budget} steps"
    )))
}

fn u_extent_f64(lambda: &StepDomain) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (r, _) in lambda.all_rects() {
        lo = lo.min(r.u_lo.to_f64());
        hi = hi.max(r.u_hi.to_f64());
    }
    (lo, hi)
}

/// Inverts one reduction step inside the attractor: finds the digit `n`
/// for which the predecessor `(n - 1/u, n - 1/w)` lies in the attractor
/// and consumes that digit. Exactly one candidate must qualify.
pub fn past_digit(
    g: &GeodesicEndpoints,
    params: &ParamPair,
    lambda: &StepDomain,
) -> Result<(GeodesicEndpoints, i64)> {
    if g.u.is_zero() {
        return Err(AbcfError::InversionFailed(
            "past endpoint at zero has no predecessor digit".into(),
        ));
    }
    let (u_lo, u_hi) = u_extent_f64(lambda);
    let inv_u = if g.u.is_infinity() {
        0.0
    } else {
        1.0 / g.u.to_f64()
    };
    let lo = (u_lo + inv_u - 1.0).floor() as i64;
    let hi = (u_hi + inv_u + 1.0).ceil() as i64;
    if hi - lo > 1_000 {
        return Err(AbcfError::InversionFailed(format!(
            "unbounded digit search for predecessor of {g}"
        )));
    }
    let mut hits: Vec<(GeodesicEndpoints, i64)> = Vec::new();
    for n in lo..=hi {
        let pu = g.u.recip_neg().translate(n);
        let pw = g.w.recip_neg().translate(n);
        let Ok(pred) = GeodesicEndpoints::new(pu, pw) else {
            continue;
        };
        if !in_attractor(&pred, lambda) {
            continue;
        }
        // The step from the candidate must consume exactly this digit.
        match floor_ab(&pred.w, params) {
            Ok(m) if m == n => hits.push((pred, n)),
            _ => {}
        }
    }
    match hits.len() {
        0 => Err(AbcfError::InversionFailed(format!(
            "no predecessor of {g} inside the attractor"
        ))),
        1 => Ok(hits.pop().unwrap()),
        _ => Err(AbcfError::AmbiguousBoundary(format!(
            "{} predecessors of {g}; the point lies on a cell boundary",
            hits.len()
        ))),
    }
}

/// Reduces the geodesic and reads a two-sided digit window of length
/// `2k + 1` around the anchor: `k` past digits, the digit at the anchor,
/// and `k` future digits. Returns the window and the anchor.
pub fn coding_window(
    g: &GeodesicEndpoints,
    params: &ParamPair,
    lambda: &StepDomain,
    k: usize,
    budget: usize,
) -> Result<(Vec<i64>, GeodesicEndpoints)> {
    let reduced = reduce_geodesic(g, params, lambda, budget)?;
    let anchor = reduced.endpoints;
    let mut past = Vec::with_capacity(k);
    let mut cursor = anchor.clone();
    for _ in 0..k {
        let (pred, n) = past_digit(&cursor, params, lambda)?;
        past.push(n);
        cursor = pred;
    }
    past.reverse();
    let mut window = past;
    let mut cursor = anchor.clone();
    for _ in 0..=k {
        let (next, n) = reduction_step(&cursor, params)?;
        window.push(n);
        cursor = next;
    }
    Ok((window, anchor))
}

/// The three circular arcs used as cross-sections of the geodesic flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionCurve {
    /// The upper unit semicircle `|z| = 1`.
    Unit,
    /// The arc of `|z + 1| = 1` over `x` in `[-1/2, 0]`.
    LeftCircle,
    /// The arc of `|z - 1| = 1` over `x` in `[0, 1/2]`.
    RightCircle,
}

impl std::fmt::Display for SectionCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectionCurve::Unit => write!(f, "unit"),
            SectionCurve::LeftCircle => write!(f, "left"),
            SectionCurve::RightCircle => write!(f, "right"),
        }
    }
}

/// A transversal intersection of a geodesic with a section arc.
#[derive(Clone, Copy, Debug)]
pub struct SectionHit {
    pub curve: SectionCurve,
    pub x: f64,
    pub y: f64,
}

/// Intersection of the geodesic with one section arc, in floats.
///
/// The geodesic is the half-circle (or vertical half-line) over the
/// interval between its endpoints; the hit must lie strictly between them
/// and, for the shifted circles, inside the arc's `x` range.
pub fn cross_section_point(g: &GeodesicEndpoints, curve: SectionCurve) -> Result<SectionHit> {
    let (center, arc): (f64, Option<(f64, f64)>) = match curve {
        SectionCurve::Unit => (0.0, None),
        SectionCurve::LeftCircle => (-1.0, Some((-0.5, 0.0))),
        SectionCurve::RightCircle => (1.0, Some((0.0, 0.5))),
    };
    let x = if g.u.is_infinity() || g.w.is_infinity() {
        // Vertical geodesic over its finite endpoint.
        let finite = if g.u.is_infinity() { &g.w } else { &g.u };
        finite.to_f64()
    } else {
        let u = g.u.to_f64();
        let w = g.w.to_f64();
        let denom = u + w - 2.0 * center;
        if denom.abs() < SECTION_TOL {
            return Err(AbcfError::DomainError(format!(
                "geodesic {g} is concentric with the {curve} section circle"
            )));
        }
        // Radical line of the geodesic circle and the section circle of
        // radius 1 centered at `center`.
        (u * w + 1.0 - center * center) / denom
    };
    let y2 = 1.0 - (x - center) * (x - center);
    if y2 <= SECTION_TOL * SECTION_TOL {
        return Err(AbcfError::DomainError(format!(
            "geodesic {g} misses or is tangent to the {curve} section"
        )));
    }
    if !(g.u.is_infinity() || g.w.is_infinity()) {
        let (lo, hi) = {
            let u = g.u.to_f64();
            let w = g.w.to_f64();
            (u.min(w), u.max(w))
        };
        if x <= lo + SECTION_TOL || x >= hi - SECTION_TOL {
            return Err(AbcfError::DomainError(format!(
                "the {curve} section crossing at x = {x} is off the geodesic {g}"
            )));
        }
    }
    if let Some((lo, hi)) = arc {
        if x < lo - SECTION_TOL || x > hi + SECTION_TOL {
            return Err(AbcfError::DomainError(format!(
                "crossing at x = {x} lies outside the {curve} arc"
            )));
        }
    }
    Ok(SectionHit {
        curve,
        x,
        y: y2.sqrt(),
    })
}

fn height_function(u: f64, w: f64) -> Result<f64> {
    if !(u.abs() < 1.0 && w.abs() > 1.0) {
        return Err(AbcfError::FormulaDomainError(format!(
            "return-time height needs |u| < 1 < |w|, got u = {u}, w = {w}"
        )));
    }
    Ok((w - u).abs() * (w * w - 1.0).sqrt() / (w * w * (1.0 - u * u).sqrt()))
}

/// The return time of the cross-section at an attractor point: the
/// geodesic-flow time between consecutive section crossings, expressed as
/// `2 log |w|` plus the height-cocycle correction.
///
/// Valid for parameters inside the unit square (`-1 <= a`, `b <= 1`) and
/// points with `|u| < 1 < |w|`, where the unit-circle section works.
pub fn return_time(g: &GeodesicEndpoints, params: &ParamPair) -> Result<f64> {
    let minus_one = ExtendedReal::from_int(-1);
    let plus_one = ExtendedReal::from_int(1);
    if cmp_loose(params.a(), &minus_one) == Ordering::Less
        || cmp_loose(params.b(), &plus_one) == Ordering::Greater
    {
        return Err(AbcfError::FormulaDomainError(format!(
            "return-time formula needs parameters inside the unit square, got {params}"
        )));
    }
    if g.w.is_infinity() {
        return Err(AbcfError::FormulaDomainError(
            "return time diverges at an infinite attracting endpoint".into(),
        ));
    }
    let u = g.u.to_f64();
    let w = g.w.to_f64();
    let h_here = height_function(u, w)?;
    let (next, _) = reduction_step(g, params)?;
    if next.w.is_infinity() {
        return Err(AbcfError::FormulaDomainError(
            "successor has an infinite attracting endpoint".into(),
        ));
    }
    let h_next = height_function(next.u.to_f64(), next.w.to_f64())?;
    Ok(2.0 * w.abs().ln() + h_here.ln() - h_next.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::{build_domain, lambda_of};

    fn pair(an: i64, ad: i64, bn: i64, bd: i64) -> ParamPair {
        ParamPair::from_ratios(an, ad, bn, bd).unwrap()
    }

    fn geo(un: i64, ud: i64, wn: i64, wd: i64) -> GeodesicEndpoints {
        GeodesicEndpoints::new(
            ExtendedReal::from_ratio(un, ud).unwrap(),
            ExtendedReal::from_ratio(wn, wd).unwrap(),
        )
        .unwrap()
    }

    fn lambda_for(params: &ParamPair) -> StepDomain {
        lambda_of(&build_domain(params).unwrap(), params).unwrap()
    }

    #[test]
    fn reduction_step_applies_the_digit_inverse() {
        let params = pair(-4, 5, 2, 5);
        let g = geo(5, 2, -13, 5);
        let (next, n) = reduction_step(&g, &params).unwrap();
        assert_eq!(n, -2);
        assert_eq!(next.u, ExtendedReal::from_ratio(-2, 9).unwrap());
        assert_eq!(next.w, ExtendedReal::from_ratio(5, 3).unwrap());
    }

    #[test]
    fn reduction_reaches_the_attractor_exactly() {
        let params = pair(-4, 5, 2, 5);
        let lambda = lambda_for(&params);
        for g in [geo(7, 3, -29, 7), geo(-11, 4, 17, 6), geo(9, 2, 1, 7)] {
            let reduced = reduce_geodesic(&g, &params, &lambda, 200).unwrap();
            assert!(in_attractor(&reduced.endpoints, &lambda));
            assert_eq!(reduced.digits.len(), reduced.steps);
        }
    }

    #[test]
    fn forward_steps_invert_uniquely_inside_the_attractor() {
        let params = pair(-4, 5, 2, 5);
        let lambda = lambda_for(&params);
        // The attracting endpoint is the fixed point of x -> -1/(x - 3),
        // so the forward orbit never leaves the attractor or hits infinity.
        let start = GeodesicEndpoints::new(
            ExtendedReal::from_ratio(-1, 4).unwrap(),
            ExtendedReal::Exact(crate::exact::Surd::new(3, 1, 2, 5).unwrap()),
        )
        .unwrap();
        assert!(in_attractor(&start, &lambda));
        let mut cursor = start.clone();
        let mut digits = Vec::new();
        for _ in 0..6 {
            let (next, n) = reduction_step(&cursor, &params).unwrap();
            assert!(in_attractor(&next, &lambda), "attractor left at {next}");
            digits.push(n);
            cursor = next;
        }
        for n in digits.iter().rev() {
            let (pred, m) = past_digit(&cursor, &params, &lambda).unwrap();
            assert_eq!(m, *n);
            cursor = pred;
        }
        assert_eq!(cursor, start);
    }

    #[test]
    fn past_endpoint_at_zero_has_no_predecessor() {
        let params = pair(-4, 5, 2, 5);
        let lambda = lambda_for(&params);
        let g =
            GeodesicEndpoints::new(ExtendedReal::from_int(0), ExtendedReal::from_int(3)).unwrap();
        assert!(matches!(
            past_digit(&g, &params, &lambda),
            Err(AbcfError::InversionFailed(_))
        ));
    }

    #[test]
    fn coding_window_has_odd_length_and_consistent_center() {
        let params = pair(-4, 5, 2, 5);
        let lambda = lambda_for(&params);
        // Both endpoints quadratic, so past and future are both infinite.
        let g = GeodesicEndpoints::new(
            ExtendedReal::Exact(crate::exact::Surd::new(3, -1, 2, 5).unwrap()),
            ExtendedReal::Exact(crate::exact::Surd::new(0, -1, 1, 5).unwrap()),
        )
        .unwrap();
        let (window, anchor) = coding_window(&g, &params, &lambda, 3, 200).unwrap();
        assert_eq!(window.len(), 7);
        assert_eq!(window[3], floor_ab(&anchor.w, &params).unwrap());
    }

    #[test]
    fn unit_section_crossing_matches_geometry() {
        let g = geo(1, 2, 2, 1);
        let hit = cross_section_point(&g, SectionCurve::Unit).unwrap();
        assert!((hit.x - 0.8).abs() < 1e-12);
        assert!((hit.y - 0.6).abs() < 1e-12);
        // Both endpoints inside the unit interval: no crossing.
        let g = geo(1, 3, 1, 2);
        assert!(cross_section_point(&g, SectionCurve::Unit).is_err());
        // Vertical geodesic over 1/2.
        let g = GeodesicEndpoints::new(
            ExtendedReal::from_ratio(1, 2).unwrap(),
            ExtendedReal::Infinity,
        )
        .unwrap();
        let hit = cross_section_point(&g, SectionCurve::Unit).unwrap();
        assert!((hit.x - 0.5).abs() < 1e-12);
        assert!((hit.y - (0.75f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn shifted_section_arcs_accept_and_reject() {
        let g = geo(-1, 5, -3, 1);
        let hit = cross_section_point(&g, SectionCurve::LeftCircle).unwrap();
        assert!((hit.x + 0.5).abs() < 1e-9);
        assert!((hit.y - (0.75f64).sqrt()).abs() < 1e-9);
        let g = geo(1, 5, 3, 1);
        let hit = cross_section_point(&g, SectionCurve::RightCircle).unwrap();
        assert!((hit.x - 0.5).abs() < 1e-9);
        // Crossing exists on the full circle but outside the arc.
        let g = geo(-1, 4, -3, 1);
        assert!(cross_section_point(&g, SectionCurve::LeftCircle).is_err());
    }

    #[test]
    fn return_time_telescopes_along_an_orbit() {
        let params = pair(-1, 2, 1, 2);
        let lambda = lambda_for(&params);
        let g = GeodesicEndpoints::new(
            ExtendedReal::from_ratio(1, 3).unwrap(),
            ExtendedReal::Exact(crate::exact::Surd::new(3, 1, 2, 5).unwrap()),
        )
        .unwrap();
        assert!(in_attractor(&g, &lambda));
        let mut cursor = g.clone();
        let mut total = 0.0;
        let mut log_sum = 0.0;
        let steps = 4;
        for _ in 0..steps {
            total += return_time(&cursor, &params).unwrap();
            log_sum += cursor.w.to_f64().abs().ln();
            let (next, _) = reduction_step(&cursor, &params).unwrap();
            cursor = next;
        }
        let u0 = g.u.to_f64();
        let w0 = g.w.to_f64();
        let h0 = (w0 - u0).abs() * (w0 * w0 - 1.0).sqrt() / (w0 * w0 * (1.0 - u0 * u0).sqrt());
        let uk = cursor.u.to_f64();
        let wk = cursor.w.to_f64();
        let hk = (wk - uk).abs() * (wk * wk - 1.0).sqrt() / (wk * wk * (1.0 - uk * uk).sqrt());
        let expected = 2.0 * log_sum + h0.ln() - hk.ln();
        assert!((total - expected).abs() < 1e-10);
    }

    #[test]
    fn return_time_rejects_parameters_outside_the_unit_square() {
        let params = pair(-1, 2, 3, 2);
        let g = geo(1, 3, 5, 2);
        assert!(matches!(
            return_time(&g, &params),
            Err(AbcfError::FormulaDomainError(_))
        ));
    }
}
