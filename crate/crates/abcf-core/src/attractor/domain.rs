//! Exact construction of the natural-extension domain and its derived
//! coordinate versions.
//!
//! Two sources of exact domains exist: a table of verified boundary data for
//! the classically known parameter pairs (including the golden-ratio pairs
//! and the symmetric nearest-integer pair), and a closed-form construction
//! for the open family `-1 < a < 0 < b < 1` whose boundary orbits close
//! after finitely many translation steps. Every constructed domain is
//! certified on the spot: the three branch images must tile the domain
//! exactly, each cell covered once.

use std::cmp::Ordering;

use crate::cf::ParamPair;
use crate::error::{AbcfError, Result};
use crate::exact::{ExtendedReal, Surd};

use super::geometry::{check_exact_tiling, coalesce, flip_interval, split_at, Coord, Rect};
use super::StepDomain;

fn q(num: i64, den: i64) -> Coord {
    Coord::from_ratio(num, den)
}

/// `(p + q sqrt 5)/2` as a coordinate; covers the golden constants.
fn g5(p: i64, qq: i64) -> Coord {
    Coord::Exact(Surd::new(p, qq, 2, 5).expect("golden constant"))
}

fn rect(u_lo: Coord, u_hi: Coord, w_lo: Coord, w_hi: Coord) -> Rect {
    Rect::new(u_lo, u_hi, w_lo, w_hi).expect("table rectangle")
}

fn upper(level: Coord, w_lo: Coord, w_hi: Coord) -> Rect {
    rect(Coord::NegInf, level, w_lo, w_hi)
}

fn lower(level: Coord, w_lo: Coord, w_hi: Coord) -> Rect {
    rect(level, Coord::PosInf, w_lo, w_hi)
}

fn exact_param(x: &ExtendedReal) -> Option<&Surd> {
    x.as_surd()
}

fn surd_eq(x: &ExtendedReal, num: i64, den: i64) -> bool {
    exact_param(x).is_some_and(|s| s == &Surd::from_ratio(num, den).unwrap())
}

fn golden_eq(x: &ExtendedReal, p: i64, qq: i64) -> bool {
    exact_param(x).is_some_and(|s| s == &Surd::new(p, qq, 2, 5).unwrap())
}

/// Boundary tables for the parameter pairs whose domains are known in
/// closed form but fall outside the generic construction.
fn named_domain(params: &ParamPair) -> Option<StepDomain> {
    let (a, b) = (params.a(), params.b());
    // (-1, 0): single component, three steps.
    if surd_eq(a, -1, 1) && surd_eq(b, 0, 1) {
        return Some(StepDomain {
            upper: vec![
                upper(q(-1, 1), q(-1, 1), q(0, 1)),
                upper(q(0, 1), q(0, 1), q(1, 1)),
                upper(q(1, 1), q(1, 1), Coord::PosInf),
            ],
            lower: vec![],
            exact: true,
        });
    }
    // (-1, 1): two components of two steps each.
    if surd_eq(a, -1, 1) && surd_eq(b, 1, 1) {
        return Some(StepDomain {
            upper: vec![
                upper(q(-1, 1), q(0, 1), q(1, 1)),
                upper(q(0, 1), q(1, 1), Coord::PosInf),
            ],
            lower: vec![
                lower(q(0, 1), Coord::NegInf, q(-1, 1)),
                lower(q(1, 1), q(-1, 1), q(0, 1)),
            ],
            exact: true,
        });
    }
    // (-1/2, 1/2): the nearest-integer pair; boundary steps at the golden
    // constants, centrally symmetric.
    if surd_eq(a, -1, 2) && surd_eq(b, 1, 2) {
        return Some(StepDomain {
            upper: vec![
                upper(g5(-3, -1), q(-1, 2), q(0, 1)),
                upper(g5(-1, -1), q(0, 1), q(1, 1)),
                upper(g5(1, -1), q(1, 1), q(2, 1)),
                upper(g5(3, -1), q(2, 1), Coord::PosInf),
            ],
            lower: vec![
                lower(g5(3, 1), q(0, 1), q(1, 2)),
                lower(g5(1, 1), q(-1, 1), q(0, 1)),
                lower(g5(-1, 1), q(-2, 1), q(-1, 1)),
                lower(g5(-3, 1), Coord::NegInf, q(-2, 1)),
            ],
            exact: true,
        });
    }
    // (-g, g) with g = (sqrt 5 - 1)/2.
    if golden_eq(a, 1, -1) && golden_eq(b, -1, 1) {
        return Some(StepDomain {
            upper: vec![
                upper(q(-2, 1), g5(-3, 1), g5(-1, 1)),
                upper(q(-1, 1), g5(-1, 1), g5(1, 1)),
                upper(q(0, 1), g5(1, 1), g5(3, 1)),
                upper(q(1, 2), g5(3, 1), Coord::PosInf),
            ],
            lower: vec![
                lower(q(-1, 2), Coord::NegInf, g5(-3, -1)),
                lower(q(0, 1), g5(-3, -1), g5(-1, -1)),
                lower(q(1, 1), g5(-1, -1), g5(1, -1)),
                lower(q(2, 1), g5(1, -1), g5(3, -1)),
            ],
            exact: true,
        });
    }
    // (-g, g^2).
    if golden_eq(a, 1, -1) && golden_eq(b, 3, -1) {
        return Some(StepDomain {
            upper: vec![
                upper(g5(-3, -1), g5(1, -1), g5(-3, 1)),
                upper(g5(-1, -1), g5(-3, 1), g5(-1, 1)),
                upper(g5(1, -1), g5(-1, 1), g5(1, 1)),
                upper(g5(3, -1), g5(1, 1), g5(3, 1)),
                upper(g5(-1, 1), g5(3, 1), Coord::PosInf),
            ],
            lower: vec![
                lower(g5(-3, 1), Coord::NegInf, g5(-3, -1)),
                lower(g5(-1, 1), g5(-3, -1), g5(-1, -1)),
                lower(g5(1, 1), g5(-1, -1), g5(1, -1)),
                lower(g5(3, 1), g5(1, -1), g5(3, -1)),
            ],
            exact: true,
        });
    }
    // (-3/8, 2/3).
    if surd_eq(a, -3, 8) && surd_eq(b, 2, 3) {
        return Some(StepDomain {
            upper: vec![
                upper(q(-3, 1), q(-1, 3), q(0, 1)),
                upper(q(-8, 3), q(0, 1), q(2, 3)),
                upper(q(-2, 1), q(2, 3), q(1, 1)),
                upper(q(-5, 3), q(1, 1), q(5, 3)),
                upper(q(-1, 1), q(5, 3), q(2, 1)),
                upper(q(-2, 3), q(2, 1), q(8, 3)),
                upper(q(0, 1), q(8, 3), q(3, 1)),
                upper(q(1, 3), q(3, 1), Coord::PosInf),
            ],
            lower: vec![
                lower(q(-5, 8), Coord::NegInf, q(-5, 2)),
                lower(q(-1, 2), q(-5, 2), q(-2, 1)),
                lower(q(-2, 5), q(-2, 1), q(-8, 5)),
                lower(q(0, 1), q(-8, 5), q(-3, 2)),
                lower(q(1, 2), q(-3, 2), q(-1, 1)),
                lower(q(3, 5), q(-1, 1), q(-3, 5)),
                lower(q(1, 1), q(-3, 5), q(-1, 2)),
                lower(q(3, 2), q(-1, 2), q(0, 1)),
                lower(q(8, 5), q(0, 1), q(2, 5)),
                lower(q(2, 1), q(2, 5), q(1, 2)),
                lower(q(5, 2), q(1, 2), q(5, 8)),
            ],
            exact: true,
        });
    }
    None
}

/// The translation count of the closed-form family: the smallest integer
/// `m >= a + 1/b`, when parameters are exact with `a < 0 < b`.
pub fn family_translation_count(params: &ParamPair) -> Result<i64> {
    use num_traits::ToPrimitive;
    let a = exact_param(params.a())
        .ok_or_else(|| AbcfError::UnsupportedCase("exact parameters required".into()))?;
    let b = exact_param(params.b())
        .ok_or_else(|| AbcfError::UnsupportedCase("exact parameters required".into()))?;
    if a.signum() >= 0 || b.signum() <= 0 {
        return Err(AbcfError::CaseMismatch(
            "the closed-form family needs a < 0 < b".into(),
        ));
    }
    let v = a.add(&b.recip()?)?;
    let m = -(v.neg().floor_int());
    m.to_i64()
        .ok_or_else(|| AbcfError::CaseMismatch("translation count out of range".into()))
}

/// Closed-form construction for exact parameters in `(-1, 0) x (0, 1)`.
///
/// The upper boundary steps through the backward orbit of `b - 1` under
/// `x -> -1/x - 2` until it hands over to `-1/a - 1`; the lower boundary
/// steps through the forward translates of `-1/b`. Both components are then
/// certified by the exact tiling check.
fn family_domain(params: &ParamPair) -> Result<StepDomain> {
    let a = exact_param(params.a()).unwrap().clone();
    let b = exact_param(params.b()).unwrap().clone();
    let m = family_translation_count(params)?;
    if m < 1 {
        return Err(AbcfError::CaseMismatch(format!(
            "translation count {m} below one"
        )));
    }
    let int = Surd::from_int;
    let ratio = |num: i64, den: i64| Surd::from_ratio(num, den).expect("nonzero");

    // Upper boundary: breakpoints and the level to their right.
    let mut ell = Vec::with_capacity(m as usize + 1);
    ell.push(b.sub(&Surd::one())?);
    for _ in 1..m {
        let prev = ell.last().unwrap();
        ell.push(prev.recip()?.neg().sub(&int(2))?);
    }
    ell.push(a.recip()?.neg().sub(&Surd::one())?);

    let mut bps: Vec<Surd> = Vec::new();
    let mut levels: Vec<Surd> = Vec::new();
    for p in 0..m {
        bps.push(ell[p as usize].clone());
        levels.push(ratio(-(p + 2), p + 1));
    }
    bps.push(ell[m as usize].clone());
    levels.push(int(-1));
    for p in 1..m {
        bps.push(ell[p as usize].add(&Surd::one())?);
        levels.push(ratio(-1, p + 1));
    }
    bps.push(ell[m as usize].add(&Surd::one())?);
    levels.push(int(0));
    for p in 0..m - 1 {
        bps.push(ell[p as usize].recip()?.neg());
        levels.push(ratio(p + 1, p + 2));
    }
    bps.push(ell[(m - 1) as usize].recip()?.neg());
    levels.push(ratio(m, m + 1));

    for pair in bps.windows(2) {
        if pair[0].try_cmp(&pair[1])? == Ordering::Greater {
            return Err(AbcfError::CaseMismatch(format!(
                "upper breakpoints out of order near {}",
                pair[0]
            )));
        }
    }
    let mut upper_rects = Vec::new();
    for i in 0..bps.len() {
        let w_lo = Coord::Exact(bps[i].clone());
        let w_hi = if i + 1 < bps.len() {
            Coord::Exact(bps[i + 1].clone())
        } else {
            Coord::PosInf
        };
        if w_lo == w_hi {
            continue;
        }
        upper_rects.push(upper(Coord::Exact(levels[i].clone()), w_lo, w_hi));
    }

    // Lower boundary.
    let sb = b.recip()?.neg();
    let r1 = sb.add(&int(m))?;
    let a_plus = a.add(&Surd::one())?;
    let neg_inv_a_plus = a_plus.recip()?.neg();
    let mut lower_rects = Vec::new();
    let mut low_bps: Vec<Surd> = Vec::new();
    if r1.signum() > 0 {
        let cut = r1.recip()?.neg();
        lower_rects.push(lower(
            Coord::Exact(ratio(-1, m)),
            Coord::NegInf,
            Coord::Exact(cut.clone()),
        ));
        low_bps.push(cut.clone());
        low_bps.push(neg_inv_a_plus.clone());
        lower_rects.push(lower(
            Coord::Exact(ratio(-1, m + 1)),
            Coord::Exact(cut),
            Coord::Exact(neg_inv_a_plus.clone()),
        ));
    } else {
        low_bps.push(neg_inv_a_plus.clone());
        lower_rects.push(lower(
            Coord::Exact(ratio(-1, m + 1)),
            Coord::NegInf,
            Coord::Exact(neg_inv_a_plus.clone()),
        ));
    }
    let mut w_cursor = neg_inv_a_plus;
    let mut level = 0i64;
    let mut next = sb.clone();
    loop {
        low_bps.push(next.clone());
        if w_cursor.try_cmp(&next)? != Ordering::Greater {
            lower_rects.push(lower(
                Coord::Exact(int(level)),
                Coord::Exact(w_cursor.clone()),
                Coord::Exact(next.clone()),
            ));
        }
        w_cursor = next.clone();
        level += 1;
        if level > m {
            break;
        }
        next = sb.add(&int(level))?;
    }
    low_bps.push(a_plus.clone());
    lower_rects.push(lower(
        Coord::Exact(int(m + 1)),
        Coord::Exact(r1.clone()),
        Coord::Exact(a_plus),
    ));
    for pair in low_bps.windows(2) {
        if pair[0].try_cmp(&pair[1])? == Ordering::Greater {
            return Err(AbcfError::CaseMismatch(format!(
                "lower breakpoints out of order near {}",
                pair[0]
            )));
        }
    }

    let domain = StepDomain {
        upper: upper_rects
            .into_iter()
            .filter(|r| !r.is_degenerate())
            .collect(),
        lower: lower_rects
            .into_iter()
            .filter(|r| !r.is_degenerate())
            .collect(),
        exact: true,
    };
    Ok(domain)
}

/// Structural validation: each component is bounded by a monotone step
/// function over contiguous intervals.
fn validate_step_structure(domain: &StepDomain) -> Result<()> {
    let check = |rects: &[Rect], is_upper: bool| -> Result<()> {
        let mut sorted: Vec<&Rect> = rects.iter().collect();
        sorted.sort_by(|x, y| x.w_lo.cmp_coord(&y.w_lo));
        for r in &sorted {
            let edge_ok = if is_upper {
                matches!(r.u_lo, Coord::NegInf)
            } else {
                matches!(r.u_hi, Coord::PosInf)
            };
            if !edge_ok {
                return Err(AbcfError::InconsistentDomain(format!(
                    "component rectangle {r} does not reach its infinite side"
                )));
            }
        }
        for pair in sorted.windows(2) {
            if pair[0].w_hi != pair[1].w_lo {
                return Err(AbcfError::InconsistentDomain(format!(
                    "gap or overlap between {} and {}",
                    pair[0], pair[1]
                )));
            }
            let (lv0, lv1) = if is_upper {
                (&pair[0].u_hi, &pair[1].u_hi)
            } else {
                (&pair[0].u_lo, &pair[1].u_lo)
            };
            if lv0.cmp_coord(lv1) == Ordering::Greater {
                return Err(AbcfError::InconsistentDomain(format!(
                    "step level decreases from {} to {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    };
    check(&domain.upper, true)?;
    check(&domain.lower, false)
}

/// Verifies that the domain is carried onto itself by the natural
/// extension, with the branch images tiling it exactly (no gap, no spill,
/// no double cover). This is the correctness certificate for every exact
/// domain this module produces.
pub fn check_invariance(domain: &StepDomain, params: &ParamPair) -> Result<()> {
    if !domain.exact || !params.is_exact() {
        return Err(AbcfError::UnsupportedCase(
            "invariance certification needs exact data".into(),
        ));
    }
    let a_c = Coord::from_extended(params.a(), Coord::NegInf);
    let b_c = Coord::from_extended(params.b(), Coord::PosInf);
    let zero = Coord::from_int(0);
    let region: Vec<Rect> = domain
        .all_rects()
        .map(|(r, _)| r.clone())
        .filter(|r| !r.is_degenerate())
        .collect();
    let pieces = split_at(split_at(region.clone(), None, Some(&a_c)), None, Some(&b_c));
    let mut tiles = Vec::new();
    for piece in pieces {
        if piece.is_degenerate() {
            continue;
        }
        if piece.w_hi.cmp_coord(&a_c) != Ordering::Greater {
            tiles.push(Rect {
                u_lo: piece.u_lo.translate(1),
                u_hi: piece.u_hi.translate(1),
                w_lo: piece.w_lo.translate(1),
                w_hi: piece.w_hi.translate(1),
            });
        } else if piece.w_lo.cmp_coord(&b_c) != Ordering::Less {
            tiles.push(Rect {
                u_lo: piece.u_lo.translate(-1),
                u_hi: piece.u_hi.translate(-1),
                w_lo: piece.w_lo.translate(-1),
                w_hi: piece.w_hi.translate(-1),
            });
        } else {
            for part in split_at(vec![piece], Some(&zero), Some(&zero)) {
                if part.is_degenerate() {
                    continue;
                }
                let (u_lo, u_hi) = flip_interval(&part.u_lo, &part.u_hi)?;
                let (w_lo, w_hi) = flip_interval(&part.w_lo, &part.w_hi)?;
                tiles.push(Rect {
                    u_lo,
                    u_hi,
                    w_lo,
                    w_hi,
                });
            }
        }
    }
    check_exact_tiling(&region, &tiles)
}

/// Builds the exact natural-extension domain.
///
/// Routing: the named table first, then the closed-form family for exact
/// parameters strictly inside `(-1, 0) x (0, 1)`; parameters whose
/// construction degenerates raise a case mismatch, everything else an
/// unsupported case. Every returned domain passed the exact tiling
/// certificate.
pub fn build_domain(params: &ParamPair) -> Result<StepDomain> {
    if !params.is_exact() {
        return Err(AbcfError::UnsupportedCase(
            "exact parameters required; use approx_domain for floats".into(),
        ));
    }
    if let Some(domain) = named_domain(params) {
        validate_step_structure(&domain)?;
        check_invariance(&domain, params)?;
        return Ok(domain);
    }
    let a = exact_param(params.a()).unwrap();
    let b = exact_param(params.b()).unwrap();
    let inside = a.try_cmp(&Surd::from_int(-1))? == Ordering::Greater
        && a.signum() < 0
        && b.signum() > 0
        && b.try_cmp(&Surd::one())? == Ordering::Less;
    if !inside {
        return Err(AbcfError::UnsupportedCase(format!(
            "no exact construction for {params}; use approx_domain"
        )));
    }
    let domain = family_domain(params).map_err(|e| match e {
        AbcfError::CaseMismatch(m) => AbcfError::CaseMismatch(m),
        other => AbcfError::CaseMismatch(format!("construction failed for {params}: {other}")),
    })?;
    validate_step_structure(&domain).map_err(|e| {
        AbcfError::CaseMismatch(format!("construction degenerated for {params}: {e}"))
    })?;
    check_invariance(&domain, params).map_err(|e| {
        AbcfError::CaseMismatch(format!("closed form does not apply to {params}: {e}"))
    })?;
    Ok(domain)
}

/// The attractor of the reduction map: the flip image of the part of the
/// domain lying over the fundamental interval. Component tags follow the
/// sign of the new `w` coordinate.
pub fn lambda_of(domain: &StepDomain, params: &ParamPair) -> Result<StepDomain> {
    let a_c = Coord::from_extended(params.a(), Coord::NegInf);
    let b_c = Coord::from_extended(params.b(), Coord::PosInf);
    let zero = Coord::from_int(0);
    let mut strip = Vec::new();
    for (r, _) in domain.all_rects() {
        let w_lo = r.w_lo.clone().max_coord(a_c.clone());
        let w_hi = r.w_hi.clone().min_coord(b_c.clone());
        if w_lo.cmp_coord(&w_hi) != Ordering::Less {
            continue;
        }
        strip.push(Rect {
            u_lo: r.u_lo.clone(),
            u_hi: r.u_hi.clone(),
            w_lo,
            w_hi,
        });
    }
    let mut upper_rects = Vec::new();
    let mut lower_rects = Vec::new();
    for piece in split_at(strip, Some(&zero), Some(&zero)) {
        if piece.is_degenerate() {
            continue;
        }
        let from_negative_w = piece.w_hi.cmp_coord(&zero) != Ordering::Greater;
        let (u_lo, u_hi) = flip_interval(&piece.u_lo, &piece.u_hi)?;
        let (w_lo, w_hi) = flip_interval(&piece.w_lo, &piece.w_hi)?;
        let out = Rect {
            u_lo,
            u_hi,
            w_lo,
            w_hi,
        };
        if from_negative_w {
            upper_rects.push(out);
        } else {
            lower_rects.push(out);
        }
    }
    Ok(StepDomain {
        upper: coalesce(upper_rects),
        lower: coalesce(lower_rects),
        exact: domain.exact,
    })
}

/// The attractor in compact coordinates `(x, y) = (-1/w, u)`: the `u` slot
/// of each rectangle holds the `x` interval and the `w` slot the `y`
/// interval. All corners are finite.
pub fn hat_lambda_of(lambda: &StepDomain) -> Result<StepDomain> {
    let transform = |rects: &[Rect]| -> Result<Vec<Rect>> {
        let mut out = Vec::new();
        for r in rects {
            let (x_lo, x_hi) = flip_interval(&r.w_lo, &r.w_hi)?;
            out.push(Rect {
                u_lo: x_lo,
                u_hi: x_hi,
                w_lo: r.u_lo.clone(),
                w_hi: r.u_hi.clone(),
            });
        }
        Ok(coalesce(out))
    };
    Ok(StepDomain {
        upper: transform(&lambda.upper)?,
        lower: transform(&lambda.lower)?,
        exact: lambda.exact,
    })
}

/// The upper boundary level just left of `w = at` (the last step value
/// before the cut), if the upper component reaches it.
pub fn upper_level_left_of(domain: &StepDomain, at: &Coord) -> Option<Coord> {
    domain
        .upper
        .iter()
        .find(|r| {
            r.w_lo.cmp_coord(at) == Ordering::Less && at.cmp_coord(&r.w_hi) != Ordering::Greater
        })
        .map(|r| r.u_hi.clone())
}

/// The lower boundary level just right of `w = at`.
pub fn lower_level_right_of(domain: &StepDomain, at: &Coord) -> Option<Coord> {
    domain
        .lower
        .iter()
        .find(|r| {
            at.cmp_coord(&r.w_lo) != Ordering::Less && at.cmp_coord(&r.w_hi) == Ordering::Less
        })
        .map(|r| r.u_lo.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(an: i64, ad: i64, bn: i64, bd: i64) -> ParamPair {
        ParamPair::from_ratios(an, ad, bn, bd).unwrap()
    }

    fn golden_pair(ap: i64, aq: i64, bp: i64, bq: i64) -> ParamPair {
        ParamPair::new(
            ExtendedReal::Exact(Surd::new(ap, aq, 2, 5).unwrap()),
            ExtendedReal::Exact(Surd::new(bp, bq, 2, 5).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn named_domains_pass_the_tiling_certificate() {
        for params in [
            pair(-1, 1, 0, 1),
            pair(-1, 1, 1, 1),
            pair(-1, 2, 1, 2),
            pair(-3, 8, 2, 3),
        ] {
            let d = build_domain(&params).unwrap();
            assert!(d.exact, "domain for {params} should be exact");
        }
        // (-g, g) and (-g, g^2).
        build_domain(&golden_pair(1, -1, -1, 1)).unwrap();
        build_domain(&golden_pair(1, -1, 3, -1)).unwrap();
    }

    #[test]
    fn closed_form_family_matches_the_worked_example() {
        let params = pair(-4, 5, 2, 5);
        assert_eq!(family_translation_count(&params).unwrap(), 2);
        let d = build_domain(&params).unwrap();
        // Upper boundary: seven steps from -2 up to 2/3.
        assert_eq!(d.upper.len(), 7);
        assert_eq!(d.upper[0], upper(q(-2, 1), q(-3, 5), q(-1, 3)));
        assert_eq!(d.upper[1], upper(q(-3, 2), q(-1, 3), q(1, 4)));
        assert_eq!(d.upper[2], upper(q(-1, 1), q(1, 4), q(2, 3)));
        assert_eq!(d.upper[3], upper(q(-1, 2), q(2, 3), q(5, 4)));
        assert_eq!(d.upper[4], upper(q(0, 1), q(5, 4), q(5, 3)));
        assert_eq!(d.upper[5], upper(q(1, 2), q(5, 3), q(3, 1)));
        assert_eq!(d.upper[6], upper(q(2, 3), q(3, 1), Coord::PosInf));
        // Lower boundary: five steps from -1/3 up to 3.
        assert_eq!(d.lower.len(), 5);
        assert_eq!(d.lower[0], lower(q(-1, 3), Coord::NegInf, q(-5, 1)));
        assert_eq!(d.lower[1], lower(q(0, 1), q(-5, 1), q(-5, 2)));
        assert_eq!(d.lower[2], lower(q(1, 1), q(-5, 2), q(-3, 2)));
        assert_eq!(d.lower[3], lower(q(2, 1), q(-3, 2), q(-1, 2)));
        assert_eq!(d.lower[4], lower(q(3, 1), q(-1, 2), q(1, 5)));
    }

    #[test]
    fn family_rejects_degenerate_parameters() {
        // b - a = 1 collapses the construction.
        let err = build_domain(&pair(-2, 5, 3, 5)).unwrap_err();
        assert!(matches!(err, AbcfError::CaseMismatch(_)), "got {err}");
        // Too steep for the closed form: -1/a > b + 1.
        let err = build_domain(&pair(-1, 3, 2, 3)).unwrap_err();
        assert!(matches!(err, AbcfError::CaseMismatch(_)), "got {err}");
        // Outside the open square entirely.
        let err = build_domain(&pair(-3, 2, 1, 2)).unwrap_err();
        assert!(matches!(err, AbcfError::UnsupportedCase(_)), "got {err}");
        // Floats are not certifiable.
        let float_pair =
            ParamPair::new(ExtendedReal::Float(-0.8), ExtendedReal::Float(0.4)).unwrap();
        assert!(matches!(
            build_domain(&float_pair),
            Err(AbcfError::UnsupportedCase(_))
        ));
    }

    #[test]
    fn another_family_member_passes_certification() {
        // One-translation representative.
        let params = pair(-3, 5, 3, 4);
        assert_eq!(family_translation_count(&params).unwrap(), 1);
        build_domain(&params).unwrap();
        // Three-translation representative.
        let params = pair(-5, 6, 3, 10);
        assert_eq!(family_translation_count(&params).unwrap(), 3);
        build_domain(&params).unwrap();
    }

    #[test]
    fn family_rejects_a_shallow_slope() {
        // -1/a exceeds b + 1, outside the closed-form case.
        let err = build_domain(&pair(-2, 3, 2, 5)).unwrap_err();
        assert!(matches!(err, AbcfError::CaseMismatch(_)), "got {err}");
    }

    #[test]
    fn attractor_of_the_worked_example() {
        let params = pair(-4, 5, 2, 5);
        let d = build_domain(&params).unwrap();
        let lambda = lambda_of(&d, &params).unwrap();
        let expect_upper = vec![
            rect(q(-1, 2), q(0, 1), q(5, 4), q(2, 1)),
            rect(q(-1, 3), q(0, 1), q(2, 1), Coord::PosInf),
            rect(q(0, 1), q(1, 2), q(5, 3), q(3, 1)),
            rect(q(0, 1), q(2, 3), q(3, 1), Coord::PosInf),
        ];
        let expect_lower = vec![
            rect(q(0, 1), q(2, 3), Coord::NegInf, q(-4, 1)),
            rect(q(0, 1), q(1, 1), q(-4, 1), q(-5, 2)),
            rect(q(-1, 3), q(0, 1), Coord::NegInf, q(-5, 1)),
        ];
        let (eq, cell) =
            super::super::geometry::rect_sets_equal(&lambda.upper, &expect_upper).unwrap();
        assert!(eq, "upper attractor mismatch at {cell:?}");
        let (eq, cell) =
            super::super::geometry::rect_sets_equal(&lambda.lower, &expect_lower).unwrap();
        assert!(eq, "lower attractor mismatch at {cell:?}");
    }

    #[test]
    fn compact_coordinates_of_the_worked_example() {
        let params = pair(-4, 5, 2, 5);
        let d = build_domain(&params).unwrap();
        let hat = hat_lambda_of(&lambda_of(&d, &params).unwrap()).unwrap();
        let expect: Vec<Rect> = vec![
            rect(q(-3, 5), q(-1, 3), q(0, 1), q(1, 2)),
            rect(q(-1, 3), q(1, 4), q(0, 1), q(2, 3)),
            rect(q(1, 4), q(2, 5), q(0, 1), q(1, 1)),
            rect(q(-4, 5), q(-1, 2), q(-1, 2), q(0, 1)),
            rect(q(-1, 2), q(1, 5), q(-1, 3), q(0, 1)),
        ];
        let got: Vec<Rect> = hat.all_rects().map(|(r, _)| r.clone()).collect();
        let (eq, cell) = super::super::geometry::rect_sets_equal(&got, &expect).unwrap();
        assert!(eq, "compact-coordinate mismatch at {cell:?}");
    }

    #[test]
    fn symmetric_pair_attractor_has_golden_width() {
        let params = pair(-1, 2, 1, 2);
        let d = build_domain(&params).unwrap();
        let lambda = lambda_of(&d, &params).unwrap();
        let expect_upper = vec![rect(g5(1, -1), g5(3, -1), q(2, 1), Coord::PosInf)];
        let expect_lower = vec![rect(g5(-3, 1), g5(-1, 1), Coord::NegInf, q(-2, 1))];
        let (eq, _) =
            super::super::geometry::rect_sets_equal(&lambda.upper, &expect_upper).unwrap();
        assert!(eq, "upper attractor of the symmetric pair");
        let (eq, _) =
            super::super::geometry::rect_sets_equal(&lambda.lower, &expect_lower).unwrap();
        assert!(eq, "lower attractor of the symmetric pair");
    }

    #[test]
    fn boundary_levels_read_off_the_dual() {
        let params = pair(-1, 2, 1, 2);
        let d = build_domain(&params).unwrap();
        let xb = upper_level_left_of(&d, &q(1, 2)).unwrap();
        assert_eq!(xb, g5(-1, -1)); // -phi
        let xa = lower_level_right_of(&d, &q(-1, 2)).unwrap();
        assert_eq!(xa, g5(1, 1)); // phi
    }

    #[test]
    fn zero_b_domain_has_classical_attractor() {
        let params = pair(-1, 1, 0, 1);
        let d = build_domain(&params).unwrap();
        let lambda = lambda_of(&d, &params).unwrap();
        // (0,1] x [1, inf]: digits at least 2, full shift.
        let expect_upper = vec![rect(q(0, 1), q(1, 1), q(1, 1), Coord::PosInf)];
        let (eq, _) =
            super::super::geometry::rect_sets_equal(&lambda.upper, &expect_upper).unwrap();
        assert!(eq);
        assert!(lambda.lower.is_empty());
    }
}
