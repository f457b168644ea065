//! Dual expansions: existence, the dual parameter pair read off the
//! domain's boundary levels, reflection verification, and the two-sided
//! coding law relating past digits to the dual expansion of the flipped
//! past endpoint.

use std::cmp::Ordering;

use crate::attractor::cycle::{CycleInfo, CycleStatus, Endpoint};
use crate::attractor::domain::{lower_level_right_of, upper_level_left_of};
use crate::attractor::{build_domain, detect_cycle, lambda_of, Coord, Rect, StepDomain};
use crate::cf::{expand, ParamPair};
use crate::error::{AbcfError, Result};
use crate::exact::{ExtendedReal, Surd};
use crate::reduction::{coding_window, GeodesicEndpoints};

/// Whether the parameter pair admits a dual expansion: neither endpoint may
/// carry a strong cycle.
pub fn has_dual(cycles: &(CycleInfo, CycleInfo)) -> bool {
    cycles.0.status != CycleStatus::StrongCycle && cycles.1.status != CycleStatus::StrongCycle
}

/// What certifies the dual verdict.
#[derive(Clone, Debug)]
pub enum DualWitness {
    /// This endpoint has a strong cycle, so no dual exists.
    StrongEndpoint(Endpoint),
    /// The boundary levels the dual parameters were read from.
    BoundaryLevels { x_a: Coord, x_b: Coord },
    /// A dual exists but no exact domain is available to compute it.
    Unavailable(String),
}

/// Outcome of the dual analysis of a parameter pair.
#[derive(Clone, Debug)]
pub struct DualReport {
    pub has_dual: bool,
    pub dual: Option<ParamPair>,
    pub self_dual: bool,
    pub witness: DualWitness,
}

fn level_reciprocal(level: &Coord) -> Result<ExtendedReal> {
    match level {
        Coord::NegInf | Coord::PosInf => Ok(ExtendedReal::from_int(0)),
        Coord::Exact(s) => {
            if s.is_zero() {
                return Err(AbcfError::InconsistentDomain(
                    "boundary level zero cannot be inverted".into(),
                ));
            }
            Ok(ExtendedReal::Exact(s.recip()?))
        }
        Coord::Float(_) => Err(AbcfError::UnsupportedCase(
            "refusing to read dual parameters from an approximate domain".into(),
        )),
    }
}

/// Reads the dual parameter pair off the exact domain: the reciprocal of
/// the upper boundary level just below `b` gives the dual `a`, and the
/// reciprocal of the lower boundary level just above `a` gives the dual
/// `b` (an absent lower component counts as an infinite level).
pub fn dual_params(params: &ParamPair, domain: &StepDomain) -> Result<ParamPair> {
    if !domain.exact {
        return Err(AbcfError::UnsupportedCase(
            "refusing to read dual parameters from an approximate domain".into(),
        ));
    }
    let a_c = Coord::from_extended(params.a(), Coord::NegInf);
    let b_c = Coord::from_extended(params.b(), Coord::PosInf);
    let x_b = upper_level_left_of(domain, &b_c).ok_or_else(|| {
        AbcfError::InconsistentDomain(format!(
            "upper component has no boundary level below b = {}",
            params.b()
        ))
    })?;
    let x_a = lower_level_right_of(domain, &a_c).unwrap_or(Coord::PosInf);
    let a_new = level_reciprocal(&x_b)?;
    let b_new = level_reciprocal(&x_a)?;
    let dual = ParamPair::new(a_new.clone(), b_new.clone())?;

    // Consistency relations tying the dual to the domain's extremes: the
    // widest upper level is 1 - b' and the widest lower level is -1 - a'.
    let top_level = domain
        .upper
        .iter()
        .map(|r| r.u_hi.clone())
        .max()
        .ok_or_else(|| AbcfError::InconsistentDomain("empty upper component".into()))?;
    let expect_top = b_new
        .as_surd()
        .map(|s| Surd::one().sub(s))
        .transpose()?
        .map(Coord::Exact);
    if let Some(expect) = expect_top {
        if top_level.cmp_coord(&expect) != Ordering::Equal {
            return Err(AbcfError::InconsistentDomain(format!(
                "widest upper level {top_level} does not match 1 - b' = {expect}"
            )));
        }
    }
    if let Some(bottom_level) = domain.lower.iter().map(|r| r.u_lo.clone()).min() {
        let expect_bottom = a_new
            .as_surd()
            .map(|s| Surd::from_int(-1).sub(s))
            .transpose()?
            .map(Coord::Exact);
        if let Some(expect) = expect_bottom {
            if bottom_level.cmp_coord(&expect) != Ordering::Equal {
                return Err(AbcfError::InconsistentDomain(format!(
                    "widest lower level {bottom_level} does not match -1 - a' = {expect}"
                )));
            }
        }
    }
    Ok(dual)
}

/// Interior horizontal boundary heights that contradict the existence of a
/// dual: lower-component heights strictly between `a` and `0`, and
/// upper-component heights strictly between `0` and `b`. Empty for every
/// dual-admissible pair.
pub fn level_gap_violations(domain: &StepDomain, params: &ParamPair) -> Vec<Coord> {
    let a_c = Coord::from_extended(params.a(), Coord::NegInf);
    let b_c = Coord::from_extended(params.b(), Coord::PosInf);
    let zero = Coord::from_int(0);
    let mut out: Vec<Coord> = Vec::new();
    let mut push = |c: &Coord, lo: &Coord, hi: &Coord| {
        if c.cmp_coord(lo) == Ordering::Greater
            && c.cmp_coord(hi) == Ordering::Less
            && !out.contains(c)
        {
            out.push(c.clone());
        }
    };
    for r in &domain.lower {
        push(&r.w_lo, &a_c, &zero);
        push(&r.w_hi, &a_c, &zero);
    }
    for r in &domain.upper {
        push(&r.w_lo, &zero, &b_c);
        push(&r.w_hi, &zero, &b_c);
    }
    out
}

/// Full dual analysis: cycle detection decides existence, and the exact
/// domain (when available) yields the dual parameters.
pub fn dual_report(params: &ParamPair, budget: usize) -> Result<DualReport> {
    let cycles = detect_cycle(params, budget)?;
    if cycles.0.status == CycleStatus::StrongCycle {
        return Ok(DualReport {
            has_dual: false,
            dual: None,
            self_dual: false,
            witness: DualWitness::StrongEndpoint(Endpoint::A),
        });
    }
    if cycles.1.status == CycleStatus::StrongCycle {
        return Ok(DualReport {
            has_dual: false,
            dual: None,
            self_dual: false,
            witness: DualWitness::StrongEndpoint(Endpoint::B),
        });
    }
    match build_domain(params) {
        Ok(domain) => {
            let violations = level_gap_violations(&domain, params);
            if !violations.is_empty() {
                return Err(AbcfError::InconsistentDomain(format!(
                    "dual-admissible pair {params} has interior boundary heights {:?}",
                    violations.iter().map(|c| c.to_string()).collect::<Vec<_>>()
                )));
            }
            let dual = dual_params(params, &domain)?;
            let self_dual = dual.a().same_point(params.a()).unwrap_or(false)
                && dual.b().same_point(params.b()).unwrap_or(false);
            let a_c = Coord::from_extended(params.a(), Coord::NegInf);
            let b_c = Coord::from_extended(params.b(), Coord::PosInf);
            let witness = DualWitness::BoundaryLevels {
                x_a: lower_level_right_of(&domain, &a_c).unwrap_or(Coord::PosInf),
                x_b: upper_level_left_of(&domain, &b_c).unwrap_or(Coord::NegInf),
            };
            Ok(DualReport {
                has_dual: true,
                dual: Some(dual),
                self_dual,
                witness,
            })
        }
        Err(e) => Ok(DualReport {
            has_dual: true,
            dual: None,
            self_dual: false,
            witness: DualWitness::Unavailable(e.to_string()),
        }),
    }
}

/// The reflection `(u, w) -> (-w, -u)` of a domain; it preserves the
/// component split.
pub fn reflect_domain(domain: &StepDomain) -> StepDomain {
    let refl = |rects: &[Rect]| -> Vec<Rect> {
        rects
            .iter()
            .map(|r| Rect {
                u_lo: r.w_hi.neg(),
                u_hi: r.w_lo.neg(),
                w_lo: r.u_hi.neg(),
                w_hi: r.u_lo.neg(),
            })
            .collect()
    };
    StepDomain {
        upper: refl(&domain.upper),
        lower: refl(&domain.lower),
        exact: domain.exact,
    }
}

/// Certifies that `dual` is the dual of `params`: the boundary levels of
/// the exact domain must reproduce it, and the reflection of the dual
/// domain must coincide with the primal domain rectangle for rectangle.
pub fn verify_duality(params: &ParamPair, dual: &ParamPair) -> Result<()> {
    let domain = build_domain(params)?;
    let computed = dual_params(params, &domain)?;
    let matches = computed.a().same_point(dual.a()).unwrap_or(false)
        && computed.b().same_point(dual.b()).unwrap_or(false);
    if !matches {
        return Err(AbcfError::InconsistentDomain(format!(
            "boundary levels of {params} give the dual {computed}, not {dual}"
        )));
    }
    let dual_domain = build_domain(dual)?;
    let reflected = reflect_domain(&dual_domain);
    let (eq, witness) =
        crate::attractor::geometry::rect_sets_equal(&domain.upper, &reflected.upper)?;
    if !eq {
        return Err(AbcfError::InconsistentDomain(format!(
            "upper components differ near {}",
            witness.unwrap()
        )));
    }
    let (eq, witness) =
        crate::attractor::geometry::rect_sets_equal(&domain.lower, &reflected.lower)?;
    if !eq {
        return Err(AbcfError::InconsistentDomain(format!(
            "lower components differ near {}",
            witness.unwrap()
        )));
    }
    Ok(())
}

/// Verifies the two-sided coding law on one geodesic: the `k` past digits
/// of its coding window, read backwards, must equal the first `k` digits
/// of the dual expansion of `1/u` at the window's anchor.
pub fn juxtaposition_check(
    g: &GeodesicEndpoints,
    params: &ParamPair,
    dual: &ParamPair,
    k: usize,
    budget: usize,
) -> Result<bool> {
    let domain = build_domain(params)?;
    let lambda = lambda_of(&domain, params)?;
    let (window, anchor) = coding_window(g, params, &lambda, k, budget)?;
    if anchor.u.is_zero() {
        return Err(AbcfError::InversionFailed(
            "anchor with zero past endpoint has no dual expansion".into(),
        ));
    }
    let inv_u = anchor.u.recip_neg().neg();
    let expansion = expand(&inv_u, dual, k + 8)?;
    let dual_digits = expansion.digits_prefix(k)?;
    let past = &window[..k];
    Ok((0..k).all(|i| dual_digits[i] == past[k - 1 - i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(an: i64, ad: i64, bn: i64, bd: i64) -> ParamPair {
        ParamPair::from_ratios(an, ad, bn, bd).unwrap()
    }

    fn golden(p: i64, q: i64) -> ExtendedReal {
        ExtendedReal::Exact(Surd::new(p, q, 2, 5).unwrap())
    }

    fn hurwitz() -> ParamPair {
        pair(-1, 2, 1, 2)
    }

    fn golden_dual() -> ParamPair {
        ParamPair::new(golden(1, -1), golden(-1, 1)).unwrap()
    }

    fn golden_self() -> ParamPair {
        ParamPair::new(golden(1, -1), golden(3, -1)).unwrap()
    }

    #[test]
    fn strong_cycles_forbid_a_dual() {
        let report = dual_report(&pair(-4, 5, 2, 5), 100).unwrap();
        assert!(!report.has_dual);
        assert!(report.dual.is_none());
        assert!(matches!(
            report.witness,
            DualWitness::StrongEndpoint(Endpoint::A)
        ));
    }

    #[test]
    fn symmetric_pair_and_golden_pair_are_mutually_dual() {
        let report = dual_report(&hurwitz(), 100).unwrap();
        assert!(report.has_dual);
        assert!(!report.self_dual);
        let dual = report.dual.unwrap();
        assert!(dual.a().same_point(golden_dual().a()).unwrap());
        assert!(dual.b().same_point(golden_dual().b()).unwrap());
        let back = dual_report(&golden_dual(), 100).unwrap().dual.unwrap();
        assert!(back.a().same_point(hurwitz().a()).unwrap());
        assert!(back.b().same_point(hurwitz().b()).unwrap());
    }

    #[test]
    fn the_self_dual_pairs_report_themselves() {
        for params in [
            pair(-1, 1, 0, 1),
            pair(-1, 1, 1, 1),
            pair(-3, 8, 2, 3),
            golden_self(),
        ] {
            let report = dual_report(&params, 100).unwrap();
            assert!(report.has_dual, "{params} should admit a dual");
            assert!(report.self_dual, "{params} should be self-dual");
        }
    }

    #[test]
    fn weak_pair_without_exact_domain_reports_unavailable() {
        let report = dual_report(&pair(-1, 3, 2, 3), 100).unwrap();
        assert!(report.has_dual);
        assert!(report.dual.is_none());
        assert!(matches!(report.witness, DualWitness::Unavailable(_)));
    }

    #[test]
    fn reflection_certifies_the_dual_pairs() {
        verify_duality(&hurwitz(), &golden_dual()).unwrap();
        verify_duality(&golden_dual(), &hurwitz()).unwrap();
        for params in [
            pair(-1, 1, 0, 1),
            pair(-1, 1, 1, 1),
            pair(-3, 8, 2, 3),
            golden_self(),
        ] {
            verify_duality(&params, &params).unwrap();
        }
    }

    #[test]
    fn perturbed_dual_fails_with_a_witness() {
        // a' + 1/1000 stays exact in the same field.
        let perturbed = ParamPair::new(
            ExtendedReal::Exact(Surd::new(501, -500, 1000, 5).unwrap()),
            golden(-1, 1),
        )
        .unwrap();
        let err = verify_duality(&hurwitz(), &perturbed).unwrap_err();
        assert!(matches!(err, AbcfError::InconsistentDomain(_)), "got {err}");
    }

    #[test]
    fn dual_admissible_domains_have_no_interior_heights() {
        for params in [hurwitz(), golden_dual(), golden_self(), pair(-3, 8, 2, 3)] {
            let domain = build_domain(&params).unwrap();
            assert!(level_gap_violations(&domain, &params).is_empty());
        }
        let no_dual = pair(-4, 5, 2, 5);
        let domain = build_domain(&no_dual).unwrap();
        assert!(!level_gap_violations(&domain, &no_dual).is_empty());
    }

    #[test]
    fn past_digits_reverse_into_the_dual_expansion() {
        // Anchor with both endpoints fixed by T^4 S and T^-4 S respectively.
        let g = GeodesicEndpoints::new(
            ExtendedReal::Exact(Surd::new(-2, 1, 1, 5).unwrap()),
            ExtendedReal::Exact(Surd::new(2, 1, 1, 5).unwrap()),
        )
        .unwrap();
        assert!(juxtaposition_check(&g, &hurwitz(), &golden_dual(), 4, 100).unwrap());
    }
}
