//! Boundary-orbit analysis: whether the orbits of the two endpoints close
//! into cycles, and how the upper and lower one-sided orbits of each
//! endpoint relate.
//!
//! Each endpoint spawns two orbits, one for each one-sided version of the
//! interval map. The first value where the two orbits agree decides the
//! classification: if the group elements carrying the endpoint to the
//! common value coincide, the cycle is strong; if they differ but the
//! orbits merge at zero, it is weak; otherwise the orbits are merely
//! eventually periodic.

use std::collections::HashSet;

use crate::cf::{cmp_loose, ParamPair, Side};
use crate::error::{AbcfError, Result};
use crate::exact::{applied_word_matrix, ExtendedReal, Letter, Surd};

/// Which parameter endpoint an orbit pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    A,
    B,
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::A => write!(f, "a"),
            Endpoint::B => write!(f, "b"),
        }
    }
}

/// How the two one-sided orbits of an endpoint relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleStatus {
    /// The orbits meet with equal carrying maps; the endpoint value is
    /// fixed by a nontrivial group element.
    StrongCycle,
    /// The orbits merge at zero with different carrying maps.
    WeakCycle,
    /// The orbits close up (or terminate) without a strong or weak meeting.
    EventuallyPeriodic,
}

impl std::fmt::Display for CycleStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CycleStatus::StrongCycle => write!(f, "strong-cycle"),
            CycleStatus::WeakCycle => write!(f, "weak-cycle"),
            CycleStatus::EventuallyPeriodic => write!(f, "eventually-periodic"),
        }
    }
}

/// One one-sided boundary orbit: the recorded values and the generator
/// letters producing them. `letters[0]` carries the endpoint to
/// `points[0]`, and `letters[k]` carries `points[k-1]` to `points[k]`.
#[derive(Clone, Debug)]
pub struct OrbitTrace {
    pub side: Side,
    pub points: Vec<ExtendedReal>,
    pub letters: Vec<Letter>,
}

/// Cycle analysis of one endpoint.
#[derive(Clone, Debug)]
pub struct CycleInfo {
    pub endpoint: Endpoint,
    pub status: CycleStatus,
    /// Indices `(i, j)` of the first common value in the upper and lower
    /// orbits, minimizing `i + j`.
    pub meet_indices: Option<(usize, usize)>,
    /// The first common value itself.
    pub cycle_end: Option<ExtendedReal>,
    pub upper: OrbitTrace,
    pub lower: OrbitTrace,
}

/// Hashable identity of an orbit value, used for cycle closure detection.
#[derive(Clone, PartialEq, Eq, Hash)]
enum OrbitKey {
    Infinity,
    Exact(Surd),
    Bits(u64),
}

fn key_of(x: &ExtendedReal) -> OrbitKey {
    match x {
        ExtendedReal::Infinity => OrbitKey::Infinity,
        ExtendedReal::Exact(s) => OrbitKey::Exact(s.clone()),
        ExtendedReal::Float(v) => OrbitKey::Bits(v.to_bits()),
    }
}

fn apply_letter(x: &ExtendedReal, letter: Letter) -> ExtendedReal {
    match letter {
        Letter::S => x.recip_neg(),
        Letter::T(k) => x.translate(k),
    }
}

/// One step of the one-sided map together with the generator applied.
/// Infinity steps to zero through the flip.
fn orbit_step(x: &ExtendedReal, params: &ParamPair, side: Side) -> (ExtendedReal, Letter) {
    if x.is_infinity() {
        return (x.recip_neg(), Letter::S);
    }
    use std::cmp::Ordering::*;
    let below_a = match side {
        Side::Upper => cmp_loose(x, params.a()) == Less,
        Side::Lower => cmp_loose(x, params.a()) != Greater,
    };
    if below_a {
        return (x.translate(1), Letter::T(1));
    }
    let in_interval = match side {
        Side::Upper => cmp_loose(x, params.b()) == Less,
        Side::Lower => cmp_loose(x, params.b()) != Greater,
    };
    if in_interval {
        (x.recip_neg(), Letter::S)
    } else {
        (x.translate(-1), Letter::T(-1))
    }
}

/// Runs one boundary orbit until it reaches zero, revisits one of its own
/// values, or exhausts the budget. Returns the trace and whether it closed.
fn run_orbit(
    endpoint_value: &ExtendedReal,
    seed_letter: Letter,
    side: Side,
    params: &ParamPair,
    max_steps: usize,
) -> (OrbitTrace, bool) {
    let seed = apply_letter(endpoint_value, seed_letter);
    let mut points = vec![seed.clone()];
    let mut letters = vec![seed_letter];
    let mut seen: HashSet<OrbitKey> = HashSet::new();
    seen.insert(key_of(&seed));
    let mut closed = false;
    while points.len() <= max_steps {
        let current = points.last().unwrap();
        if current.is_zero() {
            closed = true;
            break;
        }
        let (next, letter) = orbit_step(current, params, side);
        if seen.contains(&key_of(&next)) {
            closed = true;
            break;
        }
        seen.insert(key_of(&next));
        points.push(next);
        letters.push(letter);
    }
    (
        OrbitTrace {
            side,
            points,
            letters,
        },
        closed,
    )
}

/// The first common value of the two orbits, minimizing the combined index
/// (ties resolved toward the upper orbit).
fn first_meet(upper: &OrbitTrace, lower: &OrbitTrace) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, u) in upper.points.iter().enumerate() {
        for (j, w) in lower.points.iter().enumerate() {
            if let Some((bi, bj)) = best {
                if i + j > bi + bj || (i + j == bi + bj && i >= bi) {
                    continue;
                }
            }
            if u.same_point(w).unwrap_or(false) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn classify(endpoint: Endpoint, upper: OrbitTrace, lower: OrbitTrace) -> CycleInfo {
    let meet = first_meet(&upper, &lower);
    let (status, cycle_end) = match meet {
        None => (CycleStatus::EventuallyPeriodic, None),
        Some((i, j)) => {
            let value = upper.points[i].clone();
            let carry_up = applied_word_matrix(&upper.letters[..=i]);
            let carry_low = applied_word_matrix(&lower.letters[..=j]);
            let status = if carry_up == carry_low {
                CycleStatus::StrongCycle
            } else if value.is_zero() {
                CycleStatus::WeakCycle
            } else {
                CycleStatus::EventuallyPeriodic
            };
            (status, Some(value))
        }
    };
    CycleInfo {
        endpoint,
        status,
        meet_indices: meet,
        cycle_end,
        upper,
        lower,
    }
}

/// Analyzes the boundary orbits of both endpoints.
///
/// For each endpoint the upper orbit starts with the branch on its right
/// and the lower orbit with the branch on its left, and both run one-sided
/// thereafter. The budget bounds each orbit's length; if any orbit neither
/// terminates at zero nor revisits a value within it, the finiteness of
/// the boundary data cannot be certified and an error is returned. This is
/// the expected outcome for floating-point parameters.
pub fn detect_cycle(params: &ParamPair, max_steps: usize) -> Result<(CycleInfo, CycleInfo)> {
    let mut infos = Vec::with_capacity(2);
    for endpoint in [Endpoint::A, Endpoint::B] {
        let (value, up_seed, low_seed) = match endpoint {
            Endpoint::A => (params.a(), Letter::S, Letter::T(1)),
            Endpoint::B => (params.b(), Letter::T(-1), Letter::S),
        };
        let (upper, up_closed) = run_orbit(value, up_seed, Side::Upper, params, max_steps);
        let (lower, low_closed) = run_orbit(value, low_seed, Side::Lower, params, max_steps);
        if !up_closed || !low_closed {
            return Err(AbcfError::FinitenessUndetected(format!(
                "orbit of endpoint {endpoint} did not close within {max_steps} steps"
            )));
        }
        infos.push(classify(endpoint, upper, lower));
    }
    let b_info = infos.pop().unwrap();
    let a_info = infos.pop().unwrap();
    Ok((a_info, b_info))
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

    fn ratio(n: i64, d: i64) -> ExtendedReal {
        ExtendedReal::from_ratio(n, d).unwrap()
    }

    #[test]
    fn worked_example_has_strong_cycles_at_both_endpoints() {
        let (a_info, b_info) = detect_cycle(&pair(-4, 5, 2, 5), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::StrongCycle);
        assert_eq!(a_info.meet_indices, Some((2, 2)));
        assert_eq!(a_info.cycle_end, Some(ExtendedReal::from_int(-4)));
        assert_eq!(b_info.status, CycleStatus::StrongCycle);
        assert_eq!(b_info.meet_indices, Some((5, 3)));
        assert_eq!(b_info.cycle_end, Some(ExtendedReal::from_int(2)));
        let expect_upper = [
            ratio(-3, 5),
            ratio(5, 3),
            ratio(2, 3),
            ratio(-1, 3),
            ratio(3, 1),
            ratio(2, 1),
        ];
        for (got, want) in b_info.upper.points.iter().zip(expect_upper.iter()) {
            assert_eq!(got, want);
        }
        let expect_lower = [ratio(-5, 2), ratio(-3, 2), ratio(-1, 2), ratio(2, 1)];
        for (got, want) in b_info.lower.points.iter().zip(expect_lower.iter()) {
            assert_eq!(got, want);
        }
    }

    #[test]
    fn symmetric_pair_has_weak_cycles() {
        let (a_info, b_info) = detect_cycle(&pair(-1, 2, 1, 2), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::WeakCycle);
        assert_eq!(a_info.meet_indices, Some((2, 3)));
        assert!(a_info.cycle_end.unwrap().is_zero());
        assert_eq!(
            a_info.upper.points,
            vec![ratio(2, 1), ratio(1, 1), ratio(0, 1)]
        );
        assert_eq!(
            a_info.lower.points,
            vec![ratio(1, 2), ratio(-2, 1), ratio(-1, 1), ratio(0, 1)]
        );
        assert_eq!(b_info.status, CycleStatus::WeakCycle);
    }

    #[test]
    fn classical_pair_has_weak_cycles() {
        let (a_info, b_info) = detect_cycle(&pair(-1, 1, 0, 1), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::WeakCycle);
        assert_eq!(a_info.meet_indices, Some((1, 0)));
        assert_eq!(b_info.status, CycleStatus::WeakCycle);
        assert_eq!(
            b_info.lower.points,
            vec![ExtendedReal::Infinity, ExtendedReal::from_int(0)]
        );
        assert_eq!(
            b_info.upper.points,
            vec![ratio(-1, 1), ratio(1, 1), ratio(0, 1)]
        );
    }

    #[test]
    fn unit_pair_has_weak_cycles() {
        let (a_info, b_info) = detect_cycle(&pair(-1, 1, 1, 1), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::WeakCycle);
        assert_eq!(b_info.status, CycleStatus::WeakCycle);
    }

    #[test]
    fn second_self_dual_pair_has_weak_cycles() {
        let (a_info, b_info) = detect_cycle(&pair(-3, 8, 2, 3), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::WeakCycle);
        assert_eq!(a_info.meet_indices, Some((7, 10)));
        assert_eq!(
            a_info.upper.points,
            vec![
                ratio(8, 3),
                ratio(5, 3),
                ratio(2, 3),
                ratio(-1, 3),
                ratio(3, 1),
                ratio(2, 1),
                ratio(1, 1),
                ratio(0, 1)
            ]
        );
        assert_eq!(b_info.status, CycleStatus::WeakCycle);
        assert_eq!(b_info.meet_indices, Some((4, 5)));
    }

    #[test]
    fn golden_self_pair_is_eventually_periodic() {
        // a = -g, b = g * g with g the golden-section constant.
        let (a_info, b_info) = detect_cycle(&golden_pair(1, -1, 3, -1), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::EventuallyPeriodic);
        assert_eq!(a_info.meet_indices, None);
        assert_eq!(b_info.status, CycleStatus::EventuallyPeriodic);
        // The orbits touch at -g itself, carried by different words.
        assert_eq!(b_info.meet_indices, Some((0, 2)));
        let end = b_info.cycle_end.unwrap();
        assert_eq!(end, ExtendedReal::Exact(Surd::new(1, -1, 2, 5).unwrap()));
    }

    #[test]
    fn golden_dual_pair_is_eventually_periodic() {
        let (a_info, b_info) = detect_cycle(&golden_pair(1, -1, -1, 1), 100).unwrap();
        assert_eq!(a_info.status, CycleStatus::EventuallyPeriodic);
        assert_eq!(b_info.status, CycleStatus::EventuallyPeriodic);
    }

    #[test]
    fn float_parameters_cannot_certify_finiteness() {
        let params = ParamPair::new(ExtendedReal::Float(-0.77), ExtendedReal::Float(0.41)).unwrap();
        assert!(matches!(
            detect_cycle(&params, 200),
            Err(AbcfError::FinitenessUndetected(_))
        ));
    }
}
