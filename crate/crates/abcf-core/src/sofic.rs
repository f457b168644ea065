//! Symbolic dynamics of the two-sided digit shift.
//!
//! The attractor is sliced into cells on which the first digit of the
//! future expansion is constant. Away from the step corners each slice is
//! a single rectangle; near them a slice dissolves into finitely many
//! rectangles, which become separate cells with subscripted labels. All
//! but finitely many digits behave identically, so the large digits of
//! each sign are summarized by one tail family per component.
//!
//! The return map sends each cell onto a vertical strip. When every
//! nonempty intersection of an image strip with a cell is transversal
//! (the image spans the full height of the cell and stays inside its
//! width) the cell-to-cell hitting matrix is a genuine topological Markov
//! structure for the coding, and the digit shift is its subscript-erasing
//! factor. Parameters whose boundary orbits ruin transversality are
//! reported as [`AbcfError::NotMarkov`].

use std::cmp::Ordering;

use crate::attractor::geometry::{coalesce, flip_interval};
use crate::attractor::{detect_cycle, Component, Coord, CycleStatus, Rect, StepDomain};
use crate::cf::{floor_ab, ParamPair};
use crate::duality::has_dual;
use crate::error::{AbcfError, Result};
use crate::exact::ExtendedReal;

/// Orbit budget for the boundary-cycle hypothesis check.
const CYCLE_BUDGET: usize = 400;

/// One piece of the refined partition: the subset of a component on which
/// the first digit of `w` equals `digit`. When the slice for a digit
/// breaks into several rectangles, each carries a subscript, counted from
/// the component's finite side outward.
#[derive(Clone, Debug)]
pub struct Cell {
    pub digit: i64,
    pub sub: Option<usize>,
    pub rect: Rect,
    pub component: Component,
}

impl Cell {
    /// Label in the extended alphabet, `"3"` or `"3_2"`.
    pub fn label(&self) -> String {
        match self.sub {
            Some(i) => format!("{}_{}", self.digit, i),
            None => format!("{}", self.digit),
        }
    }
}

/// The digits of one sign beyond the last step corner. Every such digit
/// `n` cuts an identical cell `[u_lo, u_hi] x strip(n)`, so a single
/// symbol stands for the whole family.
#[derive(Clone, Debug)]
pub struct TailFamily {
    pub component: Component,
    /// First digit of the family; the family covers `n >= start_digit`
    /// on the upper component and `n <= start_digit` on the lower.
    pub start_digit: i64,
    pub u_lo: Coord,
    pub u_hi: Coord,
}

impl TailFamily {
    pub fn label(&self) -> String {
        match self.component {
            Component::Upper => format!(">={}", self.start_digit),
            Component::Lower => format!("<={}", self.start_digit),
        }
    }

    /// True when the digit belongs to this family.
    pub fn covers(&self, digit: i64) -> bool {
        match self.component {
            Component::Upper => digit >= self.start_digit,
            Component::Lower => digit <= self.start_digit,
        }
    }
}

/// The attractor sliced along first digits: explicit cells near the step
/// corners plus one tail family per unbounded component.
///
/// Symbols are indexed `0..cells.len()` for the cells followed by the
/// families, and this indexing is shared with [`TransitionMatrix`].
#[derive(Clone, Debug)]
pub struct RefinedPartition {
    pub cells: Vec<Cell>,
    pub families: Vec<TailFamily>,
    /// True when the underlying domain had float corners, so all slicing
    /// here inherited the float tolerance instead of exact arithmetic.
    pub approximate: bool,
    params: ParamPair,
}

impl RefinedPartition {
    pub fn symbol_count(&self) -> usize {
        self.cells.len() + self.families.len()
    }

    pub fn symbol_label(&self, index: usize) -> String {
        if index < self.cells.len() {
            self.cells[index].label()
        } else {
            self.families[index - self.cells.len()].label()
        }
    }

    /// All symbols whose digit projection equals `digit`.
    pub fn symbols_for_digit(&self, digit: i64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.digit == digit)
            .map(|(i, _)| i)
            .collect();
        for (j, fam) in self.families.iter().enumerate() {
            if fam.covers(digit) {
                out.push(self.cells.len() + j);
            }
        }
        out
    }

    /// The symbol whose cell contains the point, preferring explicit
    /// cells; boundary points may lie in two cells, in which case the
    /// first in index order wins.
    pub fn locate(&self, u: &ExtendedReal, w: &ExtendedReal) -> Option<usize> {
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.rect.contains_point(u, w) {
                return Some(i);
            }
        }
        let digit = floor_ab(w, &self.params).ok()?;
        for (j, fam) in self.families.iter().enumerate() {
            if !fam.covers(digit) {
                continue;
            }
            let (lo, hi) = strip_of_digit(digit, &self.params);
            let rect = Rect {
                u_lo: fam.u_lo.clone(),
                u_hi: fam.u_hi.clone(),
                w_lo: lo,
                w_hi: hi,
            };
            if rect.contains_point(u, w) {
                return Some(self.cells.len() + j);
            }
        }
        None
    }
}

/// The half-open digit strip `{w : first digit of w is n}`, returned as
/// its closure `[lo, hi]`; consumers that need half-openness compare
/// against `hi` strictly.
fn strip_of_digit(n: i64, params: &ParamPair) -> (Coord, Coord) {
    let (lo, hi) = if n >= 1 {
        (params.b().translate(n - 1), params.b().translate(n))
    } else if n <= -1 {
        (params.a().translate(n), params.a().translate(n + 1))
    } else {
        (params.a().clone(), params.b().clone())
    };
    (
        Coord::from_extended(&lo, Coord::NegInf),
        Coord::from_extended(&hi, Coord::PosInf),
    )
}

fn digit_of_coord(w: &Coord, params: &ParamPair) -> Result<i64> {
    let x = w
        .as_extended()
        .ok_or_else(|| AbcfError::InconsistentDomain("digit of an infinite coordinate".into()))?;
    floor_ab(&x, params)
}

/// Slices one component into digit cells and a tail family.
fn slice_component(
    rects: &[Rect],
    component: Component,
    params: &ParamPair,
    cells: &mut Vec<Cell>,
    families: &mut Vec<TailFamily>,
) -> Result<()> {
    if rects.is_empty() {
        return Ok(());
    }
    let upper = component == Component::Upper;

    // The finite end of the component and the last step corner before the
    // infinite end.
    let mut near_end: Option<Coord> = None;
    let mut far_corner: Option<Coord> = None;
    for r in rects {
        for c in [&r.w_lo, &r.w_hi] {
            if !c.is_finite() {
                continue;
            }
            near_end = Some(match near_end.take() {
                None => c.clone(),
                Some(m) => {
                    if upper {
                        m.min_coord(c.clone())
                    } else {
                        m.max_coord(c.clone())
                    }
                }
            });
            far_corner = Some(match far_corner.take() {
                None => c.clone(),
                Some(m) => {
                    if upper {
                        m.max_coord(c.clone())
                    } else {
                        m.min_coord(c.clone())
                    }
                }
            });
        }
    }
    let (near_end, far_corner) = match (near_end, far_corner) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(AbcfError::InconsistentDomain(
                "component without finite step corners".into(),
            ))
        }
    };

    // The cells beyond the last corner: the union of the rectangles that
    // reach the infinite end, which must form one interval in `u`.
    let mut tail_rects: Vec<Rect> = rects
        .iter()
        .filter(|r| {
            if upper {
                !r.w_hi.is_finite()
            } else {
                !r.w_lo.is_finite()
            }
        })
        .cloned()
        .collect();
    if tail_rects.is_empty() {
        return Err(AbcfError::InconsistentDomain(
            "component does not reach the infinite end".into(),
        ));
    }
    tail_rects.sort_by(|x, y| x.u_lo.cmp_coord(&y.u_lo));
    let mut span_lo = tail_rects[0].u_lo.clone();
    let mut span_hi = tail_rects[0].u_hi.clone();
    for r in &tail_rects[1..] {
        if r.u_lo.cmp_coord(&span_hi) == Ordering::Greater {
            return Err(AbcfError::UnsupportedCase(format!(
                "tail cells are disconnected in u between {span_hi} and {}",
                r.u_lo
            )));
        }
        span_lo = span_lo.min_coord(r.u_lo.clone());
        span_hi = span_hi.max_coord(r.u_hi.clone());
    }

    // First digit at the finite end, and the first digit whose whole
    // strip clears the last corner.
    let digit_near = digit_of_coord(&near_end, params)?;
    let digit_far = digit_of_coord(&far_corner, params)?;
    let (strip_far_lo, strip_far_hi) = strip_of_digit(digit_far, params);
    let start_digit = if upper {
        if strip_far_lo == far_corner {
            digit_far
        } else {
            digit_far + 1
        }
    } else if strip_far_hi == far_corner {
        digit_far
    } else {
        digit_far - 1
    };
    if (start_digit - digit_near).abs() > 10_000 {
        return Err(AbcfError::UnsupportedCase(format!(
            "digit range {digit_near}..{start_digit} is too wide to enumerate"
        )));
    }

    let mut n = digit_near;
    while n != start_digit {
        let (s_lo, s_hi) = strip_of_digit(n, params);
        let mut pieces: Vec<Rect> = Vec::new();
        for r in rects {
            let lo = s_lo.clone().max_coord(r.w_lo.clone());
            let hi = s_hi.clone().min_coord(r.w_hi.clone());
            if lo.cmp_coord(&hi) == Ordering::Less {
                pieces.push(Rect {
                    u_lo: r.u_lo.clone(),
                    u_hi: r.u_hi.clone(),
                    w_lo: lo,
                    w_hi: hi,
                });
            }
        }
        let mut pieces = coalesce(pieces);
        pieces.sort_by(|x, y| {
            x.w_lo
                .cmp_coord(&y.w_lo)
                .then_with(|| x.u_lo.cmp_coord(&y.u_lo))
        });
        let many = pieces.len() > 1;
        for (i, rect) in pieces.into_iter().enumerate() {
            cells.push(Cell {
                digit: n,
                sub: if many { Some(i + 1) } else { None },
                rect,
                component,
            });
        }
        n += if upper { 1 } else { -1 };
    }

    families.push(TailFamily {
        component,
        start_digit,
        u_lo: span_lo,
        u_hi: span_hi,
    });
    Ok(())
}

/// Builds the refined digit partition of the attractor.
///
/// Float-cornered domains are sliced with the same logic and flagged
/// `approximate`; the matrix built from such a partition certifies
/// nothing, it only mirrors the float picture.
pub fn build_partition(lambda: &StepDomain, params: &ParamPair) -> Result<RefinedPartition> {
    let mut cells = Vec::new();
    let mut families = Vec::new();
    slice_component(
        &lambda.upper,
        Component::Upper,
        params,
        &mut cells,
        &mut families,
    )?;
    slice_component(
        &lambda.lower,
        Component::Lower,
        params,
        &mut cells,
        &mut families,
    )?;
    Ok(RefinedPartition {
        cells,
        families,
        approximate: !lambda.exact,
        params: params.clone(),
    })
}

/// The image of a source symbol under the return map `x -> -1/(x - n)`:
/// one interval in `u` and one or two rays or intervals in `w`.
struct SymbolImage {
    u_lo: Coord,
    u_hi: Coord,
    w_parts: Vec<(Coord, Coord)>,
}

fn image_of(u_lo: &Coord, u_hi: &Coord, w_lo: &Coord, w_hi: &Coord, n: i64) -> Result<SymbolImage> {
    let tu_lo = u_lo.translate(-n);
    let tu_hi = u_hi.translate(-n);
    let (iu_lo, iu_hi) = flip_interval(&tu_lo, &tu_hi).map_err(|_| {
        AbcfError::NotMarkov(format!(
            "cell u-side [{u_lo}, {u_hi}] contains its own digit {n}, so its image wraps"
        ))
    })?;
    let tw_lo = w_lo.translate(-n);
    let tw_hi = w_hi.translate(-n);
    let zero = Coord::from_int(0);
    let mut w_parts = Vec::new();
    if tw_lo.cmp_coord(&zero) == Ordering::Less && tw_hi.cmp_coord(&zero) == Ordering::Greater {
        // The strip contains the pole, so the image runs through infinity:
        // a ray up from the negative side and one down from the positive.
        let (lo, hi) = flip_interval(&tw_lo, &zero)?;
        w_parts.push((lo, hi));
        let (lo, hi) = flip_interval(&zero, &tw_hi)?;
        w_parts.push((lo, hi));
    } else {
        let (lo, hi) = flip_interval(&tw_lo, &tw_hi)?;
        w_parts.push((lo, hi));
    }
    Ok(SymbolImage {
        u_lo: iu_lo,
        u_hi: iu_hi,
        w_parts,
    })
}

/// How two intervals overlap: with positive length, in a single boundary
/// point, or not at all.
#[derive(PartialEq, Eq, Clone, Copy)]
enum Overlap {
    Positive,
    Touch,
    Empty,
}

fn overlap(a_lo: &Coord, a_hi: &Coord, b_lo: &Coord, b_hi: &Coord) -> Overlap {
    let lo = a_lo.clone().max_coord(b_lo.clone());
    let hi = a_hi.clone().min_coord(b_hi.clone());
    match lo.cmp_coord(&hi) {
        Ordering::Less => Overlap::Positive,
        Ordering::Equal => Overlap::Touch,
        Ordering::Greater => Overlap::Empty,
    }
}

fn contains_interval(outer_lo: &Coord, outer_hi: &Coord, lo: &Coord, hi: &Coord) -> bool {
    outer_lo.cmp_coord(lo) != Ordering::Greater && hi.cmp_coord(outer_hi) != Ordering::Greater
}

/// The boolean hitting structure of the return map on the refined
/// partition, over the same symbol indexing as the partition.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<bool>>,
    /// Intersections that degenerate to a boundary segment; classified as
    /// empty, recorded for inspection.
    pub edge_touches: Vec<String>,
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, from: usize, to: usize) -> bool {
        self.entries[from][to]
    }
}

/// The data of one symbol needed for the intersection tests.
struct SymbolShape {
    digit: i64,
    u_lo: Coord,
    u_hi: Coord,
    w_lo: Coord,
    w_hi: Coord,
    component: Component,
    family: bool,
}

fn shapes_of(part: &RefinedPartition) -> Vec<SymbolShape> {
    let mut shapes: Vec<SymbolShape> = part
        .cells
        .iter()
        .map(|c| SymbolShape {
            digit: c.digit,
            u_lo: c.rect.u_lo.clone(),
            u_hi: c.rect.u_hi.clone(),
            w_lo: c.rect.w_lo.clone(),
            w_hi: c.rect.w_hi.clone(),
            component: c.component,
            family: false,
        })
        .collect();
    for fam in &part.families {
        let (w_lo, w_hi) = strip_of_digit(fam.start_digit, &part.params);
        shapes.push(SymbolShape {
            digit: fam.start_digit,
            u_lo: fam.u_lo.clone(),
            u_hi: fam.u_hi.clone(),
            w_lo,
            w_hi,
            component: fam.component,
            family: true,
        });
    }
    shapes
}

/// Computes the transition matrix, verifying transversality of every
/// nonempty intersection.
///
/// A tail family is a single row and column: its members share one strip
/// shape modulo translation, their images differ only by `u` intervals
/// shrinking monotonically toward `0`, and the checks quantify over the
/// whole family. A partial overlap anywhere, or a family whose members
/// disagree, is reported as [`AbcfError::NotMarkov`].
pub fn transition_matrix(part: &RefinedPartition) -> Result<TransitionMatrix> {
    // The coding theory behind the matrix requires a dual expansion. A
    // strong boundary cycle bends a component boundary into a step, the
    // dual disappears, and the cells stop being squares; such parameters
    // are rejected here even when the finitely many explicit
    // intersections happen to look clean.
    if !part.approximate {
        let cycles = detect_cycle(&part.params, CYCLE_BUDGET)?;
        if !has_dual(&cycles) {
            let strong: Vec<String> = [&cycles.0, &cycles.1]
                .iter()
                .filter(|c| c.status == CycleStatus::StrongCycle)
                .map(|c| c.endpoint.to_string())
                .collect();
            let which = if strong.len() == 1 {
                format!("endpoint {} has a strong cycle", strong[0])
            } else {
                format!("endpoints {} have strong cycles", strong.join(" and "))
            };
            return Err(AbcfError::NotMarkov(format!(
                "{which}, so there is no dual expansion and no Markov \
                 structure certificate"
            )));
        }
    }
    let shapes = shapes_of(part);
    let zero = Coord::from_int(0);
    let mut entries = vec![vec![false; shapes.len()]; shapes.len()];
    let mut edge_touches = Vec::new();

    for (s, src) in shapes.iter().enumerate() {
        let img = image_of(&src.u_lo, &src.u_hi, &src.w_lo, &src.w_hi, src.digit)?;
        // Members of a family source have u images nested between the
        // representative's and 0, so emptiness and containment are tested
        // against the hull with 0 adjoined.
        let (hull_lo, hull_hi) = if src.family {
            (
                img.u_lo.clone().min_coord(zero.clone()),
                img.u_hi.clone().max_coord(zero.clone()),
            )
        } else {
            (img.u_lo.clone(), img.u_hi.clone())
        };

        for (t, tgt) in shapes.iter().enumerate() {
            let u_ov = overlap(&hull_lo, &hull_hi, &tgt.u_lo, &tgt.u_hi);
            let mut w_ov = Overlap::Empty;
            let mut covering_part: Option<&(Coord, Coord)> = None;
            for p in &img.w_parts {
                match overlap(&p.0, &p.1, &tgt.w_lo, &tgt.w_hi) {
                    Overlap::Positive => {
                        w_ov = Overlap::Positive;
                        if contains_interval(&p.0, &p.1, &tgt.w_lo, &tgt.w_hi) {
                            covering_part = Some(p);
                        }
                    }
                    Overlap::Touch => {
                        if w_ov == Overlap::Empty {
                            w_ov = Overlap::Touch;
                        }
                    }
                    Overlap::Empty => {}
                }
            }

            if u_ov == Overlap::Empty || w_ov == Overlap::Empty {
                continue;
            }
            if u_ov == Overlap::Touch || w_ov == Overlap::Touch {
                edge_touches.push(format!(
                    "{} -> {}",
                    part.symbol_label(s),
                    part.symbol_label(t)
                ));
                continue;
            }

            // Positive intersection: it must be transversal.
            let u_inside = contains_interval(&tgt.u_lo, &tgt.u_hi, &img.u_lo, &img.u_hi);
            let family_src_ok =
                !src.family || contains_interval(&tgt.u_lo, &tgt.u_hi, &zero, &zero);
            let w_covered = match covering_part {
                Some(p) => {
                    if tgt.family {
                        // Every member strip beyond the first must stay
                        // covered, so the part has to reach the infinite
                        // end of the component.
                        match tgt.component {
                            Component::Upper => !p.1.is_finite(),
                            Component::Lower => !p.0.is_finite(),
                        }
                    } else {
                        true
                    }
                }
                None => false,
            };
            if u_inside && family_src_ok && w_covered {
                entries[s][t] = true;
            } else {
                return Err(AbcfError::NotMarkov(format!(
                    "image of {} crosses {} without spanning it \
                     (u inside: {u_inside}, family u: {family_src_ok}, w covered: {w_covered})",
                    part.symbol_label(s),
                    part.symbol_label(t)
                )));
            }
        }
    }

    let labels = (0..shapes.len()).map(|i| part.symbol_label(i)).collect();
    Ok(TransitionMatrix {
        labels,
        entries,
        edge_touches,
    })
}

/// Whether a digit word labels a path in the transition structure.
///
/// The word is read as consecutive future digits. A zero digit after the
/// first position can never occur in a two-sided coding and is rejected
/// as malformed rather than merely inadmissible.
pub fn is_admissible(
    digits: &[i64],
    tm: &TransitionMatrix,
    part: &RefinedPartition,
) -> Result<bool> {
    if digits.is_empty() {
        return Ok(true);
    }
    for (i, d) in digits.iter().enumerate() {
        if *d == 0 && i >= 1 {
            return Err(AbcfError::MalformedSequence(format!(
                "digit 0 at position {i} cannot follow a flip"
            )));
        }
    }
    let mut states = part.symbols_for_digit(digits[0]);
    if states.is_empty() {
        return Ok(false);
    }
    for d in &digits[1..] {
        let mut next: Vec<usize> = Vec::new();
        for t in part.symbols_for_digit(*d) {
            if states.iter().any(|&s| tm.entry(s, t)) {
                next.push(t);
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        states = next;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::domain::{build_domain, lambda_of};
    use crate::exact::Surd;

    fn setup(params: &ParamPair) -> (RefinedPartition, TransitionMatrix) {
        let domain = build_domain(params).unwrap();
        let lambda = lambda_of(&domain, params).unwrap();
        let part = build_partition(&lambda, params).unwrap();
        let tm = transition_matrix(&part).unwrap();
        (part, tm)
    }

    fn admits(word: &[i64], tm: &TransitionMatrix, part: &RefinedPartition) -> bool {
        is_admissible(word, tm, part).unwrap()
    }

    #[test]
    fn minus_expansion_digits_form_a_full_shift() {
        let params = ParamPair::from_ratios(-1, 1, 0, 1).unwrap();
        let (part, tm) = setup(&params);
        assert!(part.cells.is_empty());
        assert_eq!(part.families.len(), 1);
        let fam = &part.families[0];
        assert_eq!(fam.component, Component::Upper);
        assert_eq!(fam.start_digit, 2);
        assert_eq!(fam.u_lo, Coord::from_int(0));
        assert_eq!(fam.u_hi, Coord::from_int(1));
        assert_eq!(tm.size(), 1);
        assert!(tm.entry(0, 0));

        assert!(admits(&[2, 5, 17, 3, 2, 2], &tm, &part));
        assert!(!admits(&[3, 1, 4], &tm, &part));
        assert!(!admits(&[-2, 5], &tm, &part));
        assert!(matches!(
            is_admissible(&[2, 0, 2], &tm, &part),
            Err(AbcfError::MalformedSequence(_))
        ));
        assert!(admits(&[], &tm, &part));
    }

    #[test]
    fn nearest_integer_digits_alternate_sign_after_two() {
        let params = ParamPair::from_ratios(-1, 2, 1, 2).unwrap();
        let (part, tm) = setup(&params);
        assert_eq!(part.cells.len(), 2);
        assert_eq!(part.families.len(), 2);
        let plus = &part.cells[0];
        assert_eq!(plus.digit, 2);
        assert_eq!(plus.sub, None);
        assert_eq!(plus.rect.w_lo, Coord::from_int(2));
        assert_eq!(plus.rect.w_hi, Coord::from_ratio(5, 2));
        let g = Surd::new(-1, 1, 2, 5).unwrap();
        assert_eq!(plus.rect.u_lo, Coord::Exact(g.neg()));
        assert_eq!(
            plus.rect.u_hi,
            Coord::Exact(Surd::new(3, -1, 2, 5).unwrap())
        );
        let minus = &part.cells[1];
        assert_eq!(minus.digit, -2);
        assert_eq!(part.families[0].start_digit, 3);
        assert_eq!(part.families[1].start_digit, -3);

        // After +/-2 the next digit has the opposite sign; after a digit
        // of size three or more anything goes.
        let idx = |label: &str| tm.labels.iter().position(|l| l == label).unwrap();
        let (p2, m2, pf, mf) = (idx("2"), idx("-2"), idx(">=3"), idx("<=-3"));
        assert!(!tm.entry(p2, p2));
        assert!(tm.entry(p2, m2));
        assert!(!tm.entry(p2, pf));
        assert!(tm.entry(p2, mf));
        assert!(!tm.entry(m2, m2));
        assert!(tm.entry(m2, p2));
        assert!(tm.entry(m2, pf));
        assert!(!tm.entry(m2, mf));
        for t in 0..tm.size() {
            assert!(tm.entry(pf, t));
            assert!(tm.entry(mf, t));
        }

        assert!(admits(&[2, -2, 2, -2, 2], &tm, &part));
        assert!(!admits(&[2, 2], &tm, &part));
        assert!(!admits(&[-2, -2], &tm, &part));
        assert!(!admits(&[2, 3], &tm, &part));
        assert!(admits(&[3, 2, -5, 17, -2, 2], &tm, &part));
        assert!(admits(&[-100, 100], &tm, &part));
    }

    #[test]
    fn golden_pair_forbids_returning_to_two_after_threes() {
        let g = Surd::new(1, -1, 2, 5).unwrap();
        let g2 = Surd::new(3, -1, 2, 5).unwrap();
        let params = ParamPair::new(ExtendedReal::Exact(g), ExtendedReal::Exact(g2)).unwrap();
        let (part, tm) = setup(&params);

        // One plain cell for digit 2, three pieces for digit 3, and the
        // digit -2 slice degenerates to a segment, so the lower digits
        // start at -3.
        let labels: Vec<String> = (0..part.symbol_count())
            .map(|i| part.symbol_label(i))
            .collect();
        assert_eq!(labels, ["2", "3_1", "3_2", "3_3", ">=4", "<=-3"]);
        assert!(part.symbols_for_digit(-2).is_empty());
        let two = &part.cells[0];
        assert_eq!(two.rect.u_lo, Coord::Exact(Surd::new(-3, 1, 2, 5).unwrap()));
        assert_eq!(two.rect.u_hi, Coord::Exact(Surd::new(3, -1, 2, 5).unwrap()));
        assert_eq!(two.rect.w_lo, Coord::Exact(Surd::new(1, 1, 2, 5).unwrap()));
        assert_eq!(two.rect.w_hi, Coord::Exact(Surd::new(7, -1, 2, 5).unwrap()));

        // A block of threes after a two traps the orbit in the piece
        // that cannot return to two, so 2 3^k 2 is forbidden for every
        // k >= 0, even though 3 followed by 2 is fine elsewhere.
        assert!(!admits(&[2, 2], &tm, &part));
        assert!(!admits(&[2, 3, 2], &tm, &part));
        assert!(!admits(&[2, 3, 3, 3, 3, 2], &tm, &part));
        assert!(admits(&[4, 3, 2], &tm, &part));
        assert!(admits(&[-3, 2], &tm, &part));
        assert!(admits(&[2, -3, 4], &tm, &part));
        assert!(admits(&[3, 3, 3, 3], &tm, &part));
        assert!(admits(&[2, 3, -3], &tm, &part));
        assert!(!admits(&[2, -2], &tm, &part));
    }

    #[test]
    fn self_dual_rational_pair_subdivides_few_digits() {
        let params = ParamPair::from_ratios(-3, 8, 2, 3).unwrap();
        let (part, tm) = setup(&params);
        assert_eq!(part.families.len(), 2);
        assert_eq!(part.families[0].start_digit, 4);
        assert_eq!(part.families[1].start_digit, -4);

        // Per component, at most two digits break into several pieces.
        for component in [Component::Upper, Component::Lower] {
            let mut digits: Vec<i64> = part
                .cells
                .iter()
                .filter(|c| c.component == component && c.sub.is_some())
                .map(|c| c.digit)
                .collect();
            digits.dedup();
            assert!(digits.len() <= 2, "{component:?} subdivides {digits:?}");
        }

        // Cells of one digit do not overlap each other in the interior.
        for x in &part.cells {
            for y in &part.cells {
                if std::ptr::eq(x, y) || x.digit != y.digit {
                    continue;
                }
                let u = overlap(&x.rect.u_lo, &x.rect.u_hi, &y.rect.u_lo, &y.rect.u_hi);
                let w = overlap(&x.rect.w_lo, &x.rect.w_hi, &y.rect.w_lo, &y.rect.w_hi);
                assert!(
                    u != Overlap::Positive || w != Overlap::Positive,
                    "cells {} and {} overlap",
                    x.label(),
                    y.label()
                );
            }
        }

        // Random attractor points always land in some symbol, and the
        // located symbol carries the right digit.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut hits = 0usize;
        let domain = build_domain(&params).unwrap();
        let lambda = lambda_of(&domain, &params).unwrap();
        for _ in 0..4000 {
            let u = rng.gen_range(-0.7..0.5);
            let w = if rng.gen::<bool>() {
                rng.gen_range(1.4..40.0)
            } else {
                rng.gen_range(-40.0..-1.3)
            };
            let (ue, we) = (ExtendedReal::Float(u), ExtendedReal::Float(w));
            if !lambda.contains(&ue, &we) {
                continue;
            }
            let sym = part.locate(&ue, &we).expect("attractor point has a cell");
            let digit = floor_ab(&we, &params).unwrap();
            if sym < part.cells.len() {
                assert_eq!(part.cells[sym].digit, digit);
            } else {
                assert!(part.families[sym - part.cells.len()].covers(digit));
            }
            hits += 1;
        }
        assert!(hits > 200, "only {hits} sample points hit the attractor");
        assert!(!tm.entries.is_empty());
    }

    #[test]
    fn strong_cycle_parameters_are_rejected() {
        let params = ParamPair::from_ratios(-4, 5, 2, 5).unwrap();
        let domain = build_domain(&params).unwrap();
        let lambda = lambda_of(&domain, &params).unwrap();
        let part = build_partition(&lambda, &params).unwrap();
        assert!(!part.cells.is_empty());
        assert!(matches!(
            transition_matrix(&part),
            Err(AbcfError::NotMarkov(_))
        ));
    }

    #[test]
    fn coding_windows_are_admissible() {
        use crate::reduction::{coding_window, GeodesicEndpoints};
        use rand::Rng;
        use rand::SeedableRng;

        let g = Surd::new(1, -1, 2, 5).unwrap();
        let g2 = Surd::new(3, -1, 2, 5).unwrap();
        let pairs = [
            ParamPair::from_ratios(-1, 2, 1, 2).unwrap(),
            ParamPair::new(ExtendedReal::Exact(g), ExtendedReal::Exact(g2)).unwrap(),
        ];
        for params in &pairs {
            let domain = build_domain(params).unwrap();
            let lambda = lambda_of(&domain, params).unwrap();
            let part = build_partition(&lambda, params).unwrap();
            let tm = transition_matrix(&part).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
            let mut checked = 0usize;
            for _ in 0..200 {
                let u: f64 = rng.gen_range(-30.0..30.0);
                let w: f64 = rng.gen_range(-30.0..30.0);
                if (u - w).abs() < 0.5 {
                    continue;
                }
                let geo =
                    GeodesicEndpoints::new(ExtendedReal::Float(u), ExtendedReal::Float(w)).unwrap();
                let Ok((window, anchor)) = coding_window(&geo, params, &lambda, 3, 300) else {
                    continue;
                };
                assert!(admits(&window, &tm, &part), "window {window:?}");
                assert!(part.locate(&anchor.u, &anchor.w).is_some());
                checked += 1;
            }
            assert!(checked > 100, "only {checked} windows were produced");
        }
    }

    #[test]
    fn observed_expansion_words_are_admissible() {
        use crate::cf::expand;
        use rand::Rng;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        let g = Surd::new(1, -1, 2, 5).unwrap();
        let g2 = Surd::new(3, -1, 2, 5).unwrap();
        let pairs = [
            ParamPair::new(ExtendedReal::Exact(g), ExtendedReal::Exact(g2)).unwrap(),
            ParamPair::from_ratios(-3, 8, 2, 3).unwrap(),
            ParamPair::from_ratios(-1, 2, 1, 2).unwrap(),
        ];
        for params in &pairs {
            let (part, tm) = setup(params);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let (a, b) = (params.a().to_f64(), params.b().to_f64());
            let mut bad: Vec<Vec<i64>> = Vec::new();
            let mut seen_232 = 0usize;
            for _ in 0..2000 {
                let x = a + (b - a) * rng.gen::<f64>();
                let exp = match expand(&ExtendedReal::Float(x), params, 60) {
                    Ok(e) => e,
                    Err(_) => continue,
                };
                let digits = match exp.digits_prefix(60) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                // Skip the leading digit: from the second on, the orbit
                // point lies in the fundamental interval.
                let tail: Vec<i64> = digits[2..55].to_vec();
                for win in tail.windows(3) {
                    if !matches!(is_admissible(win, &tm, &part), Ok(true)) {
                        bad.push(win.to_vec());
                    }
                    if win[0] == 2 && win[1] == 3 && win[2] == 2 {
                        seen_232 += 1;
                    }
                }
            }
            bad.sort();
            bad.dedup();
            assert!(
                bad.is_empty(),
                "({}, {}): observed words rejected by the matrix: {bad:?}",
                params.a(),
                params.b()
            );
            assert_eq!(seen_232, 0, "a 2 3 2 block appeared in an expansion");
        }
    }
}
