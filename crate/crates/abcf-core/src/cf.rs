//! The two-parameter continued fraction family: digit map, interval maps,
//! expansions, convergents, and evaluation of formal minus fractions.
//!
//! A parameter pair `(a, b)` with `a <= 0 <= b`, `b - a >= 1`, `-ab <= 1`
//! selects a fundamental interval `[a, b)` and a rounding rule: points left
//! of `a` round down relative to `a`, points in `[a, b)` get digit zero, and
//! points at or right of `b` round up relative to `b` (the integer ceiling
//! here is `floor + 1` even at integers, so the digit at `x = b` is `1`).

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{AbcfError, Result};
use crate::exact::{ExtendedReal, Surd, UnimodularMap};

/// A validated parameter pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPair {
    a: ExtendedReal,
    b: ExtendedReal,
}

impl ParamPair {
    /// Validates `a <= 0 <= b`, `b - a >= 1`, and `-ab <= 1`.
    pub fn new(a: ExtendedReal, b: ExtendedReal) -> Result<Self> {
        if a.is_infinity() || b.is_infinity() {
            return Err(AbcfError::DomainError("parameters must be finite".into()));
        }
        let zero = ExtendedReal::from_int(0);
        if !(a.try_cmp(&zero)? != Ordering::Greater) {
            return Err(AbcfError::DomainError(format!("need a <= 0, got a = {a}")));
        }
        if !(b.try_cmp(&zero)? != Ordering::Less) {
            return Err(AbcfError::DomainError(format!("need b >= 0, got b = {b}")));
        }
        if b.try_cmp(&a.translate(1))? == Ordering::Less {
            return Err(AbcfError::DomainError(format!(
                "need b - a >= 1, got a = {a}, b = {b}"
            )));
        }
        if !neg_product_le_one(&a, &b)? {
            return Err(AbcfError::DomainError(format!(
                "need -ab <= 1, got a = {a}, b = {b}"
            )));
        }
        Ok(ParamPair { a, b })
    }

    /// Convenience constructor from exact rationals.
    pub fn from_ratios(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Result<Self> {
        ParamPair::new(
            ExtendedReal::from_ratio(a_num, a_den)?,
            ExtendedReal::from_ratio(b_num, b_den)?,
        )
    }

    pub fn a(&self) -> &ExtendedReal {
        &self.a
    }

    pub fn b(&self) -> &ExtendedReal {
        &self.b
    }

    pub fn a_f64(&self) -> f64 {
        self.a.to_f64()
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64()
    }

    /// True when both parameters are exact.
    pub fn is_exact(&self) -> bool {
        self.a.is_exact() && self.b.is_exact()
    }
}

impl std::fmt::Display for ParamPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Checks `-ab <= 1`, exactly when both parameters are exact.
fn neg_product_le_one(a: &ExtendedReal, b: &ExtendedReal) -> Result<bool> {
    match (a, b) {
        (ExtendedReal::Exact(x), ExtendedReal::Exact(y)) => {
            let prod = x.mul(y)?.neg();
            Ok(prod.try_cmp(&Surd::one())? != Ordering::Greater)
        }
        _ => Ok(-(a.to_f64() * b.to_f64()) <= 1.0 + 1e-12),
    }
}

/// Order comparison that falls back to floats when exact comparison is
/// impossible (distinct irrational fields).
pub(crate) fn cmp_loose(x: &ExtendedReal, y: &ExtendedReal) -> Ordering {
    x.try_cmp(y).unwrap_or_else(|_| {
        x.to_f64()
            .partial_cmp(&y.to_f64())
            .unwrap_or(Ordering::Equal)
    })
}

/// `floor(x - y)` as an integer, exact whenever the difference is exact.
fn floor_diff(x: &ExtendedReal, y: &ExtendedReal) -> Result<i64> {
    let lift = |v: &ExtendedReal| -> Option<Surd> {
        match v {
            ExtendedReal::Exact(s) => Some(s.clone()),
            ExtendedReal::Float(f) => Surd::from_f64_exact(*f).ok(),
            ExtendedReal::Infinity => None,
        }
    };
    if let (Some(xs), Some(ys)) = (lift(x), lift(y)) {
        if let Ok(diff) = xs.sub(&ys) {
            return diff
                .floor_int()
                .to_i64()
                .ok_or_else(|| AbcfError::DomainError("digit exceeds the 64-bit range".into()));
        }
    }
    // Mixed irrational fields: fall back to the float difference, which can
    // only be wrong within float resolution of an integer, and an exact
    // integer difference would force the fields to coincide.
    let v = (x.to_f64() - y.to_f64()).floor();
    if v.is_finite() {
        Ok(v as i64)
    } else {
        Err(AbcfError::UndefinedFloor("difference is not finite".into()))
    }
}

/// The rounding digit of `x` for the pair `(a, b)`.
///
/// Fails on the point at infinity.
pub fn floor_ab(x: &ExtendedReal, params: &ParamPair) -> Result<i64> {
    if x.is_infinity() {
        return Err(AbcfError::UndefinedFloor(
            "the point at infinity has no digit".into(),
        ));
    }
    if cmp_loose(x, params.a()) == Ordering::Less {
        floor_diff(x, params.a())
    } else if cmp_loose(x, params.b()) == Ordering::Less {
        Ok(0)
    } else {
        Ok(floor_diff(x, params.b())? + 1)
    }
}

/// One step of the interval map: translate toward `[a, b)` from either side,
/// flip by `-1/x` inside it. Infinity is a fixed point.
pub fn f_ab(x: &ExtendedReal, params: &ParamPair) -> ExtendedReal {
    if x.is_infinity() {
        return ExtendedReal::Infinity;
    }
    if cmp_loose(x, params.a()) == Ordering::Less {
        x.translate(1)
    } else if cmp_loose(x, params.b()) == Ordering::Less {
        x.recip_neg()
    } else {
        x.translate(-1)
    }
}

/// Which one-sided version of the interval map to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Branch intervals closed on the left: `[a, b)` flips.
    Upper,
    /// Branch intervals closed on the right: `(a, b]` flips.
    Lower,
}

/// One-sided interval map used by boundary orbits. The `Upper` side is
/// [`f_ab`] itself; the `Lower` side assigns the boundary points `a` and `b`
/// to the branches on their left.
pub fn f_ab_side(x: &ExtendedReal, params: &ParamPair, side: Side) -> ExtendedReal {
    match side {
        Side::Upper => f_ab(x, params),
        Side::Lower => {
            if x.is_infinity() {
                return ExtendedReal::Infinity;
            }
            if cmp_loose(x, params.a()) != Ordering::Greater {
                x.translate(1)
            } else if cmp_loose(x, params.b()) != Ordering::Greater {
                x.recip_neg()
            } else {
                x.translate(-1)
            }
        }
    }
}

/// The digit-indexed first-return form of the interval map on `[a, b)`:
/// `x -> -1/x - n(-1/x)`, with `0` fixed.
pub fn gauss_map(x: &ExtendedReal, params: &ParamPair) -> Result<ExtendedReal> {
    if x.is_infinity()
        || cmp_loose(x, params.a()) == Ordering::Less
        || cmp_loose(x, params.b()) != Ordering::Less
    {
        return Err(AbcfError::DomainError(format!(
            "gauss map needs x in [{}, {}), got {x}",
            params.a(),
            params.b()
        )));
    }
    if x.is_zero() {
        return Ok(ExtendedReal::from_int(0));
    }
    let y = x.recip_neg();
    let n = floor_ab(&y, params)?;
    Ok(y.translate(-n))
}

/// How an expansion ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The orbit terminated (rational input with `b` nonzero).
    None,
    /// The digit budget or float precision ran out before any structure
    /// appeared.
    Truncated,
    /// The digit sequence is eventually periodic with this repeating block.
    Periodic(Vec<i64>),
}

/// A digit expansion: the leading digits and how the sequence continues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// Digits before the periodic part (all digits, when there is none).
    pub head: Vec<i64>,
    pub tail: Tail,
}

impl Expansion {
    /// Digit at position `i`, unwinding the periodic tail; `None` past the
    /// end of a finite or truncated expansion.
    pub fn digit_at(&self, i: usize) -> Option<i64> {
        if i < self.head.len() {
            return Some(self.head[i]);
        }
        match &self.tail {
            Tail::Periodic(period) if !period.is_empty() => {
                Some(period[(i - self.head.len()) % period.len()])
            }
            _ => None,
        }
    }

    /// Digits `0..count`, failing when not enough are available.
    pub fn digits_prefix(&self, count: usize) -> Result<Vec<i64>> {
        (0..count)
            .map(|i| {
                self.digit_at(i).ok_or_else(|| {
                    AbcfError::DigitUnderflow(format!(
                        "expansion has {} digits, {count} requested",
                        self.head.len()
                    ))
                })
            })
            .collect()
    }
}

/// Precision floor for float orbits: a remainder smaller than this is
/// treated as an exact hit of the branch endpoint.
const FLOAT_REMAINDER_EPS: f64 = 1e-12;

/// Expands `x` in the `(a, b)` digit system.
///
/// Exact rational inputs terminate (when `b` is nonzero) or close onto a
/// periodic block; exact quadratic surds always close onto a periodic block
/// once the budget allows. Float inputs truncate when the remainder drops
/// below resolution.
pub fn expand(x: &ExtendedReal, params: &ParamPair, max_digits: usize) -> Result<Expansion> {
    if x.is_infinity() {
        return Err(AbcfError::UndefinedFloor(
            "cannot expand the point at infinity".into(),
        ));
    }
    let mut digits: Vec<i64> = Vec::new();
    let mut current = x.clone();
    let mut seen: HashMap<Surd, usize> = HashMap::new();
    for index in 0..max_digits {
        if index > 0 {
            if let ExtendedReal::Exact(s) = &current {
                if let Some(&start) = seen.get(s) {
                    let period = digits[start..].to_vec();
                    digits.truncate(start);
                    return Ok(Expansion {
                        head: digits,
                        tail: Tail::Periodic(period),
                    });
                }
                seen.insert(s.clone(), index);
            }
        }
        let n = floor_ab(&current, params)?;
        digits.push(n);
        let rem = current.translate(-n);
        match &rem {
            ExtendedReal::Exact(s) if s.is_zero() => {
                return Ok(Expansion {
                    head: digits,
                    tail: Tail::None,
                });
            }
            ExtendedReal::Float(v) if v.abs() < FLOAT_REMAINDER_EPS => {
                return Ok(Expansion {
                    head: digits,
                    tail: Tail::Truncated,
                });
            }
            _ => {}
        }
        current = rem.recip_neg();
    }
    Ok(Expansion {
        head: digits,
        tail: Tail::Truncated,
    })
}

/// A convergent `p/q` in lowest terms with `q >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub p: num_bigint::BigInt,
    pub q: num_bigint::BigInt,
}

impl ConvergentPair {
    pub fn value(&self) -> ExtendedReal {
        use num_traits::Zero;
        if self.q.is_zero() {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Exact(Surd::new(self.p.clone(), 0, self.q.clone(), 0).expect("nonzero q"))
        }
    }
}

/// Convergents `r_0 .. r_upto` of an expansion via the standard two-term
/// recurrence. The determinant identity keeps them automatically in lowest
/// terms; signs are normalized to `q >= 0`.
pub fn convergents(e: &Expansion, upto: usize) -> Result<Vec<ConvergentPair>> {
    use num_bigint::BigInt;
    use num_traits::{One, Signed, Zero};
    let digits = e.digits_prefix(upto + 1)?;
    let mut out = Vec::with_capacity(upto + 1);
    let (mut p_prev2, mut q_prev2) = (BigInt::one(), BigInt::zero());
    let (mut p_prev1, mut q_prev1) = (BigInt::from(digits[0]), BigInt::one());
    push_normalized(&mut out, &p_prev1, &q_prev1);
    for &n in &digits[1..] {
        let p = BigInt::from(n) * &p_prev1 - &p_prev2;
        let q = BigInt::from(n) * &q_prev1 - &q_prev2;
        push_normalized(&mut out, &p, &q);
        p_prev2 = std::mem::replace(&mut p_prev1, p);
        q_prev2 = std::mem::replace(&mut q_prev1, q);
    }
    return Ok(out);

    fn push_normalized(out: &mut Vec<ConvergentPair>, p: &BigInt, q: &BigInt) {
        let (p, q) = if q.is_negative() || (q.is_zero() && p.is_negative()) {
            (-p, -q)
        } else {
            (p.clone(), q.clone())
        };
        out.push(ConvergentPair { p, q });
    }
}

/// Evaluates a formal minus fraction.
///
/// Finite and truncated expansions evaluate to their last convergent;
/// periodic expansions evaluate exactly to the image of the attracting fixed
/// point of the repeating block, a quadratic surd. A periodic block whose
/// word matrix is elliptic (for instance a run of unit digits of one sign)
/// has oscillating truncations and is rejected.
pub fn evaluate_minus_cf(e: &Expansion) -> Result<ExtendedReal> {
    // Structural check: digit zero may appear only at index 0.
    let period_len = match &e.tail {
        Tail::Periodic(p) => p.len(),
        _ => 0,
    };
    let total = e.head.len() + period_len;
    for i in 1..total {
        if e.digit_at(i) == Some(0) {
            return Err(AbcfError::MalformedSequence(format!(
                "digit 0 at position {i}"
            )));
        }
    }
    match &e.tail {
        Tail::None | Tail::Truncated => {
            if e.head.is_empty() {
                return Err(AbcfError::DigitUnderflow(
                    "cannot evaluate an empty expansion".into(),
                ));
            }
            let cs = convergents(e, e.head.len() - 1)?;
            Ok(cs.last().expect("nonempty").value())
        }
        Tail::Periodic(period) => {
            if period.is_empty() {
                return Err(AbcfError::MalformedSequence("empty periodic block".into()));
            }
            let mut m_period = UnimodularMap::identity();
            for &n in period {
                m_period = m_period
                    .compose(&UnimodularMap::gen_t(n))
                    .compose(&UnimodularMap::gen_s());
            }
            let fixed = m_period.fixed_points()?;
            let attracting = match fixed.len() {
                0 => {
                    return Err(AbcfError::NonconvergentSequence(
                        "periodic block acts as a translation".into(),
                    ))
                }
                1 => fixed[0].clone(),
                _ => {
                    let mut chosen = None;
                    for fp in &fixed {
                        let den2 = m_period.derivative_abs_squared_denominator(fp)?;
                        if den2.try_cmp(&Surd::one())? == Ordering::Greater {
                            chosen = Some(fp.clone());
                        }
                    }
                    chosen.ok_or_else(|| {
                        AbcfError::NonconvergentSequence("no attracting fixed point".into())
                    })?
                }
            };
            let mut m_head = UnimodularMap::identity();
            for &n in &e.head {
                m_head = m_head
                    .compose(&UnimodularMap::gen_t(n))
                    .compose(&UnimodularMap::gen_s());
            }
            Ok(m_head.apply(&ExtendedReal::Exact(attracting)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> ParamPair {
        ParamPair::from_ratios(a_num, a_den, b_num, b_den).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(ParamPair::from_ratios(-1, 2, 1, 2).is_ok());
        assert!(ParamPair::from_ratios(-4, 5, 2, 5).is_ok());
        assert!(ParamPair::from_ratios(-1, 1, 0, 1).is_ok());
        // b - a < 1
        assert!(ParamPair::from_ratios(-1, 4, 1, 2).is_err());
        // -ab > 1
        assert!(ParamPair::from_ratios(-2, 1, 2, 1).is_err());
        // a > 0
        assert!(ParamPair::from_ratios(1, 4, 3, 2).is_err());
        // boundary -ab = 1 is allowed
        assert!(ParamPair::from_ratios(-1, 2, 2, 1).is_ok());
    }

    #[test]
    fn digit_uses_ceiling_equal_floor_plus_one() {
        let p = pair(-1, 2, 1, 2);
        // x = b itself rounds up to 1, not 0.
        assert_eq!(
            floor_ab(&ExtendedReal::from_ratio(1, 2).unwrap(), &p).unwrap(),
            1
        );
        assert_eq!(floor_ab(&ExtendedReal::from_int(2), &p).unwrap(), 2);
        assert_eq!(
            floor_ab(&ExtendedReal::from_ratio(-1, 2).unwrap(), &p).unwrap(),
            0
        );
        assert_eq!(
            floor_ab(&ExtendedReal::from_ratio(-3, 5).unwrap(), &p).unwrap(),
            -1
        );
        assert_eq!(floor_ab(&ExtendedReal::from_int(0), &p).unwrap(), 0);
        assert!(floor_ab(&ExtendedReal::Infinity, &p).is_err());
    }

    #[test]
    fn interval_map_branches() {
        let p = pair(-4, 5, 2, 5);
        let x = ExtendedReal::from_int(-3);
        assert_eq!(f_ab(&x, &p), ExtendedReal::from_int(-2));
        let x = ExtendedReal::from_ratio(1, 5).unwrap();
        assert_eq!(f_ab(&x, &p), ExtendedReal::from_int(-5));
        let x = ExtendedReal::from_int(4);
        assert_eq!(f_ab(&x, &p), ExtendedReal::from_int(3));
        assert_eq!(f_ab(&ExtendedReal::from_int(0), &p), ExtendedReal::Infinity);
        assert_eq!(f_ab(&ExtendedReal::Infinity, &p), ExtendedReal::Infinity);
    }

    #[test]
    fn one_sided_maps_differ_only_at_branch_ends() {
        let p = pair(-1, 2, 1, 2);
        let a = ExtendedReal::from_ratio(-1, 2).unwrap();
        // Upper side flips a; lower side translates it.
        assert_eq!(f_ab_side(&a, &p, Side::Upper), ExtendedReal::from_int(2));
        assert_eq!(
            f_ab_side(&a, &p, Side::Lower),
            ExtendedReal::from_ratio(1, 2).unwrap()
        );
        let b = ExtendedReal::from_ratio(1, 2).unwrap();
        assert_eq!(
            f_ab_side(&b, &p, Side::Upper),
            ExtendedReal::from_ratio(-1, 2).unwrap()
        );
        assert_eq!(f_ab_side(&b, &p, Side::Lower), ExtendedReal::from_int(-2));
        // Interior points agree.
        let x = ExtendedReal::from_ratio(1, 3).unwrap();
        assert_eq!(
            f_ab_side(&x, &p, Side::Upper),
            f_ab_side(&x, &p, Side::Lower)
        );
    }

    #[test]
    fn gauss_map_examples() {
        let p = pair(-1, 2, 1, 2);
        let x = ExtendedReal::from_ratio(2, 5).unwrap();
        assert_eq!(
            gauss_map(&x, &p).unwrap(),
            ExtendedReal::from_ratio(-1, 2).unwrap()
        );
        assert_eq!(
            gauss_map(&ExtendedReal::from_int(0), &p).unwrap(),
            ExtendedReal::from_int(0)
        );
        assert!(gauss_map(&ExtendedReal::from_int(2), &p).is_err());
    }

    #[test]
    fn expansion_of_one_half_in_the_symmetric_pair() {
        let p = pair(-1, 2, 1, 2);
        let e = expand(&ExtendedReal::from_ratio(1, 2).unwrap(), &p, 50).unwrap();
        assert_eq!(e.head, vec![1, 2]);
        assert_eq!(e.tail, Tail::None);
    }

    #[test]
    fn golden_ratio_expansion_is_eventually_periodic() {
        let p = pair(-1, 2, 1, 2);
        let g = ExtendedReal::Exact(Surd::new(-1, 1, 2, 5).unwrap());
        let e = expand(&g, &p, 50).unwrap();
        assert_eq!(e.head, vec![1]);
        assert_eq!(e.tail, Tail::Periodic(vec![3]));
    }

    #[test]
    fn zero_b_rationals_end_in_twos() {
        let p = pair(-1, 1, 0, 1);
        let e = expand(&ExtendedReal::from_ratio(1, 2).unwrap(), &p, 60).unwrap();
        assert_eq!(e.tail, Tail::Periodic(vec![2]));
        assert_eq!(e.head, vec![1, 3]);
    }

    #[test]
    fn float_expansion_truncates() {
        let p = pair(-4, 5, 2, 5);
        let e = expand(&ExtendedReal::Float(0.25), &p, 1000).unwrap();
        assert!(matches!(e.tail, Tail::Truncated));
        // The exact expansion of 1/4 matches the float head while it lasts.
        let exact = expand(&ExtendedReal::from_ratio(1, 4).unwrap(), &p, 1000).unwrap();
        let shared = e.head.len().min(exact.head.len()).saturating_sub(2);
        assert_eq!(e.head[..shared], exact.head[..shared]);
    }

    #[test]
    fn convergents_are_reduced_with_positive_denominator() {
        let p = pair(-4, 5, 2, 5);
        let x = ExtendedReal::from_ratio(5, 7).unwrap();
        let e = expand(&x, &p, 50).unwrap();
        let cs = convergents(&e, e.head.len() - 1).unwrap();
        use num_traits::Signed;
        for c in &cs {
            assert!(!c.q.is_negative());
        }
        assert_eq!(cs.last().unwrap().value(), x);
    }

    #[test]
    fn evaluate_round_trips_rationals() {
        let p = pair(-4, 5, 2, 5);
        for (num, den) in [(5, 7), (-3, 8), (22, 7), (-13, 5), (0, 1)] {
            let x = ExtendedReal::from_ratio(num, den).unwrap();
            let e = expand(&x, &p, 200).unwrap();
            assert_eq!(e.tail, Tail::None);
            assert_eq!(evaluate_minus_cf(&e).unwrap(), x, "round trip {num}/{den}");
        }
    }

    #[test]
    fn evaluate_round_trips_periodic_surds() {
        let p = pair(-1, 2, 1, 2);
        let samples = [
            Surd::new(-1, 1, 2, 5).unwrap(),
            Surd::new(0, 1, 1, 2).unwrap(),
            Surd::new(1, -1, 3, 3).unwrap(),
        ];
        for s in samples {
            let x = ExtendedReal::Exact(s.clone());
            let e = expand(&x, &p, 500).unwrap();
            assert!(
                matches!(e.tail, Tail::Periodic(_)),
                "{s} should be periodic"
            );
            assert_eq!(evaluate_minus_cf(&e).unwrap(), x, "round trip {s}");
        }
    }

    #[test]
    fn all_twos_evaluates_to_one() {
        let e = Expansion {
            head: vec![],
            tail: Tail::Periodic(vec![2]),
        };
        assert_eq!(evaluate_minus_cf(&e).unwrap(), ExtendedReal::from_int(1));
    }

    #[test]
    fn single_digit_evaluates_to_itself() {
        let e = Expansion {
            head: vec![-7],
            tail: Tail::None,
        };
        assert_eq!(evaluate_minus_cf(&e).unwrap(), ExtendedReal::from_int(-7));
    }

    #[test]
    fn oscillating_unit_digit_tails_are_rejected() {
        // A periodic run of 1s has an elliptic word matrix: truncations
        // cycle through 1, 0, infinity without converging.
        let e = Expansion {
            head: vec![3],
            tail: Tail::Periodic(vec![1]),
        };
        assert!(matches!(
            evaluate_minus_cf(&e),
            Err(AbcfError::NonconvergentSequence(_))
        ));
        let e = Expansion {
            head: vec![],
            tail: Tail::Periodic(vec![1, 2]),
        };
        assert!(matches!(
            evaluate_minus_cf(&e),
            Err(AbcfError::NonconvergentSequence(_))
        ));
        let e = Expansion {
            head: vec![2, 0, 2],
            tail: Tail::None,
        };
        assert!(matches!(
            evaluate_minus_cf(&e),
            Err(AbcfError::MalformedSequence(_))
        ));
        // A finite truncation may pass through a pole; that is a legitimate
        // value of infinity, not an error.
        let e = Expansion {
            head: vec![3, 1, 1],
            tail: Tail::None,
        };
        assert_eq!(evaluate_minus_cf(&e).unwrap(), ExtendedReal::Infinity);
    }

    #[test]
    fn digits_past_the_head_are_never_zero() {
        let p = pair(-3, 8, 2, 3);
        for k in 1..40i64 {
            let x = ExtendedReal::from_ratio(3 * k + 1, 7 * k + 2).unwrap();
            let e = expand(&x, &p, 300).unwrap();
            for (i, &d) in e.head.iter().enumerate() {
                if i > 0 {
                    assert_ne!(d, 0, "zero digit past the head for sample {k}");
                }
            }
        }
    }
}
