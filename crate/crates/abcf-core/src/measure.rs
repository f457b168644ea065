//! Invariant measures: rectangle masses of `dx dy / (1+xy)^2`, the
//! normalizing constant, the explicit piecewise invariant density with its
//! transfer-operator invariance, entropy, a Rokhlin-formula consistency
//! check, denominator growth, and the branch-partition expansivity facts.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::attractor::{build_domain, hat_lambda_of, lambda_of, StepDomain};
use crate::cf::{expand, floor_ab, ParamPair};
use crate::error::{AbcfError, Result};
use crate::exact::{ExtendedReal, Surd};
use crate::numerics::{big_ln, digamma, log_integral_over_reflected, log_integral_over_shifted};

const PI: f64 = std::f64::consts::PI;

/// Mass of a bounded rectangle under `dx dy / (1+xy)^2`, by the closed-form
/// double integral.
pub fn rect_mass(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<f64> {
    let corners = [x1 * y1, x1 * y2, x2 * y1, x2 * y2];
    if corners.iter().any(|p| !p.is_finite()) {
        return Err(AbcfError::FormulaDomainError(format!(
            "rectangle mass needs bounded corners, got [{x1}, {x2}] x [{y1}, {y2}]"
        )));
    }
    let signs: Vec<f64> = corners.iter().map(|p| 1.0 + p).collect();
    let all_pos = signs.iter().all(|s| *s > 1e-12);
    let all_neg = signs.iter().all(|s| *s < -1e-12);
    if !(all_pos || all_neg) {
        return Err(AbcfError::SingularRectangle(format!(
            "1 + xy vanishes on [{x1}, {x2}] x [{y1}, {y2}]"
        )));
    }
    Ok(((1.0 + x2 * y2) * (1.0 + x1 * y1)).ln() - ((1.0 + x1 * y2) * (1.0 + x2 * y1)).ln())
}

fn int(k: i64) -> Surd {
    Surd::from_int(k)
}

fn as_exact(x: &ExtendedReal, what: &str) -> Result<Surd> {
    x.as_surd().cloned().ok_or_else(|| {
        AbcfError::UnsupportedCase(format!("{what} needs exact parameters, got {x}"))
    })
}

fn le(x: &Surd, y: &Surd) -> Result<bool> {
    Ok(matches!(x.try_cmp(y)?, Ordering::Less | Ordering::Equal))
}

/// Checks the explicit-density case and returns its translation count: the
/// parameters must be exact, nonzero, and satisfy `1 <= -1/a <= b+1` and
/// `a <= -1/b + m <= a+1` with `m >= 1`.
fn explicit_case(params: &ParamPair) -> Result<(i64, Surd, Surd)> {
    if params.a().is_zero() || params.b().is_zero() {
        return Err(AbcfError::InfiniteMeasure(format!(
            "the invariant measure of {params} has no finite normalizer"
        )));
    }
    let a = as_exact(params.a(), "the explicit density")?;
    let b = as_exact(params.b(), "the explicit density")?;
    let inv_a_neg = a.recip()?.neg();
    let one = Surd::one();
    let b_plus = b.add(&one)?;
    if !(le(&one, &inv_a_neg)? && le(&inv_a_neg, &b_plus)?) {
        return Err(AbcfError::UnsupportedCase(format!(
            "parameters {params} fall outside the explicit-density case; \
             the general density is only available numerically as a marginal"
        )));
    }
    let m = crate::attractor::domain::family_translation_count(params)?;
    if m < 1 {
        return Err(AbcfError::UnsupportedCase(format!(
            "parameters {params} fall outside the explicit-density case \
             (translation count {m})"
        )));
    }
    let r1 = b.recip()?.neg().add(&int(m))?;
    let a_plus = a.add(&one)?;
    if !(le(&a, &r1)? && le(&r1, &a_plus)?) {
        return Err(AbcfError::UnsupportedCase(format!(
            "parameters {params} fall outside the explicit-density case; \
             the general density is only available numerically as a marginal"
        )));
    }
    Ok((m, a, b))
}

/// The closed-form normalizing constant `log[(m-a)(1+b)^(2-m)]` for
/// explicit-case parameters.
pub fn closed_form_normalizer(params: &ParamPair) -> Result<f64> {
    let (m, a, b) = explicit_case(params)?;
    let m_minus_a = int(m).sub(&a)?.to_f64();
    let one_plus_b = 1.0 + b.to_f64();
    Ok(m_minus_a.ln() + (2 - m) as f64 * one_plus_b.ln())
}

/// The normalizing constant as the total mass of the compact-coordinate
/// attractor; cross-checked against the closed form when that applies.
pub fn normalizer_k(params: &ParamPair, hat_lambda: &StepDomain) -> Result<f64> {
    if params.a().is_zero() || params.b().is_zero() {
        return Err(AbcfError::InfiniteMeasure(format!(
            "the invariant measure of {params} has no finite normalizer"
        )));
    }
    let mut sum = 0.0;
    for (rect, _) in hat_lambda.all_rects() {
        sum += rect_mass(
            rect.u_lo.to_f64(),
            rect.u_hi.to_f64(),
            rect.w_lo.to_f64(),
            rect.w_hi.to_f64(),
        )?;
    }
    if let Ok(closed) = closed_form_normalizer(params) {
        if (sum - closed).abs() > 1e-10 {
            return Err(AbcfError::InconsistentDomain(format!(
                "rectangle-sum normalizer {sum} disagrees with the closed form {closed}"
            )));
        }
    }
    Ok(sum)
}

/// Whether a density piece is `1/(x + c)` or `1/(c - x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceForm {
    ShiftPlus,
    ShiftMinus,
}

/// One branch of the invariant density on a half-open interval.
#[derive(Clone, Debug)]
pub struct DensityPiece {
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
    pub form: PieceForm,
    pub shift: ExtendedReal,
}

impl DensityPiece {
    fn lo_f(&self) -> f64 {
        self.lo.to_f64()
    }

    fn hi_f(&self) -> f64 {
        self.hi.to_f64()
    }

    fn shift_f(&self) -> f64 {
        self.shift.to_f64()
    }

    /// Whether `x` lies in the piece's half-open support.
    pub fn contains(&self, x: f64) -> bool {
        self.lo_f() <= x && x < self.hi_f()
    }

    /// The piece's integrand value at `x` (no support check).
    pub fn value_at(&self, x: f64) -> f64 {
        match self.form {
            PieceForm::ShiftPlus => 1.0 / (x + self.shift_f()),
            PieceForm::ShiftMinus => 1.0 / (self.shift_f() - x),
        }
    }

    /// Integral of the piece over its own support, in closed form.
    pub fn mass(&self) -> f64 {
        let (l, r, c) = (self.lo_f(), self.hi_f(), self.shift_f());
        match self.form {
            PieceForm::ShiftPlus => ((r + c) / (l + c)).ln(),
            PieceForm::ShiftMinus => ((c - l) / (c - r)).ln(),
        }
    }

    /// Integral of `ln|x|` times the piece over its own support, split at
    /// zero and expressed through the two dilogarithmic kernels.
    fn log_weighted_mass(&self) -> Result<f64> {
        let (l, r, c) = (self.lo_f(), self.hi_f(), self.shift_f());
        let k_shift = |x: f64| -> Result<f64> {
            if x <= 0.0 {
                Ok(0.0)
            } else {
                log_integral_over_shifted(x, c)
            }
        };
        let k_reflect = |x: f64| -> Result<f64> {
            if x <= 0.0 {
                Ok(0.0)
            } else {
                log_integral_over_reflected(x, c)
            }
        };
        match self.form {
            PieceForm::ShiftPlus => {
                if l >= 0.0 {
                    Ok(k_shift(r)? - k_shift(l)?)
                } else if r <= 0.0 {
                    Ok(k_reflect(-l)? - k_reflect(-r)?)
                } else {
                    Ok(k_reflect(-l)? + k_shift(r)?)
                }
            }
            PieceForm::ShiftMinus => {
                if l >= 0.0 {
                    Ok(k_reflect(r)? - k_reflect(l)?)
                } else if r <= 0.0 {
                    Ok(k_shift(-l)? - k_shift(-r)?)
                } else {
                    Ok(k_shift(-l)? + k_reflect(r)?)
                }
            }
        }
    }
}

/// The invariant density as a sum of reciprocal-linear pieces, together
/// with its normalizing constant.
#[derive(Clone, Debug)]
pub struct PiecewiseDensity {
    pub pieces: Vec<DensityPiece>,
    pub normalizer: f64,
    a: f64,
    b: f64,
}

impl PiecewiseDensity {
    /// Unnormalized density: the sum of all pieces containing `x`.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        if !(self.a <= x && x < self.b) {
            return Err(AbcfError::DomainError(format!(
                "density argument {x} outside [{}, {})",
                self.a, self.b
            )));
        }
        Ok(self
            .pieces
            .iter()
            .filter(|p| p.contains(x))
            .map(|p| p.value_at(x))
            .sum())
    }

    /// Normalized density value at `x`.
    pub fn density_at(&self, x: f64) -> Result<f64> {
        Ok(self.value_at(x)? / self.normalizer)
    }

    /// Integral of the unnormalized density over its support; equals the
    /// normalizer up to roundoff.
    pub fn total_mass(&self) -> f64 {
        self.pieces.iter().map(DensityPiece::mass).sum()
    }

    /// Distinct finite piece endpoints, for conditioning checks.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for p in &self.pieces {
            for t in [p.lo_f(), p.hi_f()] {
                if !out.iter().any(|s| (s - t).abs() < 1e-13) {
                    out.push(t);
                }
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }
}

/// The explicit invariant density for parameters in the explicit case: the
/// positive-side pieces follow the boundary orbit of `b - 1` and the
/// negative-side pieces split at `-1/b + m`.
pub fn density(params: &ParamPair) -> Result<PiecewiseDensity> {
    let (m, a, b) = explicit_case(params)?;
    let one = Surd::one();
    let two = int(2);
    let mut pieces = Vec::new();

    // Orbit ell_0 = b - 1, ell_{p+1} = -1/ell_p - 2, closing at -1/a - 1.
    let mut ell = b.sub(&one)?;
    for p in 1..=m {
        let next = if p < m {
            ell.recip()?.neg().sub(&two)?
        } else {
            a.recip()?.neg().sub(&one)?
        };
        let shift = Surd::from_ratio(p + 1, p)?;
        push_piece(&mut pieces, &ell, &next, PieceForm::ShiftPlus, &shift)?;
        ell = next;
    }
    push_piece(&mut pieces, &ell, &b, PieceForm::ShiftPlus, &one)?;

    let r1 = b.recip()?.neg().add(&int(m))?;
    let a_plus = a.add(&one)?;
    push_piece(&mut pieces, &a, &r1, PieceForm::ShiftMinus, &int(m))?;
    push_piece(
        &mut pieces,
        &r1,
        &a_plus,
        PieceForm::ShiftMinus,
        &int(m + 1),
    )?;

    let normalizer = closed_form_normalizer(params)?;
    let dens = PiecewiseDensity {
        pieces,
        normalizer,
        a: a.to_f64(),
        b: b.to_f64(),
    };
    let mass = dens.total_mass();
    if (mass - normalizer).abs() > 1e-10 {
        return Err(AbcfError::InconsistentDomain(format!(
            "piece masses sum to {mass}, but the normalizer is {normalizer}"
        )));
    }
    Ok(dens)
}

fn push_piece(
    pieces: &mut Vec<DensityPiece>,
    lo: &Surd,
    hi: &Surd,
    form: PieceForm,
    shift: &Surd,
) -> Result<()> {
    if lo.try_cmp(hi)? == Ordering::Less {
        pieces.push(DensityPiece {
            lo: ExtendedReal::Exact(lo.clone()),
            hi: ExtendedReal::Exact(hi.clone()),
            form,
            shift: ExtendedReal::Exact(shift.clone()),
        });
    }
    Ok(())
}

/// Transfer-operator residual at `x`: the absolute difference between the
/// sum of `h(y) y^2` over all inverse branches `y = -1/(x+n)` landing in
/// `[a, b)` and `h(x)` itself. Branch sums are split into an explicit band
/// and digamma tails.
pub fn transfer_check(dens: &PiecewiseDensity, params: &ParamPair, x: f64) -> Result<f64> {
    let a = params.a().to_f64();
    let b = params.b().to_f64();
    if !(a < x && x < b) {
        return Err(AbcfError::DomainError(format!(
            "transfer check point {x} outside ({a}, {b})"
        )));
    }
    let boundaries = dens.boundaries();
    if boundaries.iter().any(|t| (x - t).abs() < 1e-9) {
        return Err(AbcfError::IllConditionedPoint(format!(
            "transfer check point {x} sits on a density-piece boundary"
        )));
    }
    // The tails assume every branch point beyond the band lies in the
    // pieces adjacent to zero, so the band must outreach the nearest
    // nonzero boundary.
    let delta = boundaries
        .iter()
        .map(|t| t.abs())
        .filter(|t| *t > 1e-13)
        .fold(f64::INFINITY, f64::min);
    let band = 60f64.max(1.0 / delta + 2.0);

    // Digit consistency restricts the admissible inverse branches: digits
    // n >= 1 hit remainders in [b-1, b) and digits n <= -1 hit [a, a+1),
    // so each branch side only feeds part of the interval.
    let positive_digits = x >= b - 1.0;
    let negative_digits = x < a + 1.0;
    let n_lo = (-x - band).ceil() as i64;
    let n_hi = (-x + band).floor() as i64;
    let mut sum = 0.0;
    for n in n_lo..=n_hi {
        if n == 0 || (n > 0 && !positive_digits) || (n < 0 && !negative_digits) {
            continue;
        }
        let s = x + n as f64;
        if s.abs() < 1e-12 {
            continue;
        }
        let y = -1.0 / s;
        if a <= y && y < b {
            sum += dens.value_at(y)? * y * y;
        }
    }

    // Pieces flanking zero supply the analytic tail constants.
    let at_zero_minus: Vec<&DensityPiece> = dens
        .pieces
        .iter()
        .filter(|p| p.lo_f() < 0.0 && p.hi_f() >= 0.0)
        .collect();
    let at_zero_plus: Vec<&DensityPiece> = dens
        .pieces
        .iter()
        .filter(|p| p.lo_f() <= 0.0 && p.hi_f() > 0.0)
        .collect();

    // Branches with large positive digits give y -> 0^- with y = -1/s.
    if positive_digits {
        let sigma = x + (n_hi + 1) as f64;
        for p in &at_zero_minus {
            let c = p.shift_f();
            sum += match p.form {
                PieceForm::ShiftPlus => digamma(sigma)? - digamma(sigma - 1.0 / c)?,
                PieceForm::ShiftMinus => digamma(sigma + 1.0 / c)? - digamma(sigma)?,
            };
        }
    }
    // Branches with large negative digits give y -> 0^+ with y = 1/t.
    if negative_digits {
        let tau = -x - (n_lo - 1) as f64;
        for p in &at_zero_plus {
            let c = p.shift_f();
            sum += match p.form {
                PieceForm::ShiftPlus => digamma(tau + 1.0 / c)? - digamma(tau)?,
                PieceForm::ShiftMinus => digamma(tau)? - digamma(tau - 1.0 / c)?,
            };
        }
    }

    Ok((sum - dens.value_at(x)?).abs())
}

/// Entropy `pi^2 / (3K)`, with the normalizer taken from the exact
/// compact-coordinate attractor when available, else the closed form.
pub fn entropy(params: &ParamPair) -> Result<f64> {
    Ok(PI * PI / (3.0 * normalizer_of(params)?))
}

/// Entropy from an already-computed normalizer.
pub fn entropy_from_normalizer(k: f64) -> f64 {
    PI * PI / (3.0 * k)
}

/// The normalizer by the best available route: exact attractor rectangles
/// with the closed-form cross-check, or the closed form alone.
pub fn normalizer_of(params: &ParamPair) -> Result<f64> {
    match build_domain(params) {
        Ok(domain) => {
            let lambda = lambda_of(&domain, params)?;
            let hat = hat_lambda_of(&lambda)?;
            normalizer_k(params, &hat)
        }
        Err(e) => closed_form_normalizer(params).map_err(|_| e),
    }
}

/// Rokhlin-formula consistency: returns the pair of entropies
/// `(-2/K) * integral of ln|x| h(x) dx` and `pi^2 / (3K)`, which must agree.
pub fn rokhlin_check(params: &ParamPair) -> Result<(f64, f64)> {
    let dens = density(params)?;
    let mut log_mass = 0.0;
    for p in &dens.pieces {
        log_mass += p.log_weighted_mass()?;
    }
    let k = dens.normalizer;
    Ok((-2.0 * log_mass / k, PI * PI / (3.0 * k)))
}

/// Empirical growth exponent `ln q_N / N` of the convergent denominators of
/// the expansion of `x`, for comparison against `pi^2 / (6K)`.
pub fn qn_growth(params: &ParamPair, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(AbcfError::DomainError(
            "denominator growth needs at least one digit".into(),
        ));
    }
    let expansion = expand(&ExtendedReal::Float(x), params, n + 1)?;
    let digits = expansion.digits_prefix(n + 1).map_err(|_| {
        AbcfError::RationalInput(format!("the expansion of {x} terminated before {n} digits"))
    })?;
    let mut q_prev = BigInt::from(0);
    let mut q_cur = BigInt::from(1);
    for &d in &digits[1..] {
        let next = BigInt::from(d) * &q_cur - &q_prev;
        q_prev = q_cur;
        q_cur = next;
    }
    let q_abs = q_cur.abs();
    big_ln(&q_abs)
        .map(|l| l / n as f64)
        .map_err(|_| AbcfError::RationalInput(format!("denominator collapsed to zero for {x}")))
}

/// The countable branch partition of the interval map together with its
/// case constants and the uniform expansion constant.
#[derive(Clone, Debug)]
pub struct BranchPartition {
    pub m: i64,
    pub n: i64,
    pub expansion_constant: f64,
    a: f64,
    b: f64,
}

impl BranchPartition {
    /// The open interval with positional index `i` (positive indices count
    /// down from `b`, negative up from `a`).
    pub fn interval(&self, i: i64) -> Result<(f64, f64)> {
        let (a, b, m, n) = (self.a, self.b, self.m as f64, self.n as f64);
        match i {
            0 => Err(AbcfError::DomainError(
                "branch intervals are indexed by nonzero integers".into(),
            )),
            1 => Ok((-1.0 / (a - m - 1.0), b)),
            _ if i >= 2 => Ok((-1.0 / (a - m - i as f64), -1.0 / (a - m - i as f64 + 1.0))),
            -1 => Ok((a, -1.0 / (b + n + 1.0))),
            _ => {
                let j = (-i) as f64;
                Ok((-1.0 / (b + n + j - 1.0), -1.0 / (b + n + j)))
            }
        }
    }

    /// The digit applied on branch `i`.
    pub fn digit_for(&self, i: i64) -> i64 {
        if i > 0 {
            -(self.m + i)
        } else {
            self.n - i
        }
    }

    /// The image interval of branch `i` under the interval map.
    pub fn image(&self, i: i64) -> Result<(f64, f64)> {
        let (lo, hi) = self.interval(i)?;
        let d = self.digit_for(i) as f64;
        let at = |x: f64| -1.0 / x - d;
        let (p, q) = (at(lo), at(hi));
        Ok((p.min(q), p.max(q)))
    }

    /// Distinct image intervals over `1 <= |i| <= max_index`; at most four.
    pub fn image_collection(&self, max_index: i64) -> Result<Vec<(f64, f64)>> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for i in (1..=max_index).flat_map(|k| [k, -k]) {
            let im = self.image(i)?;
            if !out
                .iter()
                .any(|(l, r)| (l - im.0).abs() < 1e-9 && (r - im.1).abs() < 1e-9)
            {
                out.push(im);
            }
        }
        Ok(out)
    }
}

/// Builds the branch partition for parameters with `-1 < a < 0 < b < 1`;
/// boundary regimes route to the iterate-based expansivity check.
pub fn branch_partition(params: &ParamPair) -> Result<BranchPartition> {
    let a = params.a().to_f64();
    let b = params.b().to_f64();
    if !(a < 0.0 && 0.0 < b) {
        return Err(AbcfError::DomainError(format!(
            "branch partition needs a < 0 < b, got {params}"
        )));
    }
    if a <= -1.0 || b >= 1.0 {
        return Err(AbcfError::UseIterateCheck(format!(
            "single-step expansion fails for {params}; some iterate up to K+1 \
             expands, where K is minimal with b(1+a)^K < 1"
        )));
    }
    let m = (a + 1.0 / b).floor() as i64;
    let n = (-1.0 / a - b).floor() as i64;
    Ok(BranchPartition {
        m,
        n,
        expansion_constant: (1.0 / (a * a)).min(1.0 / (b * b)),
        a,
        b,
    })
}

/// One step of the interval map `x -> -1/x - digit(-1/x)` on `[a, b)`.
pub fn interval_map_step(x: f64, params: &ParamPair) -> Result<f64> {
    if x == 0.0 {
        return Err(AbcfError::DomainError("interval map undefined at 0".into()));
    }
    let y = -1.0 / x;
    let d = floor_ab(&ExtendedReal::Float(y), params)?;
    Ok(y - d as f64)
}

/// Minimum over a sample grid of the best derivative `|(f^n)'(x)|` over
/// iterates `n <= K+1`, where `K` is minimal with `b(1+a)^K < 1`. A return
/// value above 1 witnesses iterate expansivity in the `b >= 1` regime.
pub fn iterate_expansivity(params: &ParamPair, samples: usize) -> Result<f64> {
    let a = params.a().to_f64();
    let b = params.b().to_f64();
    if !(-1.0 < a && a < 0.0 && b >= 1.0) {
        return Err(AbcfError::DomainError(format!(
            "iterate check applies to -1 < a < 0 and b >= 1, got {params}"
        )));
    }
    let mut k = 1i64;
    while b * (1.0 + a).powi(k as i32) >= 1.0 {
        k += 1;
        if k > 10_000 {
            return Err(AbcfError::FormulaDomainError(format!(
                "no iterate bound found for {params}"
            )));
        }
    }
    let mut worst = f64::INFINITY;
    for j in 0..samples {
        let x0 = a + (b - a) * (j as f64 + 0.5) / samples as f64;
        if x0.abs() < 1e-9 {
            continue;
        }
        let mut x = x0;
        let mut product = 1.0;
        let mut best = 0.0f64;
        for _ in 0..=k {
            product *= x;
            best = best.max(1.0 / (product * product));
            x = interval_map_step(x, params)?;
            if x.abs() < 1e-9 {
                break;
            }
        }
        worst = worst.min(best);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pair(an: i64, ad: i64, bn: i64, bd: i64) -> ParamPair {
        ParamPair::from_ratios(an, ad, bn, bd).unwrap()
    }

    fn worked_example() -> ParamPair {
        pair(-4, 5, 2, 5)
    }

    fn hat_of(params: &ParamPair) -> StepDomain {
        let domain = build_domain(params).unwrap();
        let lambda = lambda_of(&domain, params).unwrap();
        hat_lambda_of(&lambda).unwrap()
    }

    #[test]
    fn rect_mass_closed_form_checks() {
        assert_abs_diff_eq!(
            rect_mass(0.0, 1.0, 0.0, 1.0).unwrap(),
            2f64.ln(),
            epsilon = 1e-14
        );
        assert_eq!(rect_mass(0.2, 0.9, 0.3, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(
            rect_mass(0.1, 0.7, -0.3, 0.5).unwrap(),
            rect_mass(-0.3, 0.5, 0.1, 0.7).unwrap(),
            epsilon = 1e-15
        );
        // Simpson quadrature over the same rectangle.
        let (x1, x2, y1, y2) = (0.1f64, 0.7, -0.3, 0.5);
        let n = 512usize;
        let (hx, hy) = ((x2 - x1) / n as f64, (y2 - y1) / n as f64);
        let wt = |k: usize| {
            if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut quad = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let (x, y) = (x1 + i as f64 * hx, y1 + j as f64 * hy);
                quad += wt(i) * wt(j) / (1.0 + x * y).powi(2);
            }
        }
        quad *= hx * hy / 9.0;
        assert_abs_diff_eq!(rect_mass(x1, x2, y1, y2).unwrap(), quad, epsilon = 1e-10);
        assert!(matches!(
            rect_mass(-2.0, -1.0, 0.4, 0.6),
            Err(AbcfError::SingularRectangle(_))
        ));
        assert!(rect_mass(f64::NEG_INFINITY, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn normalizer_matches_the_closed_form() {
        let params = worked_example();
        let k = normalizer_k(&params, &hat_of(&params)).unwrap();
        assert_abs_diff_eq!(k, (14.0f64 / 5.0).ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(
            closed_form_normalizer(&params).unwrap(),
            2.8f64.ln(),
            epsilon = 1e-15
        );
        // Another family member exercises a negative closed-form exponent.
        let deeper = pair(-5, 6, 3, 10);
        let k = normalizer_k(&deeper, &hat_of(&deeper)).unwrap();
        assert_abs_diff_eq!(k, (115.0f64 / 39.0).ln(), epsilon = 1e-10);
        assert!(matches!(
            normalizer_k(&pair(-1, 1, 0, 1), &hat_of(&pair(-1, 1, 0, 1))),
            Err(AbcfError::InfiniteMeasure(_))
        ));
    }

    #[test]
    fn density_pieces_of_the_worked_example() {
        let dens = density(&worked_example()).unwrap();
        let as_ratio = |x: &ExtendedReal| x.to_f64();
        let got: Vec<(f64, f64, PieceForm, f64)> = dens
            .pieces
            .iter()
            .map(|p| (as_ratio(&p.lo), as_ratio(&p.hi), p.form, as_ratio(&p.shift)))
            .collect();
        let expected = [
            (-0.6, -1.0 / 3.0, PieceForm::ShiftPlus, 2.0),
            (-1.0 / 3.0, 0.25, PieceForm::ShiftPlus, 1.5),
            (0.25, 0.4, PieceForm::ShiftPlus, 1.0),
            (-0.8, -0.5, PieceForm::ShiftMinus, 2.0),
            (-0.5, 0.2, PieceForm::ShiftMinus, 3.0),
        ];
        assert_eq!(got.len(), expected.len());
        for ((gl, gh, gf, gc), (el, eh, ef, ec)) in got.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(gl, el, epsilon = 1e-15);
            assert_abs_diff_eq!(gh, eh, epsilon = 1e-15);
            assert_eq!(gf, ef);
            assert_abs_diff_eq!(gc, ec, epsilon = 1e-15);
        }
        // At -0.7 only the negative-side branch contributes.
        assert_abs_diff_eq!(dens.value_at(-0.7).unwrap(), 1.0 / 2.7, epsilon = 1e-15);
        // The pieces integrate back to the normalizer.
        assert_abs_diff_eq!(dens.total_mass(), dens.normalizer, epsilon = 1e-12);
        assert!(matches!(
            density(&pair(-1, 2, 1, 2)),
            Err(AbcfError::UnsupportedCase(_))
        ));
        assert!(matches!(
            density(&pair(-1, 1, 0, 1)),
            Err(AbcfError::InfiniteMeasure(_))
        ));
    }

    #[test]
    fn transfer_operator_fixes_the_density() {
        use rand::{Rng, SeedableRng};
        let params = worked_example();
        let dens = density(&params).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 200 {
            let x = rng.gen_range(-0.8..0.4);
            match transfer_check(&dens, &params, x) {
                Ok(residual) => {
                    assert!(residual < 1e-9, "residual {residual} at {x}");
                    checked += 1;
                }
                Err(AbcfError::IllConditionedPoint(_)) => continue,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        // Perturbing one shift must break invariance detectably.
        let mut broken = dens.clone();
        broken.pieces[0].shift = ExtendedReal::from_ratio(2001, 1000).unwrap();
        let residual = transfer_check(&broken, &params, -0.45).unwrap();
        assert!(residual > 1e-4, "perturbed residual {residual}");
        assert!(matches!(
            transfer_check(&dens, &params, 0.7),
            Err(AbcfError::DomainError(_))
        ));
        assert!(matches!(
            transfer_check(&dens, &params, 0.25),
            Err(AbcfError::IllConditionedPoint(_))
        ));
    }

    #[test]
    fn rokhlin_and_entropy_agree() {
        for params in [worked_example(), pair(-3, 5, 3, 4), pair(-5, 6, 3, 10)] {
            let (rokhlin, formula) = rokhlin_check(&params).unwrap();
            assert_abs_diff_eq!(rokhlin, formula, epsilon = 1e-6);
        }
        let e = entropy(&worked_example()).unwrap();
        assert_abs_diff_eq!(e, PI * PI / (3.0 * 2.8f64.ln()), epsilon = 1e-10);
    }

    #[test]
    fn denominator_growth_approaches_the_entropy_rate() {
        let params = worked_example();
        let rate = qn_growth(&params, PI - 3.0, 10_000).unwrap();
        let limit = PI * PI / (6.0 * 2.8f64.ln());
        assert!(
            (rate - limit).abs() / limit < 0.02,
            "rate {rate} vs limit {limit}"
        );
        // A rational point terminates early.
        assert!(matches!(
            qn_growth(&params, 0.25, 10),
            Err(AbcfError::RationalInput(_))
        ));
        // One digit gives ln|q_1| exactly.
        let one = qn_growth(&params, PI - 3.0, 1).unwrap();
        let first_digits = expand(&ExtendedReal::Float(PI - 3.0), &params, 2)
            .unwrap()
            .digits_prefix(2)
            .unwrap();
        assert_abs_diff_eq!(one, (first_digits[1].abs() as f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn branch_partition_of_the_symmetric_pair() {
        let params = pair(-1, 2, 1, 2);
        let part = branch_partition(&params).unwrap();
        assert_eq!((part.m, part.n), (1, 1));
        assert_abs_diff_eq!(part.expansion_constant, 4.0, epsilon = 1e-15);
        // Intervals chain together and fill (a, 0) and (0, b).
        for i in 1..40i64 {
            let (lo, hi) = part.interval(i).unwrap();
            assert!(lo < hi && lo > 0.0 && hi <= 0.5);
            let (next_lo, next_hi) = part.interval(i + 1).unwrap();
            assert!(next_lo < next_hi);
            assert_abs_diff_eq!(next_hi, lo, epsilon = 1e-12);
            let (nlo, nhi) = part.interval(-i).unwrap();
            let (nnlo, nnhi) = part.interval(-i - 1).unwrap();
            assert!(nlo < nhi && nhi < 0.0 && nnlo < nnhi);
            assert_abs_diff_eq!(nhi, nnlo, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(part.interval(1).unwrap().1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(part.interval(-1).unwrap().0, -0.5, epsilon = 1e-15);
        // Distortion and expansion hold on a grid, and images collapse to
        // at most four distinct intervals.
        for j in 0..1000 {
            let x = -0.5 + (j as f64 + 0.5) / 1000.0;
            assert!(2.0 * x.abs() <= 2.0);
            assert!(1.0 / (x * x) >= part.expansion_constant);
        }
        let images = part.image_collection(60).unwrap();
        assert!(images.len() <= 4, "got {} image intervals", images.len());
        // Each branch really maps into its catalogued image.
        for i in [1i64, 2, 5, -1, -2, -5] {
            let (lo, hi) = part.interval(i).unwrap();
            let mid = 0.5 * (lo + hi);
            let mapped = interval_map_step(mid, &params).unwrap();
            let (ilo, ihi) = part.image(i).unwrap();
            assert!(ilo - 1e-12 <= mapped && mapped <= ihi + 1e-12);
        }
        assert!(matches!(
            branch_partition(&pair(-1, 2, 3, 2)),
            Err(AbcfError::UseIterateCheck(_))
        ));
    }

    #[test]
    fn iterates_expand_when_b_exceeds_one() {
        let worst = iterate_expansivity(&pair(-1, 2, 3, 2), 500).unwrap();
        assert!(worst > 1.0, "worst iterate derivative {worst}");
        assert!(iterate_expansivity(&pair(-1, 2, 1, 2), 10).is_err());
    }
}
