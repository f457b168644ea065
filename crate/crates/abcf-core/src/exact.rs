//! Exact arithmetic over real quadratic fields and the projective action of
//! integer unimodular maps on the extended real line.
//!
//! Numbers are represented as [`Surd`] values `(p + q*sqrt(d)) / r` with big
//! integer coefficients, kept in a canonical form so that equality is
//! structural. [`ExtendedReal`] adds the point at infinity and an `f64`
//! fallback for approximate pipelines. [`UnimodularMap`] is a determinant-one
//! integer matrix acting by fractional linear transformations.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{AbcfError, Result};

/// Splits `n` as `s^2 * d` with `d` square-free.
///
/// Trial division runs up to 10^5; a leftover cofactor below 10^10 that is
/// not a perfect square is then certified square-free (any square divisor
/// would exceed 10^10). Larger undecidable cofactors are rejected.
fn square_free_decompose(n: u64) -> Result<(u64, u64)> {
    let mut rem = n;
    let mut s: u64 = 1;
    let mut d: u64 = 1;
    let mut i: u64 = 2;
    while i <= 100_000 && i * i <= rem {
        if rem.is_multiple_of(i) {
            let mut e = 0u32;
            while rem.is_multiple_of(i) {
                rem /= i;
                e += 1;
            }
            for _ in 0..e / 2 {
                s *= i;
            }
            if e % 2 == 1 {
                d *= i;
            }
        }
        i += if i == 2 { 1 } else { 2 };
    }
    if rem == 1 {
        return Ok((s, d));
    }
    let root = rem.sqrt();
    if root * root == rem {
        return Ok((s * root, d));
    }
    if rem < 10_000_000_000 {
        return Ok((s, d * rem));
    }
    Err(AbcfError::UnsupportedField(format!(
        "cannot certify the square-free part of {n}"
    )))
}

/// An element `(p + q*sqrt(d)) / r` of a real quadratic field.
///
/// Canonical form: `r > 0`, `gcd(p, q, r) = 1`, `d` square-free, and `d = 0`
/// if and only if `q = 0` (rationals carry no radical). Equality and hashing
/// are structural, which the canonical form makes semantic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: u64,
}

impl Surd {
    /// Builds `(p + q*sqrt(d)) / r` and normalizes it.
    ///
    /// `d` may carry square factors; they are folded into `q`. A zero
    /// denominator is rejected.
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        d: u64,
    ) -> Result<Self> {
        let mut p: BigInt = p.into();
        let mut q: BigInt = q.into();
        let mut r: BigInt = r.into();
        let mut d = d;
        if r.is_zero() {
            return Err(AbcfError::InvalidDenominator(
                "surd denominator must be nonzero".into(),
            ));
        }
        if d > 0 {
            let (s, d0) = square_free_decompose(d)?;
            q *= BigInt::from(s);
            d = d0;
        }
        if d <= 1 {
            p += &q * BigInt::from(if d == 1 { 1 } else { 0 });
            if d == 1 {
                q = BigInt::zero();
            }
            d = 0;
        }
        if q.is_zero() {
            d = 0;
        }
        if d == 0 {
            q = BigInt::zero();
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_zero() && !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        Ok(Surd { p, q, r, d })
    }

    /// The rational `n/1`.
    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Surd::new(n, 0, 1, 0).expect("unit denominator")
    }

    /// The rational `num/den`.
    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        Surd::new(num, 0, den, 0)
    }

    /// Exact conversion of a finite `f64` (every finite float is a dyadic
    /// rational).
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(AbcfError::DomainError(format!(
                "cannot lift non-finite float {x} to a surd"
            )));
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (mantissa, exp) = if raw_exp == 0 {
            (frac, -1074i64)
        } else {
            (frac | 0x10_0000_0000_0000, raw_exp - 1075)
        };
        let m = BigInt::from(sign) * BigInt::from(mantissa);
        if exp >= 0 {
            Surd::new(m << exp as usize, 0, 1, 0)
        } else {
            Surd::new(m, 0, BigInt::one() << (-exp) as usize, 0)
        }
    }

    pub fn zero() -> Self {
        Surd::from_int(0)
    }

    pub fn one() -> Self {
        Surd::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// True when the value lies in `Q` (no radical part).
    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn is_integer(&self) -> bool {
        self.d == 0 && self.r.is_one()
    }

    /// The square-free radicand, `0` for rationals.
    pub fn field(&self) -> u64 {
        self.d
    }

    /// Canonical coefficients `(p, q, r, d)`.
    pub fn coefficients(&self) -> (&BigInt, &BigInt, &BigInt, u64) {
        (&self.p, &self.q, &self.r, self.d)
    }

    /// Numerator and denominator for rational surds.
    pub fn to_ratio(&self) -> Option<(BigInt, BigInt)> {
        if self.d == 0 {
            Some((self.p.clone(), self.r.clone()))
        } else {
            None
        }
    }

    fn join_field(&self, other: &Surd) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (d1, d2) if d1 == d2 => Ok(d1),
            (d1, d2) => Err(AbcfError::UnsupportedField(format!(
                "cannot mix sqrt({d1}) with sqrt({d2})"
            ))),
        }
    }

    pub fn add(&self, other: &Surd) -> Result<Surd> {
        let d = self.join_field(other)?;
        Surd::new(
            &self.p * &other.r + &other.p * &self.r,
            &self.q * &other.r + &other.q * &self.r,
            &self.r * &other.r,
            d,
        )
    }

    pub fn sub(&self, other: &Surd) -> Result<Surd> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Surd {
        Surd {
            p: -&self.p,
            q: -&self.q,
            r: self.r.clone(),
            d: self.d,
        }
    }

    pub fn mul(&self, other: &Surd) -> Result<Surd> {
        let d = self.join_field(other)?;
        Surd::new(
            &self.p * &other.p + &self.q * &other.q * BigInt::from(self.d.max(other.d)),
            &self.p * &other.q + &self.q * &other.p,
            &self.r * &other.r,
            d,
        )
    }

    /// Multiplicative inverse; fails on zero.
    pub fn recip(&self) -> Result<Surd> {
        if self.is_zero() {
            return Err(AbcfError::InvalidDenominator("reciprocal of zero".into()));
        }
        let norm = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        Surd::new(&self.r * &self.p, -(&self.r * &self.q), norm, self.d)
    }

    pub fn div(&self, other: &Surd) -> Result<Surd> {
        self.mul(&other.recip()?)
    }

    /// Sign of the value: `-1`, `0`, or `1`.
    pub fn signum(&self) -> i32 {
        // r > 0, so only the numerator p + q*sqrt(d) matters.
        let sp = match self.p.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        };
        if self.q.is_zero() {
            return sp;
        }
        let sq = if self.q.is_negative() { -1 } else { 1 };
        if sp == 0 {
            return sq;
        }
        if sp == sq {
            return sp;
        }
        // Opposite signs: compare p^2 against q^2 d.
        let p2 = &self.p * &self.p;
        let q2d = &self.q * &self.q * BigInt::from(self.d);
        match p2.cmp(&q2d) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison within a common field.
    pub fn try_cmp(&self, other: &Surd) -> Result<Ordering> {
        let diff = self.sub(other)?;
        Ok(match diff.signum() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Exact floor to a big integer.
    pub fn floor_int(&self) -> BigInt {
        if self.d == 0 {
            return self.p.div_floor(&self.r);
        }
        // Floor of q*sqrt(d) via the integer square root of q^2 d.
        let t = (&self.q * &self.q * BigInt::from(self.d)).sqrt();
        let m = if self.q.is_negative() {
            let back = &t * &t;
            let exact = back == &self.q * &self.q * BigInt::from(self.d);
            if exact {
                -t
            } else {
                -t - BigInt::one()
            }
        } else {
            t
        };
        let mut c = (&self.p + m).div_floor(&self.r);
        // The estimate is within one; fix it with exact comparisons.
        loop {
            let lo = self.sub(&Surd::from_int(c.clone())).expect("same field");
            if lo.signum() < 0 {
                c -= 1;
                continue;
            }
            let hi = self
                .sub(&Surd::from_int(&c + BigInt::one()))
                .expect("same field");
            if hi.signum() >= 0 {
                c += 1;
                continue;
            }
            return c;
        }
    }

    /// Nearest-double approximation.
    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::INFINITY * self.p.sign_f64());
        let q = self.q.to_f64().unwrap_or(f64::INFINITY * self.q.sign_f64());
        let r = self.r.to_f64().unwrap_or(f64::INFINITY);
        (p + q * (self.d as f64).sqrt()) / r
    }
}

trait SignF64 {
    fn sign_f64(&self) -> f64;
}

impl SignF64 for BigInt {
    fn sign_f64(&self) -> f64 {
        if self.is_negative() {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 0 {
            if self.r.is_one() {
                return write!(f, "{}", self.p);
            }
            return write!(f, "{}/{}", self.p, self.r);
        }
        let radical = if self.q.is_one() {
            format!("sqrt({})", self.d)
        } else if self.q == BigInt::from(-1) {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", self.q, self.d)
        };
        let numerator = if self.p.is_zero() {
            radical
        } else if self.q.is_negative() {
            format!("{}{}", self.p, radical)
        } else {
            format!("{}+{}", self.p, radical)
        };
        if self.r.is_one() {
            write!(f, "{numerator}")
        } else {
            write!(f, "({numerator})/{}", self.r)
        }
    }
}

/// A point of the extended real line.
///
/// There is a single point at infinity, as befits the projective action of
/// unimodular maps; where an order comparison is required, infinity counts
/// as larger than every finite value.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtendedReal {
    Exact(Surd),
    Float(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn from_int(n: i64) -> Self {
        ExtendedReal::Exact(Surd::from_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        Ok(ExtendedReal::Exact(Surd::from_ratio(num, den)?))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExtendedReal::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExtendedReal::Exact(s) => s.is_zero(),
            ExtendedReal::Float(v) => *v == 0.0,
            ExtendedReal::Infinity => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedReal::Exact(s) => s.to_f64(),
            ExtendedReal::Float(v) => *v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    /// Exact payload, if this is an exact point.
    pub fn as_surd(&self) -> Option<&Surd> {
        match self {
            ExtendedReal::Exact(s) => Some(s),
            _ => None,
        }
    }

    /// `x + k`.
    pub fn translate(&self, k: i64) -> ExtendedReal {
        match self {
            ExtendedReal::Exact(s) => {
                ExtendedReal::Exact(s.add(&Surd::from_int(k)).expect("integer stays in field"))
            }
            ExtendedReal::Float(v) => ExtendedReal::Float(v + k as f64),
            ExtendedReal::Infinity => ExtendedReal::Infinity,
        }
    }

    /// `-1/x`, with `0` and infinity exchanged.
    pub fn recip_neg(&self) -> ExtendedReal {
        match self {
            ExtendedReal::Exact(s) => {
                if s.is_zero() {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Exact(s.recip().expect("nonzero").neg())
                }
            }
            ExtendedReal::Float(v) => {
                if *v == 0.0 {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Float(-1.0 / v)
                }
            }
            ExtendedReal::Infinity => ExtendedReal::Exact(Surd::zero()),
        }
    }

    pub fn neg(&self) -> ExtendedReal {
        match self {
            ExtendedReal::Exact(s) => ExtendedReal::Exact(s.neg()),
            ExtendedReal::Float(v) => ExtendedReal::Float(-v),
            ExtendedReal::Infinity => ExtendedReal::Infinity,
        }
    }

    /// Order comparison; infinity compares above every finite point, and
    /// exact-versus-float comparisons are decided exactly by lifting the
    /// float to a dyadic rational.
    pub fn try_cmp(&self, other: &ExtendedReal) -> Result<Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Infinity, Infinity) => Ok(Ordering::Equal),
            (Infinity, _) => Ok(Ordering::Greater),
            (_, Infinity) => Ok(Ordering::Less),
            (Exact(x), Exact(y)) => x.try_cmp(y),
            (Float(x), Float(y)) => x
                .partial_cmp(y)
                .ok_or_else(|| AbcfError::DomainError("comparison with NaN".into())),
            (Exact(x), Float(y)) => x.try_cmp(&Surd::from_f64_exact(*y)?),
            (Float(x), Exact(y)) => Surd::from_f64_exact(*x)?.try_cmp(y),
        }
    }

    /// `self < other`, exactly.
    pub fn lt(&self, other: &ExtendedReal) -> Result<bool> {
        Ok(self.try_cmp(other)? == Ordering::Less)
    }

    /// `self >= other`, exactly.
    pub fn ge(&self, other: &ExtendedReal) -> Result<bool> {
        Ok(self.try_cmp(other)? != Ordering::Less)
    }

    /// Semantic equality across representations.
    pub fn same_point(&self, other: &ExtendedReal) -> Result<bool> {
        Ok(self.try_cmp(other)? == Ordering::Equal)
    }
}

impl From<i64> for ExtendedReal {
    fn from(n: i64) -> Self {
        ExtendedReal::from_int(n)
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            ExtendedReal::Float(v)
        } else {
            ExtendedReal::Infinity
        }
    }
}

impl From<Surd> for ExtendedReal {
    fn from(s: Surd) -> Self {
        ExtendedReal::Exact(s)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Exact(s) => write!(f, "{s}"),
            ExtendedReal::Float(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

/// A letter of a word in the generators: a translation power or the flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    /// `x -> x + k`.
    T(i64),
    /// `x -> -1/x`.
    S,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::S => write!(f, "S"),
            Letter::T(1) => write!(f, "T"),
            Letter::T(k) => write!(f, "T^{k}"),
        }
    }
}

/// An integer matrix `(p q; r s)` of determinant one, acting on the extended
/// line by `x -> (p x + q) / (r x + s)`.
///
/// Matrices are kept projectively normalized: the first nonzero entry in
/// reading order is positive, so structural equality is projective equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMap {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    s: BigInt,
}

impl UnimodularMap {
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        s: impl Into<BigInt>,
    ) -> Result<Self> {
        let (p, q, r, s) = (p.into(), q.into(), r.into(), s.into());
        let det = &p * &s - &q * &r;
        if det != BigInt::one() {
            return Err(AbcfError::DomainError(format!(
                "matrix ({p} {q}; {r} {s}) has determinant {det}, expected 1"
            )));
        }
        let mut m = UnimodularMap { p, q, r, s };
        m.normalize_sign();
        Ok(m)
    }

    fn normalize_sign(&mut self) {
        let lead = [&self.p, &self.q, &self.r, &self.s]
            .into_iter()
            .find(|v| !v.is_zero());
        if let Some(v) = lead {
            if v.is_negative() {
                self.p = -&self.p;
                self.q = -&self.q;
                self.r = -&self.r;
                self.s = -&self.s;
            }
        }
    }

    pub fn identity() -> Self {
        UnimodularMap::new(1, 0, 0, 1).expect("identity")
    }

    /// The flip `S: x -> -1/x`.
    pub fn gen_s() -> Self {
        UnimodularMap::new(0, -1, 1, 0).expect("flip")
    }

    /// The translation `T^k: x -> x + k`.
    pub fn gen_t(k: i64) -> Self {
        UnimodularMap::new(1, k, 0, 1).expect("translation")
    }

    pub fn from_letter(letter: Letter) -> Self {
        match letter {
            Letter::S => UnimodularMap::gen_s(),
            Letter::T(k) => UnimodularMap::gen_t(k),
        }
    }

    /// Matrix entries `(p, q, r, s)`.
    pub fn entries(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.p, &self.q, &self.r, &self.s)
    }

    /// `self * other`, the map applying `other` first.
    pub fn compose(&self, other: &UnimodularMap) -> UnimodularMap {
        let mut m = UnimodularMap {
            p: &self.p * &other.p + &self.q * &other.r,
            q: &self.p * &other.q + &self.q * &other.s,
            r: &self.r * &other.p + &self.s * &other.r,
            s: &self.r * &other.q + &self.s * &other.s,
        };
        m.normalize_sign();
        m
    }

    pub fn inverse(&self) -> UnimodularMap {
        let mut m = UnimodularMap {
            p: self.s.clone(),
            q: -&self.q,
            r: -&self.r,
            s: self.p.clone(),
        };
        m.normalize_sign();
        m
    }

    pub fn trace(&self) -> BigInt {
        &self.p + &self.s
    }

    /// Applies the fractional linear map, with poles sent to infinity and
    /// infinity sent to `p/r`.
    pub fn apply(&self, x: &ExtendedReal) -> ExtendedReal {
        match x {
            ExtendedReal::Infinity => {
                if self.r.is_zero() {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Exact(
                        Surd::new(self.p.clone(), 0, self.r.clone(), 0)
                            .expect("nonzero denominator"),
                    )
                }
            }
            ExtendedReal::Float(v) => {
                let p = self.p.to_f64().unwrap_or(f64::NAN);
                let q = self.q.to_f64().unwrap_or(f64::NAN);
                let r = self.r.to_f64().unwrap_or(f64::NAN);
                let s = self.s.to_f64().unwrap_or(f64::NAN);
                let den = r * v + s;
                if den == 0.0 {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Float((p * v + q) / den)
                }
            }
            ExtendedReal::Exact(x) => {
                let big = |b: &BigInt| Surd::from_int(b.clone());
                let num = big(&self.p)
                    .mul(x)
                    .and_then(|t| t.add(&big(&self.q)))
                    .expect("field closed under integer maps");
                let den = big(&self.r)
                    .mul(x)
                    .and_then(|t| t.add(&big(&self.s)))
                    .expect("field closed under integer maps");
                if den.is_zero() {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Exact(num.div(&den).expect("nonzero denominator"))
                }
            }
        }
    }

    /// Both real fixed points in ascending order, or the single parabolic
    /// fixed point. Elliptic matrices (trace squared below four) have none.
    pub fn fixed_points(&self) -> Result<Vec<Surd>> {
        // Fixed points solve r x^2 + (s - p) x - q = 0.
        if self.r.is_zero() {
            // Translation-like: fixed point at infinity; finite one iff s != p.
            if self.s == self.p {
                return Ok(vec![]);
            }
            return Ok(vec![Surd::new(self.q.clone(), 0, &self.p - &self.s, 0)?]);
        }
        let tr = self.trace();
        let disc = &tr * &tr - BigInt::from(4);
        match disc.sign() {
            num_bigint::Sign::Minus => Err(AbcfError::NonconvergentSequence(
                "elliptic map has no real fixed point".into(),
            )),
            num_bigint::Sign::NoSign => Ok(vec![Surd::new(&self.p - &self.s, 0, 2 * &self.r, 0)?]),
            num_bigint::Sign::Plus => {
                // x = (p - s +/- sqrt(disc)) / (2r); disc = t^2 * d with d
                // square-free, so sqrt(disc) = t * sqrt(d).
                let d_u64 = disc.to_u64().ok_or_else(|| {
                    AbcfError::UnsupportedField(
                        "fixed-point discriminant exceeds the supported range".into(),
                    )
                })?;
                let (t, d) = square_free_decompose(d_u64)?;
                let lo = Surd::new(&self.p - &self.s, -BigInt::from(t), 2 * &self.r, d)?;
                let hi = Surd::new(&self.p - &self.s, BigInt::from(t), 2 * &self.r, d)?;
                if lo.try_cmp(&hi)? == Ordering::Greater {
                    Ok(vec![hi, lo])
                } else {
                    Ok(vec![lo, hi])
                }
            }
        }
    }

    /// Derivative `1 / (r x + s)^2` at an exact point.
    pub fn derivative_abs_squared_denominator(&self, x: &Surd) -> Result<Surd> {
        let den = Surd::from_int(self.r.clone())
            .mul(x)?
            .add(&Surd::from_int(self.s.clone()))?;
        den.mul(&den)
    }
}

impl fmt::Display for UnimodularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.p, self.q, self.r, self.s)
    }
}

/// Product of the letters in reading order: the word `[T^2, S]` becomes the
/// matrix of `T^2 * S`, the map applying `S` first.
pub fn word_to_matrix(word: &[Letter]) -> UnimodularMap {
    let mut m = UnimodularMap::identity();
    for letter in word {
        m = m.compose(&UnimodularMap::from_letter(*letter));
    }
    m
}

/// Composes the letters as successively applied maps: the first letter of
/// `word` acts first. This is the matrix of an orbit whose step `i` applied
/// `word[i]`.
pub fn applied_word_matrix(word: &[Letter]) -> UnimodularMap {
    let mut m = UnimodularMap::identity();
    for letter in word {
        m = UnimodularMap::from_letter(*letter).compose(&m);
    }
    m
}

// ---------------------------------------------------------------------------
// Number syntax
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Surd),
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
    Infinity,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '(' => {
                tokens.push(Token::Open);
                i += 1;
            }
            ')' => {
                tokens.push(Token::Close);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                let mut seen_dot = false;
                while i < chars.len()
                    && (chars[i].is_ascii_digit() || (chars[i] == '.' && !seen_dot))
                {
                    if chars[i] == '.' {
                        seen_dot = true;
                    }
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                tokens.push(Token::Number(parse_decimal(&text)?));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "sqrt" => tokens.push(Token::Sqrt),
                    "inf" | "infinity" => tokens.push(Token::Infinity),
                    other => {
                        return Err(AbcfError::ParseError(format!(
                            "unknown identifier '{other}'"
                        )))
                    }
                }
            }
            other => {
                return Err(AbcfError::ParseError(format!(
                    "unexpected character '{other}'"
                )))
            }
        }
    }
    Ok(tokens)
}

fn parse_decimal(text: &str) -> Result<Surd> {
    if text == "." {
        return Err(AbcfError::ParseError("lone decimal point".into()));
    }
    match text.find('.') {
        None => {
            let n: BigInt = text
                .parse()
                .map_err(|_| AbcfError::ParseError(format!("bad integer '{text}'")))?;
            Ok(Surd::from_int(n))
        }
        Some(pos) => {
            let digits: String = text.chars().filter(|c| *c != '.').collect();
            let scale = text.len() - pos - 1;
            let n: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits
                    .parse()
                    .map_err(|_| AbcfError::ParseError(format!("bad decimal '{text}'")))?
            };
            Surd::new(n, 0, BigInt::from(10u32).pow(scale as u32), 0)
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, token: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == token => Ok(()),
            other => Err(AbcfError::ParseError(format!(
                "expected {token:?}, found {other:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Surd> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Surd> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?)?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(AbcfError::ParseError("division by zero".into()));
                    }
                    acc = acc.div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Surd> {
        match self.next() {
            Some(Token::Minus) => Ok(self.factor()?.neg()),
            Some(Token::Plus) => self.factor(),
            Some(Token::Number(s)) => Ok(s),
            Some(Token::Open) => {
                let inner = self.expr()?;
                self.expect(Token::Close)?;
                Ok(inner)
            }
            Some(Token::Sqrt) => {
                self.expect(Token::Open)?;
                let inner = self.expr()?;
                self.expect(Token::Close)?;
                let (num, den) = inner.to_ratio().ok_or_else(|| {
                    AbcfError::ParseError("nested radicals are not supported".into())
                })?;
                if num.is_negative() {
                    return Err(AbcfError::ParseError(
                        "square root of a negative number".into(),
                    ));
                }
                // sqrt(num/den) = sqrt(num*den) / den.
                let inside = (&num * &den)
                    .to_u64()
                    .ok_or_else(|| AbcfError::ParseError("radicand too large".into()))?;
                Surd::new(0, 1, den, inside)
            }
            other => Err(AbcfError::ParseError(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses the exact number syntax: integers, fractions, finite decimals
/// (converted exactly), and quadratic surd expressions such as
/// `(1-sqrt(5))/2` or `sqrt(2)-1`. `inf` denotes the point at infinity.
pub fn parse_number(input: &str) -> Result<ExtendedReal> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(AbcfError::ParseError("empty number".into()));
    }
    // Allow an optional sign in front of `inf`.
    let (sign_stripped, _negated) = match tokens.as_slice() {
        [Token::Minus, rest @ ..] => (rest, true),
        [Token::Plus, rest @ ..] => (rest, false),
        rest => (rest, false),
    };
    if sign_stripped == [Token::Infinity] {
        return Ok(ExtendedReal::Infinity);
    }
    if tokens.contains(&Token::Infinity) {
        return Err(AbcfError::ParseError(
            "infinity cannot appear inside an expression".into(),
        ));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(AbcfError::ParseError("trailing input after number".into()));
    }
    Ok(ExtendedReal::Exact(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(p: i64, q: i64, r: i64, d: u64) -> Surd {
        Surd::new(p, q, r, d).unwrap()
    }

    #[test]
    fn normalization_reduces_square_parts_and_common_factors() {
        let s = surd(2, 0, 4, 5);
        assert_eq!(s.coefficients().0, &BigInt::from(1));
        assert_eq!(s.coefficients().2, &BigInt::from(2));
        assert_eq!(s.field(), 0);

        let s = surd(-2, 2, -4, 5);
        let (p, q, r, d) = s.coefficients();
        assert_eq!(
            (p, q, r, d),
            (&BigInt::from(1), &BigInt::from(-1), &BigInt::from(2), 5)
        );

        // sqrt(8) = 2 sqrt(2)
        let s = surd(0, 1, 1, 8);
        let (_, q, _, d) = s.coefficients();
        assert_eq!((q, d), (&BigInt::from(2), 2));
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(Surd::new(1, 0, 0, 0).is_err());
    }

    #[test]
    fn sign_and_comparison_are_exact() {
        // sqrt(2) < 3/2
        let root2 = surd(0, 1, 1, 2);
        let three_halves = surd(3, 0, 2, 0);
        assert_eq!(root2.try_cmp(&three_halves).unwrap(), Ordering::Less);
        // (1+sqrt(5))/2 > 8/5
        let phi = surd(1, 1, 2, 5);
        assert_eq!(phi.try_cmp(&surd(8, 0, 5, 0)).unwrap(), Ordering::Greater);
        assert_eq!(phi.try_cmp(&phi).unwrap(), Ordering::Equal);
        assert!(surd(0, -1, 1, 2).signum() < 0);
    }

    #[test]
    fn mixing_fields_fails() {
        let root2 = surd(0, 1, 1, 2);
        let root5 = surd(0, 1, 1, 5);
        assert!(root2.add(&root5).is_err());
    }

    #[test]
    fn floor_handles_all_sign_cases() {
        assert_eq!(surd(7, 0, 2, 0).floor_int(), BigInt::from(3));
        assert_eq!(surd(-7, 0, 2, 0).floor_int(), BigInt::from(-4));
        assert_eq!(surd(6, 0, 2, 0).floor_int(), BigInt::from(3));
        assert_eq!(surd(1, 1, 2, 5).floor_int(), BigInt::from(1)); // phi
        assert_eq!(surd(0, -1, 1, 2).floor_int(), BigInt::from(-2)); // -sqrt 2
        assert_eq!(surd(0, 1, 1, 2).floor_int(), BigInt::from(1));
        assert_eq!(surd(0, 2, 1, 2).floor_int(), BigInt::from(2)); // 2 sqrt 2
    }

    #[test]
    fn float_lift_is_exact() {
        for x in [0.5, -0.75, 3.0, 1.0 / 3.0, -123.456, 1e-12] {
            let s = Surd::from_f64_exact(x).unwrap();
            assert_eq!(s.to_f64(), x);
        }
    }

    #[test]
    fn arithmetic_identities() {
        let phi = surd(1, 1, 2, 5);
        // phi^2 = phi + 1
        let lhs = phi.mul(&phi).unwrap();
        let rhs = phi.add(&Surd::one()).unwrap();
        assert_eq!(lhs, rhs);
        // 1/phi = phi - 1
        let lhs = phi.recip().unwrap();
        let rhs = phi.sub(&Surd::one()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn moebius_examples() {
        let s = UnimodularMap::gen_s();
        let two = ExtendedReal::from_int(2);
        assert_eq!(s.apply(&two), ExtendedReal::from_ratio(-1, 2).unwrap());

        let t3 = UnimodularMap::gen_t(3);
        assert_eq!(t3.apply(&ExtendedReal::Infinity), ExtendedReal::Infinity);

        // S((3-sqrt 5)/2) = -(3+sqrt 5)/2
        let x = ExtendedReal::Exact(surd(3, -1, 2, 5));
        let expect = ExtendedReal::Exact(surd(-3, -1, 2, 5));
        assert_eq!(s.apply(&x), expect);

        // Pole goes to infinity.
        let m = UnimodularMap::new(1, 0, 1, 1).unwrap();
        assert_eq!(m.apply(&ExtendedReal::from_int(-1)), ExtendedReal::Infinity);
    }

    #[test]
    fn word_matrix_matches_reading_order() {
        let m = word_to_matrix(&[Letter::T(2), Letter::S]);
        let (p, q, r, s) = m.entries();
        assert_eq!(
            (p, q, r, s),
            (
                &BigInt::from(2),
                &BigInt::from(-1),
                &BigInt::from(1),
                &BigInt::from(0)
            )
        );
    }

    #[test]
    fn applied_word_matrix_acts_step_by_step() {
        let word = [Letter::S, Letter::T(2), Letter::S, Letter::T(-1)];
        let x = ExtendedReal::from_ratio(5, 3).unwrap();
        let mut stepped = x.clone();
        for letter in word {
            stepped = UnimodularMap::from_letter(letter).apply(&stepped);
        }
        assert_eq!(applied_word_matrix(&word).apply(&x), stepped);
    }

    #[test]
    fn projective_normalization_makes_equality_work() {
        let a = UnimodularMap::new(2, -1, 1, 0).unwrap();
        let b = word_to_matrix(&[Letter::T(2), Letter::S]);
        assert_eq!(a, b);
        let inv = a.inverse();
        assert_eq!(a.compose(&inv), UnimodularMap::identity());
    }

    #[test]
    fn parabolic_and_hyperbolic_fixed_points() {
        // T^2 S = (2 -1; 1 0): parabolic with fixed point 1.
        let m = word_to_matrix(&[Letter::T(2), Letter::S]);
        let fps = m.fixed_points().unwrap();
        assert_eq!(fps, vec![Surd::one()]);

        // T^3 S = (3 -1; 1 0): fixed points (3 +/- sqrt 5)/2.
        let m = word_to_matrix(&[Letter::T(3), Letter::S]);
        let fps = m.fixed_points().unwrap();
        assert_eq!(fps, vec![surd(3, -1, 2, 5), surd(3, 1, 2, 5)]);
    }

    #[test]
    fn parse_round_trips() {
        let cases = [
            ("-4/5", surd(-4, 0, 5, 0)),
            ("0.36", surd(9, 0, 25, 0)),
            ("(1-sqrt(5))/2", surd(1, -1, 2, 5)),
            ("sqrt(2)-1", surd(-1, 1, 1, 2)),
            ("2", surd(2, 0, 1, 0)),
            ("-0.5", surd(-1, 0, 2, 0)),
            ("(3+sqrt(5))/2", surd(3, 1, 2, 5)),
            ("sqrt(9/4)", surd(3, 0, 2, 0)),
        ];
        for (text, expect) in cases {
            let got = parse_number(text).unwrap();
            assert_eq!(got, ExtendedReal::Exact(expect.clone()), "parsing {text}");
            // Display output parses back to the same value.
            let redisplayed = parse_number(&format!("{}", got)).unwrap();
            assert_eq!(
                redisplayed,
                ExtendedReal::Exact(expect),
                "round trip {text}"
            );
        }
        assert_eq!(parse_number("inf").unwrap(), ExtendedReal::Infinity);
        assert_eq!(parse_number("-inf").unwrap(), ExtendedReal::Infinity);
        assert!(parse_number("sqrt(-2)").is_err());
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("bogus").is_err());
    }

    #[test]
    fn extended_real_comparisons() {
        let half = ExtendedReal::from_ratio(1, 2).unwrap();
        let float_half = ExtendedReal::Float(0.5);
        assert!(half.same_point(&float_half).unwrap());
        assert!(ExtendedReal::Infinity.ge(&half).unwrap());
        let near = ExtendedReal::Float(0.5 + 1e-17);
        // 0.5 + 1e-17 rounds to exactly 0.5 in f64.
        assert!(half.same_point(&near).unwrap());
        let g = ExtendedReal::Exact(surd(-1, 1, 2, 5));
        assert!(g.lt(&ExtendedReal::Float(0.619)).unwrap());
        assert!(!g.lt(&ExtendedReal::Float(0.618)).unwrap());
    }
}
