//! Exact probability vectors: construction, tensor products, tail sums and
//! majorization.
//!
//! All arithmetic is carried out over arbitrary-precision rationals. Vectors
//! are always stored sorted nonincreasingly; positions in the public API and in
//! error messages are 1-based.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always kept in reduced form with positive denominator.
pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Parses a rational literal: a decimal (`0.25`, `-1.5`, `3`) or a fraction
/// (`1/4`). Decimals are converted exactly, so `0.801` becomes `801/1000`.
pub fn parse_rat(input: &str) -> Result<Rat> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let fail = |reason: &str| Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(fail("empty number"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num).ok_or_else(|| fail("bad numerator"))?;
        let den = parse_decimal(den).ok_or_else(|| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(&s).ok_or_else(|| fail("expected a decimal or a fraction"))
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rat::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Parses a comma-separated vector literal such as `0.6, 0.2, 0.2` or
/// `1/2,1/4,1/4`. Entries are returned in input order, unvalidated.
pub fn parse_vector(input: &str) -> Result<Vec<Rat>> {
    if input.trim().is_empty() {
        return Err(Error::EmptyVector);
    }
    input.split(',').map(parse_rat).collect()
}

/// Decimal rendering with 6 significant digits. Display only; the exact
/// fraction is authoritative.
pub fn to_decimal(value: &Rat) -> String {
    let v = value.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    if !(-5..=6).contains(&exponent) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub(crate) fn serialize_rat<S: Serializer>(
    value: &Rat,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

pub(crate) fn serialize_rats<S: Serializer>(
    values: &[Rat],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

/// A probability vector with exact nonnegative components summing to one,
/// sorted nonincreasingly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ProbVec {
    #[serde(serialize_with = "serialize_rats")]
    components: Vec<Rat>,
}

/// Builds a probability vector from raw entries.
///
/// With `normalize` on, entries are divided by their sum; otherwise they must
/// already sum to exactly one. The result is sorted nonincreasingly.
pub fn make_probvec(raw: Vec<Rat>, normalize: bool) -> Result<ProbVec> {
    if raw.is_empty() {
        return Err(Error::EmptyVector);
    }
    if let Some((i, v)) = raw.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::NegativeEntry {
            index: i + 1,
            value: v.clone(),
        });
    }
    let total: Rat = raw.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroTotal);
    }
    let mut components = if normalize {
        raw.into_iter().map(|v| v / &total).collect()
    } else if total.is_one() {
        raw
    } else {
        return Err(Error::NotNormalized { sum: total });
    };
    components.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ProbVec { components })
}

impl ProbVec {
    /// Same as [`make_probvec`] without normalization.
    pub fn new(raw: Vec<Rat>) -> Result<Self> {
        make_probvec(raw, false)
    }

    pub fn normalized(raw: Vec<Rat>) -> Result<Self> {
        make_probvec(raw, true)
    }

    /// Parses a vector literal and requires it to sum to exactly one.
    pub fn parse(input: &str) -> Result<Self> {
        make_probvec(parse_vector(input)?, false)
    }

    /// The pure state `(1)`.
    pub fn pure() -> Self {
        ProbVec {
            components: vec![Rat::one()],
        }
    }

    /// Uniform vector of dimension `d`.
    pub fn uniform(d: usize) -> Self {
        assert!(d > 0, "uniform vector needs d >= 1");
        let v = Rat::new(BigInt::one(), BigInt::from(d));
        ProbVec {
            components: vec![v; d],
        }
    }

    /// Two-dimensional catalyst `(1/(1+t), t/(1+t))` with ratio `c2/c1 = t`.
    pub fn from_ratio(t: &Rat) -> Result<Self> {
        make_probvec(vec![Rat::one(), t.clone()], true)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Rat] {
        &self.components
    }

    /// Component at 1-based position `i`.
    pub fn get(&self, i: usize) -> &Rat {
        assert!(
            i >= 1 && i <= self.len(),
            "index {i} out of range 1..={}",
            self.len()
        );
        &self.components[i - 1]
    }

    /// Like [`get`](Self::get), but `None` outside `1..=n`.
    pub fn checked_get(&self, i: usize) -> Option<&Rat> {
        i.checked_sub(1).and_then(|j| self.components.get(j))
    }

    pub fn tail_sums(&self) -> TailSums {
        tail_sums(self)
    }

    /// `self ⊕ 0`: the same vector with a trailing zero component.
    pub fn with_zero_appended(&self) -> Self {
        let mut components = self.components.clone();
        components.push(Rat::zero());
        ProbVec { components }
    }

    pub fn has_zero_component(&self) -> bool {
        self.components.iter().any(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    fn padded(&self, n: usize) -> Self {
        let mut components = self.components.clone();
        components.resize(n, Rat::zero());
        ProbVec { components }
    }
}

impl fmt::Display for ProbVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for ProbVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProbVec::parse(s)
    }
}

/// Suffix sums `E_l = a_l + ... + a_n` for `l = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSums {
    values: Vec<Rat>,
}

impl TailSums {
    /// `E_l` for 1-based `l`.
    pub fn get(&self, l: usize) -> &Rat {
        assert!(
            l >= 1 && l <= self.values.len(),
            "tail index {l} out of range"
        );
        &self.values[l - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }
}

pub fn tail_sums(a: &ProbVec) -> TailSums {
    let mut values = vec![Rat::zero(); a.len()];
    let mut acc = Rat::zero();
    for (slot, v) in values.iter_mut().zip(&a.components).rev() {
        acc += v;
        *slot = acc.clone();
    }
    TailSums { values }
}

/// Sorted tensor product: all pairwise products `a_i * b_j`, nonincreasing.
pub fn tensor(a: &ProbVec, b: &ProbVec) -> ProbVec {
    let mut components: Vec<Rat> = a
        .components
        .iter()
        .flat_map(|ai| b.components.iter().map(move |bj| ai * bj))
        .collect();
    components.sort_unstable_by(|p, q| q.cmp(p));
    ProbVec { components }
}

/// `a ≺ b`: every prefix sum of `a` is at most the matching prefix sum of `b`.
pub fn majorized_by(a: &ProbVec, b: &ProbVec) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut sa = Rat::zero();
    let mut sb = Rat::zero();
    for (ai, bi) in a.components.iter().zip(&b.components).take(a.len() - 1) {
        sa += ai;
        sb += bi;
        if sa > sb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brings `x` and `y` to a common dimension: the shorter one is padded with
/// zeros, then trailing positions where both vectors are zero are dropped.
pub fn common_dimension(x: &ProbVec, y: &ProbVec) -> (ProbVec, ProbVec) {
    let mut n = x.len().max(y.len());
    let (mut x, mut y) = (x.padded(n), y.padded(n));
    while n > 1 && x.components[n - 1].is_zero() && y.components[n - 1].is_zero() {
        n -= 1;
    }
    x.components.truncate(n);
    y.components.truncate(n);
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(s: &str) -> ProbVec {
        ProbVec::parse(s).unwrap()
    }

    #[test]
    fn parses_decimals_and_fractions_exactly() {
        assert_eq!(parse_rat("0.801").unwrap(), rat(801, 1000));
        assert_eq!(parse_rat(" 1/4 ").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-0.1").unwrap(), rat(-1, 10));
        assert_eq!(parse_rat("3").unwrap(), rat_int(3));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("0.5/0.25").unwrap(), rat_int(2));
        for bad in ["", "abc", "1/0", "1.2.3", "--1", "."] {
            assert!(parse_rat(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn make_probvec_sorts() {
        let v = make_probvec(parse_vector("0.2, 0.6, 0.2").unwrap(), false).unwrap();
        assert_eq!(v, pv("0.6,0.2,0.2"));
        assert_eq!(v.get(1), &rat(3, 5));
    }

    #[test]
    fn make_probvec_normalizes_geometric_vector() {
        let alpha = rat(801, 1000);
        let mut raw = vec![Rat::one()];
        for _ in 1..6 {
            let next = raw.last().unwrap() * &alpha;
            raw.push(next);
        }
        let total: Rat = raw.iter().sum();
        let v = make_probvec(raw.clone(), true).unwrap();
        assert_eq!(v.len(), 6);
        let sum: Rat = v.components().iter().sum();
        assert!(sum.is_one());
        for (got, r) in v.components().iter().zip(&raw) {
            assert_eq!(got, &(r / &total));
        }
    }

    #[test]
    fn make_probvec_errors() {
        assert_eq!(make_probvec(vec![], false), Err(Error::EmptyVector));
        assert!(matches!(
            make_probvec(parse_vector("0.5,0.5,-0.1").unwrap(), true),
            Err(Error::NegativeEntry { index: 3, .. })
        ));
        assert_eq!(
            make_probvec(vec![Rat::zero(), Rat::zero()], true),
            Err(Error::ZeroTotal)
        );
        assert!(matches!(
            make_probvec(parse_vector("0.5,0.4").unwrap(), false),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn tensor_examples() {
        let c = pv("0.6,0.2,0.2");
        assert_eq!(tensor(&ProbVec::pure(), &c), c);
        assert_eq!(
            tensor(&c, &pv("0.65,0.35")),
            pv("0.39,0.21,0.13,0.13,0.07,0.07")
        );
        assert_eq!(
            tensor(&pv("0.5,0.5"), &pv("0.5,0.5")),
            pv("0.25,0.25,0.25,0.25")
        );
    }

    #[test]
    fn tail_sum_examples() {
        let e = tail_sums(&pv("0.6,0.2,0.2"));
        assert_eq!(e.values(), &[rat_int(1), rat(2, 5), rat(1, 5)]);
        let e = tail_sums(&pv("1,0"));
        assert_eq!(e.values(), &[rat_int(1), Rat::zero()]);
        let e = tail_sums(&pv("0.5,0.25,0.25,0"));
        assert!(e.get(4).is_zero());
        assert_eq!(e.get(3), &rat(1, 4));
    }

    #[test]
    fn majorization_examples() {
        assert!(majorized_by(&pv("0.5,0.5"), &pv("1,0")).unwrap());
        let a = pv("0.6,0.2,0.2");
        let b = pv("0.5,0.4,0.1");
        assert!(!majorized_by(&a, &b).unwrap());
        assert!(!majorized_by(&b, &a).unwrap());
        assert!(majorized_by(&a, &a).unwrap());
        assert!(matches!(
            majorized_by(&a, &pv("1")),
            Err(Error::DimensionMismatch { left: 3, right: 1 })
        ));
    }

    #[test]
    fn common_dimension_examples() {
        let (x, y) = common_dimension(&pv("0.5,0.5"), &pv("0.5,0.25,0.25"));
        assert_eq!(x, pv("0.5,0.5,0"));
        assert_eq!(y, pv("0.5,0.25,0.25"));

        let (x, y) = common_dimension(&pv("0.4,0.4,0.1,0.1"), &pv("0.5,0.25,0.25,0"));
        assert_eq!((x.len(), y.len()), (4, 4));

        let (x, y) = common_dimension(&pv("0.6,0.2,0.2,0"), &pv("0.5,0.3,0.2,0"));
        assert_eq!(x, pv("0.6,0.2,0.2"));
        assert_eq!(y, pv("0.5,0.3,0.2"));

        let (x, y) = common_dimension(&pv("1,0"), &pv("1"));
        assert_eq!((x.len(), y.len()), (1, 1));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(4, 5)), "0.8");
        assert_eq!(to_decimal(&rat(1, 3)), "0.333333");
        assert_eq!(to_decimal(&rat(5, 9)), "0.555556");
        assert_eq!(to_decimal(&rat_int(1)), "1");
        assert_eq!(to_decimal(&Rat::zero()), "0");
        assert_eq!(to_decimal(&rat(1234567, 1000)), "1234.57");
    }
}
