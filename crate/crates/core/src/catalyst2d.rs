//! Two-dimensional catalysts.
//!
//! A catalyst `c = (c1, c2)` with `c1 ≥ c2 > 0` is described by its ratio
//! `t = c2 / c1 ∈ (0, 1]`. For every pair `(r1, r2)` of indices drawn from
//! `L ∪ {n+1}` (with `L` the critical set, `r1 ≥ r2`, `r2 ≤ n`) the catalyst
//! is useless exactly when `M ≤ t ≤ m` for one of those pairs, where
//!
//! ```text
//! m = min{ x[r1-1]/x[r2], y[r1-1]/y[r2] }
//! M = max{ x[r1]/x[r2-1], y[r1]/y[r2-1] }      (M = 0 when r1 = n+1)
//! ```
//!
//! A ratio term with undefined entries (index `n+1`, or `0/0`) imposes no
//! constraint, and `positive/0` is `+∞`. The useful ratios therefore form
//!
//! ```text
//! S = ∩ over (r1, r2) of ( (0, M) ∪ (m, 1) ).
//! ```
//!
//! Repeated values in `x ⊗ c` only affect which equal terms are counted in a
//! tail sum, never its value, so no tie-breaking rule is needed here.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::probvec::{serialize_rat, ProbVec, Rat};
use crate::vidal::{catalysis_admissible, critical_set, TransformPair};

/// One constraint of the intersection defining `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairBound {
    pub r1: usize,
    pub r2: usize,
    /// Lower end of the useless band; `None` is `+∞`.
    #[serde(serialize_with = "serialize_opt_rat")]
    pub m: Option<Rat>,
    /// Upper end of the useful band below it.
    #[serde(rename = "M", serialize_with = "serialize_rat")]
    pub big_m: Rat,
}

fn serialize_opt_rat<S: Serializer>(v: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_str("inf"),
    }
}

enum Term {
    Finite(Rat),
    Infinite,
    Undefined,
}

fn ratio_term(numer: Option<&Rat>, denom: &Rat) -> Term {
    match numer {
        None => Term::Undefined,
        Some(a) if denom.is_zero() => {
            if a.is_zero() {
                Term::Undefined
            } else {
                Term::Infinite
            }
        }
        Some(a) => Term::Finite(a / denom),
    }
}

impl PairBound {
    fn compute(pair: &TransformPair, r1: usize, r2: usize) -> Self {
        let (x, y) = (pair.x(), pair.y());

        let mut m: Option<Rat> = None;
        for v in [x, y] {
            if let Term::Finite(q) = ratio_term(v.checked_get(r1 - 1), v.get(r2)) {
                m = Some(match m {
                    Some(cur) if cur <= q => cur,
                    _ => q,
                });
            }
        }

        let mut big_m = Rat::zero();
        for v in [x, y] {
            match ratio_term(v.checked_get(r1), v.get(r2 - 1)) {
                Term::Finite(q) if q > big_m => big_m = q,
                // unreachable for sorted vectors; an infinite M leaves no band
                Term::Infinite => big_m = Rat::one(),
                _ => {}
            }
        }
        PairBound { r1, r2, m, big_m }
    }

    /// `(0, M) ∪ (m, 1)` restricted to `(0, 1)`.
    pub fn useful_set(&self) -> RatioRegion {
        let zero = Rat::zero();
        let one = Rat::one();
        let mut intervals = Vec::new();
        let hi = (&self.big_m).min(&one).clone();
        if hi > zero {
            intervals.push(Interval::new(zero.clone(), hi));
        }
        if let Some(m) = &self.m {
            if *m < one {
                intervals.push(Interval::new(m.max(&zero).clone(), one));
            }
        }
        RatioRegion::from_intervals(intervals)
    }
}

/// All constraints `(r1, r2)` with `r1, r2 ∈ L ∪ {n+1}`, `r1 ≥ r2`, `r2 ≤ n`,
/// ordered by `r1` then `r2`.
pub fn pair_bounds(pair: &TransformPair) -> Vec<PairBound> {
    let n = pair.n();
    let critical = critical_set(pair);
    let mut r1_values = critical.indices().to_vec();
    if !critical.is_empty() {
        r1_values.push(n + 1);
    }
    let mut bounds = Vec::new();
    for &r1 in &r1_values {
        for &r2 in critical.indices().iter().filter(|&&r2| r2 <= r1) {
            bounds.push(PairBound::compute(pair, r1, r2));
        }
    }
    bounds
}

/// Open interval `(lo, hi)` with `lo < hi`. Serializes as `["lo", "hi"]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo.to_string(), self.hi.to_string()].serialize(s)
    }
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo < hi);
        Interval { lo, hi }
    }

    pub fn contains(&self, t: &Rat) -> bool {
        self.lo < *t && *t < self.hi
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo);
        let hi = (&self.hi).min(&other.hi);
        (lo < hi).then(|| Interval::new(lo.clone(), hi.clone()))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A finite union of disjoint open subintervals of `(0, 1)`, sorted by `lo`.
/// Intervals that merely touch are kept apart: their shared endpoint is not a
/// member.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct RatioRegion {
    intervals: Vec<Interval>,
}

impl RatioRegion {
    pub fn empty() -> Self {
        RatioRegion::default()
    }

    /// The whole open unit interval.
    pub fn unit() -> Self {
        RatioRegion {
            intervals: vec![Interval::new(Rat::zero(), Rat::one())],
        }
    }

    /// Normalizes a list of open intervals: sorts, and merges intervals that
    /// overlap in more than a point.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo < last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        RatioRegion { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: &Rat) -> bool {
        self.intervals.iter().any(|iv| iv.contains(t))
    }

    pub fn intersect(&self, other: &RatioRegion) -> RatioRegion {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(iv) = a.intersect(b) {
                    out.push(iv);
                }
            }
        }
        RatioRegion::from_intervals(out)
    }

    /// Endpoints inside `(0, 1)`; these are excluded from the region.
    pub fn interior_endpoints(&self) -> Vec<Rat> {
        let (zero, one) = (Rat::zero(), Rat::one());
        let mut pts: Vec<Rat> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo.clone(), iv.hi.clone()])
            .filter(|p| *p > zero && *p < one)
            .collect();
        pts.dedup();
        pts
    }

    /// The same region expressed through `c1 = 1 / (1 + t)`, as intervals of
    /// `c1` sorted ascending.
    pub fn c1_intervals(&self) -> Vec<Interval> {
        let one = Rat::one();
        let to_c1 = |t: &Rat| &one / (&one + t);
        let mut out: Vec<Interval> = self
            .intervals
            .iter()
            .map(|iv| Interval::new(to_c1(&iv.hi), to_c1(&iv.lo)))
            .collect();
        out.reverse();
        out
    }
}

impl fmt::Display for RatioRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("empty");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// The set `S` of useful ratios `c2/c1`. Empty when catalysis cannot help at
/// all; the intersection over no constraints is `(0, 1)`.
pub fn region2(pair: &TransformPair) -> RatioRegion {
    if !catalysis_admissible(pair) {
        return RatioRegion::empty();
    }
    pair_bounds(pair)
        .iter()
        .fold(RatioRegion::unit(), |acc, b| acc.intersect(&b.useful_set()))
}

/// Decides whether `c` is a useful two-dimensional catalyst without forming
/// any ratio: each band `M ≤ c2/c1 ≤ m` is checked in cross-multiplied form.
pub fn is_useful_2d(pair: &TransformPair, c: &ProbVec) -> Result<bool> {
    if c.len() != 2 {
        return Err(Error::CatalystDimension {
            expected: 2,
            found: c.len(),
        });
    }
    if c.get(2).is_zero() {
        return Err(Error::ZeroCatalystComponent { index: 2 });
    }
    if !catalysis_admissible(pair) {
        return Ok(false);
    }
    let (c1, c2) = (c.get(1), c.get(2));
    let (x, y) = (pair.x(), pair.y());
    let blocked = pair_bounds(pair).iter().any(|b| {
        [x, y].iter().all(|v| {
            // M ≤ t: c1·v[r1] ≤ c2·v[r2-1]
            let lower = v
                .checked_get(b.r1)
                .is_none_or(|a| c1 * a <= c2 * v.get(b.r2 - 1));
            // t ≤ m: c2·v[r2] ≤ c1·v[r1-1]
            let upper = c2 * v.get(b.r2) <= c1 * v.get(b.r1 - 1);
            lower && upper
        })
    });
    Ok(!blocked)
}

pub fn exists_2d(pair: &TransformPair) -> bool {
    !region2(pair).is_empty()
}

/// The single-critical-index form of the existence test,
/// `min{x_n/x_l, y_n/y_l} < max{x_l/x_{l-1}, y_l/y_{l-1}}`.
/// `None` unless catalysis is admissible and `L = {l}`.
pub fn single_critical_condition(pair: &TransformPair) -> Option<bool> {
    if !catalysis_admissible(pair) {
        return None;
    }
    let critical = critical_set(pair);
    let &[l] = critical.indices() else {
        return None;
    };
    let n = pair.n();
    let (x, y) = (pair.x(), pair.y());
    let mut lhs: Option<Rat> = None; // None = +∞
    let mut rhs = Rat::zero();
    for v in [x, y] {
        if let Term::Finite(q) = ratio_term(Some(v.get(n)), v.get(l)) {
            lhs = Some(lhs.map_or(q.clone(), |cur| cur.min(q)));
        }
        if let Term::Finite(q) = ratio_term(Some(v.get(l)), v.get(l - 1)) {
            rhs = rhs.max(q);
        }
    }
    Some(lhs.is_some_and(|lhs| lhs < rhs))
}

/// For admissible three-dimensional pairs the useful ratios are exactly
/// `(y3/y2, y2/y1)`, independent of `x`. `None` outside that case.
pub fn three_dim_region(pair: &TransformPair) -> Option<RatioRegion> {
    if pair.n() != 3 || !catalysis_admissible(pair) {
        return None;
    }
    let y = pair.y();
    let lo = y.get(3) / y.get(2);
    let hi = y.get(2) / y.get(1);
    Some(if lo < hi {
        RatioRegion::from_intervals(vec![Interval::new(lo, hi)])
    } else {
        RatioRegion::empty()
    })
}
