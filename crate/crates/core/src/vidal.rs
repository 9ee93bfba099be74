//! Maximal LOCC conversion probability between pure states and the set of
//! indices where it is attained.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probvec::{common_dimension, serialize_rat, tail_sums, ProbVec, Rat, TailSums};

/// Minimum of `E_l(x) / E_l(y)` over all `l` with `E_l(y) > 0`.
///
/// Indices where `y` has no remaining weight contribute `+∞` and are skipped.
/// Since `E_1(x) = E_1(y) = 1` the result is at most one.
pub fn max_prob(x: &ProbVec, y: &ProbVec) -> Result<Rat> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(min_tail_ratio(&tail_sums(x), &tail_sums(y)))
}

pub(crate) fn min_tail_ratio(ex: &TailSums, ey: &TailSums) -> Rat {
    ex.values()
        .iter()
        .zip(ey.values())
        .filter(|(_, ey)| !ey.is_zero())
        .map(|(ex, ey)| ex / ey)
        .min()
        .expect("E_1(y) = 1 is always positive")
}

/// A source/target pair at common dimension with cached tail sums and the
/// conversion probability `P(x → y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformPair {
    x: ProbVec,
    y: ProbVec,
    #[serde(skip)]
    ex: TailSums,
    #[serde(skip)]
    ey: TailSums,
    #[serde(serialize_with = "serialize_rat")]
    p: Rat,
}

impl TransformPair {
    /// Pads/strips `x` and `y` to their common dimension and caches `P`.
    pub fn new(x: &ProbVec, y: &ProbVec) -> Self {
        let (x, y) = common_dimension(x, y);
        let ex = tail_sums(&x);
        let ey = tail_sums(&y);
        let p = min_tail_ratio(&ex, &ey);
        TransformPair { x, y, ex, ey, p }
    }

    pub fn parse(x: &str, y: &str) -> Result<Self> {
        Ok(Self::new(&ProbVec::parse(x)?, &ProbVec::parse(y)?))
    }

    pub fn x(&self) -> &ProbVec {
        &self.x
    }

    pub fn y(&self) -> &ProbVec {
        &self.y
    }

    /// Common dimension `n`.
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn ex(&self) -> &TailSums {
        &self.ex
    }

    pub fn ey(&self) -> &TailSums {
        &self.ey
    }

    /// Cached `P(x → y)`.
    pub fn p(&self) -> &Rat {
        &self.p
    }

    /// Whether `E_l(x) = P · E_l(y)` with `E_l(y) > 0`.
    pub fn attains_min(&self, l: usize) -> bool {
        let ey = self.ey.get(l);
        !ey.is_zero() && self.ex.get(l) == &(&self.p * ey)
    }
}

/// Interior indices `1 < l < n` at which the minimum defining `P` is attained.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct CriticalSet {
    indices: Vec<usize>,
}

impl CriticalSet {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.indices.binary_search(&l).is_ok()
    }
}

impl std::fmt::Display for CriticalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn critical_set(pair: &TransformPair) -> CriticalSet {
    let n = pair.n();
    CriticalSet {
        indices: (2..n).filter(|&l| pair.attains_min(l)).collect(),
    }
}

/// Catalysis can only help when `P < E_n(x)/E_n(y)` and `P < 1`. A zero
/// `E_n(y)` makes the first ratio infinite.
pub fn catalysis_admissible(pair: &TransformPair) -> bool {
    let n = pair.n();
    let below_tail = pair.ey.get(n).is_zero() || &pair.p * pair.ey.get(n) < *pair.ex.get(n);
    below_tail && pair.p < Rat::one()
}
