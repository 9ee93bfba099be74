//! Brute-force ground truth: evaluates `P(x ⊗ c → y ⊗ c)` directly on the
//! sorted tensor spectra and compares with `P(x → y)`.
//!
//! Nothing here uses the critical set or any of the region formulas, so it
//! can be used to check them.

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probvec::{make_probvec, rat, serialize_rat, tail_sums, tensor, ProbVec, Rat};
use crate::vidal::{max_prob, TransformPair};

/// Verdict on one catalyst.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalystReport {
    pub catalyst: ProbVec,
    #[serde(serialize_with = "serialize_rat")]
    pub p_before: Rat,
    #[serde(serialize_with = "serialize_rat")]
    pub p_after: Rat,
    pub useful: bool,
    /// Smallest index `l` of the catalyzed spectra where the minimum tail
    /// ratio is attained.
    pub witness_index: Option<usize>,
}

/// `P(x ⊗ c → y ⊗ c)`, exactly.
pub fn catalyzed_prob(x: &ProbVec, y: &ProbVec, c: &ProbVec) -> Result<Rat> {
    max_prob(&tensor(x, c), &tensor(y, c))
}

fn argmin_tail_ratio(x: &ProbVec, y: &ProbVec) -> Option<(usize, Rat)> {
    let (ex, ey) = (tail_sums(x), tail_sums(y));
    let mut best: Option<(usize, Rat)> = None;
    for (l, (a, b)) in ex.values().iter().zip(ey.values()).enumerate() {
        if b.is_zero() {
            continue;
        }
        let r = a / b;
        if best.as_ref().is_none_or(|(_, cur)| r < *cur) {
            best = Some((l + 1, r));
        }
    }
    best
}

pub fn verify_useful(x: &ProbVec, y: &ProbVec, c: &ProbVec) -> Result<CatalystReport> {
    let p_before = max_prob(x, y)?;
    let (xc, yc) = (tensor(x, c), tensor(y, c));
    if xc.len() != yc.len() {
        return Err(Error::DimensionMismatch {
            left: xc.len(),
            right: yc.len(),
        });
    }
    let (witness, p_after) = argmin_tail_ratio(&xc, &yc).expect("E_1 is positive");
    Ok(CatalystReport {
        catalyst: c.clone(),
        useful: p_after > p_before,
        p_before,
        p_after,
        witness_index: Some(witness),
    })
}

pub fn verify_pair(pair: &TransformPair, c: &ProbVec) -> Result<CatalystReport> {
    verify_useful(pair.x(), pair.y(), c)
}

/// One grid point of a ratio scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanPoint {
    pub index: usize,
    #[serde(serialize_with = "serialize_rat")]
    pub t: Rat,
    pub report: CatalystReport,
}

/// Classifies `c = (1/(1+t), t/(1+t))` for `t = i/resolution`,
/// `i = 1..resolution-1`. Output is ordered by `i`.
pub fn scan_region2(pair: &TransformPair, resolution: usize) -> Result<Vec<ScanPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidResolution {
            min: 2,
            found: resolution,
        });
    }
    (1..resolution)
        .into_par_iter()
        .map(|i| {
            let t = rat(i as i64, resolution as i64);
            let c = ProbVec::from_ratio(&t)?;
            Ok(ScanPoint {
                index: i,
                t,
                report: verify_pair(pair, &c)?,
            })
        })
        .collect()
}

/// Partitions of `total` into exactly `parts` positive integers, each listed
/// nonincreasingly, in reverse lexicographic order.
pub fn partitions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(
        remaining: usize,
        parts: usize,
        max: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // the rest must fit: parts-1 more entries, each at least 1
        let hi = max.min(remaining.saturating_sub(parts - 1));
        for v in (1..=hi).rev() {
            if v * parts < remaining {
                break;
            }
            cur.push(v);
            rec(remaining - v, parts - 1, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(
            total,
            parts,
            total,
            &mut Vec::with_capacity(parts),
            &mut out,
        );
    }
    out
}

fn composition_to_probvec(parts: &[usize]) -> ProbVec {
    let raw = parts
        .iter()
        .map(|&v| Rat::from_integer((v as u64).into()))
        .collect();
    make_probvec(raw, true).expect("positive parts")
}

/// Searches catalysts of dimension `2..=dmax` whose components are multiples
/// of `1/resolution`, lowest dimension first, and returns the first useful one.
/// No minimality claim is made beyond the grid.
pub fn search_catalyst(
    pair: &TransformPair,
    dmax: usize,
    resolution: usize,
) -> Result<Option<CatalystReport>> {
    if dmax < 2 {
        return Err(Error::InvalidDimension(dmax));
    }
    if resolution < 2 {
        return Err(Error::InvalidResolution {
            min: 2,
            found: resolution,
        });
    }
    for d in 2..=dmax {
        let candidates = partitions(resolution, d);
        let found = candidates
            .par_iter()
            .map(|parts| verify_pair(pair, &composition_to_probvec(parts)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|r| r.useful);
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// A uniformly random composition of `denom` into `n` parts, as a sorted
/// probability vector with entries `k/denom`. With `allow_zero` the parts may
/// be zero.
pub fn random_probvec<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    denom: u32,
    allow_zero: bool,
) -> ProbVec {
    assert!(n >= 1);
    let parts: Vec<u32> = if allow_zero {
        // stars and bars: n-1 bars among denom + n - 1 slots
        let slots = denom + n as u32 - 1;
        let mut bars = rand::seq::index::sample(rng, slots as usize, n - 1)
            .into_iter()
            .map(|b| b as u32)
            .collect::<Vec<_>>();
        bars.sort_unstable();
        let mut prev = 0u32;
        let mut parts = Vec::with_capacity(n);
        for (i, b) in bars.iter().enumerate() {
            parts.push(b - prev - if i == 0 { 0 } else { 1 });
            prev = *b;
        }
        parts.push(slots - prev - if n == 1 { 0 } else { 1 });
        parts
    } else {
        assert!(denom as usize >= n, "need denom >= n for positive parts");
        let mut cuts = rand::seq::index::sample(rng, denom as usize - 1, n - 1)
            .into_iter()
            .map(|c| c as u32 + 1)
            .collect::<Vec<_>>();
        cuts.sort_unstable();
        let mut prev = 0u32;
        let mut parts = Vec::with_capacity(n);
        for c in cuts {
            parts.push(c - prev);
            prev = c;
        }
        parts.push(denom - prev);
        parts
    };
    let raw = parts
        .into_iter()
        .map(|p| rat(p as i64, denom as i64))
        .collect();
    ProbVec::new(raw).expect("composition sums to denom")
}

pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    denom: u32,
    allow_zero: bool,
) -> TransformPair {
    let x = random_probvec(rng, n, denom, allow_zero);
    let y = random_probvec(rng, n, denom, allow_zero);
    TransformPair::new(&x, &y)
}

/// Draws random pairs until one admits catalysis, giving up after `max_tries`.
pub fn random_admissible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    denom: u32,
    allow_zero: bool,
    max_tries: usize,
) -> Option<TransformPair> {
    (0..max_tries)
        .map(|_| random_pair(rng, n, denom, allow_zero))
        .find(crate::vidal::catalysis_admissible)
}

/// Floating-point evaluation of the same quantities, for large sweeps.
/// Verdicts compare with a relative tolerance of [`float::REL_TOL`].
pub mod float {
    use super::*;

    pub const REL_TOL: f64 = 1e-12;

    pub fn tensor_f64(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = a
            .iter()
            .flat_map(|ai| b.iter().map(move |bj| ai * bj))
            .collect();
        out.sort_unstable_by(|p, q| q.total_cmp(p));
        out
    }

    /// Minimum tail ratio over indices where the `y` tail is not negligible.
    pub fn max_prob_f64(x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), y.len());
        let mut ex = 0.0;
        let mut ey = 0.0;
        let mut best = f64::INFINITY;
        for (a, b) in x.iter().zip(y).rev() {
            ex += a;
            ey += b;
            if ey > 0.0 {
                best = best.min(ex / ey);
            }
        }
        best.min(1.0)
    }

    #[derive(Debug, Clone, Copy, PartialEq, Serialize)]
    pub struct FloatReport {
        pub p_before: f64,
        pub p_after: f64,
        pub useful: bool,
    }

    pub fn verify_useful_f64(pair: &TransformPair, c: &ProbVec) -> FloatReport {
        let (x, y, c) = (pair.x().to_f64(), pair.y().to_f64(), c.to_f64());
        let p_before = max_prob_f64(&x, &y);
        let p_after = max_prob_f64(&tensor_f64(&x, &c), &tensor_f64(&y, &c));
        FloatReport {
            p_before,
            p_after,
            useful: p_after > p_before * (1.0 + REL_TOL),
        }
    }
}

impl CatalystReport {
    pub fn improvement(&self) -> Rat {
        &self.p_after - &self.p_before
    }
}

/// Trivial one-dimensional catalyst.
pub fn identity_catalyst() -> ProbVec {
    ProbVec::new(vec![Rat::one()]).expect("(1) is a probability vector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(x: &str, y: &str) -> TransformPair {
        TransformPair::parse(x, y).unwrap()
    }

    fn pv(s: &str) -> ProbVec {
        ProbVec::parse(s).unwrap()
    }

    #[test]
    fn identity_catalyst_changes_nothing() {
        let a = pair("0.6,0.2,0.2", "0.5,0.4,0.1");
        let p = catalyzed_prob(a.x(), a.y(), &identity_catalyst()).unwrap();
        assert_eq!(&p, a.p());
    }

    #[test]
    fn known_catalyst_is_useful() {
        let a = pair("0.6,0.2,0.2", "0.5,0.4,0.1");
        let r = verify_pair(&a, &pv("0.65,0.35")).unwrap();
        assert!(r.useful);
        assert_eq!(r.p_before, rat(4, 5));
        // x⊗c = (.39,.21,.13,.13,.07,.07), y⊗c = (.325,.26,.175,.14,.065,.035);
        // the smallest tail ratio is E_2: .61/.675
        assert_eq!(r.p_after, rat(122, 135));
        assert_eq!(r.witness_index, Some(2));
    }

    #[test]
    fn uniform_catalyst_smoke() {
        let a = pair("0.6,0.2,0.2", "0.5,0.4,0.1");
        for d in 1..5 {
            let r = verify_pair(&a, &ProbVec::uniform(d)).unwrap();
            assert!(r.p_after >= r.p_before);
        }
    }

    #[test]
    fn scan_rejects_small_resolution() {
        let a = pair("0.6,0.2,0.2", "0.5,0.4,0.1");
        assert!(scan_region2(&a, 1).is_err());
        assert_eq!(scan_region2(&a, 2).unwrap().len(), 1);
    }

    #[test]
    fn partitions_enumerate_sorted_compositions() {
        assert_eq!(partitions(5, 2), vec![vec![4, 1], vec![3, 2]]);
        assert_eq!(
            partitions(6, 3),
            vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]
        );
        assert_eq!(partitions(3, 4), Vec::<Vec<usize>>::new());
        assert_eq!(partitions(4, 4), vec![vec![1, 1, 1, 1]]);
        // p(20, k) for k = 2, 3, 4
        assert_eq!(partitions(20, 2).len(), 10);
        assert_eq!(partitions(20, 3).len(), 33);
        assert_eq!(partitions(20, 4).len(), 64);
    }

    #[test]
    fn search_validates_arguments() {
        let a = pair("0.6,0.2,0.2", "0.5,0.4,0.1");
        assert!(matches!(
            search_catalyst(&a, 1, 10),
            Err(Error::InvalidDimension(1))
        ));
        assert!(search_catalyst(&a, 2, 1).is_err());
    }

    #[test]
    fn random_vectors_are_valid_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            for allow_zero in [false, true] {
                let v = random_probvec(&mut rng, n, 1000, allow_zero);
                assert_eq!(v.len(), n);
                if !allow_zero {
                    assert!(!v.has_zero_component());
                }
            }
        }
        let a = random_pair(&mut ChaCha8Rng::seed_from_u64(3), 4, 1000, false);
        let b = random_pair(&mut ChaCha8Rng::seed_from_u64(3), 4, 1000, false);
        assert_eq!(a, b);
    }

    #[test]
    fn float_backend_agrees_on_examples() {
        let a = pair("0.6,0.2,0.2", "0.5,0.4,0.1");
        let f = float::verify_useful_f64(&a, &pv("0.65,0.35"));
        assert!(f.useful);
        assert!((f.p_before - 0.8).abs() < 1e-15);
        let g = float::verify_useful_f64(&a, &pv("0.8,0.2"));
        assert!(!g.useful);
    }
}
