//! Catalysts of arbitrary dimension.
//!
//! Some catalyst increases `P = P(x → y)` if and only if
//! `P < min{x_n / y_n, 1}`. When it does, a geometric catalyst
//! `(1, α, α², …, α^(k-1))` (normalized) works, for any `α` in an open
//! interval `(alpha_min, 1)` and `k` large enough that `x_n > x_h · α^(k-1)`,
//! where `h` is the first index with `x_h ≠ P · y_h`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probvec::{make_probvec, rat, serialize_rat, tensor, ProbVec, Rat};
use crate::vidal::{max_prob, TransformPair};

/// Default position of `α` inside `(alpha_min, 1)`.
pub fn default_theta() -> Rat {
    rat(1, 1000)
}

/// Whether any catalyst can increase `P`: `P < 1` and `P · y_n < x_n`
/// (automatically true when `y_n = 0`).
pub fn exists_catalyst(pair: &TransformPair) -> bool {
    let n = pair.n();
    let p = pair.p();
    let (xn, yn) = (pair.x().get(n), pair.y().get(n));
    *p < Rat::one() && (yn.is_zero() || p * yn < *xn)
}

/// Which side of `P` the ratio `x_h / y_h` falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HBranch {
    /// `P > x_h / y_h`; the bound is `x_h / (P y_h)`.
    RatioBelowP,
    /// `P < x_h / y_h`; the bound is `P y_h / x_h`.
    RatioAboveP,
}

/// Lower bounds on `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaBounds {
    /// Smallest index with `x_h ≠ P · y_h`.
    pub h: usize,
    /// `P · y_n / x_n`.
    #[serde(serialize_with = "serialize_rat")]
    pub tail_bound: Rat,
    #[serde(serialize_with = "serialize_rat")]
    pub h_bound: Rat,
    pub h_branch: HBranch,
    /// `max(tail_bound, h_bound)`; always `< 1`.
    #[serde(serialize_with = "serialize_rat")]
    pub alpha_min: Rat,
}

fn no_catalyst(pair: &TransformPair) -> Error {
    let n = pair.n();
    let reason = if *pair.p() >= Rat::one() {
        format!("P(x -> y) = {} is not below 1", pair.p())
    } else {
        format!(
            "P(x -> y) = {} is not below x_{n}/y_{n} = {}/{}",
            pair.p(),
            pair.x().get(n),
            pair.y().get(n)
        )
    };
    Error::NoCatalyst { reason }
}

pub fn alpha_bounds(pair: &TransformPair) -> Result<AlphaBounds> {
    if !exists_catalyst(pair) {
        return Err(no_catalyst(pair));
    }
    let n = pair.n();
    let p = pair.p();
    let (x, y) = (pair.x(), pair.y());

    // x = P·y on every index below n would force P = 1.
    let h = (1..n)
        .find(|&i| *x.get(i) != p * y.get(i))
        .expect("exists_catalyst implies some x_h != P y_h with h < n");

    let tail_bound = p * y.get(n) / x.get(n);
    let (xh, py_h) = (x.get(h), p * y.get(h));
    let (h_bound, h_branch) = if py_h > *xh {
        (xh / &py_h, HBranch::RatioBelowP)
    } else {
        (py_h / xh, HBranch::RatioAboveP)
    };
    let alpha_min = (&tail_bound).max(&h_bound).clone();
    assert!(
        alpha_min < Rat::one(),
        "alpha_min = {alpha_min} must lie below 1"
    );
    Ok(AlphaBounds {
        h,
        tail_bound,
        h_bound,
        h_branch,
        alpha_min,
    })
}

/// Every intermediate value of the geometric construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionTrace {
    pub h: usize,
    #[serde(serialize_with = "serialize_rat")]
    pub tail_bound: Rat,
    #[serde(serialize_with = "serialize_rat")]
    pub h_bound: Rat,
    pub h_branch: HBranch,
    #[serde(serialize_with = "serialize_rat")]
    pub alpha_min: Rat,
    #[serde(serialize_with = "serialize_opt_theta")]
    pub theta: Option<Rat>,
    #[serde(serialize_with = "serialize_rat")]
    pub alpha: Rat,
    pub k: usize,
    pub catalyst: ProbVec,
    #[serde(serialize_with = "serialize_rat")]
    pub p_before: Rat,
    #[serde(serialize_with = "serialize_rat")]
    pub p_after: Rat,
}

fn serialize_opt_theta<S: serde::Serializer>(
    v: &Option<Rat>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Builds a useful catalyst with `α = alpha_min + theta · (1 − alpha_min)`.
pub fn construct_catalyst(pair: &TransformPair, theta: &Rat) -> Result<ConstructionTrace> {
    if *theta <= Rat::zero() || *theta >= Rat::one() {
        return Err(Error::ThetaOutOfRange(theta.clone()));
    }
    let bounds = alpha_bounds(pair)?;
    let alpha = &bounds.alpha_min + theta * (Rat::one() - &bounds.alpha_min);
    build(pair, bounds, alpha, Some(theta.clone()))
}

/// Builds the geometric catalyst for an explicitly chosen `α`, which must lie
/// in `(alpha_min, 1)`.
pub fn construct_catalyst_with_alpha(
    pair: &TransformPair,
    alpha: &Rat,
) -> Result<ConstructionTrace> {
    let bounds = alpha_bounds(pair)?;
    if *alpha <= bounds.alpha_min || *alpha >= Rat::one() {
        return Err(Error::AlphaOutOfRange {
            alpha: Box::new(alpha.clone()),
            alpha_min: Box::new(bounds.alpha_min),
        });
    }
    build(pair, bounds, alpha.clone(), None)
}

/// Smallest `k ≥ 1` with `x_n > x_h · α^(k-1)`.
pub fn geometric_length(xn: &Rat, xh: &Rat, alpha: &Rat) -> usize {
    debug_assert!(*alpha > Rat::zero() && *alpha < Rat::one());
    let mut k = 1;
    let mut term = xh.clone();
    while *xn <= term {
        term *= alpha;
        k += 1;
    }
    k
}

/// Normalized `(1, α, …, α^(k-1))`.
pub fn geometric_catalyst(alpha: &Rat, k: usize) -> ProbVec {
    // Scaled by denom^(k-1) so every entry is an integer numer^j · denom^(k-1-j).
    let (numer, denom) = (alpha.numer(), alpha.denom());
    let mut powers_n = vec![BigInt::one(); k];
    let mut powers_d = vec![BigInt::one(); k];
    for j in 1..k {
        powers_n[j] = &powers_n[j - 1] * numer;
        powers_d[j] = &powers_d[j - 1] * denom;
    }
    let raw: Vec<Rat> = (0..k)
        .map(|j| Rat::from_integer(&powers_n[j] * &powers_d[k - 1 - j]))
        .collect();
    make_probvec(raw, true).expect("geometric entries are positive")
}

fn build(
    pair: &TransformPair,
    bounds: AlphaBounds,
    alpha: Rat,
    theta: Option<Rat>,
) -> Result<ConstructionTrace> {
    let n = pair.n();
    let (x, y) = (pair.x(), pair.y());
    let k = geometric_length(x.get(n), x.get(bounds.h), &alpha);
    let catalyst = geometric_catalyst(&alpha, k);

    let p_before = pair.p().clone();
    let p_after = max_prob(&tensor(x, &catalyst), &tensor(y, &catalyst))?;
    if p_after <= p_before {
        return Err(Error::ConstructionFailed {
            p_before: Box::new(p_before),
            p_after: Box::new(p_after),
        });
    }
    Ok(ConstructionTrace {
        h: bounds.h,
        tail_bound: bounds.tail_bound,
        h_bound: bounds.h_bound,
        h_branch: bounds.h_branch,
        alpha_min: bounds.alpha_min,
        theta,
        alpha,
        k,
        catalyst,
        p_before,
        p_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vidal::catalysis_admissible;

    fn pair(x: &str, y: &str) -> TransformPair {
        TransformPair::parse(x, y).unwrap()
    }

    #[test]
    fn existence_examples() {
        let b = pair("0.6,0.2,0.2", "0.5,0.3,0.2");
        assert!(exists_catalyst(&b));
        assert!(!exists_catalyst(&pair("0.7,0.2,0.1", "0.4,0.3,0.3")));
        assert!(!exists_catalyst(&pair("0.6,0.2,0.2", "0.6,0.2,0.2")));
        assert!(exists_catalyst(&pair("0.4,0.4,0.1,0.1", "0.5,0.25,0.25,0")));
        for p in [
            b,
            pair("0.7,0.2,0.1", "0.4,0.3,0.3"),
            pair("0.6,0.2,0.2", "0.5,0.4,0.1"),
        ] {
            assert_eq!(exists_catalyst(&p), catalysis_admissible(&p));
        }
    }

    #[test]
    fn alpha_bounds_pair_b() {
        let b = alpha_bounds(&pair("0.6,0.2,0.2", "0.5,0.3,0.2")).unwrap();
        assert_eq!(b.h, 1);
        assert_eq!(b.tail_bound, rat(4, 5));
        assert_eq!(b.h_bound, rat(2, 3));
        assert_eq!(b.h_branch, HBranch::RatioAboveP);
        assert_eq!(b.alpha_min, rat(4, 5));
    }

    #[test]
    fn alpha_bounds_takes_the_larger_bound() {
        // tails: x 1, 2/5, 1/5; y 1, 1/2, 3/20 -> P = 4/5; x_1 = 3/5 != P y_1 = 2/5
        let p = pair("0.6,0.2,0.2", "0.5,0.35,0.15");
        assert_eq!(p.p(), &rat(4, 5));
        let b = alpha_bounds(&p).unwrap();
        assert_eq!(b.h, 1);
        // P y_3 / x_3 = (4/5)(3/20)/(1/5)
        assert_eq!(b.tail_bound, rat(3, 5));
        // P y_1 / x_1 = (4/5)(1/2)/(3/5)
        assert_eq!(b.h_branch, HBranch::RatioAboveP);
        assert_eq!(b.h_bound, rat(2, 3));
        assert_eq!(b.alpha_min, rat(2, 3));
        let trace = construct_catalyst(&p, &default_theta()).unwrap();
        assert!(trace.p_after > rat(4, 5));
    }

    #[test]
    fn alpha_bounds_below_p_branch() {
        // tails: x 1, 67/100, 17/50, 1/10; y 1, 13/20, 7/20, 1/20 -> P = 34/35 at l = 3,
        // and x_1 / y_1 = 33/35 < P
        let p = pair("0.33,0.33,0.24,0.1", "0.35,0.3,0.3,0.05");
        assert_eq!(p.p(), &rat(34, 35));
        let b = alpha_bounds(&p).unwrap();
        assert_eq!(b.h, 1);
        assert_eq!(b.h_branch, HBranch::RatioBelowP);
        assert_eq!(b.h_bound, rat(33, 34));
        assert_eq!(b.tail_bound, rat(17, 35));
        assert_eq!(b.alpha_min, rat(33, 34));
        let trace = construct_catalyst(&p, &default_theta()).unwrap();
        assert!(trace.p_after > rat(34, 35));
    }

    #[test]
    fn alpha_bounds_requires_existence() {
        assert!(matches!(
            alpha_bounds(&pair("0.5,0.5", "0.5,0.5")),
            Err(Error::NoCatalyst { .. })
        ));
    }

    #[test]
    fn construction_with_pinned_alpha() {
        let b = pair("0.6,0.2,0.2", "0.5,0.3,0.2");
        let trace = construct_catalyst_with_alpha(&b, &rat(801, 1000)).unwrap();
        assert_eq!(trace.k, 6);
        assert_eq!(trace.catalyst.len(), 6);
        let alpha = rat(801, 1000);
        for j in 1..6 {
            assert_eq!(trace.catalyst.get(j + 1), &(trace.catalyst.get(j) * &alpha));
        }
        assert!(trace.p_after > rat(4, 5));
    }

    #[test]
    fn default_theta_construction() {
        let b = pair("0.6,0.2,0.2", "0.5,0.3,0.2");
        let trace = construct_catalyst(&b, &default_theta()).unwrap();
        assert!(trace.alpha > rat(4, 5) && trace.alpha < Rat::one());
        assert!(trace.p_after > rat(4, 5));
        assert_eq!(trace.theta, Some(default_theta()));
    }

    #[test]
    fn theta_and_alpha_validation() {
        let b = pair("0.6,0.2,0.2", "0.5,0.3,0.2");
        assert!(matches!(
            construct_catalyst(&b, &Rat::zero()),
            Err(Error::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            construct_catalyst(&b, &Rat::one()),
            Err(Error::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            construct_catalyst_with_alpha(&b, &rat(4, 5)),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            construct_catalyst(&pair("0.5,0.5", "0.5,0.5"), &default_theta()),
            Err(Error::NoCatalyst { .. })
        ));
    }

    #[test]
    fn k_grows_with_alpha() {
        let b = pair("0.6,0.2,0.2", "0.5,0.3,0.2");
        let small = construct_catalyst(&b, &rat(1, 1000)).unwrap();
        let large = construct_catalyst(&b, &rat(1, 2)).unwrap();
        assert!(small.k <= large.k);
        assert!(small.k < large.k);
    }

    #[test]
    fn geometric_length_is_minimal() {
        // 0.2 > 0.6·α^(k-1) first holds at k = 6 for α = 0.801
        let (xn, xh, a) = (rat(1, 5), rat(3, 5), rat(801, 1000));
        assert_eq!(geometric_length(&xn, &xh, &a), 6);
        assert_eq!(geometric_length(&xn, &xn, &a), 2);
        assert_eq!(geometric_length(&xh, &xn, &a), 1);
    }
}
