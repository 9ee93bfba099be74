//! Exact analysis of catalyst-assisted probabilistic transformations between
//! bipartite pure states, given by their Schmidt coefficient vectors.
//!
//! - [`probvec`]: exact probability vectors, tensor products, majorization.
//! - [`vidal`]: the maximal conversion probability `P(x → y)` and its critical indices.
//! - [`catalyst2d`]: the exact set of useful two-dimensional catalyst ratios.
//! - [`catalystnd`]: existence test and explicit construction for higher dimensions.
//! - [`oracle`]: brute-force verification on tensor-product spectra.
//! - [`cli`]: the command-line front end.
//!
//! ```
//! use catalysis::*;
//! use catalysis::probvec::rat;
//!
//! let pair = TransformPair::parse("0.6,0.2,0.2", "0.5,0.4,0.1")?;
//! assert_eq!(*pair.p(), rat(4, 5));
//! assert_eq!(region2(&pair).to_string(), "(1/4, 4/5)");
//!
//! let c = ProbVec::parse("0.65,0.35")?;
//! assert!(is_useful_2d(&pair, &c)?);
//! assert!(verify_useful(pair.x(), pair.y(), &c)?.useful);
//!
//! let b = TransformPair::parse("0.6,0.2,0.2", "0.5,0.3,0.2")?;
//! assert!(region2(&b).is_empty() && exists_catalyst(&b));
//! let trace = construct_catalyst(&b, &rat(1, 1000))?;
//! assert!(trace.p_after > trace.p_before);
//! # Ok::<(), catalysis::Error>(())
//! ```

pub mod catalyst2d;
pub mod catalystnd;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod probvec;
pub mod vidal;

pub use catalyst2d::{
    exists_2d, is_useful_2d, pair_bounds, region2, Interval, PairBound, RatioRegion,
};
pub use catalystnd::{
    alpha_bounds, construct_catalyst, construct_catalyst_with_alpha, exists_catalyst, AlphaBounds,
    ConstructionTrace,
};
pub use error::{Error, Result};
pub use oracle::{catalyzed_prob, scan_region2, search_catalyst, verify_useful, CatalystReport};
pub use probvec::{
    common_dimension, majorized_by, make_probvec, tail_sums, tensor, ProbVec, Rat, TailSums,
};
pub use vidal::{catalysis_admissible, critical_set, max_prob, CriticalSet, TransformPair};
