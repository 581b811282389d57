//! Constant-size coresets for farthest-point queries in the Poincaré ball.
//!
//! For a set `P` of `n` points in the `D`-dimensional Poincaré ball and
//! `0 < ε < 1`, [`build_coreset`] selects a subset `P_ε` of size
//! `O(1/ε^D)` such that for every query `q`,
//!
//! ```text
//! max_{s ∈ P_ε} d(q, s) >= max_{p ∈ P} d(q, p) - ε
//! max_{s ∈ P_ε} d(q, s) >= (1 - ε) max_{p ∈ P} d(q, p)
//! ```
//!
//! Scanning the coreset answers approximate farthest-point queries; the
//! diameter, center, bichromatic farthest pair and maximum spanning tree
//! follow.
//!
//! ```
//! use hypercoreset::{build_coreset, farthest_approx, farthest_exact, sampling, BallPoint};
//!
//! let points = sampling::generate(sampling::Generator::UniformBall, 400, 2, 8.0, 7)?;
//! let coreset = build_coreset(&points, 0.25)?;
//! assert!(coreset.len() <= points.len());
//!
//! let q = BallPoint::new(vec![0.3, -0.6])?;
//! let approx = farthest_approx(&coreset, &q)?;
//! let exact = farthest_exact(&points, &q)?;
//! assert!(approx.distance >= exact.distance - 0.25 - 1e-9);
//! # Ok::<(), hypercoreset::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coreset;
pub mod error;
pub mod hyperbolic;
pub mod point_set;
pub mod queries;
pub mod sampling;
pub mod validation;

pub use coreset::{build_coreset, build_large, build_small, Coreset, CoresetRecord, CoresetStats, Regime};
pub use error::{Error, Result};
pub use hyperbolic::{
    angle_at_origin, dist_h, dist_h_arcosh, dist_origin, euclidean_radius_of, geodesic_point, gromov_product, midpoint,
    BallPoint, Direction, GeodesicParam, Translation, LOG3, MAX_NORM,
};
pub use point_set::PointSet;
pub use queries::{
    approx_diametral_pair, bichromatic_farthest_approx, bichromatic_farthest_exact_capped, center_approx, center_exact,
    center_exact_capped, diameter_approx, diameter_exact, diameter_exact_capped, farthest_approx, farthest_exact,
    mst_max_approx, mst_max_exact, mst_max_exact_capped, CenterAnswer, Guarantee, PairAnswer, QueryAnswer, TreeAnswer,
    ORACLE_CAP,
};

// The guide's chapters, compiled as doctests so its snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ball.md")]
    mod ball {}
    #[doc = include_str!("../../../book/src/translations.md")]
    mod translations {}
    #[doc = include_str!("../../../book/src/coresets.md")]
    mod coresets {}
    #[doc = include_str!("../../../book/src/queries.md")]
    mod queries {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
