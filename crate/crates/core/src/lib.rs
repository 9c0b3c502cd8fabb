//! Numerical core for studying the median heuristic in kernel two-sample
//! testing.
//!
//! The median heuristic sets the bandwidth of a Gaussian kernel to
//! `ν = √(H_n/2)`, where `H_n` is the sample median of all pairwise squared
//! distances. When the first `floor(α n)` observations come from `P` and the
//! rest from `Q`, `H_n` concentrates around the median of a three-component
//! mixture of squared-distance laws and is asymptotically normal. This crate
//! provides:
//!
//! | module | contents |
//! |--------|----------|
//! | [`special`] | incomplete gamma, modified Bessel `I`, Marcum `Q` |
//! | [`sampling`] | seeded split samples for the Gaussian scenarios |
//! | [`median`] | pairwise distances, empirical CDF/quantiles, median bandwidth |
//! | [`target`] | CDF, density and quantiles of the limiting mixture |
//! | [`mmd`] | Gaussian kernel and MMD² estimators |
//! | [`power`] | closed-form MMD², asymptotic variances, power ratios |
//! | [`bahadur`] | `λ₁` estimation and approximate Bahadur slopes |
//! | [`ustat`] | asymptotic variance of indicator U-statistics |
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

mod dd;
mod error;

pub mod bahadur;
pub mod median;
pub mod mmd;
pub mod optimize;
pub mod power;
pub mod quadrature;
pub mod sampling;
pub mod scenario;
pub mod special;
pub mod target;
pub mod ustat;

pub use error::{Error, Result};
pub use median::{BandwidthMethod, BandwidthSelection, NuConvention, PairwiseSummary};
pub use mmd::GaussianKernel;
pub use power::{PowerCriterionValue, PowerOptimum, StatisticKind};
pub use sampling::SplitSample;
pub use scenario::{Scenario, ScenarioKind};
pub use target::TargetDistribution;
