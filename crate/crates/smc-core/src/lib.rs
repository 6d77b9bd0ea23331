//! Solvers, approximation algorithms, checkers and instance generators for
//! optimal stable fractional matchings under cardinal preferences.
//!
//! The crate is organized around a small exact-rational data model
//! ([`SmcInstance`], [`FractionalMatching`], [`IntegralMatching`]) plus:
//!
//! - [`lp`]: an exact rational simplex core and the exponential exact
//!   solvers (threshold enumeration and binary-variable enumeration),
//!   together with the polynomial half-stable relaxation;
//! - [`classic`]: Gale-Shapley, exact maximum-weight bipartite matching,
//!   the binary-valuation optimal solver, the heavy/light approximation
//!   and the epsilon-stable blend;
//! - [`decompose`]: Birkhoff-von Neumann decomposition and support audits;
//! - [`altstab`]: strong / ex-post / fractional stability checkers;
//! - [`generators`]: named instances and random instance families;
//! - [`reduction`]: the 2P2N-3SAT hardness-reduction compiler, witness
//!   construction and gadget-claim verification;
//! - [`oracle`]: brute-force ground truth for small instances.

#![allow(clippy::needless_range_loop)]

pub mod altstab;
pub mod classic;
pub mod decompose;
pub mod error;
pub mod format;
pub mod generators;
mod hungarian;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod reduction;

pub use error::{Error, Result};
pub use instance::{
    check_stability, derive_ordinal, int, rat, utilities, welfare_of_pairs, AgentLabels,
    BlockingPair, BlockingReport, FractionalMatching, IntegralMatching, OrdinalProfile, Rat,
    SmcInstance, UtilityProfile,
};
