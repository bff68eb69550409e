//! Solvers for the multiple knapsack problem with grouped items (GMKP) and
//! its two-criteria relaxation, where knapsack capacities may be exceeded
//! and the largest excess is minimized alongside maximizing the reward.
//!
//! Every algorithm works in two stages: a group selection obtained from a
//! relaxation ([`lp_greedy`], [`subset_select`]), then a greedy item
//! assignment ([`assign`]) optionally improved by jump/swap local search.
//! [`pipeline`] composes them, [`heuristics`] wraps them into capacity-feasible
//! and frontier-producing searches, [`oracle`] solves small instances exactly
//! and [`gen`] produces random instances.

pub mod assign;
pub mod cli;
pub mod error;
pub mod gen;
pub mod heuristics;
pub mod io;
pub mod lp_greedy;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod subset_select;

pub use error::{Error, Result};
pub use model::{Assignment, BiCriteriaMetrics, Instance, Rational, Selection};
pub use pipeline::{run_algorithm, SolveOptions, SolveResult};
pub use subset_select::Variant;
