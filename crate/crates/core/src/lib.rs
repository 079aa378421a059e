//! Robust minimum-cost integer flow under a finite set of cost scenarios.
//!
//! Two robust criteria are supported: the min-max (absolute) cost and the
//! min-max regret (deviation) against per-scenario optima. Solutions come from
//! four local-search and nine evolutionary heuristics assembled from a small
//! set of basic flow procedures, or from exhaustive enumeration on small
//! instances.

pub mod exact;
pub mod format;
pub mod harness;
pub mod heuristics;
pub mod model;
pub mod objectives;
pub mod procedures;
