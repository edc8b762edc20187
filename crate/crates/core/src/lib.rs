//! Reachability for vector addition systems with states whose transitions are
//! invariant under a permutation group acting on the counters.
//!
//! Inputs are given by one representative per orbit of transitions. The
//! crate decides reachability for symmetric and alternating groups with a
//! procedure that never needs the full state space, decides integer
//! reachability for any group, and provides run surgery and reductions
//! between symmetry classes, each checkable against brute-force search.

pub mod datavass;
pub mod error;
pub mod explore;
pub mod fairness;
pub mod gen;
pub mod ilp;
pub mod limits;
pub mod perm;
pub mod reductions;
pub mod solver;
pub mod text;
pub mod vass;
pub mod zreach;

pub use error::{Error, Result, Violation, ViolationReason};
pub use limits::{Budget, Limits};
pub use perm::{Group, Permutation};
pub use vass::{Config, Instance, Run, RunMode, StateId, Transition, TransitionSet, Vass};
