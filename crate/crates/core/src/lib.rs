//! Fair allocation of indivisible items under conflict constraints.
//!
//! Items are the vertices of an undirected *conflict graph*; a bundle is
//! feasible only if it is an independent set. The crate provides:
//!
//! - exact domain types ([`model`]): graphs, valuation profiles (all
//!   arithmetic in exact rationals), instances, allocations;
//! - fairness and efficiency predicates ([`checkers`]): envy-freeness,
//!   EF1, EFX, EF[1,1], maximality, completeness, Pareto optimality;
//! - brute-force enumeration oracles ([`oracle`]) that certify existence
//!   or non-existence of allocations with requested properties;
//! - constructive solvers: the two-agent color-switching family
//!   ([`two_agents`]), interval-graph scheduling ([`interval`]), the
//!   cycle-plus-cliques construction for paths ([`path_ef11`]), and
//!   equitable tree coloring ([`tree_equitable`]);
//! - a reduction generator ([`hardness`]) that turns a no-maximal-EF1
//!   counterexample plus an Independent Set instance into an instance
//!   whose maximal-EF1 existence equals the IS answer;
//! - built-in example instances, seeded random generators, and JSON
//!   file formats ([`instances`]).

pub mod checkers;
mod enumerate;
pub mod error;
pub mod hardness;
pub mod instances;
pub mod interval;
pub mod model;
pub mod oracle;
pub mod path_ef11;
pub mod tree_equitable;
pub mod two_agents;
pub mod value;

pub use error::{Error, Result};
pub use model::{Allocation, ConflictGraph, Instance, Monotonicity, ValuationProfile};
pub use value::Rat;
