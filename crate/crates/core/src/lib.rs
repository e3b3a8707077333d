//! Event/data-based system specification: data states and predicates,
//! event/data transition systems, hybrid dynamic logic, bisimulation,
//! operational specifications, their characterising sentences,
//! model constructors and refinement checking.

pub mod data;
pub mod edts;
pub mod ident;
pub mod pred;
pub mod relation;
pub mod logic;
pub mod bisim;
pub mod opspec;
pub mod characterize;
pub mod constructors;
pub mod search;
pub mod syntax;
pub mod refine;
pub mod sample;
