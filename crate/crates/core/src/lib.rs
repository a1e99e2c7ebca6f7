//! Direct solver for combinatorial n-fold integer programs with unbounded
//! non-negative variables.
//!
//! The solver balances the block schedule ([`balancer`]), then runs a
//! shortest-path dynamic program over windowed partial sums ([`dag`]).
//! Programs with inequalities are first rewritten into equality form
//! ([`reduction`]). [`oracle`] holds the exhaustive reference solvers and
//! [`audit`] the partial-sum witness checks. [`apps`] compiles Lobbying,
//! δ-Multi Strings and Equitable Coloring into programs of this shape.

pub mod apps;
pub mod audit;
pub mod balancer;
pub mod cli;
pub mod dag;
pub mod error;
pub mod model;
pub mod oracle;
pub mod reduction;

pub use error::{Error, Result};
pub use model::{Bricks, InstanceParts, NFoldInstance, Outcome, Relation, Solution, ValidationReport};
