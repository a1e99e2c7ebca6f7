//! Front ends that compile combinatorial problems into n-fold programs,
//! solve them and decode the domain answer.

pub mod coloring;
pub mod lobbying;
pub mod strings;

pub use coloring::{equitable_coloring_solve, minimum_vertex_cover, ColoringAnswer, EquitableColoringInstance};
pub use lobbying::{lobbying_solve, lobbying_to_ilp, LobbyingAnswer, LobbyingInstance};
pub use strings::{
    closest_string, multistrings_solve, multistrings_to_ilp, DistanceTable, MultiStringsAnswer, MultiStringsInstance,
    WILDCARD,
};

use crate::dag::SolveOptions;

fn options() -> SolveOptions {
    SolveOptions::default()
}
