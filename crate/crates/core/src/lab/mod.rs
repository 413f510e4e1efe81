//! Oracles and experiments: exact enumeration, Monte Carlo, exhaustive
//! coloring and small constructions.

pub mod chromatic;
pub mod constructions;
pub mod exact;
pub mod monte_carlo;

pub use chromatic::{chromatic_number, exhaustive_list_colorable, member_chromatic_number, ChromaticWitness, Colorability};
pub use constructions::{check_bound_15i, construct_thm15ii, random_family, random_linear_hypergraph, BoundRow};
pub use exact::{exact_expectations, ExactExpectationReport};
pub use monte_carlo::{monte_carlo, McOptions, McReport};
