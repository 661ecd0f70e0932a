//! Built-in problems: the k-term sum, pair-sequence TSP instances, random
//! MAX-3SAT and explicit labelled graphs.

pub mod graph;
pub mod relabel;
pub mod sat;
pub mod spec;
pub mod sum_terms;
pub mod tsp;

pub use graph::{
    complete_graph, make_toy_fig3, path_graph, skewed_to_better, GraphProblem, TOY_FIG3_EDGES,
};
pub use relabel::{Relabelled, ValueRelabelled};
pub use sat::{
    flip_overlap_fraction, make_random_3sat, with_replacement_overlap, Literal, SatInstance,
};
pub use spec::{census, LoadedProblem, ProblemSpec};
pub use sum_terms::{convolution_census, make_sum_of_terms, SumOfTermsProblem};
pub use tsp::{
    make_footnote_tsp, make_pair_sequence_tsp, tsp_census, TspCensus, TspCensusConfig, TspInstance,
};

/// The 22-solution toy landscape.
pub type ToyLandscape = GraphProblem;
