//! Quadrature, L1 distances, packing/covering on finite sets and the
//! finite-difference smoothness check.

mod function;
mod holder;
mod packing;
mod quadrature;

pub use function::{l1_distance, l1_norm, DistanceMatrix, FunctionHandle, SampledSet};
pub use holder::{
    central_partial, holder_check, multi_indices, split_order, HolderCheck, HolderReport, HolderWitness,
    DEFAULT_FD_STEP, HOLDER_SLACK,
};
pub use packing::{
    exact_covering_by, exact_covering_number, exact_packing_by, exact_packing_number, greedy_covering,
    greedy_covering_by, greedy_packing, greedy_packing_by, DIST_RTOL, MAX_EXACT,
};
pub use quadrature::{Estimate, QuadratureGrid, QuadratureScheme, QUAD_NODES_ENV};
#[allow(unused_imports)]
pub(crate) use quadrature::nodes_from_env;
