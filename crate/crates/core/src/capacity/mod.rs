//! Covering-number bounds for structured networks and explicit ε-nets.

mod bound;
mod enet;
mod ledger;
mod report;

pub use bound::{
    build_interval_net, layer_recursion_bound, matrix_net_size, network_covering_bound, CoveringBound,
    CoveringInputs,
};
pub use enet::{
    enumerate_epsilon_net, sensitivity, EpsilonNet, LayerSensitivity, NetValidation, Sensitivity,
    DEFAULT_VALIDATION_SAMPLES, MAX_NET_PARAMS, MAX_NET_POINTS, MAX_POINTS_PER_PARAM,
};
pub use ledger::{constant_ledger, ConstantLedger};
pub use report::{packing_vs_bound_report, PackingReport, PackingRow};
