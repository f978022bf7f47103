//! Capacity analysis for deep networks with fixed weight structure.
//!
//! The crate is organised around five areas:
//!
//! * [`net`]: structured networks (fixed, free and shared entries), their
//!   evaluation, parameter counts and per-layer output bounds.
//! * [`numerics`]: L1 quadrature over `[-1, 1]^d`, packing and covering of
//!   finite function sets, finite-difference Hölder checks.
//! * [`capacity`]: covering-number bounds for structured networks and explicit
//!   ε-nets over parameter space.
//! * [`hard`]: sign codes, smooth bumps and the bump families used as packing
//!   sets inside Hölder classes.
//! * [`bounds`]: closed-form lower bounds and reference rate curves.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod capacity;
pub mod error;
pub mod hard;
pub mod net;
pub mod numerics;
pub(crate) mod util;

pub use error::{Error, Result};

pub use bounds::{
    deep_net_lower_bound, gap_report, rate_curve, relation_lower_bound, CertificateKind,
    GapReport, LowerBoundCertificate, RateCurve, RateCurveId, RateParams, RelationInputs,
};
pub use capacity::{
    build_interval_net, constant_ledger, enumerate_epsilon_net, layer_recursion_bound,
    matrix_net_size, network_covering_bound, packing_vs_bound_report, ConstantLedger,
    CoveringBound, EpsilonNet, PackingReport,
};
pub use hard::{
    build_family, choose_nstar, gv_code, make_bump, verify_class_membership,
    verify_localization, verify_separation, BumpSpec, GridPartition, HardFamily, SignCode,
};
pub use net::{
    dense_param_count, localized_net, ActivationRule, ActivationSpec, Architecture, EntrySpec,
    LayerStructure, ParamAssignment,
};
pub use numerics::{
    exact_covering_number, exact_packing_number, greedy_covering, greedy_packing, holder_check,
    l1_distance, l1_norm, DistanceMatrix, Estimate, FunctionHandle, HolderReport,
    QuadratureGrid, QuadratureScheme, SampledSet,
};
