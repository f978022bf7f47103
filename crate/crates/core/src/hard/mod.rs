//! Packing families inside Hölder classes: sign codes, bumps, the grid
//! partition of `[0, 1]^d`, and their verification.

mod bump;
mod code;
mod family;
mod verify;

pub use bump::{bump_geometry, make_bump, smoothstep, BumpSpec};
pub use code::{gv_code, SignCode, LEXICODE_MAX_LEN, LEXICODE_MAX_WORDS, RANDOM_MAX_WORDS};
pub use family::{build_family, choose_nstar, required_code_distance, GridPartition, HardFamily, MAX_CELLS};
pub use verify::{
    boundary_pairs, uniform_points, verify_class_membership, verify_localization, verify_separation,
    LocalizationReport, SeparationReport,
};
