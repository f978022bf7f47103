//! Closed-form lower bounds, reference rates and their comparison.

mod lower;
mod rates;

pub use lower::{
    deep_net_lower_bound, relation_lower_bound, CertificateInputs, CertificateKind, DeepNetInputs,
    LowerBoundCertificate, RelationInputs, TrailEntry,
};
pub use rates::{
    gap_report, loglog_slope, rate_curve, GapEntry, GapReport, GapRow, RateCurve, RateCurveId, RateParams,
};
