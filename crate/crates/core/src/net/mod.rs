//! Structured deep networks.

mod activation;
mod arch;
mod localized;
pub mod presets;

pub use activation::{ActivationCertificate, ActivationRule, ActivationSpec};
pub use arch::{
    dense_param_count, Architecture, DenseLayer, DenseNet, EntrySpec, LayerStructure,
    ParamAssignment,
};
pub use localized::localized_net;
