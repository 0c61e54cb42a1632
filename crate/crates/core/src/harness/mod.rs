//! Random instances, configuration, and the equisatisfiability cross-check.

mod config;
mod cross_check;
mod gen;

pub use config::{parse_config, ConfigError, HarnessConfig};
pub use cross_check::{
    cross_check, cross_check_seeds, fuzz, Agreement, CrossCheckError, CrossCheckOptions, CrossCheckReport,
    InstanceRecord, Summary,
};
pub use gen::{gen_random_matrix, gen_random_so2, GeneratorConfig, NodeWeights};
