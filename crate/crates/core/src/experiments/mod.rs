//! Height sweeps, the two-segment elbow fit and robustness variants.

mod elbow;
mod sweep;

pub use elbow::{elbow_fit, ElbowFit, DEFAULT_MIN_IMPROVEMENT};
pub use sweep::{
    cell_seed, run_cell, run_height_sweep, run_robustness_suite, DynamicsKind, RobustnessVariant, SweepConfig,
    SweepResult, SweepRow, WElbow,
};
