//! Greedy forward feature selection with a cross-validated linear
//! surrogate, plus the size-sweep experiment driver.

pub mod experiment;
pub mod folds;
pub mod select;

pub use experiment::{run_automl_experiment, AutomlConfig, AutomlOutcome};
pub use folds::FoldPlan;
pub use select::{
    forward_select, surrogate_score, surrogate_train_config, EvolutionTrace, SelectionOptions,
    SelectionStep,
};
