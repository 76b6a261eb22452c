//! Everything around the solvers: file formats, experiment configuration,
//! instance generators and the simulated recommendation experiment.

pub mod config;
pub mod experiment;
pub mod hard;
pub mod io;

pub use config::{ExperimentConfig, Strategy, TargetSpec};
pub use experiment::{
    adaptive_borda_strategy, gaussian_noisy_order, per_poll_averages, run_experiment, PollRecord, PollSummary,
};
pub use hard::{kemeny_cost, kemeny_hard_instance};
pub use io::{load_model, load_profile, parse_profile, write_profile, write_records, ModelSpec};
