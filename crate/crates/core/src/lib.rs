//! Ranking recommendations that minimize the expected time a user spends
//! turning a suggested order into their own preferred order with
//! drag-and-drop moves.
//!
//! The crate is organized bottom-up:
//!
//! * [`order`]: alternatives, linear orders, Kendall's tau distance, prefix sets.
//! * [`models`]: Plackett-Luce and Mallows mixtures, uniform profiles, exact
//!   probabilities, sampling, and pairwise marginal matrices.
//! * [`sorting`]: selection/insertion sort simulation, count functions and
//!   weight-based time evaluation.
//! * [`recommend`]: expected-time objectives and the exact, approximate and
//!   brute-force recommendation solvers.
//! * [`harness`]: profile and config I/O, instance generators and the
//!   simulated recommendation experiment.

pub mod error;
pub mod harness;
pub mod models;
pub mod order;
pub mod recommend;
pub mod sorting;

pub use error::{Error, Result};
pub use models::{mallows_g, MallowsParams, PairwiseMarginalMatrix, PlackettLuceParams, PreferenceModel};
pub use order::{kendall_tau, Alternative, LinearOrder, PrefixSet};
pub use recommend::{ClosenessBounds, TournamentInstance, DEFAULT_BRUTE_FORCE_CAP};
pub use sorting::{CountFunction, SortStrategy, SortTrace, StepKind, WeightFunction};
