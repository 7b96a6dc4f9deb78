//! Parameter containers, the reduced parametrizations and assumption checks.

mod emission;
pub mod format;
mod params;
mod random;
mod scheme;
mod state;
mod transition;

pub use emission::{substitution_emissions, EmissionTables};
pub use params::{
    check_assumptions, is_in_theta_exp, AssumptionReport, ModelParams, ParamFloor,
    IDENTIFIABILITY_TOL, MARGINAL_TOL,
};
pub use scheme::{
    constrained_markov_matrix, theta_from_beta, MarkovFree, ParamName, ParametrizationScheme,
    SchemeVariant,
};
pub use random::random_params;
pub use state::{endpoint, path_from_str, path_to_string, HiddenState};
pub use transition::{stationary_distribution, TransitionMatrix};
