//! Nehari-manifold minimization localized at the maxima of the weight.

mod diagnostics;
mod minimize;
mod project;
mod refine;
mod search;

pub use diagnostics::{ps_diagnostics, Plateau, PsReport, PLATEAU_BAND, PLATEAU_MIN_LEN, PLATEAU_REL_CHANGE};
pub use minimize::{
    minimize_on_nehari, IterRecord, MinimizeOptions, SolutionRecord, SolveStatus, GRAD_TOL, POSITIVITY_TOL,
};
pub use project::{barycenter, nehari_project, NehariPoint};
pub use refine::{richardson3, Richardson};
pub use search::{
    basin_seed, empirical_lambda_tilde, multiplicity_search, LambdaTilde, MultiplicityReport, PairCheck,
    DISTINCT_HS_FLOOR,
};
