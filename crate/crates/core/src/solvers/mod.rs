//! Self-contained numerical kernels.

pub mod caratheodory;
pub mod lp;
pub mod markov;
pub mod nnls;
pub mod pga;
pub mod projection;
pub mod weighted;

pub use caratheodory::caratheodory_decompose;
pub use lp::{lp_solve, nu_oracle, LinearProgram, LpProblem, LpSolution, Relation};
pub use markov::stationary_distribution;
pub use nnls::nnls;
pub use pga::{pga_maximize, PgaOptions};
pub use projection::{dykstra_project, project_onto, FeasibleSet};
pub use weighted::min_weighted_lp_norm;
