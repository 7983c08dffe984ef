//! Solvers for the min-max Coverage and Connectivity assignment problems on
//! multi-interface networks.
//!
//! A network is a connected graph whose vertices can each activate a subset of
//! the interfaces available to them, at a per-(interface, vertex) cost. An edge
//! is covered when both endpoints share an active interface. The objective is
//! to minimize the largest per-vertex activation cost while either covering
//! every edge (Coverage) or keeping every terminal group inside one covered
//! component (Connectivity).
//!
//! The numeric kernels ([`lp`] and [`maxflow`]) are generic over their scalar
//! type; the aliases below fix the types the solvers use.

pub mod connectivity;
pub mod coverage;
pub mod exact;
pub mod instance;
pub mod lp;
pub mod maxflow;
pub mod preprocess;
pub mod report;
pub mod scalar;
pub mod seed;
pub mod verify;

mod dsu;

pub use instance::{Assignment, Instance, InterfaceSet};
pub use scalar::{Real, Scalar};

/// Exact cost arithmetic. Costs are parsed from decimals and never rounded.
pub type Rational = num_rational::Ratio<i128>;

/// The LP kernel at double precision, as used by the relaxations.
pub type LinearProgram = lp::LinearProgram<f64>;
pub type LpSolution = lp::LpSolution<f64>;
pub type SimplexSolver = lp::SimplexSolver<f64>;

/// Max-flow over LP edge values.
pub type CapGraph = maxflow::CapGraph<f64>;
pub type Cut = maxflow::Cut<f64>;

/// Max-flow over exact capacities.
pub type RationalCapGraph = maxflow::CapGraph<Rational>;
