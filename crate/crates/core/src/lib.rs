//! Rational approximation on manifolds in Monge form: a Dirichlet-type
//! solver, near-point enumeration, denominator sets, limsup covers and
//! box-counting dimension estimates.

pub mod ball;
pub mod dirichlet;
pub mod error;
pub mod exact;
pub mod exponents;
pub mod limsup;
pub mod manifold;
mod near;
pub mod output;
pub mod point;
pub mod psi;
pub mod rational_points;
pub mod sampling;

pub use ball::{scale_ball, Ball};
pub use error::{Error, Result};
pub use exponents::{critical_exponent, eta_exponent, jarnik_classify, EtaExponent, ExponentBundle, JarnikClass};
pub use point::{is_psi_approximable_upto, RationalPoint, Witnesses};
pub use psi::{table_orders, upper_lower_orders, ApproxFunction, Orders, PsiKind};
pub use manifold::{eval_g, parse_chart, taylor_remainder_bound, BoxDomain, ChartKind, ChartMap, ManifoldChart};
pub use dirichlet::{
    admissible_q_set, build_system, cor2_stream, dirichlet_search, is_admissible, solve_system, AdmissibleContext,
    DirichletSolution, LinearFormsSystem, SystemSolution,
};
pub use rational_points::{
    badly_approx_constant, bset, bset_member, bset_range, bset_tau, counterexample_check, enumerate_near, BadlyApproxConstant,
    CounterexampleReport, DenominatorSet, NearPointRecord, NearPoints,
};
pub use limsup::{
    box_count, build_band_cover, check_tau_range, delta_threshold, estimate_dimension, fit_ladder, middle_thirds_ladder,
    mtp_hypothesis_check, BandCover, DimensionEstimate, LadderRow, MtpRow,
};
pub use output::CsvTable;
pub use sampling::{kronecker_point, kronecker_samples, DEFAULT_SEED};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
