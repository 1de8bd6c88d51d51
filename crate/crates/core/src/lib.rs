//! Ricci flow of left-invariant metrics on 3-dimensional unimodular Lie
//! groups, and the cohomogeneity-one 4-metrics
//! `dt^2 + e1 a^2 (th1)^2 + e2 b^2 (th2)^2 + e3 c^2 (th3)^2`
//! built on the space-time of the flow.
//!
//! The crate integrates the flow, evaluates the closed-form Ricci and
//! sectional curvature formulas of the 4-metric, and cross-checks every
//! one of them against an independent curvature engine that works from
//! Koszul's formula and the bracket relations alone.
//!
//! Core routines are generic over the scalar type. Field-only code
//! (right-hand sides, curvature formulas, the oracle) runs on `f32`, `f64`
//! and exact [`Rational`]s; integration and the special metrics need a
//! floating point [`Real`].

pub mod error;
pub mod flow;
pub mod integrator;
pub mod lie;
pub mod oracle;
pub mod scalar;
pub mod spacetime;
pub mod special;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use flow::{
    conserved_quantities, heisenberg_blowup_time, heisenberg_closed_form, jet_second,
    left_invariant_ricci, ratio_relation, reduced_rhs, ricci_rhs, Direction, FlowConfig, FlowJet,
    FlowState, Invariant, InvariantSet, RatioRelation, ReducedState,
};
pub use integrator::{
    check_invariants, estimate_blowup, integrate, BlowupEstimate, BlowupSearch, DriftEntry,
    DriftReport, IntegratorSettings, Side, Termination, Trajectory,
};
pub use lie::{group_from_signature, table1_cases, CaseRow, Group, Sign, SignPattern};
pub use oracle::{
    finite_difference_jet, oracle_connection, oracle_riemann, FrameMetricJet, RiemannComponents,
};
pub use scalar::{Field, Real};
pub use spacetime::{
    connection_coefficients, ricci_components, run_case, sectional_curvatures, verify_ricci_flat,
    verify_with_expectation, ComponentSeries, ConnectionTable, Expectation, RicciComponents,
    SectionalCurvatures, VerificationReport,
};
pub use special::{
    closure_derivatives, constant_curvature_family, eguchi_hanson_jet, hyperkahler_residuals,
    radius_grid, taub_nut_jet, verify_backward_flow, verify_modified_flow, ClosureResiduals,
    Convention, ConventionFit, CurvatureFamily, SpecialJet, SpecialMetric, SpecialReport,
};

/// Exact rational scalar for symbolic-grade checks.
pub type Rational = num_rational::Ratio<i128>;

pub type FlowState64 = FlowState<f64>;
pub type FlowJet64 = FlowJet<f64>;
pub type FlowConfig64 = FlowConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type IntegratorSettings64 = IntegratorSettings<f64>;
pub type FrameMetricJet64 = FrameMetricJet<f64>;
pub type VerificationReport64 = VerificationReport<f64>;
