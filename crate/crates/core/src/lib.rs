//! Numerical laboratory for sieve-weighted prime statistics: segmented
//! factorization kernels, admissible-tuple combinatorics with singular
//! series, truncated divisor-sum weights evaluated by two independent
//! routes, windowed averages against prime and Liouville indicators, exact
//! rational feasibility thresholds and density bounds, and empirical witness
//! tallies for `λ(p + d) = -1` under almost-prime side conditions.

pub mod arith;
pub mod averages;
pub mod densities;
pub mod error;
pub mod hunt;
pub mod report;
pub mod thresholds;
pub mod tuples;
pub mod weights;

pub use arith::{factor_segment, least_prime_factor_exceeds, sieve_primes, FactorSegment};
pub use averages::{
    averaged_discrepancy, compute_b, discarded_mass, empirical_averages, lambda_discrepancy,
    AverageReport, DiscrepancyTarget,
};
pub use densities::{density_bounds, density_table, multiplicity_audit, DensityReport};
pub use error::{Error, Result};
pub use hunt::{
    hunt_window, hunt_window_with_floor, shape_check, tally_lambda_shifts, AlmostPrimeCondition,
    ShiftTally, WindowCounts, WitnessReport,
};
pub use thresholds::{
    constants_table, corollary_constant, feasible_u_range, theta_by_ratio_minimization,
    theta_threshold, CorollaryRule, RParity, SurdValue, ThresholdReport, UInterval, Variant,
};
pub use tuples::{
    catalog_tuple, family_tuple, min_diameter_search, roots_mod, singular_series, FamilyKind,
    SingularSeriesValue, Tuple,
};
pub use weights::{batch_lambda_r, lambda_r, weight_a, WeightParams};
