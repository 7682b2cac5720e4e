//! Tolerances shared across modules. Each constant is the single source for
//! its threshold; tests and the acceptance suite import them from here.

/// Allowed deviation of total mass (head plus dropped tail) from one.
pub const MASS: f64 = 1e-12;

/// Default mass left behind when materializing an infinite family.
pub const TRUNCATION: f64 = 1e-12;

/// Log-space slack for discrete class inequalities.
pub const DISCRETE_SLACK: f64 = 1e-9;

/// Log-space slack for gridded continuous class inequalities.
pub const CONTINUOUS_SLACK: f64 = 1e-7;

/// Affine-fit tolerance for log-affinity checks.
pub const LOG_AFFINE: f64 = 1e-9;

/// Differences with absolute value at most this are treated as ties.
pub const TIE_BAND: f64 = 1e-12;

/// Base tolerance on the stop-loss gap when certifying convex order.
pub const CONVEX_ORDER: f64 = 1e-9;

/// Allowed mean mismatch before convex order is refused.
pub const MEAN_MATCH: f64 = 1e-9;

/// Domination slack for exact-oracle bound checks.
pub const BOUND_SLACK: f64 = 1e-10;

/// Slack on Rényi entropy comparisons.
pub const ENTROPY: f64 = 1e-9;

/// Normalization tolerance for gridded densities.
pub const GRID_MASS: f64 = 1e-9;

/// Convergence tolerance of the golden-section Legendre search.
pub const LEGENDRE: f64 = 1e-10;

/// Distance kept from an MGF divergence boundary when bracketing.
pub const DOMAIN_EDGE: f64 = 1e-8;

/// Bisection tolerance for parameter matching.
pub const BISECTION: f64 = 1e-12;

/// Relative slack on factorial-moment log-concavity checks.
pub const FACTORIAL_SLACK: f64 = 1e-9;
