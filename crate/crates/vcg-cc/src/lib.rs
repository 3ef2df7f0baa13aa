//! Competition complexity of the multi-unit VCG auction.
//!
//! Computes exact and asymptotic competition complexity over lambda-regular
//! value distributions by reducing the worst case to truncated generalized
//! Pareto families and evaluating revenue integrals over uniform order
//! statistics, with a Monte Carlo mechanism simulator as an independent
//! check. See the `examples/` directory for runnable entry points and the
//! `vcg-cc` binary for the command-line surface.

pub mod cc;
pub mod cli;
pub mod dist;
pub mod error;
pub mod oracle;
pub mod orderstat;
pub mod revenue;
pub mod verify;

pub use cc::{cc_asymptotic, cc_exact, cc_sl_asymptotic, cc_sl_exact, thm32_bounds, CcQuery, CcResult, Mechanism};
pub use dist::{fosd_by_curves, r_max, Example11Curve, PiecewiseCurve, RevenueCurve, TruncatedGpd};
pub use error::{Error, Result};
pub use oracle::{mc_gap, mc_rev_opt, mc_rev_vcg, McConfig, McEstimate, ValueDist};
pub use orderstat::{expect_under, harmonic_diff, log_density, reg_inc_beta, QuadratureConfig};
pub use revenue::{
    beta_tail_stats, dlog_rev_vcg_dqstar, rev_opt, rev_opt_tgpd_closed, rev_sl_vcg, rev_vcg,
    rev_vcg_tgpd_closed, BetaTailStats, MarketSpec,
};
