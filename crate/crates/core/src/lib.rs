//! Interval-valued conditional failure rates for overhead transmission lines.
//!
//! Failure statistics per weather/loading context are turned into probability
//! intervals with the imprecise Dirichlet model, assembled into a credal
//! network around a binary health variable, and queried for the probability
//! that the line fails given the current conditions. A Monte Carlo harness
//! compares interval estimators on synthetic failure streams.
//!
//! * [`numeric`]: beta, gamma, chi-square and normal kernels.
//! * [`estimate`]: multinomial counts, Dirichlet and IDM estimators, rate intervals.
//! * [`credal`]: credal networks and exact min/max inference.
//! * [`cfr`]: operating records, the line failure network, scenarios.
//! * [`sim`]: synthetic operating histories and estimator convergence studies.
//! * [`cli`]: the `otl-cfr` command implementations.

pub mod cfr;
pub mod cli;
pub mod credal;
pub mod estimate;
pub mod numeric;
pub mod sim;
