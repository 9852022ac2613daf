//! Bivariate partial information decompositions for jointly Gaussian
//! `(M, X, Y)`.
//!
//! * [`gauss`]: covariance validation, channel extraction, whitening, mutual
//!   information and Gaussian KL divergence.
//! * [`blackwell`]: whether one source is Blackwell sufficient for the other,
//!   with a degrading map when it is.
//! * [`mmi`]: the minimum-mutual-information decomposition.
//! * [`deficiency`]: the convex surrogate for Gaussian deficiency and its solver.
//! * [`pid`]: the deficiency-based decomposition built from both directions.
//! * [`experiments`]: the Wishart sampling harness and summary statistics.
//! * [`report`] / [`cli`]: JSON output and the command-line front end.
//!
//! All quantities are in nats.

pub mod blackwell;
pub mod cli;
pub mod deficiency;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod gauss;
pub mod io;
pub mod linalg;
pub mod mmi;
pub mod pid;
pub mod report;

pub use blackwell::{check_degraded, degradation_witness, DegradednessReport, Direction};
pub use deficiency::{approximate_deficiency, DeficiencyResult, SolverConfig};
pub use error::{Error, Result};
pub use gauss::{channel_form, kl_mvn, mutual_information, whiten, ChannelForm, Dims, GaussianSystem, Source, WhitenedChannels};
pub use linalg::Matrix;
pub use mmi::{mmi_pid, MutualInformations, PidAtoms, PidLabel};
pub use pid::{delta_hat_pid, normalize, simplex_coords, DeltaHatPid, NormalizedAtoms};
