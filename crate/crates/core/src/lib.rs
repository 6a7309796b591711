//! Simulation of homogeneous Poisson point processes on regions of `R^d`.
//!
//! A process with intensity `mu` on a bounded region `B` is drawn in two
//! stages: a `Poisson(mu |B|)` count, then that many independent uniform
//! points on `B`. On top of that sampler the crate provides
//!
//! * [`region`]: CSG regions over boxes and balls, with exact or Monte Carlo
//!   volume, and their text form in [`grammar`];
//! * [`rng`]: `(seed, stream)`-keyed random streams and exact Poisson and
//!   categorical samplers;
//! * [`process`]: unconditional and conditional sampling, counting,
//!   superposition, thinning and the one-dimensional arrival-time view;
//! * [`stats`]: exact pmfs and chi-square goodness-of-fit, independence and
//!   two-sample tests;
//! * [`verify`]: a battery that checks simulated output against the exact
//!   laws of the process;
//! * [`cli`]: the `pppkit` command line.
//!
//! ```
//! use pppkit::{parse_region, sample_ppp, RngStream};
//!
//! let square = parse_region("box:0,0;1,1").unwrap();
//! let mut rng = RngStream::new(42, 0);
//! let cloud = sample_ppp(5.0, &square, &mut rng).unwrap();
//! let left = parse_region("box:0,0;0.5,1").unwrap();
//! assert!(cloud.count_in(&left).unwrap() <= cloud.len());
//! ```

pub mod cli;
pub mod error;
pub mod grammar;
pub mod process;
pub mod region;
pub mod rng;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use grammar::parse_region;
pub use process::{
    arrival_times, color, count_in, fully_observed_gap_count, replicate, replicate_sequential,
    sample_conditional, sample_ppp, sample_uniform_point, superpose, thin, ArrivalTimes,
    PointCloud, Provenance,
};
pub use region::{Aabb, Ball, Expr, MeasureEstimate, MeasureMethod, Region};
pub use rng::{sample_categorical, sample_poisson_count, RngStream};
