//! Exact simulation and raw coding of chaotic interval maps.
//!
//! The crate simulates piecewise-affine maps of [0,1) with exact rational
//! arithmetic, codes their orbits through finite interval partitions, and
//! measures how often several trajectories produce time-aligned identical
//! code windows. It ships the stochastic baselines (Bernoulli and finite
//! Markov sources, run-waiting-time oracles) and mixing diagnostics
//! (correlation sums, Ulam matrices, block structure) needed to interpret
//! those experiments.
//!
//! Modules follow the pipeline: [`dynamics`] produces exact orbits,
//! [`coding`] turns them into symbol streams through a [`coding::Partition`],
//! [`coincidence`] searches streams for common windows and runs the Monte
//! Carlo experiments, [`baselines`] supplies exact i.i.d./Markov reference
//! values, and [`diagnostics`] computes mixing indicators for the maps
//! themselves.

pub mod baselines;
pub mod coding;
pub mod coincidence;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod interval;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use rational::Rational;
