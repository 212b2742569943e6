//! Fault-tolerant quadrotor control in simulation.
//!
//! This crate contains everything needed to train and evaluate a passive
//! fault-tolerant low-level controller for a quadrotor that may lose up to
//! one rotor at any severity:
//!
//! - [`sim`]: deterministic rigid-body dynamics with per-rotor failure
//!   coefficients and first-order motor lag.
//! - [`highlevel`]: PID position control cascaded with either a standard
//!   tilt attitude law or a primary-axis law for yaw-uncontrollable flight.
//! - [`expert`]: a privileged fault-aware controller (feedback linearization
//!   plus fault-aware allocation) used as the behavior-cloning teacher and
//!   as the switched baseline.
//! - [`nn`]: a small dense-network engine with reverse-mode gradients and a
//!   versioned binary weight format.
//! - [`policy`]: the selector-controller policy network, observation
//!   assembly, and action squashing.
//! - [`training`]: PPO + behavior cloning + selector supervision over
//!   randomized fault episodes.
//! - [`fdd`]: an EKF-style failure-coefficient estimator with debounced
//!   controller switching, for quantifying detection delay.
//! - [`harness`]: scenario runner, trajectory logs, metrics, and batch
//!   evaluation.
//! - [`config`]: TOML configuration for all of the above.
//!
//! Start with the `examples/` directory: each example exercises one of the
//! capabilities above end to end.

pub mod config;
pub mod expert;
pub mod fdd;
pub mod harness;
pub mod highlevel;
pub mod nn;
pub mod policy;
pub mod sim;
pub mod training;

mod threads;

pub use threads::init_thread_pool;
