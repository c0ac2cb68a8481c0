//! Discrete-spacetime random walks that reproduce quantum-mechanical
//! probability fields.
//!
//! A particle lives on a one-dimensional integer lattice and performs, once
//! per time tick, one of three moves: one site up, one site down, or rest.
//! The move probabilities derive from a single *momentum propensity*
//! `p ∈ [-1, 1]` imprinted at preparation. This crate provides
//!
//! * the transition law and walk sampler ([`dynamics`]),
//! * closed-form predictions for every observable of the walk — position and
//!   energy laws, ensemble densities, interference patterns, ring
//!   quantization, matter-wave frequency ([`oracle`]),
//! * exact rational brute-force enumeration certifying those closed forms
//!   ([`exact`]),
//! * dimensional bookkeeping between lattice and physical units, including
//!   the boost relations ([`units`]),
//! * the site-register / momentum-token mechanism that produces
//!   self-interference in ensembles of sequentially emitted particles
//!   ([`qforce`]).
//!
//! The crate is `no_std` (with `alloc`); all IO, statistics against
//! empirical histograms, and the command-line surface live in the companion
//! `qlattice` crate.
//!
//! ```
//! use qlattice_core::dynamics::{walk, Propensity};
//! use qlattice_core::oracle::{free_ensemble_probability, position_pmf, SitePoint};
//! use qlattice_core::rng::particle_stream;
//!
//! // One sampled trajectory of 300 ticks.
//! let prop = Propensity::from_momentum(0.5).unwrap();
//! let record = walk(prop, 300, &mut particle_stream(42, 0));
//! assert!(record.xi.unsigned_abs() <= record.sigma && record.sigma <= record.tau);
//!
//! // The closed-form law it samples from, and the flat ensemble law.
//! let weight = position_pmf(150, 300, 0.5).unwrap();
//! assert!(weight > 0.0);
//! let site = SitePoint::new(150, 300).unwrap();
//! assert_eq!(free_ensemble_probability(site), 1.0 / 601.0);
//! ```

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod histogram;
pub mod oracle;
pub mod qforce;
pub mod rng;
pub mod units;

pub use error::{Error, Result};
