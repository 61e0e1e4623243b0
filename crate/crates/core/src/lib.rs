//! Closed-form dynamics for free-flight Ramsey interferometry of a released
//! nanodiamond carrying an NV spin.
//!
//! A magnetic field gradient exerts a spin-conditioned force on the centre of
//! mass. Two microwave flips at `t1` and `t2` reverse the force so that the two
//! spin-conditioned wavepackets split, turn around and recombine at `t3`. The
//! gravitational potential difference between the arms leaves a relative phase
//! on the spin which a final Ramsey pulse maps onto the `|0>` population.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs; file formats, the grid Schrödinger oracle and the command line
//! live in the `nanoramsey` companion crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod budget;
pub mod collective;
pub mod constants;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod kinematics;
pub mod params;
pub mod propagator;
pub mod quadrature;
pub mod sequence;
pub mod spin;
pub mod wavepacket;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use params::ExperimentParams;
pub use sequence::{Jitter, PulseSequence};
pub use spin::{SpinBranch, SpinForce};
