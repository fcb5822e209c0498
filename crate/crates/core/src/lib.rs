//! Truncated-Fock-space simulation of two bosonic modes coupled by a
//! cross-Kerr interaction, with mode `b` driven by single- and
//! two-excitation drives.
//!
//! A squeezing plus displacement transformation of mode `b` maps the driven
//! cross-Kerr model onto an effective mixed (first-order plus quadratic)
//! optomechanical model. The crate provides:
//!
//! * [`fock`]: dense operators on truncated one- and two-mode Fock spaces.
//! * [`params`]: stationary squeezing, steady displacement, effective
//!   couplings and bath parameters, and the frame flow equations.
//! * [`hamiltonians`]: the rotating-frame, transformed, mixed and quadratic
//!   Hamiltonians.
//! * [`evolve`]: Schrödinger and Lindblad propagation with thermal and
//!   squeezed-vacuum channels.
//! * [`analytic`]: the closed-form cat and squeezed-superposition states.
//! * [`tomography`]: Wigner functions, fidelities and expectation values.
//!
//! Index convention for the joint space: mode `a` is the slow (outer) index,
//! so the basis vector `|m>_a |n>_b` sits at position `m * n_b + n`.
//!
//! All frequencies are expressed in units of the detuning `Delta_b`.

pub mod analytic;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod hamiltonians;
pub mod ode;
pub mod params;
pub mod sparse;
pub mod tomography;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
