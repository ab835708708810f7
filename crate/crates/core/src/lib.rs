//! Numerical core for modelling a trapped two-component Bose-Einstein
//! condensate Ramsey interferometer.
//!
//! The crate is `no_std` (it only needs `alloc`) and is organised by
//! subsystem:
//!
//! * [`atomphys`]: species constants, Breit-Rabi field sensitivity and
//!   Thomas-Fermi condensate properties.
//! * [`bloch`]: two-level pulse algebra and closed-form noise propagation
//!   through a Ramsey sequence.
//! * [`twomode`]: the two-mode mean-field model (phase diffusion, spin echo,
//!   differential loss, drift fringes).
//! * [`gpe`]: coupled Gross-Pitaevskii solver on a cylindrical grid.
//! * [`imaging`]: absorption-imaging atom counting, detection noise budgets
//!   and photon shot-noise Monte Carlo.
//! * [`squeezing`]: one-axis-twisting moments and squeezed-input phase
//!   sensitivity, with a dense Dicke-basis oracle.
//! * [`analysis`]: fringe, decay and drift-envelope fitting.
//!
//! All frequencies are angular (rad/s) unless a function name says `hz`.
//! Lengths are metres, times seconds, fields tesla.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod atomphys;
pub mod bloch;
pub mod constants;
mod error;
pub mod gpe;
pub mod imaging;
pub mod squeezing;
pub mod twomode;

pub use error::{Error, Result};
