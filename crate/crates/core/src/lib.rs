//! Simulation of quantum-battery charging protocols.
//!
//! Three charging Hamiltonians are provided: independent (parallel) cells, the
//! adiabatic Grover battery, and the many-body Ising battery with `n` terms of
//! `(n-1)`-body interactions. On top of them sit closed-form Grover analytics,
//! Schrödinger propagation with adiabatic tracking, variational
//! counter-diabatic and Floquet-engineered drives, and diagnostics for the
//! power scaling, the phase-transition precursor and the driving-potential
//! advantage ratio.
//!
//! Conventions: `hbar = 1`, `Z|0> = -|0>`, site 0 is the most significant bit
//! of a basis index, energies in units of `Omega_0` and times as `Omega_0 t`.

pub mod counterdiabatic;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod grover;
pub mod models;
pub mod operator;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
