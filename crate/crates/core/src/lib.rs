//! Zitterbewegung of spin-0, spin-1/2 and spin-1 particles, one momentum mode at a time.
//!
//! Each free mode is described by a small matrix Hamiltonian (Dirac 4×4,
//! generalized Feshbach-Villars 2×2, Sakata-Taketani 6×6) and a velocity operator.
//! The crate evolves these operators exactly, checks the closed-form trembling
//! solutions against brute-force evolution, and builds the Foldy-Wouthuysen
//! transformations in which the trembling disappears.

pub mod error;
pub mod operator_core;

pub use error::{Error, Result};
pub mod representations;
pub mod fit;
pub mod dynamics;
pub mod fw_transform;
pub mod wavepacket;
