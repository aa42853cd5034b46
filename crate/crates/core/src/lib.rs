//! Spectra, exceptional points and wavepacket scattering for a particle on an
//! open tight-binding chain with a single complex on-site impurity.
//!
//! The Hamiltonian is `H = -Σ (|j⟩⟨j+1| + |j+1⟩⟨j|) + u |q⟩⟨q|` with the
//! hopping fixed to one. The absorbing case uses `u = -iγ`; a real `u = V`
//! gives the Hermitian comparison model.
//!
//! Modules:
//! - [`lattice`]: parameters, the tridiagonal operator and its action.
//! - [`charpoly`]: the characteristic polynomial through three-term recurrences.
//! - [`spectral`]: dense QR and polynomial-root spectra, pairing, exceptional
//!   points and the localized eigenstate.
//! - [`dynamics`]: Gaussian wavepackets, Crank–Nicolson propagation and the
//!   reflection/transmission/absorption split.
//! - [`continuum`]: closed forms for the imaginary delta potential.
//! - [`experiments`]: scans and analyses built from the pieces above.
//! - [`table`]: CSV/JSON export.

pub mod charpoly;
pub mod continuum;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod lattice;
pub mod linalg;
pub mod spectral;
pub mod table;

pub use error::{Error, Result};
pub use lattice::{LatticeParams, TridiagOperator};
pub use num_complex::Complex64;
