//! Classical simulation of operator spreading in the transverse-field Ising chain.
//!
//! The crate is organised bottom-up:
//!
//! * [`qsim`]: dense state-vector and density-matrix simulation with a small gate set.
//! * [`ising`]: the Ising Hamiltonian, exact propagators and the analytic classical OTOC.
//! * [`weave`]: Trotter steps, `R_zz` decompositions and the k-weave scheduler.
//! * [`otoc`]: exact, Trotterized and fixed-node OTOCs, and spreading surfaces.
//! * [`noise`]: CNOT depolarizing noise, readout confusion and shot sampling.
//! * [`mitigation`]: transition-matrix readout mitigation and CNOT zero-noise extrapolation.
//! * [`experiment`]: config files, presets, CSV/JSON export and SVG heatmaps.
//!
//! Sites of the spin chain are 1-based (`j = 1..=n`) in the physics-facing API and in
//! exported files; qubit indices inside circuits are 0-based, with qubit 0 the most
//! significant bit of a basis-state index.

pub mod error;
pub mod experiment;
pub mod ising;
pub mod mitigation;
pub mod noise;
pub mod otoc;
pub mod qsim;
pub mod weave;

pub use error::{Error, FieldError, Result};

/// Complex scalar used throughout the simulator.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
