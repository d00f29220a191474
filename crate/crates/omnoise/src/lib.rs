//! Quantum noise budgets for cavity optomechanical displacement sensing.
//!
//! The crate evaluates the measurement noise of a mechanical oscillator
//! probed through an optical cavity: the imprecision floor set by shot
//! noise of the detected field, the quantum back-action noise driven by
//! radiation-pressure fluctuations, and their sum relative to the standard
//! quantum limit, for both coherent and squeezed-vacuum probing.
//!
//! Two independent engines compute every budget:
//!
//! * [`closedform`] — the resonant-probing (Δ = 0) analytic expressions;
//! * [`solver`] — a frequency-domain solve of the full linearized
//!   quantum Langevin equations, valid at any detuning.
//!
//! [`verify`] cross-checks one against the other; [`analysis`] adds power
//! and coupling optimization, squeezing-vs-power trade-off quantification
//! and the standard sweep datasets.
//!
//! # Conventions
//!
//! **All spectral densities are per (rad/s) on the positive-frequency
//! axis**; no one-sided/two-sided factor is ever applied, so the standard
//! quantum limit reads S_x^sql = 2/Γ_m with Γ_m in rad/s. Displacement
//! spectra are in zero-point units (x_zpf²) unless explicitly converted
//! with an oscillator mass. All rates and frequencies in the API are
//! angular (rad/s); ordinary frequencies in Hz appear only at the
//! configuration boundary and are multiplied by 2π at ingestion.

pub mod analysis;
pub mod closedform;
pub mod grid;
pub mod model;
pub mod solver;
#[cfg(test)]
pub(crate) mod testutil;
pub mod verify;

pub use model::{
    boundary_phases, db_to_squeeze_r, derive, minimum_sql_power, squeeze_db, validate_probe,
    validate_system, DerivedQuantities, ForcePsd, ModelError, PortSpectrum, ProbeConfig,
    SystemParams, ValidatedSystem, HBAR, SPEED_OF_LIGHT,
};

#[cfg(doctest)]
#[doc(hidden)]
pub mod book_doctests {
    //! Runs every code snippet of the guide in `book/` under
    //! `cargo test --doc`, keeping the book in sync with the crate.
    #[doc = include_str!("../../../book/src/quickstart.md")]
    pub struct Quickstart;
    #[doc = include_str!("../../../book/src/conventions.md")]
    pub struct Conventions;
    #[doc = include_str!("../../../book/src/noise-budget.md")]
    pub struct NoiseBudget;
    #[doc = include_str!("../../../book/src/squeezing.md")]
    pub struct Squeezing;
    #[doc = include_str!("../../../book/src/solver.md")]
    pub struct Solver;
}
