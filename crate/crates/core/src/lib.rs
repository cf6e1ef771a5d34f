//! Bound states of the (1+1)-dimensional Dirac equation for a generalized
//! Kratzer scalar-plus-vector well with an attractive pseudoscalar Coulomb
//! term, under spin symmetry.
//!
//! The crate solves four regimes analytically — the full Kratzer well, its
//! Coulomb limit, the scalar-only case, and the non-relativistic reduction —
//! and checks every level against an independent Sturm-sequence eigensolver
//! for the same second-order operator.
//!
//! ```
//! use dirac1d::model::{validate, BPolicy, Component, PotentialParams, Regime};
//! use dirac1d::spectrum::{solve_level_kratzer, RootSolveConfig};
//!
//! let problem = validate(
//!     PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.01),
//!     Regime::SpinSymmetricKratzer,
//!     Component::Upper,
//!     BPolicy::Strict,
//! )
//! .unwrap();
//! let ground = solve_level_kratzer(&problem, 0, &RootSolveConfig::default()).unwrap();
//! assert!(ground.e > -1.0 && ground.e < 1.0);
//! ```

pub mod model;
pub mod oracle;
pub mod specfun;
pub mod spectrum;
pub mod wavefunction;

pub use model::{
    validate, BPolicy, Component, EnergyLevel, ModelError, PotentialParams, Regime,
    ValidatedProblem,
};
pub use oracle::{verify_level, OracleConfig, OracleError, VerificationReport};
pub use spectrum::{
    solve_level, spectrum_range, LevelOutcome, RootSolveConfig, Sign, SpectrumError,
};
pub use wavefunction::{
    count_nodes, spinor_table, Grid, WavefunctionError, WavefunctionTable,
};
