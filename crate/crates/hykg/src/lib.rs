//! Klein-Gordon bound states of the six-parameter Hylleraas potential.
//!
//! The crate carries three independent routes to the s-wave spectrum with
//! equal scalar and vector coupling:
//!
//! - [`pipeline`] transcribes the closed-form Nikiforov-Uvarov derivation and
//!   solves both its explicit energy formula and its implicit `λ = λ_n`
//!   condition, and also feeds the same base polynomials through the generic
//!   engine in [`nu`];
//! - [`oracle`] solves the radial equation numerically (finite differences
//!   inside an outer root find in `E`, with a Numerov cross-check);
//! - [`audit`] lines the engines up level by level and evaluates the
//!   derivation's internal identities.
//!
//! [`wavefunction`] builds the closed-form radial functions and [`selftest`]
//! holds the analytic fixtures used by the `hykg selftest` command.

pub mod audit;
pub mod error;
pub mod model;
pub mod nu;
pub mod oracle;
pub mod pipeline;
pub mod quad;
pub mod roots;
pub mod selftest;
pub mod wavefunction;

pub use error::{Error, Result};
pub use model::{HylleraasParams, SSign};
pub use pipeline::{Engine, EnergyLevel, LevelFlag};
