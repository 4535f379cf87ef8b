//! Exact arithmetic for quaternionic modular forms on special orders.
//!
//! The library computes with the definite quaternion algebra `B/Q` ramified
//! exactly at a prime `l` and infinity.  It builds special orders of level
//! `N p^n l^m` (Eichler conditions away from `l`, the order `O_L + P^(m-1)`
//! at `l`), enumerates right ideal classes against the Eichler mass formula,
//! lifts Dirichlet characters to unit groups, assembles Hecke operators on
//! spaces of quaternionic forms, and runs a finite-level shadow of the
//! ordinary control theorem with step-function measures mod `p^M`.
//!
//! Everything is exact: rationals are `num_rational::BigRational`, character
//! values live in cyclotomic fields `Q(zeta_T)`, and p-adic data is truncated
//! to `Z/p^M` with explicit precision tracking.  No floating point anywhere.
//!
//! Modules mirror the pipeline:
//!
//! * [`ring`], [`cyclo`], [`linalg`] — scalar traits over `num-traits`,
//!   cyclotomic fields, `Z/p^M`, and generic dense linear algebra.
//! * [`quat`], [`splitting`] — the algebra `(a, b | Q)`, Hilbert-symbol
//!   ramification certificates, and local splittings `B_q = M_2(Q_q)` at
//!   finite precision.
//! * [`lattice`], [`order`], [`ideal`] — full lattices in `B`, maximal and
//!   special orders, right ideal classes, unit groups, the mass certificate.
//! * [`character`] — Dirichlet characters, local decomposition, unit-group
//!   lifts, adelization.
//! * [`forms`] — weight modules, form spaces, Hecke/Brandt matrices,
//!   Eisenstein/cuspidal/new decompositions, isotypic blocks.
//! * [`padic`] — primitive-vector levels, measure-valued forms, the Shapiro
//!   identification, weight specialization, the ordinary projector, and the
//!   control-step verifier.
//! * [`classical`], [`eigentable`] — classical dimension bookkeeping
//!   (dimension formulas, twist orbits, the two-sided dimension identity)
//!   and ingestion of classical eigenvalue tables.
//! * [`report`] — the structured text format used by golden files and the
//!   command line front end.

pub mod ring;
pub mod cyclo;
pub mod linalg;
pub mod quat;
pub mod splitting;
pub mod lattice;
pub mod order;
pub mod ideal;
pub mod character;
pub mod forms;
pub mod padic;
pub mod classical;
pub mod trace;
pub mod eigentable;
pub mod report;

/// Exact rational scalar used throughout the char-0 layer.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Cyclotomic field element over `Q` (character values, weight-2 Hecke entries).
pub type Cyc = cyclo::Cyclotomic;
/// Truncated p-adic scalar `Z/p^M` (weight action, measures, control data).
pub type Zp = ring::ZpM;

pub use quat::QuatAlgebra;

/// Library-level error, mapped onto process exit codes by the CLI.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    /// A mathematical hypothesis of the requested computation fails
    /// (bad level shape, character not admissible, wrong parity, ...).
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    /// Malformed or inconsistent input data (tables, formats).
    #[error("data error: {0}")]
    Data(String),
    /// The requested p-adic precision was exhausted before an operation
    /// could stabilize.
    #[error("precision exhausted: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
