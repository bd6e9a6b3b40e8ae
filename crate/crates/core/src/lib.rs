//! Spin models on the three-leg star graph, their Jordan–Wigner fermion
//! representations, and exact and analytic spectra.
//!
//! * [`pauli`]: Pauli strings and operator sums with exact phases.
//! * [`star`]: site indexing and single-site operators.
//! * [`jw`]: the Klein, auxiliary, naive and spiral JW families and checks
//!   of their algebra.
//! * [`hamiltonians`]: XX, Kondo-form and quadratic-fermion Hamiltonians.
//! * [`exact_diag`]: dense matrices and Hermitian eigensolves.
//! * [`free_fermion`]: hopping matrix, Chebyshev secular roots, many-body
//!   and Bogoliubov–de Gennes spectra.

pub mod error;
pub mod exact_diag;
pub mod free_fermion;
pub mod hamiltonians;
pub mod jw;
pub mod par;
pub mod pauli;
pub mod spectrum;
pub mod star;

pub use error::{Error, Result};
pub use pauli::{OperatorSum, Pauli, PauliString};
pub use spectrum::Spectrum;
pub use star::{SiteId, SiteOp, StarLayout};
