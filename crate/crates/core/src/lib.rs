//! Learning unknown stabilizer states from Bell samples.
//!
//! Two copies of an `n`-qubit stabilizer state, measured pairwise in the Bell
//! basis, give a `2n`-bit outcome that is uniform on a coset of the state's
//! stabilizer-label subspace. XORs of such outcomes are uniform in the
//! subspace itself, so `2n + 1` samples and one Gaussian elimination recover
//! it with failure probability below `2^-n`; `n` further single-copy Pauli
//! measurements fix the signs.
//!
//! Modules:
//! - [`f2linalg`]: bit-packed vectors and matrices over F₂.
//! - [`pauli`]: phase-exact Pauli strings in the `σ_s` label convention.
//! - [`tableau`]: stabilizer-state simulation (gates, measurement, sampling).
//! - [`dense`]: small-`n` statevector oracle used to cross-check everything.
//! - [`learner`]: the learning procedure behind a black-box [`learner::StateAccess`].

pub mod dense;
pub mod error;
pub mod f2linalg;
pub mod learner;
pub mod pauli;
pub mod tableau;

pub use error::{Error, Result};
pub use f2linalg::{BitMatrix, BitVector};
pub use pauli::{PauliString, Phase, Sign};
pub use tableau::{Gate, StabilizerTableau};
