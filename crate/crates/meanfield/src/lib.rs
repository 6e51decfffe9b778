//! Constructive machinery for the triviality of mean-field φ⁴ theory in four dimensions.
//!
//! The crate builds the renormalization-group moment flows (massless with an infrared
//! cutoff, and massive), the explicit two-point ansatz that seeds them, an independent
//! hierarchical-model oracle, exact O(N) tensor identities, and a harness that checks
//! the growth, decay and derivative bounds along the flow.

pub mod ansatz;
pub mod bounds;
pub mod error;
pub mod hierarchical;
pub mod massive;
pub mod massless;
pub mod quad;
pub mod series;
pub mod table;
pub mod tensors;

pub use error::{Error, Result};
pub use series::{ExtReal, Jet};
