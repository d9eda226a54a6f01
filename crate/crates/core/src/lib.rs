//! Detection and quantification of quantum coherence for finite-dimensional
//! density matrices.
//!
//! - [`moments`]: coherence criterion from partial-transpose moments, which
//!   needs only traces of powers rather than the full state.
//! - [`witness`] and [`multicopy`]: linear witnesses and their tensor products
//!   evaluated on several copies of a state under a chosen subsystem wiring.
//! - [`bounds`]: trace-distance coherence and witness-based lower bounds on
//!   the robustness of coherence.
//!
//! All values are immutable and every operation is a pure function.

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod multicopy;
pub mod rng;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DimSignature};
pub use states::DensityMatrix;
pub use witness::{Convention, Witness};

