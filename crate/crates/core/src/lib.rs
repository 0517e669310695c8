//! Canonical forms, transporters and automorphism groups of sequences of
//! sets of subspaces of F_q^k under the general semilinear group, with
//! adapters for linear, additive and random network codes.

pub mod canon;
pub mod codes;
pub mod error;
pub mod field;
pub mod format;
pub mod hyperoval;
pub mod inner;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod permgroup;
pub mod preprocess;
pub mod random;
pub mod refine;
pub mod search;

pub use canon::{canonize, canonize_normalized, CanonConfig, CanonResult};
pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use linalg::Matrix;
pub use model::{DualizeMode, NormalizedInstance, RawFamily, Semilinear, Subspace};
