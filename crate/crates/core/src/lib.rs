//! Exact linear algebra for trace forms over two-level Galois towers
//! GF(p) < K = GF(p^s) < L = GF(p^{sn}).
//!
//! Everything is exact: elements are coefficient vectors over GF(p),
//! ranks come from Gaussian elimination over K, and all randomized
//! machinery is seeded and reproducible across thread counts.

pub mod algebra;
pub mod dependence;
pub mod error;
pub mod export;
pub mod forms;
pub mod parse;
pub mod rng;
pub mod spaces;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use tower::{make_tower, FieldElement, KElem, TowerField, TowerParams, DEFAULT_SIZE_GUARD};
