//! Reduced pipe dreams, generalized ladder and chute moves, and the lattice
//! they form.

pub mod error;
pub mod lattice;
pub mod markov;
pub mod moveop;
pub mod moves;
pub mod perm;
pub mod pipedream;
pub mod tableau;
pub mod verify;

pub use error::{Error, Result};
pub use perm::Permutation;
pub use pipedream::{PipeDream, Tile};
