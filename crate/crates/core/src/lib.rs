//! AB off-lattice protein folding with a differential evolution optimizer.
//!
//! The crate is organised around the pieces of the method:
//!
//! * [`model`]: sequences, conformations, positions and energy.
//! * [`localmove`]: two-monomer local moves with `O(L)` energy updates.
//! * [`optimizer`]: the evolutionary loop with local search and restarts.
//! * [`harness`]: multi-run experiments, statistics and curve fitting.
//! * [`analysis`]: superposition RMSD, mirror images and clustering.
//! * [`io`]: the text formats for sequences, conformations and experiments.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod io;
pub mod localmove;
pub mod model;
pub mod optimizer;

pub use error::{Error, Result};
pub use model::{Conformation, Sequence};
