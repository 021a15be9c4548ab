//! The AB off-lattice model: sequences, angle-to-position mapping and energy.

mod chain;
mod conformation;
pub mod corpus;
mod energy;
mod sequence;

pub use chain::Chain;
pub(crate) use chain::pair_index;
pub use conformation::{wrap_full, Conformation};
pub use corpus::{best_known, builtin_sequences, lookup};
pub(crate) use energy::{bend_term, bond_direction, combine, pair_term, CLASH_DIST2};
pub use energy::{compute_positions, energy, reported_energy, EnergyModel, Point};
pub use sequence::{interaction, kd_transform, Monomer, Sequence};
