//! Executable versions of the constructive arguments: interval exchanges
//! realizing rational couplings, the rigidity probe, transitivity witnesses,
//! the entropy factor and commuting generators.

mod commuters;
mod entropy;
mod iet;
mod rigidity;
mod witness;

pub use commuters::{bernoulli_cyclic_commuter, odometer_commuter, BernoulliCommuter, OdometerCommuter};
pub use entropy::{entropy_block_permutation, entropy_factor_f, realize_entropy_block, BlockTarget};
pub use iet::{density_gap, realize_coupling_as_iet, RationalTarget};
pub use rigidity::{block_coupling, contiguous_blocks, distinct_block_sizes, rigidity_probe};
pub use witness::{transitivity_witness, WitnessResult, MAX_WITNESS_CELLS};
