//! Couplings, Markov matrices and the conjugation lens of measure-preserving
//! maps, computed on equal-mass partitions.
//!
//! A system at resolution `k` is its cell-transition matrix
//! `Q[a][i] = k·μ(A_a ∩ T⁻¹A_i)`; a coupling is a `k×k` matrix whose rows and
//! columns sum to `1/k`. The lens acts by `C ↦ QᵀCQ`.

pub mod constructions;
pub mod coupling;
pub mod error;
pub mod lens;
pub mod linalg;
pub mod matrix;
pub mod partition;
pub mod perm;
pub mod sample;
pub mod scalar;
pub mod zoo;

pub use coupling::{
    coupling_distance, graph_coupling, in_neighborhood, lift_coupling, markov_compose, product_coupling,
    repair_to_polytope, restrict_coupling, CouplingMatrix, NeighborhoodSpec,
};
pub use error::{Error, Result};
pub use lens::{
    cesaro_average, detect_period, fixed_point_space, lens_step, lens_step_inverse, one_sided_step, orbit,
    self_joining_residual, LensOrbit, OrbitMode,
};
pub use matrix::Matrix;
pub use partition::{
    make_uniform_partition, refine, system_power, validate_system, FiniteSystem, Partition, RefinementMap,
};
pub use perm::Permutation;
pub use scalar::{Rational, Scalar};
