//! Orbit-finite nominal sets over the equality symmetry.

mod atom;
mod map;
mod orbit;
mod product;
mod set;

pub use atom::{atoms, fresh_atoms, Atom, AtomSet, Permutation};
pub use map::{EquivariantMap, MapReport, MapViolation, OrbitImage};
pub use orbit::{Element, OrbitDescriptor, PositionPerm, DEFAULT_GROUP_CAP};
pub use product::{ProductSet, DEFAULT_ORBIT_CAP};
pub use set::OrbitFiniteSet;

pub(crate) use orbit::{all_position_perms, compose_positions, invert_positions};
pub(crate) use product::orbit_pair_reps;
