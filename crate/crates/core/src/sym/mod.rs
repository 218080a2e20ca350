//! Binary symplectic matrix arithmetic, gate semantics, the generator set
//! and the packed thin-matrix representation.

pub mod generators;
pub mod gl2;
pub mod local;
pub mod perm;
pub mod tableau;
pub mod thin;

pub use generators::{Generator, GeneratorSet};
pub use gl2::Gl2;
pub use local::LocalElement;
pub use perm::{all_permutations, QubitPermutation};
pub use tableau::{
    group_order, parse_circuit, random_clifford, row_key, Circuit, Gate, Tableau, MAX_QUBITS,
};
pub use thin::{payload_mask, ExpandError, ThinMatrix};
