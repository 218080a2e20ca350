//! CNOT-count-optimal Clifford circuits over binary symplectic matrices.
//!
//! The crate generates databases of canonical class representatives by
//! pruned breadth-first search, extracts provably optimal circuits for
//! arbitrary Clifford elements, verifies the databases against exact
//! group-counting identities, and computes minimum-average-cost Clifford
//! unitary 2-designs by linear programming.

pub mod db;
pub mod design;
pub mod reduce;
pub mod sym;
pub mod synth;

pub use db::files::DbHandle;
pub use db::{augment, bfs_generate, Database, DbError};
pub use reduce::{left_reduce, local_reduce, reduce_full, Reduction, ReductionWitness};
pub use sym::{group_order, random_clifford, Circuit, Gate, GeneratorSet, Tableau, ThinMatrix};
pub use synth::{cost, synthesize};
