//! Sorting permutations with stacks in series.

pub mod constructions;
pub mod enumerate;
pub mod greedy;
pub mod machine;
pub mod oracle;
pub mod perm;
pub mod verify;

pub use greedy::{
    dominance_check, run_greedy, stack_pass, west_t_stack_sortable, Priority, SortOutcome,
};
pub use machine::{MachineError, MachineState, Move, Snapshot, TraceEvent};
pub use oracle::{replay, sortable, OracleError, Pruning, Witness};
pub use perm::{all_permutations, contains_pattern, parse_permutation, PermError, Permutation};
