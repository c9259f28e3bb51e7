//! Score reuse: the common prefix tree, the FGOE queue and the fork engine
//! that evaluates prefix classes along the suffix trie.

mod cpt;
mod engine;
mod queue;

pub use cpt::{construct_cptree, Cpt, CptNode};
pub use engine::{
    advance_forks, hybrid, start_forks, ClassJob, Fork, ForkRules, Row, RowKernel, RowOutput,
    Traversal,
};
pub use queue::{FgoeEntry, FgoeQueue};
