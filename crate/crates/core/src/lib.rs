//! Exact local alignment with affine gaps, searched over an FM-index that
//! emulates the suffix trie of the text.

pub mod analysis;
pub mod dp;
pub mod error;
pub mod filters;
pub mod fm_index;
pub mod reuse;
pub mod scoring;
pub mod search;
pub mod sequence;

pub use dp::{AlignmentHit, MatrixCell, Score};
pub use error::*;
pub use fm_index::{FmIndex, SaRange};
pub use scoring::{ScoringScheme, SearchParams};
pub use search::{search, Counters, Mode, SearchOptions, SearchOutcome, Toggles};
pub use sequence::{Alphabet, AlphabetKind, EncodedText, Query, Record};
