//! Data-structure encoders built from bind, bundle and permute.
//!
//! Symbol codebooks are plain [`ItemMemory`](crate::ItemMemory)s. Sequence
//! positions follow one convention everywhere: the last element of a length-`k`
//! sequence carries permutation power 0 and element `i` (1-based) carries
//! `k - i`.

mod fsa;
mod graph;
mod sequence;
mod set;
mod stack;
mod tree;

pub use fsa::{fsa_encode, fsa_step, nfsa_step, transition_vector, FsaDescriptor};
pub use graph::{edge_query, edge_vector, encode_graph, neighbours};
pub use sequence::{
    encode_ngram_stats, encode_sequence_product, encode_sequence_sum, probe_position,
    replace_at_product, replace_at_sum, shift_and_concat, LAST_ELEMENT_POWER,
};
pub use set::{
    cross_product, decode_histogram, encode_multiset, encode_set, is_member, default_threshold,
};
pub use stack::StackState;
pub use tree::{encode_binary_tree, path_vector, tree_leaf_lookup, Branch, TreePath, ROLE_LEFT, ROLE_RIGHT};

use crate::memory::ItemMemory;

/// Item memory over an alphabet of symbols.
pub type SymbolCodebook = ItemMemory;
