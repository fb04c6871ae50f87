//! Mutation of quivers whose arrows carry weights in a group.
//!
//! The crate covers weighted quiver mutation (composition, reversal and
//! cancellation of trivial-weight 2-cycles), nondegeneracy search and c-vector
//! sign coherence, vertex equivalence of weight systems, the classification of
//! weights on tame quivers of type Ã, and weighted quivers with potential
//! (splitting into trivial and reduced parts, and their mutation).

pub mod analysis;
pub mod compact;
pub mod corpus;
pub mod equivalence;
pub mod group;
pub mod io;
pub mod linalg;
pub mod mutation;
pub mod potential;
pub mod quiver;
pub mod session;
pub mod tame;

pub use group::{GroupElement, GroupError, GroupKind};
pub use mutation::{mutate, mutate_sequence, premutate, weight_reduce, MutationOptions, MutationRecord};
pub use quiver::{Arrow, ArrowId, Vertex, VertexId, WeightedQuiver};
