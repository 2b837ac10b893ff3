//! Deterministic primitives for building, splitting, aligning, auditing and
//! scoring distantly supervised relation-extraction corpora drawn from a
//! UMLS/SNOMED-CT style knowledge source.
//!
//! The crate is `no_std`-compatible (with `alloc`); all file and process I/O
//! lives in the companion CLI crate. Every algorithm here is deterministic:
//! collections are ordered (`BTreeMap`/`BTreeSet`) and all randomness flows
//! through a seeded, portable generator (see [`rng`]).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod align;
pub mod audit;
pub mod corpus;
pub mod ids;
pub mod kg;
pub mod registry;
pub mod relations;
pub mod rng;
pub mod rows;
pub mod score;
pub mod split;
pub mod stats;
pub mod synth;
pub mod util;

pub use ids::{Cui, Tui};
pub use registry::{SemanticGroup, TypeRegistry};
pub use relations::RelationCanonMap;
