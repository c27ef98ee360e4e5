//! Differentially private release of linear queries through iterative
//! database constructions (IDCs), with a randomized-response pipeline for
//! synthetic graphs under cut queries.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod histogram;
pub mod idc;
pub mod io;
pub mod linalg;
pub mod noise;
pub mod offline;
pub mod online;
pub mod query;
pub mod synth;
pub mod universe;

pub use error::{Error, Result};
pub use histogram::DataHistogram;
pub use query::{compile_cut_query, compile_rank1_query, evaluate, CutQuery, LinearQuery, QueryTag, Rank1Query};
pub use universe::Universe;
