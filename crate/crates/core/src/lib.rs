//! Upper and lower bounds on the rates at which GHZ states and multipartite
//! private states can be distributed over quantum broadcast networks.
//!
//! * [`netmodel`]: directed hypergraph networks, client families, partitions.
//! * [`entropy`]: states, channels, entropies and squashed-entanglement bounds.
//! * [`bounds`]: partition-based upper bounds and rate-region constraints.
//! * [`lower`]: GHZ hypergraphs, Steiner cuts and Steiner tree packing.
//! * [`simverify`]: state-vector checks of the merge/reduce protocols.
//! * [`cli`]: the `qbnet` command-line front end.

pub mod bounds;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod lower;
pub mod netmodel;
pub mod rng;
pub mod simverify;

pub use error::{Error, Result};
