//! Mining of domain-based access-control policies.
//!
//! A complete access-control matrix is summarized into its minimal
//! domain policy in polynomial time ([`summary::summarize`]). A partially
//! specified matrix is mined by encoding the minimum-domain question as
//! partial MaxSAT ([`encode`]), solving it ([`solve`]) and decoding a
//! verified policy. Domain-and-type enforcement policies, hardness
//! reductions, brute-force oracles and a benchmark generator round out
//! the crate.

pub mod benchgen;
pub mod digraph;
pub mod dte;
pub mod encode;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod oracle;
pub mod policy;
pub mod reductions;
pub mod solve;
pub mod summary;

pub use digraph::{Digraph, Triple};
pub use dte::{mine_dte, DtePolicy};
pub use encode::{encode, CnfInstance, Encoding, EncodingConfig};
pub use error::{Error, Result};
pub use matrix::{Cell, PartialMatrix};
pub use policy::DomainPolicy;
pub use solve::{mine, Backend, Mined, SolveResult, Status};
pub use summary::{indistinguishable, summarize, EquivalencePartition};
