//! Discovery, statistical validation, and multiplex-hypergraph organization
//! of higher-order (order 3-5) redundant and synergistic interactions among
//! ordinal questionnaire items.
//!
//! The pipeline, per diagnostic layer:
//!
//! 1. rank-based copula scores from the ordinal responses ([`info`]);
//! 2. sparse signed partial-correlation networks via nonparanormal or
//!    polychoric correlation plus EBIC-selected graphical lasso ([`dyadic`]);
//! 3. candidate multiplets from network mesoscale structure (communities,
//!    cliques, greedy expansion) and from subscale combinatorics
//!    ([`candidates`]);
//! 4. a three-stage inferential filter: column-permutation null with BH-FDR
//!    and an effect-size floor, row bootstrap with BCa intervals, and a
//!    hierarchical sub-multiplet comparison ([`validation`]);
//! 5. assembly into two diagnosis-layered multiplex hypergraphs (synergy and
//!    redundancy) with node- and subscale-level influence metrics
//!    ([`data`], [`metrics`]).
//!
//! [`synth`] generates Gaussian systems with planted interactions of known
//! sign and magnitude for end-to-end methodological validation, and
//! [`pipeline`] orchestrates everything behind the `homux` binary.
//!
//! All core types are immutable after construction; every random decision is
//! derived from one master seed ([`seed`]), so results are byte-identical
//! across reruns and across worker counts.

pub mod candidates;
pub mod data;
pub mod dyadic;
pub mod error;
pub mod info;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod seed;
pub mod stats;
pub mod synth;
pub mod validation;

pub use error::{Error, Result};
