//! Double-pushout rewriting of typed hypergraphs, a proof checker for
//! quantified intuitionistic linear logic with a resource-bound existential,
//! and the translation that turns every rewrite step into a proof term the
//! checker can re-verify.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: graph expressions, structural congruence, normal forms,
//!   heating and canonical keys.
//! * [`dpo`]: rule expressions, match enumeration under the gluing
//!   condition, rule application and bounded reachability.
//! * [`logic`]: formulas, proof terms, the resource-accounting checker and a
//!   depth-bounded prover.
//! * [`encode`]: graphs to derivations and back, rule formulas, and
//!   certificates for steps, traces, heatings and constraint violations.
//! * [`syntax`], [`workspace`] and [`cli`]: the text formats and the `gts`
//!   command line.

pub mod cli;
pub mod dpo;
pub mod encode;
pub mod graph;
pub mod logic;
pub mod syntax;
pub mod workspace;
