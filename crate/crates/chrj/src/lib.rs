//! A committed-choice rule engine for a CHR dialect in which every
//! constraint carries a set of justifications, enabling logical retraction:
//! any constraint can be removed together with all consequences of the rule
//! applications it took part in, without recomputing from scratch.
//!
//! The pipeline: [`parser`] reads `.chr` programs and queries,
//! [`transformer`] annotates them with justifications, [`engine`] executes
//! the rules deterministically, [`retraction`] implements the kill/revive
//! scheme over a tombstone set, and [`oracle`] independently checks the
//! conservativity, commutation and correctness properties.

pub mod builtins;
pub mod engine;
pub mod oracle;
pub mod parser;
pub mod printer;
pub mod retraction;
pub mod transformer;
pub mod types;
