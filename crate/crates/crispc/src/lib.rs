//! crispc translates finitely valued fuzzy SROIN ontologies into classical
//! SROIN ontologies, and fuzzy/threshold/scoring conjunctive queries into
//! classical (U)CQs, so that off-the-shelf classical reasoners can answer
//! them. An exhaustive finite-model oracle evaluates both semantics directly
//! and backs every correctness property at desk scale.

pub mod bench;
pub mod chain;
pub mod cli;
pub mod crispify;
pub mod exec;
pub mod fixtures;
pub mod model;
pub mod normalize;
pub mod oracle;
pub mod queries;
pub mod randgen;
pub mod textio;
