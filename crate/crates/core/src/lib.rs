//! Retrieval of remote-sensing scenes by first-order-logic queries.
//!
//! Scenes are sets of oriented-box detections. A query such as
//! `ship(a) AND ship(b) AND is_close(a, b)` is parsed, normalized against a
//! [`vocab::Vocabulary`], factorized into independent clause groups and scored
//! with product-AND / max-OR semantics. The best assignment of variables to
//! detections is returned as a witness.

pub mod eval;
pub mod fixtures;
pub mod fol;
pub mod geometry;
pub mod inference;
pub mod retrieval;
pub mod translate;
pub mod vocab;
