//! Explicit cochain-level computations over F₂ for the Milnor coalgebra,
//! its cobar complex and a May-type model of the Adams E₂-page.

pub mod bracket;
pub mod cobar;
pub mod conventions;
pub mod fho;
pub mod gf2;
pub mod homology_ops;
pub mod may_model;
pub mod milnor;
pub mod parse;


/// Engine version, part of every cache fingerprint.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
