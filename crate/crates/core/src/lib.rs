pub mod aut;
pub mod formula;
pub mod lts;
pub mod term;
pub mod eval;
pub mod spectrum;
pub mod harness;
