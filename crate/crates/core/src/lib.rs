//! Clause learning prover for first-order logic with equality.

pub mod oracle;
pub mod calculus;
pub mod frontend;
pub mod ordering;
pub mod rewriting;
pub mod search;
pub mod terms;
pub mod trail;
