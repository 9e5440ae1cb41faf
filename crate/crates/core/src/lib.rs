//! Portfolio LTL satisfiability checking.
//!
//! Formulas are parsed by [`ltl`], checked by the reference solvers in
//! [`engine`] or by external executables ([`external`]), raced against each
//! other by [`portfolio`], and benchmarked by [`bench`]. Satisfiable verdicts
//! carry lasso-shaped evidence that [`trace`] can verify independently.

pub mod ltl;
pub mod trace;
pub mod engine;
pub mod portfolio;
pub mod external;
pub mod bench;
