//! Value elimination for binary constraint satisfaction problems.
//!
//! Five rules remove values while preserving satisfiability: arc
//! consistency, neighbourhood substitution (NS), snake substitution (SS),
//! conditioned neighbourhood substitution (CNS) and snake-conditioned
//! snake substitution (SCSS). Each has an incremental engine in
//! [`engine`] and a brute-force reference in [`oracle`].
//!
//! ```
//! use subsense::{engine, generators};
//!
//! let inst = generators::figure1a();
//! let r = engine::ss_to_convergence(&inst);
//! assert!((0..4).all(|i| r.instance.domain(i) == vec![1]));
//! ```

pub mod cli;
pub mod engine;
pub mod error;
pub mod format;
pub mod generators;
pub mod instance;
pub mod oracle;
pub mod pipeline;
pub mod trace;

pub use error::{Error, Result};
pub use instance::{Instance, InstanceBuilder, Value, Var};
pub use trace::{EliminationRecord, Reduction, ReductionReport, Rule, Trace, Witness};
