//! Counting solutions of join/meet equation systems on antichains, and
//! Dedekind numbers `D(n+2)`, `D(n+3)`, `D(n+4)` from interval sums over
//! the antichains of a smaller base set.
//!
//! Module map:
//!
//! * [`antichain`]: sets, antichains, downsets and the lattice operations.
//! * [`interval`]: exact interval sizes `|[α, β]|`.
//! * [`pcoef`]: connection graphs, connector numbers and solution counts of
//!   the two-variable and `r`-variable systems.
//! * [`symmetry`]: base-set permutations, canonical forms, class enumeration.
//! * [`oracle`]: brute-force enumeration used to certify everything else.
//! * [`engine`]: the summation formulas, sharded and checkpointable.
//! * [`cli`]: run configuration and the command-line front end.

pub mod antichain;
pub mod checkpoint;
pub mod cli;
pub mod count;
pub mod engine;
pub mod error;
pub mod interval;
pub mod oracle;
pub mod pcoef;
pub mod symmetry;
pub mod tables;

pub use antichain::{Antichain, Downset, ElementSet, MAX_N};
pub use count::BigCount;
pub use error::{Error, Result};
pub use interval::{eta, interval_size, IntervalCounter};
pub use pcoef::{connector_number, p2, p_general, SystemInstance};
