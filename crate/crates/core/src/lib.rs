//! Exact q-series and integer-partition toolkit around the Stanley partition
//! statistic `(O(π) - O(π')) mod 4`.
//!
//! * [`series`]: truncated power series over big integers.
//! * [`products`]: the named generating functions and identity verifiers.
//! * [`partitions`]: enumeration, conjugation and brute-force oracles.
//! * [`injection`]: the residue-class injection with traces and audits.
//! * [`analysis`]: bounds, inequalities, asymptotics and conjecture scans.
//!
//! Heavy loops take an [`Execution`] policy; with the default `parallel`
//! feature they fan out over rayon, otherwise they run sequentially. Both
//! paths produce identical results.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod injection;
pub mod partitions;
pub mod products;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use exec::Execution;
pub use partitions::Partition;
pub use report::{ScanReport, Table};
pub use series::{Length, Pochhammer, Sign, TruncatedSeries};
