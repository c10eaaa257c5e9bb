//! Exact floor-log2 counting, certified dyadic-interval logarithms, and
//! interval comparisons of factorial bounds.
//!
//! * [`exact`]: integer-only kernels for `floor(log2(a/j))` sums and their
//!   counting oracles.
//! * [`dyadic`]: dyadic rationals and outward-rounded intervals.
//! * [`rigor`]: certified `log2` of rationals, the fractional-part sum `G(n)`
//!   and two routes to `log2 n!`.
//! * [`bounds`]: factorial bound evaluation with interval verdicts.
//! * [`sweep`]: range drivers and CSV/JSON emission used by the CLI.

pub mod bounds;
pub mod dyadic;
pub mod exact;
pub mod rigor;
pub mod sweep;

pub use dyadic::{DyadicInterval, DyadicRational};
pub use exact::{CountMethod, ExactError, FloorLogCount};
pub use rigor::{FracTerm, Rigor, RigorConfig, RigorError};
