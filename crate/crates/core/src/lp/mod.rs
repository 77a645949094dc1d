//! Dyadic Littlewood-Paley decomposition: smooth partition of unity,
//! shell projections, per-shell norms, and the square-function Sobolev norm.

mod norms;
mod partition;

pub use norms::{bernstein_ratio, dyadic_norm_sequence, shell_table_csv, sobolev_norm, DyadicNormSequence};
pub use partition::{cap, profile, ring_bounds, smooth_step, LpPartition, CAP_INNER, CAP_OUTER};
