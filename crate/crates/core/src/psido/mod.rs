//! Symbols `a(x, xi)` on the torus and the operators they quantize to.

mod commutator;
mod elliptic;
mod quantize;
pub mod registry;
mod symbol;

pub use commutator::{
    ap_shell_ratio, commutator_field, commutator_shell, commutator_symbol_remainder,
    cutoff_commutator, cutoff_commutator_order, relative_shell_slope, RemainderReport,
    ShellSlopeReport,
};
pub use elliptic::{
    ellipticity_margin, ellipticity_margin_where, high_pass, parametrix, split_elliptic,
    EllipticSplit, DEFAULT_C2,
};
pub use quantize::{apply, apply_direct, DIRECT_LIMIT};
pub use symbol::{EntryFn, SeparableTerm, SpaceFn, Symbol, SymbolKind};
