//! Root selection over a bounded `(delta, R_max)` box.

mod engine;
mod field;
mod lattice;

pub use engine::{classify, nearest_root, run, ClassifiedPoint, RegionMap, DELTA_CAP, EXTENSION_WIDTH, TIE_TOLERANCE};
pub use field::{BiasField, CaseUsed, ContinuityWarning, Extension, GridCell, Region, SelectionSource};
pub use lattice::{guard_unit_delta, BoundedBox, UNIT_DELTA_GUARD};
