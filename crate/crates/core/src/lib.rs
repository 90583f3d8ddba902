//! Structured packing machinery for the two-dimensional geometric knapsack
//! problem at desk scale: item classification, corridors and their L/U
//! decomposition, classic shelf packers, the slices pipeline, a color-coding
//! dynamic program over long chords, and an exact oracle.

pub mod classify;
pub mod corridor;
pub mod dp;
pub mod eps;
pub mod exact;
pub mod geom;
pub mod packers;
pub mod polygon;
pub mod slices;

pub use eps::Eps;
pub use geom::{Item, ItemId, Packing, Placement, Rect};
