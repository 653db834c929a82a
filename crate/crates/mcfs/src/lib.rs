//! Multi-robot coverage path planning with connected Fermat spirals.
//!
//! The pipeline turns a polygonal workspace into one continuous coverage
//! path per robot:
//!
//! 1. [`geom`] — signed distance field, isoline extraction, resampling.
//! 2. [`isograph`] — isolines become a weighted graph; optional augmentation
//!    adds shortcut edges between non-adjacent layers.
//! 3. [`mmrtc`] — min-max rooted tree cover splits the graph among robots.
//! 4. [`refine`] — splits isolines shared by several trees and rebalances.
//! 5. [`cfs`] — stitches each tree into a single spiral-like path.
//! 6. [`app`] — end-to-end driver, metrics, SVG rendering, bundled shapes.

pub mod app;
pub mod cfs;
pub mod geom;
pub mod io;
pub mod isograph;
pub mod metrics;
pub mod mmrtc;
pub mod refine;
pub mod suite;
pub mod svg;
