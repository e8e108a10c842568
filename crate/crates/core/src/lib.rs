//! Multi-trajectory single-object tracking with a dynamic template memory,
//! attention-guided global search, and learned trajectory selection.

pub mod attention;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod features;
pub mod geom;
pub mod linalg;
pub mod memory;
pub mod metrics;
pub mod par;
pub mod rng;
pub mod sequence;
pub mod synth;
pub mod tsn;

pub use error::{Error, Result};
pub use geom::BBox;
