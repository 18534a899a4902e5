//! Branch-price-and-cut for the time-dependent traveling salesman problem
//! over time-expanded graphs.

pub mod branch;
pub mod cuts;
pub mod driver;
pub mod expand;
pub mod heur;
pub mod instgen;
pub mod lp;
pub mod master;
pub mod model;
pub mod oracle;
pub mod pricing;
pub mod prop;
pub mod work;

pub use expand::{ArcIndex, TimeExpandedGraph, TimedArc, TimedVertex};
pub use instgen::GenConfig;
pub use model::{Instance, TimePoint, Tour, TravelTimeFn, VertexId, SOURCE};
