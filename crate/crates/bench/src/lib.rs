//! Fixed instances shared by the criterion benchmarks.

use tdtsp_core::{GenConfig, Instance};

/// A generated instance with a moderate horizon.
pub fn instance(n: usize, seed: u64) -> Instance {
    tdtsp_core::instgen::generate(&GenConfig {
        n,
        theta_max: 40 * n as u32,
        breakpoints: 20,
        coord_range: 50,
        seed,
        ..GenConfig::default()
    })
    .expect("benchmark instance generates")
}
