#![allow(dead_code)]

use subsense::generators::{random_instance, RandomParams};
use subsense::Instance;

/// Seeded random instances with n <= 6 and d <= 4 over a grid of
/// densities and tightnesses, `seeds` per cell.
pub fn corpus(seeds: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 2..=6 {
        for d in 2..=4 {
            for density in [0.3, 0.6, 1.0] {
                for tightness in [0.3, 0.5, 0.7] {
                    for seed in 0..seeds {
                        let p = RandomParams {
                            n,
                            d,
                            density,
                            tightness,
                            seed: seed * 1000 + (n * 100 + d * 10) as u64,
                        };
                        out.push(random_instance(&p).unwrap());
                    }
                }
            }
        }
    }
    out
}
