use gonal::corpus;
use gonal::gonality::{gonality, GonalityConfig};
use std::time::Instant;

fn main() {
    for (name, g, maxd) in [
        ("k33", corpus::k33(), 4i64),
        ("petersen", corpus::petersen(), 5),
        ("heawood", corpus::heawood(), 6),
        ("pappus", corpus::pappus(), 7),
    ] {
        for k in [1u32, 2] {
            let t = Instant::now();
            let cert = gonality(&g, &GonalityConfig::new(maxd, k)).unwrap();
            println!(
                "{name} k={k}: gonality {} witness {} in {:?}",
                cert.value,
                cert.witness.describe(),
                t.elapsed()
            );
        }
    }
}
