//! Compares the nested-quadrature indicator with the older double-projection
//! indicator on a grid of small squares, including their cost in Krylov bases.
//!
//!     cargo run --release --example legacy_vs_new_indicator

use rimc::cache::ShiftCache;
use rimc::config::Config;
use rimc::pencil::random_probe;
use rimc::projector::{indicator, legacy_indicator};
use rimc::region::Region;
use rimc::synthetic::{synth_pencil, SyntheticSpec, Transform};
use rimc::Complex64 as C64;

fn main() -> rimc::Result<()> {
    let spec = SyntheticSpec {
        eigenvalues: (0..60)
            .map(|k| C64::new(0.37 * k as f64, 0.8 * (0.9 * k as f64).sin()))
            .collect(),
        infinite_count: 20,
        transform: Transform::GivensSimilarity { seed: 21, rotations: 150 },
    };
    let p = synth_pencil(&spec);
    let f = random_probe(p.dim(), 42)?;
    let cfg = Config::default();
    let (new_cache, old_cache) = (ShiftCache::new(256), ShiftCache::new(256));

    let mut agree = 0;
    let mut total = 0;
    println!("{:>18} {:>6} {:>10} {:>10}", "square", "count", "nested", "legacy");
    for i in 0..8 {
        for j in 0..4 {
            let r = Region::from_corner(2.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64, 0.5);
            let inside = spec.eigenvalues.iter().filter(|l| r.contains(**l)).count();
            let new = indicator(&p, &f, &r, &new_cache, &cfg)?;
            let old = legacy_indicator(&p, &f, &r, &old_cache, &cfg)?;
            total += 1;
            agree += usize::from(new.admissible == old.admissible);
            println!(
                "{:>18} {inside:>6} {:>10.4} {:>10.4}",
                format!("{:.2}", r.center),
                new.value,
                old.value
            );
        }
    }
    let (n, o) = (new_cache.counters().snapshot(), old_cache.counters().snapshot());
    println!("decisions agree on {agree}/{total} squares");
    println!("nested: {} bases, {} node solves", n.bases, n.node_solves);
    println!("legacy: {} bases, {} node solves", o.bases, o.node_solves);
    Ok(())
}
