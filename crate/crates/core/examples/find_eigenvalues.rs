//! Finds every eigenvalue of a Givens-scrambled pencil inside a rectangle and
//! compares with the spectrum it was built from.
//!
//!     cargo run --release --example find_eigenvalues

use std::time::Instant;

use rimc::config::Config;
use rimc::region::Bounds;
use rimc::search::search;
use rimc::synthetic::{synth_pencil, SyntheticSpec, Transform};
use rimc::Complex64 as C64;

fn main() -> rimc::Result<()> {
    // 1..50 on the real axis plus a few conjugate pairs, 10 infinite eigenvalues
    let mut eigenvalues: Vec<C64> = (1..=50).map(|k| C64::new(k as f64, 0.0)).collect();
    for (re, im) in [(12.5, 0.75), (17.25, 1.5), (19.5, 0.4)] {
        eigenvalues.push(C64::new(re, im));
        eigenvalues.push(C64::new(re, -im));
    }
    let spec = SyntheticSpec {
        eigenvalues,
        infinite_count: 10,
        transform: Transform::GivensSimilarity { seed: 7, rotations: 200 },
    };
    let p = synth_pencil(&spec);
    let bounds = Bounds::new(10.2, 20.6, -2.0, 2.0).expect("valid rectangle");
    let cfg = Config::default();

    let start = Instant::now();
    let out = search(&p, &bounds, &cfg)?;
    println!(
        "n = {}, {} estimates in {:.2}s ({} factorizations, {} node solves, {} regions)",
        p.dim(),
        out.estimates.len(),
        start.elapsed().as_secs_f64(),
        out.counters.factorizations,
        out.counters.node_solves,
        out.counters.regions
    );
    let truth = spec.eigenvalues_in(&bounds);
    for e in &out.estimates {
        let err = truth.iter().map(|t| (t - e.value).norm()).fold(f64::INFINITY, f64::min);
        println!(
            "{:>26}   error {:.1e}   indicator {:.3}",
            format!("{:.10}", e.value),
            err,
            e.indicator_value
        );
    }
    println!("{} eigenvalues expected", truth.len());
    Ok(())
}
