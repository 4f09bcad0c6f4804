//! Counts factorizations with Krylov reuse against a run that factorizes
//! `A - zB` at every quadrature node.
//!
//!     cargo run --release --example shift_amortization

use std::time::Instant;

use rimc::config::Config;
use rimc::region::Bounds;
use rimc::search::search;
use rimc::synthetic::{synth_pencil, SyntheticSpec, Transform};
use rimc::Complex64 as C64;

fn main() -> rimc::Result<()> {
    let spec = SyntheticSpec {
        eigenvalues: (0..80)
            .map(|k| C64::new(0.25 * k as f64, 0.5 * (1.3 * k as f64).cos()))
            .collect(),
        infinite_count: 0,
        transform: Transform::GivensSimilarity { seed: 2, rotations: 120 },
    };
    let p = synth_pencil(&spec);
    let bounds = Bounds::new(4.1, 5.9, -0.9, 0.9).expect("valid rectangle");

    for reuse in [true, false] {
        let cfg = Config { d0: 1e-6, krylov_reuse: reuse, ..Config::default() };
        let start = Instant::now();
        let out = search(&p, &bounds, &cfg)?;
        println!(
            "reuse {:5}: {} eigenvalues, {:6} factorizations, {:6} node solves, {:.2}s",
            reuse,
            out.estimates.len(),
            out.counters.factorizations,
            out.counters.node_solves,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
