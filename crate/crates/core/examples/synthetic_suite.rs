//! Runs the search on a batch of random Givens-transformed pencils with known
//! spectra and reports accuracy and solver statistics.
//!
//!     cargo run --release --example synthetic_suite -- [count] [first-seed]

use std::time::Instant;

use rimc::config::Config;
use rimc::region::Bounds;
use rimc::search::search;
use rimc::synthetic::{synth_pencil, RandomSpectrum};

fn main() -> rimc::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let count = args.next().flatten().unwrap_or(5);
    let first = args.next().flatten().unwrap_or(0);
    let domain = Bounds::new(0.0, 4.0, -2.0, 2.0).unwrap();
    let cfg = Config::default();
    for seed in first..first + count {
        let layout = RandomSpectrum {
            dim: 100 + (seed as usize * 37) % 101,
            interior: 10 + (seed as usize * 7) % 21,
            infinite_count: if seed % 3 == 0 { 10 } else { 0 },
            conjugate_pairs: seed % 4 == 1,
            domain,
            separation: 1e-2,
            margin: 1e-2,
            rotations: 200,
        };
        let spec = layout.sample(seed);
        let pencil = synth_pencil(&spec);
        let start = Instant::now();
        let out = search(&pencil, &domain, &cfg)?;
        let elapsed = start.elapsed().as_secs_f64();

        let mut truth = spec.eigenvalues_in(&domain);
        truth.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let matched = truth
            .iter()
            .filter(|t| out.estimates.iter().any(|e| (e.value - **t).norm() <= cfg.d0))
            .count();
        let worst = truth
            .iter()
            .map(|t| {
                out.estimates
                    .iter()
                    .map(|e| (e.value - t).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        println!(
            "seed {seed:2} n={:3} nnz(A)={:5} truth={:2} found={:2} matched={:2} worst={:.2e} \
             fact={:4} solves={:6} regions={:5} time={:.2}s",
            pencil.dim(),
            pencil.a().nnz(),
            truth.len(),
            out.estimates.len(),
            matched,
            worst,
            out.counters.factorizations,
            out.counters.node_solves,
            out.counters.regions,
            elapsed
        );
    }
    Ok(())
}
