//! Projection norms with 4 and 8 nodes and the resulting indicator on three
//! squares holding one, two and no eigenvalues, then the spread of the
//! indicator over 100 random probes.
//!
//!     cargo run --release --example indicator

use rimc::cache::ShiftCache;
use rimc::config::Config;
use rimc::pencil::random_probe;
use rimc::projector::indicator;
use rimc::synthetic::{synth_pencil, ThreeRegionBenchmark};

fn main() -> rimc::Result<()> {
    let bench = ThreeRegionBenchmark::new(40, 5);
    let p = synth_pencil(&bench.spec);
    let cfg = Config::default();
    let regions = [("S1", bench.one), ("S2", bench.two), ("S3", bench.empty)];

    let f = random_probe(p.dim(), cfg.seed)?;
    let cache = ShiftCache::new(cfg.shift_budget);
    let results = regions
        .iter()
        .map(|(_, r)| indicator(&p, &f, r, &cache, &cfg))
        .collect::<rimc::Result<Vec<_>>>()?;
    println!("n = {}, nnz(A) = {}", p.dim(), p.a().nnz());
    println!("{:>8} {:>16} {:>16} {:>16}", "nodes", "|Pf| S1", "|Pf| S2", "|Pf| S3");
    println!("{:>8} {:>16.12} {:>16.12} {:>16.12}", 4, results[0].coarse_norm, results[1].coarse_norm, results[2].coarse_norm);
    println!("{:>8} {:>16.12} {:>16.12} {:>16.12}", 8, results[0].fine_norm, results[1].fine_norm, results[2].fine_norm);
    println!("{:>8} {:>16.6} {:>16.6} {:>16.6}", "δ", results[0].value, results[1].value, results[2].value);

    println!();
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "", "mean", "min", "max", "std");
    for (name, r) in &regions {
        let values = (0..100)
            .map(|seed| {
                // bases depend on the probe, so each probe gets its own cache
                let cache = ShiftCache::new(cfg.shift_budget);
                Ok(indicator(&p, &random_probe(p.dim(), seed)?, r, &cache, &cfg)?.value)
            })
            .collect::<rimc::Result<Vec<f64>>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(0.0, f64::max);
        println!("{name:>4} {mean:>10.6} {min:>10.6} {max:>10.6} {:>10.6}", var.sqrt());
    }
    Ok(())
}
